#include "helpers.hpp"

#include "nlbi/emd.hpp"
#include "nlbi/oracle.hpp"
#include "nlbi/projection.hpp"
#include "nlbi/synthetic.hpp"

#include <doctest.h>

using namespace nlbi;
using testing_support::random_distribution;

namespace {

ProjectionVector axis_frame(std::vector<double> components, double center, double t_min, double t_max) {
    ProjectionVector s;
    s.components = std::move(components);
    s.center = center;
    s.t_min = t_min;
    s.t_max = t_max;
    return s;
}

double weighted_variance_along(std::span<const DiscreteDistribution> data, const std::vector<double>& dir) {
    double mean = 0.0;
    for (const auto& p : data) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            mean += p.weights()[i] * (dir[0] * p.bin(i)[0] + dir[1] * p.bin(i)[1]);
        }
    }
    mean /= static_cast<double>(data.size());
    double var = 0.0;
    for (const auto& p : data) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double t = dir[0] * p.bin(i)[0] + dir[1] * p.bin(i)[1] - mean;
            var += p.weights()[i] * t * t;
        }
    }
    return var;
}

}  // namespace

TEST_SUITE("projection selection") {
    TEST_CASE("bins on the x-axis select the x-axis") {
        std::mt19937_64 rng(1);
        std::vector<DiscreteDistribution> data;
        for (int i = 0; i < 20; ++i) {
            std::vector<double> coords;
            std::vector<double> weights;
            for (int b = 0; b < 4; ++b) {
                coords.insert(coords.end(), {std::uniform_real_distribution<double>(-3, 3)(rng), 0.0, 0.0});
                weights.push_back(0.25);
            }
            data.emplace_back(i, 3, coords, weights);
        }
        const auto s = select_projections(data, 1);
        REQUIRE(s.size() == 1);
        CHECK(s[0].components[0] == doctest::Approx(1.0));
        CHECK(std::abs(s[0].components[1]) < 1e-12);
        CHECK(std::abs(s[0].components[2]) < 1e-12);
    }

    TEST_CASE("count = d gives pairwise orthogonal unit vectors with a centered range") {
        std::mt19937_64 rng(2);
        std::vector<DiscreteDistribution> data;
        for (int i = 0; i < 40; ++i) {
            data.push_back(random_distribution(rng, 4, 6, i));
        }
        const auto s = select_projections(data, 4);
        REQUIRE(s.size() == 4);
        for (std::size_t a = 0; a < 4; ++a) {
            double norm = 0.0;
            for (double c : s[a].components) {
                norm += c * c;
            }
            CHECK(std::abs(std::sqrt(norm) - 1.0) <= 1e-12);
            CHECK(s[a].t_min < 0.0);
            CHECK(s[a].t_max > 0.0);
            const auto largest = std::max_element(s[a].components.begin(), s[a].components.end(),
                                                  [](double x, double y) { return std::abs(x) < std::abs(y); });
            CHECK(*largest > 0.0);
            for (std::size_t b = 0; b < a; ++b) {
                double dot = 0.0;
                for (std::size_t k = 0; k < 4; ++k) {
                    dot += s[a].components[k] * s[b].components[k];
                }
                CHECK(std::abs(dot) <= 1e-9);
            }
        }
    }

    TEST_CASE("the first component explains at least as much variance as the second") {
        CorpusSpec recipe;
        recipe.count = 300;
        recipe.layout = BinLayout::Scattered;
        const auto data = generate_synthetic(recipe, 8);
        const auto s = select_projections(data, 2);
        CHECK(weighted_variance_along(data, s[0].components) >= weighted_variance_along(data, s[1].components));
    }

    TEST_CASE("count above the dimension is an input error") {
        std::mt19937_64 rng(3);
        const std::vector<DiscreteDistribution> data{random_distribution(rng, 2, 3)};
        CHECK_THROWS_AS(select_projections(data, 3), InputError);
        CHECK_THROWS_AS(select_projections(data, 0), InputError);
        CHECK_THROWS_AS(select_projections({}, 1), InputError);
    }

    TEST_CASE("a zero-variance cloud falls back to canonical axes") {
        const std::vector<DiscreteDistribution> data{DiscreteDistribution(0, 2, {1, 1}, {1}),
                                                     DiscreteDistribution(1, 2, {1, 1}, {1})};
        const auto s = select_projections(data, 2);
        CHECK(s[0].components == std::vector<double>{1, 0});
        CHECK(s[1].components == std::vector<double>{0, 1});
        CHECK(s[0].t_min < 0.0);
        CHECK(s[0].t_max > 0.0);
    }
}

TEST_SUITE("project") {
    TEST_CASE("a single bin projects to one point of weight one") {
        const DiscreteDistribution p(0, 2, {3, 4}, {1});
        const auto s = axis_frame({0.6, 0.8}, 1.0, -10, 10);
        const auto pp = project(p, s);
        REQUIRE(pp.points().size() == 1);
        CHECK(pp.points()[0].t == doctest::Approx(4.0));
        CHECK(pp.points()[0].weight == 1.0);
    }

    TEST_CASE("projecting on e1 picks out the first coordinate") {
        const DiscreteDistribution p(0, 2, {0, 5, 1, 7}, {0.3, 0.7});
        const auto pp = project(p, axis_frame({1, 0}, 0.0, -1, 2));
        REQUIRE(pp.points().size() == 2);
        CHECK(pp.points()[0].t == 0.0);
        CHECK(pp.points()[0].weight == doctest::Approx(0.3));
        CHECK(pp.points()[1].t == 1.0);
        CHECK(pp.points()[1].weight == doctest::Approx(0.7));
    }

    TEST_CASE("bins projecting to the same location merge") {
        const DiscreteDistribution p(0, 2, {1, 0, 1, 5, 2, 2}, {0.2, 0.3, 0.5});
        const auto pp = project(p, axis_frame({1, 0}, 0.0, -1, 3));
        REQUIRE(pp.points().size() == 2);
        CHECK(pp.points()[0].weight == doctest::Approx(0.5));
        CHECK(pp.cdf(1.0) == doctest::Approx(0.5));
        CHECK(pp.cdf(0.5) == 0.0);
        CHECK(pp.cdf(2.0) == doctest::Approx(1.0));
    }

    TEST_CASE("dimension mismatch is an input error") {
        const DiscreteDistribution p(0, 3, {0, 0, 0}, {1});
        CHECK_THROWS_AS(project(p, axis_frame({1, 0}, 0.0, -1, 1)), InputError);
    }
}

TEST_SUITE("projection_emd") {
    const auto frame = axis_frame({1.0}, 0.0, -1.0, 4.0);

    TEST_CASE("identical projections are at distance zero") {
        std::mt19937_64 rng(4);
        const auto p = project(random_distribution(rng, 1, 7), frame);
        CHECK(projection_emd(p, p) == 0.0);
    }

    TEST_CASE("bins {0,1,3} give 1.5") {
        const auto p = project(DiscreteDistribution(0, 1, {0, 1, 3}, {0.5, 0.5, 0}), frame);
        const auto q = project(DiscreteDistribution(1, 1, {0, 1, 3}, {0, 0.5, 0.5}), frame);
        CHECK(std::abs(projection_emd(p, q) - 1.5) <= 1e-12);
    }

    TEST_CASE("point masses are |a - b| apart") {
        const auto p = project(DiscreteDistribution(0, 1, {-0.75}, {1}), frame);
        const auto q = project(DiscreteDistribution(1, 1, {2.5}, {1}), frame);
        CHECK(projection_emd(p, q) == doctest::Approx(3.25));
    }

    TEST_CASE("mixing projections is an input error") {
        const auto other = axis_frame({1.0}, 0.5, -1.0, 4.0);
        const DiscreteDistribution p(0, 1, {0}, {1});
        CHECK_THROWS_AS(projection_emd(project(p, frame), project(p, other)), InputError);
    }

    TEST_CASE("combine_projection_bounds") {
        const std::vector<double> one{2.0};
        const std::vector<double> two{1.0, 2.0};
        const std::vector<double> zeros{0.0, 0.0, 0.0};
        CHECK(combine_projection_bounds(one) == doctest::Approx(2.0));
        CHECK(combine_projection_bounds(two) == doctest::Approx(2.1213203).epsilon(1e-7));
        CHECK(combine_projection_bounds(zeros) == 0.0);
        CHECK_THROWS_AS(combine_projection_bounds({}), InputError);
    }

    TEST_CASE("single and combined projection bounds never exceed the exact EMD") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
        for (int t = 0; t < 200; ++t) {
            const auto p = random_distribution(rng, 2, 1 + rng() % 16, 0);
            const auto q = random_distribution(rng, 2, 1 + rng() % 16, 1);
            const std::vector<DiscreteDistribution> pair{p, q};
            const double a = angle(rng);
            const auto s1 = make_projection(pair, {std::cos(a), std::sin(a)});
            const auto s2 = make_projection(pair, {-std::sin(a), std::cos(a)});
            const double exact = exact_emd(p, q);
            const double b1 = projection_emd(project(p, s1), project(q, s1));
            const double b2 = projection_emd(project(p, s2), project(q, s2));
            CHECK(b1 <= exact + 1e-6);
            CHECK(b2 <= exact + 1e-6);
            const std::vector<double> both{b1, b2};
            CHECK(combine_projection_bounds(both) <= exact + 1e-6);
        }
    }

    TEST_CASE("shifting every location leaves the distance unchanged") {
        std::mt19937_64 rng(6);
        for (int t = 0; t < 50; ++t) {
            const auto p = random_distribution(rng, 2, 1 + rng() % 10);
            const auto q = random_distribution(rng, 2, 1 + rng() % 10);
            const auto s = axis_frame({0.6, 0.8}, 0.0, -5, 5);
            const auto shifted = axis_frame({0.6, 0.8}, 1.7, -5, 5);
            CHECK(std::abs(projection_emd(project(p, s), project(q, s)) -
                           projection_emd(project(p, shifted), project(q, shifted))) <= 1e-9);
        }
    }

    TEST_CASE("agrees with the independent sweep oracle") {
        std::mt19937_64 rng(7);
        for (int t = 0; t < 200; ++t) {
            const auto s = axis_frame({0.6, 0.8}, 0.3, -2, 2);
            const auto p = project(random_distribution(rng, 2, 1 + rng() % 20), s);
            const auto q = project(random_distribution(rng, 2, 1 + rng() % 20), s);
            CHECK(std::abs(projection_emd(p, q) - oracle_emd_1d(p, q)) <= 1e-9);
        }
    }
}
