#include "helpers.hpp"

#include "nlbi/normal_bound.hpp"
#include "nlbi/oracle.hpp"

#include <doctest.h>

using namespace nlbi;
using testing_support::integrate;
using testing_support::random_distribution;
using testing_support::std_normal_cdf;

namespace {

ProjectionVector line_frame(double t_min, double t_max) {
    ProjectionVector s;
    s.components = {1.0};
    s.t_min = t_min;
    s.t_max = t_max;
    return s;
}

ProjectedDistribution points(std::vector<ProjectedPoint> pts, double t_min, double t_max) {
    return {std::move(pts), t_min, t_max, line_frame(t_min, t_max).fingerprint()};
}

// Random 1-D distribution on the frame [-2, 2], bins inside the range.
ProjectedDistribution random_line(std::mt19937_64& rng, std::size_t n, double spread = 1.0) {
    std::uniform_real_distribution<double> loc(-spread, spread);
    const double shift = std::uniform_real_distribution<double>(-0.8, 0.8)(rng);
    std::vector<ProjectedPoint> pts;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
        pts.push_back({std::clamp(shift + loc(rng), -2.0, 2.0), w});
        total += w;
    }
    for (auto& p : pts) {
        p.weight /= total;
    }
    return points(std::move(pts), -2.0, 2.0);
}

// D(t) evaluated by brute force from its definition.
double direct_d(const ProjectedDistribution& p, const NormalParams& n, double t) {
    auto err = [&](double x) { return p.cdf(x) - std_normal_cdf(n.mu, n.sigma, x); };
    return integrate(err, p.t_min(), t, 1e-10) - integrate(err, t, p.t_max(), 1e-10);
}

}  // namespace

TEST_SUITE("fit_normal") {
    TEST_CASE("a point mass gets the sigma floor") {
        const auto p = points({{2.0, 1.0}}, -1.0, 3.0);
        const auto n = fit_normal(p);
        CHECK(n.mu == 2.0);
        CHECK(n.sigma == sigma_floor(-1.0, 3.0));
        CHECK(sigma_floor(-1.0, 3.0) == doctest::Approx(4e-6));
    }

    TEST_CASE("two symmetric points") {
        const auto n = fit_normal(points({{0.0, 0.5}, {1.0, 0.5}}, -1, 2));
        CHECK(n.mu == doctest::Approx(0.5));
        CHECK(n.sigma == doctest::Approx(0.5));
    }

    TEST_CASE("moments match a direct computation") {
        std::mt19937_64 rng(1);
        for (int t = 0; t < 50; ++t) {
            const auto p = random_line(rng, 1 + rng() % 20);
            double m1 = 0.0;
            double m2 = 0.0;
            for (const auto& pt : p.points()) {
                m1 += pt.weight * pt.t;
                m2 += pt.weight * pt.t * pt.t;
            }
            const auto n = fit_normal(p);
            CHECK(std::abs(n.mu - m1) <= 1e-12);
            CHECK(std::abs(n.sigma - std::max(std::sqrt(std::max(m2 - m1 * m1, 0.0)), sigma_floor(-2, 2))) <= 1e-7);
            CHECK(n.sigma >= sigma_floor(-2, 2));
        }
    }
}

TEST_SUITE("normal_cdf_area") {
    TEST_CASE("symmetric interval around the mean") {
        CHECK(std::abs(normal_cdf_area(0, 1, -2, 2) - 2.0) <= 1e-12);
    }

    TEST_CASE("standard normal over [0, 2]") {
        // Reference value from adaptive quadrature (scipy quad and mpmath agree to 1e-14).
        CHECK(std::abs(normal_cdf_area(0, 1, 0, 2) - 1.6095484222) <= 1e-6);
    }

    TEST_CASE("empty and reversed intervals") {
        CHECK(normal_cdf_area(0.3, 2.0, 1.5, 1.5) == 0.0);
        CHECK_THROWS_AS(normal_cdf_area(0, 1, 1, 0), InputError);
        CHECK_THROWS_AS(normal_cdf_area(0, 0, 0, 1), InputError);
    }

    TEST_CASE("matches adaptive quadrature for shifted and scaled normals") {
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(-5, 5);
        for (int t = 0; t < 200; ++t) {
            const double mu = u(rng);
            const double sigma = std::exp(std::uniform_real_distribution<double>(-3, 1.5)(rng));
            double a = u(rng);
            double b = u(rng);
            if (a > b) {
                std::swap(a, b);
            }
            CHECK(std::abs(normal_cdf_area(mu, sigma, a, b) - oracle_cdf_area(mu, sigma, a, b)) <= 1e-8);
        }
    }
}

TEST_SUITE("intersection and normal EMD") {
    TEST_CASE("intersection_point examples") {
        const auto t = intersection_point({0, 1}, {1, 2});
        REQUIRE(t.has_value());
        CHECK(*t == doctest::Approx(-1.0));
        CHECK_FALSE(intersection_point({0, 1}, {5, 1}).has_value());
        CHECK_FALSE(intersection_point({0.7, 1.3}, {0.7, 1.3}).has_value());
    }

    TEST_CASE("emd_normal of a normal with itself is zero") {
        CHECK(emd_normal({0.2, 0.7}, {0.2, 0.7}, -3, 3) == 0.0);
    }

    TEST_CASE("shifted unit normals match quadrature") {
        for (double c : {0.1, 0.5, 1.0, 2.5}) {
            const double q = integrate(
                [&](double x) { return std::abs(std_normal_cdf(0, 1, x) - std_normal_cdf(c, 1, x)); }, -10, 12);
            const double value = emd_normal({0, 1}, {c, 1}, -10, 12);
            CHECK(std::abs(value - q) <= 1e-8);
            CHECK(std::abs(value - c) <= 1e-6);
        }
    }

    TEST_CASE("(0,1) vs (1,2) over [-6, 6] matches quadrature split at -1") {
        auto f = [](double x) { return std::abs(std_normal_cdf(0, 1, x) - std_normal_cdf(1, 2, x)); };
        const double q = integrate(f, -6, -1) + integrate(f, -1, 6);
        CHECK(std::abs(emd_normal({0, 1}, {1, 2}, -6, 6) - q) <= 1e-8);
    }

    TEST_CASE("normal_excess splits the L1 distance into its two signs") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-1, 1);
        for (int t = 0; t < 50; ++t) {
            const NormalParams a{u(rng), std::exp(u(rng))};
            const NormalParams b{u(rng), std::exp(u(rng))};
            CHECK(std::abs(normal_excess(a, b, -3, 3) + normal_excess(b, a, -3, 3) - emd_normal(a, b, -3, 3)) <=
                  1e-12);
            CHECK(normal_excess(a, b, -3, 3) >= 0.0);
        }
    }
}

TEST_SUITE("sub-interval grid") {
    TEST_CASE("boundaries and lookup") {
        const SubIntervalGrid g(4, -1.0, 1.0);
        REQUIRE(g.boundaries().size() == 5);
        CHECK(g.boundaries().front() == -1.0);
        CHECK(g.boundaries().back() == 1.0);
        CHECK_FALSE(g.locate(-1.0).has_value());
        CHECK(*g.locate(-0.5) == 0);  // boundaries close on the right
        CHECK(*g.locate(-0.49) == 1);
        CHECK(*g.locate(1.0) == 3);
        CHECK_FALSE(g.locate(1.01).has_value());
        CHECK_THROWS_AS(SubIntervalGrid(0, -1, 1), InputError);
        CHECK_THROWS_AS(SubIntervalGrid(2, 1, 1), InputError);
    }

    TEST_CASE("coarse boundaries are exactly a subset of the fine grid") {
        const SubIntervalGrid coarse(3, -0.73, 1.19);
        const SubIntervalGrid fine(9, -0.73, 1.19);
        for (std::size_t i = 0; i <= 3; ++i) {
            CHECK(coarse.boundaries()[i] == fine.boundaries()[3 * i]);
        }
    }

    TEST_CASE("default sub-interval count is round(ln n)") {
        CHECK(default_sub_intervals(1) == 1);
        CHECK(default_sub_intervals(16) == 3);
        CHECK(default_sub_intervals(150) == 5);
        CHECK(default_sub_intervals(400) == 6);
    }
}

TEST_SUITE("precompute_errors") {
    TEST_CASE("a finely discretized normal has near-zero error extrema") {
        const NormalParams n{0.1, 0.4};
        const double a = -2.0;
        const double b = 2.0;
        std::vector<ProjectedPoint> pts;
        const int cells = 4000;
        double prev = std_normal_cdf(n.mu, n.sigma, a);
        pts.push_back({a, prev});
        for (int i = 1; i <= cells; ++i) {
            const double t = a + (b - a) * i / cells;
            const double c = i == cells ? 1.0 : std_normal_cdf(n.mu, n.sigma, t);
            pts.push_back({t, c - prev});
            prev = c;
        }
        const auto p = points(std::move(pts), a, b);
        const auto e = precompute_errors(p, n, SubIntervalGrid(5, a, b));
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(std::abs(e.err_min[i]) < (b - a) * 1e-3);
            CHECK(std::abs(e.err_max[i]) < (b - a) * 1e-3);
        }
        CHECK(std::abs(e.err_full) < (b - a) * 1e-3);
    }

    TEST_CASE("two-point distribution matches the dense-sampling oracle") {
        const auto p = points({{0.0, 0.5}, {1.0, 0.5}}, -1.0, 2.0);
        const auto n = fit_normal(p);
        const SubIntervalGrid grid(1, -1.0, 2.0);
        const auto e = precompute_errors(p, n, grid);
        const auto o = oracle_error_extrema(p, n, grid, 100000);
        CHECK(std::abs(e.err_min[0] - o.err_min[0]) <= 1e-6);
        CHECK(std::abs(e.err_max[0] - o.err_max[0]) <= 1e-6);
    }

    TEST_CASE("the envelope brackets D at every sub-interval midpoint") {
        std::mt19937_64 rng(4);
        for (int t = 0; t < 25; ++t) {
            const auto p = random_line(rng, 1 + rng() % 12);
            const auto n = fit_normal(p);
            const SubIntervalGrid grid(1 + rng() % 6, -2.0, 2.0);
            const auto e = precompute_errors(p, n, grid);
            for (std::size_t i = 0; i < grid.count(); ++i) {
                const double mid = 0.5 * (grid.boundaries()[i] + grid.boundaries()[i + 1]);
                const double d = direct_d(p, n, mid);
                CHECK(e.err_min[i] <= d + 1e-7);
                CHECK(d <= e.err_max[i] + 1e-7);
            }
            CHECK(std::abs(e.err_full - direct_d(p, n, 2.0)) <= 1e-7);
        }
    }

    TEST_CASE("grid and range must agree") {
        const auto p = points({{0.0, 1.0}}, -1.0, 1.0);
        CHECK_THROWS_AS(precompute_errors(p, fit_normal(p), SubIntervalGrid(2, -1.0, 2.0)), InputError);
    }
}

TEST_SUITE("emd_lb") {
    TEST_CASE("a summary against itself bounds at zero") {
        std::mt19937_64 rng(5);
        const SubIntervalGrid grid(4, -2, 2);
        for (int t = 0; t < 20; ++t) {
            const auto s = summarize(random_line(rng, 1 + rng() % 10), grid, 0);
            CHECK(emd_lb(s, s, grid) == 0.0);
        }
    }

    TEST_CASE("never exceeds the projection EMD, and is symmetric") {
        std::mt19937_64 rng(6);
        for (int t = 0; t < 2000; ++t) {
            const SubIntervalGrid grid(1 + rng() % 7, -2, 2);
            const auto p = random_line(rng, 1 + rng() % 30, std::uniform_real_distribution<double>(0.05, 1.2)(rng));
            const auto q = random_line(rng, 1 + rng() % 30, std::uniform_real_distribution<double>(0.05, 1.2)(rng));
            const auto sp = summarize(p, grid, 0);
            const auto sq = summarize(q, grid, 1);
            const double lb = emd_lb(sp, sq, grid);
            CHECK(lb <= projection_emd(p, q) + 1e-6);
            CHECK(std::abs(lb - emd_lb(sq, sp, grid)) <= 1e-9);
        }
    }

    TEST_CASE("equal variances take the whole-range error branch") {
        const SubIntervalGrid grid(3, -2, 2);
        std::mt19937_64 rng(7);
        for (int t = 0; t < 200; ++t) {
            const double c = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
            const double d = std::uniform_real_distribution<double>(0.05, 0.5)(rng);
            const double shift = std::uniform_real_distribution<double>(-0.9, 0.9)(rng);
            const auto p = points({{c - d, 0.5}, {c + d, 0.5}}, -2, 2);
            const auto q = points({{c - d + shift, 0.5}, {c + d + shift, 0.5}}, -2, 2);
            const auto sp = summarize(p, grid, 0);
            const auto sq = summarize(q, grid, 1);
            REQUIRE(std::abs(sp.normal.sigma - sq.normal.sigma) <= 1e-12);
            CHECK(emd_lb(sp, sq, grid) <= projection_emd(p, q) + 1e-6);
        }
    }

    TEST_CASE("refining the grid never loosens the bound") {
        std::mt19937_64 rng(8);
        for (int t = 0; t < 1000; ++t) {
            const std::size_t s = 1 + rng() % 4;
            const SubIntervalGrid coarse(s, -2, 2);
            const SubIntervalGrid fine(3 * s, -2, 2);
            const auto p = random_line(rng, 1 + rng() % 20);
            const auto q = random_line(rng, 1 + rng() % 20);
            CHECK(emd_lb(summarize(p, fine, 0), summarize(q, fine, 1), fine) >=
                  emd_lb(summarize(p, coarse, 0), summarize(q, coarse, 1), coarse) - 1e-9);
        }
    }

    TEST_CASE("error compensation against an exact normal stays below the true distance") {
        // Q is its own normal (zero error); P is wider-tailed below Q left of the crossing.
        std::mt19937_64 rng(9);
        int checked = 0;
        for (int t = 0; t < 400 && checked < 60; ++t) {
            const auto p = random_line(rng, 2 + rng() % 10, 0.4);
            const auto np = fit_normal(p);
            const NormalParams nq{np.mu + std::uniform_real_distribution<double>(-0.5, 0.5)(rng),
                                  np.sigma * std::uniform_real_distribution<double>(1.2, 3.0)(rng)};
            const auto cross = intersection_point(np, nq);
            if (!cross || !(*cross > -2.0 && *cross < 2.0)) {
                continue;
            }
            auto err = [&](double x) { return p.cdf(x) - std_normal_cdf(np.mu, np.sigma, x); };
            const double bound = emd_normal(np, nq, -2, 2) - integrate(err, -2, *cross, 1e-10) +
                                 integrate(err, *cross, 2, 1e-10);
            const double truth = integrate(
                [&](double x) { return std::abs(p.cdf(x) - std_normal_cdf(nq.mu, nq.sigma, x)); }, -2, 2, 1e-10);
            CHECK(bound <= truth + 1e-6);
            ++checked;
        }
        CHECK(checked >= 30);
    }

    TEST_CASE("mismatched grids are input errors") {
        const SubIntervalGrid a(2, -2, 2);
        const SubIntervalGrid b(3, -2, 2);
        const auto p = points({{0.0, 1.0}}, -2, 2);
        const auto sp = summarize(p, a, 0);
        CHECK_THROWS_AS(emd_lb(sp, sp, b), InputError);
    }
}
