#include "nlbi/verify.hpp"

#include "nlbi/emd.hpp"
#include "nlbi/oracle.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace nlbi {

namespace {

bool within(double a, double b, double tol) { return std::abs(a - b) <= tol; }

bool below(double lower, double upper) { return lower <= upper + 1e-6 * std::max(1.0, std::abs(upper)); }

}  // namespace

VerifyReport verify_index(const Index& index, const IndexFileLayout* layout, const VerifyOptions& options) {
    VerifyReport report;
    auto check = [&](bool ok, const std::string& what) {
        (ok ? report.passed : report.failures).push_back(what);
    };
    const auto projections = index.projections();
    const std::size_t n = index.size();
    const std::size_t s = index.sub_intervals();

    // Structure.
    for (std::size_t j = 0; j < projections.size(); ++j) {
        const auto& proj = projections[j];
        const auto problems = audit_quadtree(proj.tree, proj.points, proj.summaries);
        std::string detail;
        for (std::size_t i = 0; i < problems.size() && i < 5; ++i) {
            detail += "; " + problems[i];
        }
        check(problems.empty(), "projection " + std::to_string(j) + ": quad-tree audit" + detail);

        double norm = 0.0;
        for (double c : proj.vector.components) {
            norm += c * c;
        }
        check(within(std::sqrt(norm), 1.0, 1e-12), "projection " + std::to_string(j) + ": unit direction");
        check(proj.vector.t_min < 0.0 && proj.vector.t_max > 0.0,
              "projection " + std::to_string(j) + ": centered range contains 0");
        check(proj.grid.count() == s, "projection " + std::to_string(j) + ": sub-interval count");
        for (std::size_t a = 0; a < j; ++a) {
            double dot = 0.0;
            for (std::size_t c = 0; c < index.dim(); ++c) {
                dot += proj.vector.components[c] * projections[a].vector.components[c];
            }
            check(std::abs(dot) <= 1e-9,
                  "projections " + std::to_string(a) + " and " + std::to_string(j) + ": orthogonal");
        }
    }

    // Space accounting.
    const std::uint64_t expected = summary_table_reals(index) * sizeof(double);
    {
        std::ostringstream msg;
        msg << "summary table: N=" << n << " P=" << projections.size() << " s=" << s << ", expected "
            << expected << " bytes";
        bool ok = true;
        if (layout) {
            msg << ", file declares " << layout->summary_table_bytes << " and holds " << layout->summary_bytes_read;
            ok = layout->summary_table_bytes == expected && layout->summary_bytes_read == expected;
        }
        check(ok, msg.str());
    }

    // Summaries reproduce from the stored objects.
    {
        std::size_t bad = 0;
        std::string first;
        for (std::size_t j = 0; j < projections.size(); ++j) {
            const auto& proj = projections[j];
            for (std::size_t i = 0; i < n; ++i) {
                const NormalSummary fresh = summarize(project(index.object(i), proj.vector), proj.grid, 0);
                const NormalSummary& stored = proj.summaries[i];
                bool ok = within(fresh.normal.mu, stored.normal.mu, 1e-9) &&
                          within(fresh.normal.sigma, stored.normal.sigma, 1e-9) &&
                          within(fresh.errors.err_full, stored.errors.err_full, 1e-9) &&
                          stored.object_id == index.object(i).id();
                for (std::size_t c = 0; ok && c < s; ++c) {
                    ok = within(fresh.errors.err_min[c], stored.errors.err_min[c], 1e-9) &&
                         within(fresh.errors.err_max[c], stored.errors.err_max[c], 1e-9) &&
                         stored.errors.err_min[c] <= stored.errors.err_max[c];
                }
                if (!ok && bad++ == 0) {
                    first = " (first: object " + std::to_string(index.object(i).id()) + ", projection " +
                            std::to_string(j) + ")";
                }
            }
        }
        check(bad == 0, "stored summaries match recomputation within 1e-9: " + std::to_string(bad) +
                            " mismatches" + first);
    }

    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);

    // Bound chain on sampled pairs.
    if (n >= 2 && options.bound_pairs > 0) {
        std::size_t violations = 0;
        for (std::size_t t = 0; t < options.bound_pairs; ++t) {
            const std::size_t a = pick(rng);
            const std::size_t b = pick(rng);
            const double exact = exact_emd(index.object(a), index.object(b));
            std::vector<double> proj_bounds;
            std::vector<double> normal_bounds;
            for (const auto& proj : projections) {
                const auto pa = project(index.object(a), proj.vector);
                const auto pb = project(index.object(b), proj.vector);
                const double pe = projection_emd(pa, pb);
                const double lb = emd_lb(proj.summaries[a], proj.summaries[b], proj.grid);
                if (!below(lb, pe) || !below(pe, exact)) {
                    ++violations;
                }
                if (!within(pe, oracle_emd_1d(pa, pb), 1e-9)) {
                    ++violations;
                }
                proj_bounds.push_back(pe);
                normal_bounds.push_back(lb);
            }
            if (!below(combine_projection_bounds(normal_bounds), combine_projection_bounds(proj_bounds)) ||
                !below(combine_projection_bounds(proj_bounds), exact)) {
                ++violations;
            }
        }
        check(violations == 0, "bound chain on " + std::to_string(options.bound_pairs) +
                                   " sampled pairs: " + std::to_string(violations) + " violations");
    }

    // Error extrema against the dense-sampling oracle.
    if (options.extrema_objects > 0) {
        std::size_t bad = 0;
        for (std::size_t t = 0; t < options.extrema_objects; ++t) {
            const std::size_t i = pick(rng);
            for (const auto& proj : projections) {
                const auto& sm = proj.summaries[i];
                const auto ex = oracle_error_extrema(project(index.object(i), proj.vector), sm.normal, proj.grid,
                                                     options.extrema_samples);
                for (std::size_t c = 0; c < s; ++c) {
                    // Sampling can only miss extrema, so the oracle lies inside the envelope.
                    const double tol = 1e-6 + (proj.grid.t_max() - proj.grid.t_min()) / options.extrema_samples;
                    if (ex.err_min[c] < sm.errors.err_min[c] - 1e-6 || ex.err_max[c] > sm.errors.err_max[c] + 1e-6 ||
                        !within(ex.err_min[c], sm.errors.err_min[c], tol) ||
                        !within(ex.err_max[c], sm.errors.err_max[c], tol)) {
                        ++bad;
                    }
                }
            }
        }
        check(bad == 0, "error extrema agree with the sampling oracle on " + std::to_string(options.extrema_objects) +
                            " objects: " + std::to_string(bad) + " mismatches");
    }

    // K-NN against the linear scan.
    if (options.knn_queries > 0) {
        const std::size_t k = std::min<std::size_t>(4, n);
        std::size_t bad = 0;
        for (std::size_t t = 0; t < options.knn_queries; ++t) {
            const auto& query = index.object(pick(rng));
            const auto fast = knn(index, query, k).result;
            const auto slow = oracle_knn(index.objects(), query, k, options.threads);
            bool same = fast.neighbors.size() == slow.neighbors.size();
            for (std::size_t r = 0; same && r < k; ++r) {
                same = fast.neighbors[r].object_id == slow.neighbors[r].object_id &&
                       within(fast.neighbors[r].distance, slow.neighbors[r].distance, 1e-9);
            }
            bad += same ? 0 : 1;
        }
        check(bad == 0, "knn matches the linear scan on " + std::to_string(options.knn_queries) +
                            " stored objects: " + std::to_string(bad) + " mismatches");
    }
    return report;
}

}  // namespace nlbi
