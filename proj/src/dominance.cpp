#include "nlbi/dominance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace nlbi {

namespace {

constexpr double kDominanceSlack = 1e-12;

// Slack used when dispatching emd_br cases in sheared coordinates. Points this
// close to a box face are treated as touching it, which only selects a weaker
// (still valid) branch.
double shear_slack(double x) { return 1e-9 * (1.0 + std::abs(x)); }

}  // namespace

DominancePoint to_dominance_point(const NormalParams& n, double t_min, double t_max, ObjectId id) {
    DominancePoint p;
    p.m = 1.0 / n.sigma;
    p.b = -n.mu / n.sigma;
    p.u = (t_min - n.mu) / n.sigma;
    p.v = (t_max - n.mu) / n.sigma;
    p.object_id = id;
    return p;
}

std::optional<NormalParams> corner_to_normal(double u, double v, double t_min, double t_max) {
    const double m = (v - u) / (t_max - t_min);
    if (!(m > 1e-12)) {
        return std::nullopt;
    }
    const double b = u - m * t_min;
    return NormalParams{-b / m, 1.0 / m};
}

Dominance dominates(const DominancePoint& p, const DominancePoint& q) {
    if (q.u > p.u + kDominanceSlack && q.v > p.v + kDominanceSlack) {
        return Dominance::FirstDominates;
    }
    if (p.u > q.u + kDominanceSlack && p.v > q.v + kDominanceSlack) {
        return Dominance::SecondDominates;
    }
    return Dominance::Intersecting;
}

BoundingRegion build_bounding_region(std::span<const std::uint32_t> members,
                                     std::span<const DominancePoint> points,
                                     std::span<const NormalSummary> summaries) {
    if (members.empty()) {
        throw InputError("build_bounding_region: no members");
    }
    const std::size_t s = summaries[members.front()].sub_intervals();
    constexpr double inf = std::numeric_limits<double>::infinity();

    BoundingRegion r;
    r.u_lo = r.v_lo = inf;
    r.u_hi = r.v_hi = -inf;
    r.err_min.assign(s, inf);
    r.err_max.assign(s, -inf);
    r.err_full_min = inf;
    r.err_full_max = -inf;
    for (const std::uint32_t idx : members) {
        const auto& pt = points[idx];
        const auto& sm = summaries[idx];
        if (sm.sub_intervals() != s) {
            throw InputError("build_bounding_region: members use different grids");
        }
        r.u_lo = std::min(r.u_lo, pt.u);
        r.u_hi = std::max(r.u_hi, pt.u);
        r.v_lo = std::min(r.v_lo, pt.v);
        r.v_hi = std::max(r.v_hi, pt.v);
        for (std::size_t i = 0; i < s; ++i) {
            r.err_min[i] = std::min(r.err_min[i], sm.errors.err_min[i]);
            r.err_max[i] = std::max(r.err_max[i], sm.errors.err_max[i]);
        }
        r.err_full_min = std::min(r.err_full_min, sm.errors.err_full);
        r.err_full_max = std::max(r.err_full_max, sm.errors.err_full);
    }
    r.lowest_err_min = *std::min_element(r.err_min.begin(), r.err_min.end());
    r.highest_err_max = *std::max_element(r.err_max.begin(), r.err_max.end());
    r.member_count = static_cast<std::uint32_t>(members.size());
    return r;
}

BoundingRegion build_bounding_region(std::span<const DominancePoint> points,
                                     std::span<const NormalSummary> summaries) {
    if (points.size() != summaries.size()) {
        throw InputError("build_bounding_region: points and summaries differ in length");
    }
    std::vector<std::uint32_t> members(points.size());
    std::iota(members.begin(), members.end(), 0u);
    return build_bounding_region(members, points, summaries);
}

RegionCase classify(const BoundingRegion& r, const DominancePoint& q) {
    const bool above_u = q.u > r.u_hi + shear_slack(r.u_hi);
    const bool below_u = q.u < r.u_lo - shear_slack(r.u_lo);
    const bool above_v = q.v > r.v_hi + shear_slack(r.v_hi);
    const bool below_v = q.v < r.v_lo - shear_slack(r.v_lo);
    const bool beyond_u = above_u || below_u;
    const bool beyond_v = above_v || below_v;
    if (!beyond_u && !beyond_v) {
        return RegionCase::Inside;
    }
    if (beyond_u != beyond_v) {
        return RegionCase::PartialDominance;
    }
    return (above_u == above_v) ? RegionCase::CompleteDominance : RegionCase::NoDominance;
}

double emd_br(const BoundingRegion& r, const NormalSummary& q, const DominancePoint& qp,
              const SubIntervalGrid& grid) {
    if (r.err_min.size() != grid.count() || q.sub_intervals() != grid.count()) {
        throw InputError("emd_br: region or query does not match the sub-interval grid");
    }
    const double a = grid.t_min();
    const double b = grid.t_max();
    const auto lower = corner_to_normal(r.u_lo, r.v_lo, a, b);  // M_l
    const auto upper = corner_to_normal(r.u_hi, r.v_hi, a, b);  // M_u
    const RegionCase kind = classify(r, qp);

    if (kind == RegionCase::CompleteDominance && lower && upper) {
        // Every member lies strictly on one side of Q over the whole range, so
        // every member's bound uses the whole-range error integrals.
        if (qp.u > r.u_hi) {
            const double normal = emd_normal(*upper, q.normal, a, b);
            return std::max(0.0, normal - r.err_full_max + q.errors.err_full);
        }
        const double normal = emd_normal(*lower, q.normal, a, b);
        return std::max(0.0, normal + r.err_full_min - q.errors.err_full);
    }

    // Members left-below Q at t_min take the (−M, +Q) error pattern, members
    // left-above take (+M, −Q).
    const double slack = shear_slack(qp.u);
    const bool below_left = r.u_lo <= qp.u + slack;
    const bool above_left = r.u_hi >= qp.u - slack;
    double error = std::numeric_limits<double>::infinity();
    if (below_left) {
        error = std::min(error, -r.highest_err_max + q.lowest_err_min);
    }
    if (above_left) {
        error = std::min(error, r.lowest_err_min - q.highest_err_max);
    }

    double normal = 0.0;
    if ((kind == RegionCase::PartialDominance || kind == RegionCase::NoDominance) && lower && upper) {
        auto triangle = [&](const NormalParams& corner, const std::optional<NormalParams>& mid) {
            if (!mid) {
                return 0.0;
            }
            return 0.5 * (emd_normal(corner, q.normal, a, b) + emd_normal(*mid, q.normal, a, b) -
                          emd_normal(*mid, corner, a, b));
        };
        const bool above_u = qp.u > r.u_hi + shear_slack(r.u_hi);
        const bool below_u = qp.u < r.u_lo - shear_slack(r.u_lo);
        const bool above_v = qp.v > r.v_hi + shear_slack(r.v_hi);
        double tri = 0.0;
        if (kind == RegionCase::PartialDominance) {
            std::optional<NormalParams> mid;
            bool toward_upper = false;
            if (above_u || below_u) {
                const double edge = above_u ? r.u_hi : r.u_lo;
                mid = corner_to_normal(edge, std::clamp(qp.v, r.v_lo, r.v_hi), a, b);
                toward_upper = above_u;
            } else {
                const double edge = above_v ? r.v_hi : r.v_lo;
                mid = corner_to_normal(std::clamp(qp.u, r.u_lo, r.u_hi), edge, a, b);
                toward_upper = above_v;
            }
            tri = triangle(toward_upper ? *upper : *lower, mid);
        } else {
            const auto mid = above_u ? corner_to_normal(r.u_hi, r.v_lo, a, b)
                                     : corner_to_normal(r.u_lo, r.v_hi, a, b);
            tri = mid ? std::min(triangle(*lower, mid), triangle(*upper, mid)) : 0.0;
        }
        // Every member's CDF lies between Φ_{M_l} and Φ_{M_u} pointwise.
        const double envelope = normal_excess(*lower, q.normal, a, b) + normal_excess(q.normal, *upper, a, b);
        normal = std::max({0.0, tri, envelope});
    }
    return std::max(0.0, normal + error);
}

}  // namespace nlbi
