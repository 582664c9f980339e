#pragma once

#include "nlbi/normal_bound.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace nlbi {

/**
 * @brief A fitted normal as a point in dominance space.
 *
 * The normal's standardized line z(t) = (t − mu)/sigma = m t + b is stored as
 * (m, b) and as its values at the range ends, u = z(t_min) and v = z(t_max).
 * In the sheared (u, v) coordinates dominance is componentwise order.
 */
struct DominancePoint {
    double m = 1.0;
    double b = 0.0;
    double u = 0.0;
    double v = 0.0;
    ObjectId object_id = 0;
};

DominancePoint to_dominance_point(const NormalParams& n, double t_min, double t_max, ObjectId id = 0);

/// Inverse of the shear: the normal whose line takes values u at t_min and v at
/// t_max. Invalid (none) when the slope is not positive.
std::optional<NormalParams> corner_to_normal(double u, double v, double t_min, double t_max);

enum class Dominance {
    FirstDominates,   ///< Φ_P < Φ_Q on the whole range (P ≺ Q)
    SecondDominates,  ///< Φ_Q < Φ_P on the whole range
    Intersecting
};

/// Strict test with 1e-12 slack toward Intersecting.
Dominance dominates(const DominancePoint& p, const DominancePoint& q);

/**
 * @brief Axis-aligned box in (u, v) around a set of dominance points, with the
 * members' error envelopes.
 *
 * Corner (u_lo, v_lo) is the normal M_l that dominates every member and
 * (u_hi, v_hi) is M_u, dominated by every member.
 */
struct BoundingRegion {
    double u_lo = 0.0;
    double u_hi = 0.0;
    double v_lo = 0.0;
    double v_hi = 0.0;
    std::vector<double> err_min;  // per sub-interval, min over members
    std::vector<double> err_max;  // per sub-interval, max over members
    double err_full_min = 0.0;
    double err_full_max = 0.0;
    double lowest_err_min = 0.0;
    double highest_err_max = 0.0;
    std::uint32_t member_count = 0;

    bool contains(double u, double v) const { return u >= u_lo && u <= u_hi && v >= v_lo && v <= v_hi; }
};

/// Tight box and error envelopes of the given members (indices into points/summaries).
BoundingRegion build_bounding_region(std::span<const std::uint32_t> members,
                                     std::span<const DominancePoint> points,
                                     std::span<const NormalSummary> summaries);

/// Same, for parallel arrays of points and summaries.
BoundingRegion build_bounding_region(std::span<const DominancePoint> points,
                                     std::span<const NormalSummary> summaries);

/// Case of emd_br's dispatch, exposed for tests and statistics.
enum class RegionCase {
    CompleteDominance,  ///< Q beyond the box in both coordinates, same side
    PartialDominance,   ///< Q beyond the box in exactly one coordinate
    NoDominance,        ///< Q beyond the box in both coordinates, opposite sides
    Inside              ///< Q within the box
};

RegionCase classify(const BoundingRegion& region, const DominancePoint& q);

/// Lower bound on emd_lb between the query and every member of the region. O(s).
double emd_br(const BoundingRegion& region, const NormalSummary& q, const DominancePoint& q_point,
              const SubIntervalGrid& grid);

}  // namespace nlbi
