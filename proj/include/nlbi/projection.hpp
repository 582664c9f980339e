#pragma once

#include "nlbi/distribution.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace nlbi {

/**
 * @brief Unit direction in R^d plus the frame every projection onto it shares.
 *
 * center is the dataset mean of projected bin locations; [t_min, t_max] is the
 * dataset-global projected range after subtracting it, so t_min < 0 < t_max.
 */
struct ProjectionVector {
    std::vector<double> components;
    double center = 0.0;
    double t_min = -1.0;
    double t_max = 1.0;

    /// Bit-level fingerprint used to detect mixing projections from different frames.
    std::uint64_t fingerprint() const;

    friend bool operator==(const ProjectionVector&, const ProjectionVector&) = default;
};

struct ProjectedPoint {
    double t;
    double weight;
};

/**
 * @brief 1-D distribution on a projection: strictly increasing locations with
 * weights summing to one, plus the global range of its frame.
 */
class ProjectedDistribution {
public:
    /// Sorts, merges equal locations and checks weights.
    ProjectedDistribution(std::vector<ProjectedPoint> points, double t_min, double t_max,
                          std::uint64_t frame = 0);

    std::span<const ProjectedPoint> points() const noexcept { return points_; }
    double t_min() const noexcept { return t_min_; }
    double t_max() const noexcept { return t_max_; }
    std::uint64_t frame() const noexcept { return frame_; }

    /// Right-continuous step CDF.
    double cdf(double t) const;

private:
    std::vector<ProjectedPoint> points_;
    double t_min_;
    double t_max_;
    std::uint64_t frame_;
};

/// Default number of projections: 2 when d >= 2, else 1.
std::size_t default_projection_count(std::size_t dim);

/**
 * Top principal components of the mass-weighted bin cloud, each with its
 * centering constant and range. Signs are fixed so the largest-magnitude
 * component is positive. A zero-variance cloud falls back to canonical axes.
 */
std::vector<ProjectionVector> select_projections(std::span<const DiscreteDistribution> dataset,
                                                 std::size_t count);

/// Builds a frame for a caller-chosen direction: normalizes it and derives
/// center and range from the dataset.
ProjectionVector make_projection(std::span<const DiscreteDistribution> dataset,
                                 std::vector<double> direction);

ProjectedDistribution project(const DiscreteDistribution& p, const ProjectionVector& s);

/// 1-D EMD: L1 distance between the two step CDFs, O(n + m).
double projection_emd(const ProjectedDistribution& p, const ProjectedDistribution& q);

/// (1/sqrt(d')) * sum of per-projection bounds over d' orthogonal directions.
double combine_projection_bounds(std::span<const double> bounds);

}  // namespace nlbi
