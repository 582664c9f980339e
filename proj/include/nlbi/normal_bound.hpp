#pragma once

#include "nlbi/projection.hpp"

#include <optional>
#include <span>
#include <vector>

namespace nlbi {

struct NormalParams {
    double mu = 0.0;
    double sigma = 1.0;

    friend bool operator==(const NormalParams&, const NormalParams&) = default;
};

/// Smallest standard deviation assigned to a fitted normal on [t_min, t_max].
double sigma_floor(double t_min, double t_max);

/// Mean and standard deviation of the projected points; sigma floored at sigma_floor.
NormalParams fit_normal(const ProjectedDistribution& p);

double normal_cdf(const NormalParams& n, double t);

/// Integral of the normal CDF over [a, b], closed form.
double normal_cdf_area(double mu, double sigma, double a, double b);

/// Crossing point of two normal CDFs; none when the standard deviations agree
/// within 1e-12 (the CDFs then never cross unless identical).
std::optional<double> intersection_point(const NormalParams& a, const NormalParams& b);

/// L1 distance between two normal CDFs restricted to [t_min, t_max]. O(1).
double emd_normal(const NormalParams& a, const NormalParams& b, double t_min, double t_max);

/// Integral of (Φ_a − Φ_b)^+ over [t_min, t_max].
double normal_excess(const NormalParams& a, const NormalParams& b, double t_min, double t_max);

/**
 * @brief s even sub-intervals of [t_min, t_max].
 *
 * Sub-interval i is (b_i, b_{i+1}]; grids with s and k*s intervals share the
 * coarse boundaries bit for bit.
 */
class SubIntervalGrid {
public:
    SubIntervalGrid(std::size_t count, double t_min, double t_max);

    std::size_t count() const noexcept { return boundaries_.size() - 1; }
    std::span<const double> boundaries() const noexcept { return boundaries_; }
    double t_min() const noexcept { return boundaries_.front(); }
    double t_max() const noexcept { return boundaries_.back(); }

    /// Index i with b_i < t <= b_{i+1}; none for t <= t_min or t > t_max.
    std::optional<std::size_t> locate(double t) const;

    friend bool operator==(const SubIntervalGrid&, const SubIntervalGrid&) = default;

private:
    std::vector<double> boundaries_;
};

/// Default sub-interval count for a bin count n: round(ln n), at least 1.
std::size_t default_sub_intervals(std::size_t bins);

/**
 * Extrema of D(t) = ∫_{t_min}^{t} Err − ∫_{t}^{t_max} Err over each
 * sub-interval, where Err = C − Φ is the signed approximation error, plus
 * err_full = ∫_{t_min}^{t_max} Err.
 */
struct ErrorProfile {
    std::vector<double> err_min;
    std::vector<double> err_max;
    double err_full = 0.0;
};

ErrorProfile precompute_errors(const ProjectedDistribution& p, const NormalParams& normal,
                               const SubIntervalGrid& grid);

/// Fitted normal and error profile of one object on one projection.
struct NormalSummary {
    ObjectId object_id = 0;
    NormalParams normal;
    ErrorProfile errors;
    // min_i err_min[i] and max_i err_max[i]
    double lowest_err_min = 0.0;
    double highest_err_max = 0.0;

    NormalSummary() = default;
    NormalSummary(ObjectId id, NormalParams normal, ErrorProfile errors);

    std::size_t sub_intervals() const noexcept { return errors.err_min.size(); }
};

NormalSummary summarize(const ProjectedDistribution& p, const SubIntervalGrid& grid, ObjectId id);

/// Normal lower bound on the projected EMD between the owners of two summaries. O(1).
double emd_lb(const NormalSummary& p, const NormalSummary& q, const SubIntervalGrid& grid);

}  // namespace nlbi
