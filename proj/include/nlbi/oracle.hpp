#pragma once

#include "nlbi/query.hpp"

namespace nlbi {

// Brute-force reference implementations. They are slow on purpose and share no
// numeric kernels with the code they check.

/// 1-D EMD by sweeping the merged, sorted breakpoints of both distributions and
/// summing |running mass difference| times the gap to the next breakpoint.
double oracle_emd_1d(const ProjectedDistribution& p, const ProjectedDistribution& q);

/// exact_emd to every object, sorted by (distance, id), first k kept.
QueryResult oracle_knn(std::span<const DiscreteDistribution> dataset, const DiscreteDistribution& query,
                       std::size_t k, std::size_t threads = 1);

struct ErrorExtrema {
    std::vector<double> err_min;
    std::vector<double> err_max;
};

/// Extrema of D(t) = ∫_{t_min}^{t} Err − ∫_{t}^{t_max} Err sampled on a uniform
/// grid of `samples` points per sub-interval (plus the step breakpoints), with
/// the integral of the normal CDF by composite Simpson quadrature.
ErrorExtrema oracle_error_extrema(const ProjectedDistribution& p, const NormalParams& normal,
                                  const SubIntervalGrid& grid, std::size_t samples = 100000);

/// Integral of the N(mu, sigma) CDF over [a, b] by adaptive Simpson quadrature.
double oracle_cdf_area(double mu, double sigma, double a, double b, double tolerance = 1e-12);

}  // namespace nlbi
