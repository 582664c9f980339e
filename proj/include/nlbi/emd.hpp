#pragma once

#include "nlbi/distribution.hpp"

#include <vector>

namespace nlbi {

/**
 * @brief Optimal transport plan between two distributions, with its dual
 * certificate.
 *
 * flow is row-major (rows index the first distribution's bins). The duals
 * satisfy row_dual[i] + col_dual[j] <= cost(i, j) and their weighted sum equals
 * the primal cost at optimality.
 */
struct TransportPlan {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> flow;
    std::vector<double> row_dual;
    std::vector<double> col_dual;
    double cost = 0.0;

    double at(std::size_t i, std::size_t j) const { return flow[i * cols + j]; }
};

/// Minimum-cost transport under the L2 ground distance, total flow forced to one.
TransportPlan solve_transport(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// Earth Mover's Distance between two normalized distributions in the same R^d.
double exact_emd(const DiscreteDistribution& p, const DiscreteDistribution& q);

}  // namespace nlbi
