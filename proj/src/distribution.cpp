#include "nlbi/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace nlbi {

DiscreteDistribution::DiscreteDistribution(ObjectId id, std::size_t dim, std::vector<double> coords,
                                           std::vector<double> weights, Normalization mode)
    : id_(id), dim_(dim) {
    if (dim == 0) {
        throw InputError("distribution " + std::to_string(id) + ": dimension must be positive");
    }
    if (weights.empty()) {
        throw InputError("distribution " + std::to_string(id) + ": no bins");
    }
    if (coords.size() != weights.size() * dim) {
        throw InputError("distribution " + std::to_string(id) + ": expected " +
                         std::to_string(weights.size() * dim) + " coordinates, got " +
                         std::to_string(coords.size()));
    }
    for (double c : coords) {
        if (!std::isfinite(c)) {
            throw ValidationError("distribution " + std::to_string(id) + ": non-finite coordinate");
        }
    }
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) {
            throw ValidationError("distribution " + std::to_string(id) +
                                  ": weights must be finite and non-negative");
        }
    }

    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(sum > 0.0)) {
        throw ValidationError("distribution " + std::to_string(id) + ": weights sum to zero");
    }
    if (mode == Normalization::Strict && std::abs(sum - 1.0) > kIngestSumTolerance) {
        throw ValidationError("distribution " + std::to_string(id) + ": weights sum to " +
                              std::to_string(sum) + ", expected 1");
    }

    // Merge duplicate locations, keeping first-occurrence order.
    std::map<std::vector<double>, std::size_t> seen;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        std::vector<double> key(coords.begin() + i * dim, coords.begin() + (i + 1) * dim);
        auto [it, inserted] = seen.emplace(std::move(key), weights_.size());
        if (inserted) {
            coords_.insert(coords_.end(), coords.begin() + i * dim, coords.begin() + (i + 1) * dim);
            weights_.push_back(weights[i]);
        } else {
            weights_[it->second] += weights[i];
        }
    }
    // Weights already normalized within tolerance are kept bit for bit, so that
    // reloading a saved dataset or index reproduces it exactly.
    if (std::abs(sum - 1.0) > kWeightSumTolerance) {
        for (double& w : weights_) {
            w /= sum;
        }
    }
}

DiscreteDistribution DiscreteDistribution::with_id(ObjectId id) const {
    DiscreteDistribution copy = *this;
    copy.id_ = id;
    return copy;
}

double ground_distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

}  // namespace nlbi
