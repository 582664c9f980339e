#pragma once

#include "nlbi/distribution.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nlbi {

enum class BinLayout {
    Grid,      ///< every distribution uses the same regular grid of bins (image tiles)
    Scattered  ///< each distribution draws its own bin locations
};

BinLayout parse_layout(const std::string& name);

struct CorpusSpec {
    std::size_t count = 1000;
    std::size_t dim = 2;
    std::size_t bins = 16;
    BinLayout layout = BinLayout::Grid;
    /// 0 draws every distribution independently; otherwise members perturb one
    /// of `clusters` prototype distributions.
    std::size_t clusters = 10;
    /// Perturbation strength of members around their prototype.
    double spread = 0.25;
    ObjectId first_id = 0;
};

/// Deterministic for a fixed (recipe, seed). Ids are first_id, first_id + 1, ...
std::vector<DiscreteDistribution> generate_synthetic(const CorpusSpec& recipe, std::uint64_t seed);

/// Cluster index of every generated object (same draw sequence as generate_synthetic).
std::vector<std::size_t> synthetic_cluster_labels(const CorpusSpec& recipe, std::uint64_t seed);

}  // namespace nlbi
