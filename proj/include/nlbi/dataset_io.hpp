#pragma once

#include "nlbi/distribution.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace nlbi {

struct LoadOptions {
    bool renormalize = false;
};

/**
 * Reads line-delimited records, one distribution per line:
 *
 *   id<TAB>d<TAB>n<TAB>x_1,...,x_d;...;x_1,...,x_d<TAB>w_1,...,w_n
 *
 * Lines starting with '#' and blank lines are skipped. A line starting with '{'
 * is read as a JSON object with fields "id", "bins" (array of coordinate arrays)
 * and "weights".
 */
std::vector<DiscreteDistribution> read_dataset(std::istream& in, const LoadOptions& options = {});
std::vector<DiscreteDistribution> load_dataset(const std::filesystem::path& path,
                                               const LoadOptions& options = {});

/// Writes the tab-separated format with shortest round-trip decimal reals.
void write_dataset(std::ostream& out, std::span<const DiscreteDistribution> dataset);
void save_dataset(const std::filesystem::path& path, std::span<const DiscreteDistribution> dataset);

}  // namespace nlbi
