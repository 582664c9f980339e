#pragma once

#include "nlbi/index.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

namespace nlbi {

/// Raised when an index file cannot be trusted as a well-formed index.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kIndexFormatVersion = 1;

/// Sizes observed while reading an index file.
struct IndexFileLayout {
    std::uint64_t summary_table_bytes = 0;  // declared length of the summary table
    std::uint64_t summary_bytes_read = 0;   // bytes actually consumed while parsing it
    std::uint64_t total_bytes = 0;
};

/**
 * Little-endian binary layout:
 *
 *   "NLBI", u32 version, u64 N, u32 dim, u32 P, u32 node_capacity
 *   per projection: f64[dim] components, f64 center, f64 t_min, f64 t_max,
 *                   u32 s, f64[s+1] boundaries
 *   u64 summary table length in bytes, then per projection, per object:
 *                   f64 mu, f64 sigma, f64 err_full, f64[s] err_min, f64[s] err_max
 *   per projection: u64 node count, then nodes in preorder
 *   u64 N, then per object: u64 id, u32 n, f64[n*dim] coords, f64[n] weights
 */
void write_index(std::ostream& out, const Index& index);
void save_index(const std::filesystem::path& path, const Index& index);

Index read_index(std::istream& in, IndexFileLayout* layout = nullptr);
Index load_index(const std::filesystem::path& path, IndexFileLayout* layout = nullptr);

}  // namespace nlbi
