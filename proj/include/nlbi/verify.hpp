#pragma once

#include "nlbi/index_io.hpp"

#include <string>
#include <vector>

namespace nlbi {

struct VerifyOptions {
    std::size_t bound_pairs = 500;         // sampled pairs for the bound chain
    std::size_t extrema_objects = 3;       // objects checked against oracle_error_extrema
    std::size_t extrema_samples = 20000;   // oracle samples per sub-interval
    std::size_t knn_queries = 2;           // stored objects re-queried against oracle_knn
    std::uint64_t seed = 1;
    std::size_t threads = 1;
};

struct VerifyReport {
    std::vector<std::string> passed;
    std::vector<std::string> failures;

    bool ok() const noexcept { return failures.empty(); }
};

/**
 * Audits an index: tree structure, summary-table size, summaries recomputed
 * from the stored objects, the bound chain emd_lb <= projection_emd <= exact
 * EMD on sampled pairs, and oracle spot checks. `layout` is the one reported
 * by read_index; without it the byte-exact size check uses the in-memory count.
 */
VerifyReport verify_index(const Index& index, const IndexFileLayout* layout = nullptr,
                          const VerifyOptions& options = {});

}  // namespace nlbi
