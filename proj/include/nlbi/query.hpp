#pragma once

#include "nlbi/index.hpp"

#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace nlbi {

/// The query as seen from one projection.
struct QueryProjection {
    ProjectedDistribution projected;
    NormalSummary summary;
    DominancePoint point;
};

/// A query prepared against an index: one entry per stored projection.
struct QuerySummary {
    const DiscreteDistribution* query = nullptr;
    std::vector<QueryProjection> projections;
};

QuerySummary summarize_query(const Index& index, const DiscreteDistribution& query);

struct Neighbor {
    ObjectId object_id = 0;
    double distance = 0.0;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// K nearest neighbors ascending by (distance, object id).
struct QueryResult {
    std::vector<Neighbor> neighbors;

    friend bool operator==(const QueryResult&, const QueryResult&) = default;
};

struct QueryStats {
    std::uint64_t nodes_visited = 0;
    std::uint64_t index_survivors = 0;       // candidates whose index bound passed the threshold
    std::uint64_t projection_survivors = 0;  // candidates that passed every refine filter
    std::uint64_t exact_emds_performed = 0;
    double summary_seconds = 0.0;
    double index_seconds = 0.0;
    double filter_seconds = 0.0;
    double exact_seconds = 0.0;
    double total_seconds = 0.0;
};

/// Bounds recorded for one candidate that reached the refine stage.
struct CandidateTrace {
    ObjectId object_id = 0;
    double index_bound = 0.0;
    double projection_bound = 0.0;
    double exact = -1.0;  // negative when a refine filter pruned the candidate
};

/**
 * @brief A lower bound on the exact EMD evaluated between the index stage and
 * the exact computation. Candidates whose bound exceeds the current k-th best
 * distance are dropped.
 */
class RefineFilter {
public:
    virtual ~RefineFilter() = default;
    virtual std::string_view name() const = 0;
    virtual double bound(const Index& index, const QuerySummary& query, std::size_t position) const = 0;
};

/// Combined per-projection 1-D EMD of the query and the candidate.
class ProjectionFilter final : public RefineFilter {
public:
    std::string_view name() const override { return "projection"; }
    double bound(const Index& index, const QuerySummary& query, std::size_t position) const override;
};

/// Ordered list of refine filters; the default holds only ProjectionFilter.
class RefinePipeline {
public:
    RefinePipeline();
    void add(std::unique_ptr<RefineFilter> filter);
    std::span<const std::unique_ptr<RefineFilter>> filters() const noexcept { return filters_; }

private:
    std::vector<std::unique_ptr<RefineFilter>> filters_;
};

struct QueryOptions {
    const RefinePipeline* pipeline = nullptr;     // null selects the default pipeline
    std::vector<CandidateTrace>* trace = nullptr;  // filled when set
};

struct QueryOutcome {
    QueryResult result;
    QueryStats stats;
};

/// Exact K-NN under exact_emd.
QueryOutcome knn(const Index& index, const DiscreteDistribution& query, std::size_t k,
                 const QueryOptions& options = {});

struct BatchReport {
    std::size_t queries = 0;
    double mean_seconds = 0.0;
    double median_seconds = 0.0;
    double mean_nodes_visited = 0.0;
    double mean_index_survivors = 0.0;
    double mean_projection_survivors = 0.0;
    double mean_exact_emds = 0.0;
    double exact_fraction = 0.0;  // mean exact EMDs per query divided by N
};

struct BatchOutcome {
    std::vector<QueryOutcome> outcomes;  // in query order
    BatchReport report;
};

/// Runs every query, on up to `threads` workers. Results do not depend on the thread count.
BatchOutcome batch_query(const Index& index, std::span<const DiscreteDistribution> queries, std::size_t k,
                         std::size_t threads = 1, const QueryOptions& options = {});

BatchReport aggregate(std::span<const QueryOutcome> outcomes, std::size_t database_size);

/// Shortest decimal text that reads back to the same double.
std::string format_real(double x);

/// Line-delimited records: query_id, rank (from 1), object_id, distance.
void write_results(std::ostream& out, std::span<const DiscreteDistribution> queries,
                   std::span<const QueryOutcome> outcomes);

}  // namespace nlbi
