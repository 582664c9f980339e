#include "nlbi/query.hpp"

#include "nlbi/emd.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <queue>
#include <thread>

namespace nlbi {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// A bound prunes only when it clears the threshold by a relative 1e-6 plus an
// absolute 1e-9, so rounding in the bounds can never drop a true neighbor.
bool exceeds(double bound, double threshold) {
    return bound > threshold + 1e-6 * threshold + 1e-9;
}

struct QueueItem {
    double key;
    std::uint32_t index;
    bool is_node;

    bool operator>(const QueueItem& o) const {
        if (key != o.key) {
            return key > o.key;
        }
        if (is_node != o.is_node) {
            return !is_node;
        }
        return index > o.index;
    }
};

using MinQueue = std::priority_queue<QueueItem, std::vector<QueueItem>, std::greater<>>;

struct Candidate {
    double bound;
    ObjectId id;
    std::uint32_t position;

    bool operator>(const Candidate& o) const { return bound != o.bound ? bound > o.bound : id > o.id; }
};

bool closer(const Neighbor& a, const Neighbor& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.object_id < b.object_id;
}

void check_query(const Index& index, const DiscreteDistribution& query, std::size_t k) {
    if (index.size() == 0) {
        throw InputError("index is empty");
    }
    if (k == 0 || k > index.size()) {
        throw InputError("k must be between 1 and the number of indexed objects (" +
                         std::to_string(index.size()) + "), got " + std::to_string(k));
    }
    if (query.dim() != index.dim()) {
        throw InputError("query " + std::to_string(query.id()) + " has dimension " + std::to_string(query.dim()) +
                         ", index has " + std::to_string(index.dim()));
    }
}

const RefinePipeline& default_pipeline() {
    static const RefinePipeline pipeline;
    return pipeline;
}

}  // namespace

QuerySummary summarize_query(const Index& index, const DiscreteDistribution& query) {
    QuerySummary out;
    out.query = &query;
    out.projections.reserve(index.projections().size());
    for (const auto& proj : index.projections()) {
        ProjectedDistribution projected = project(query, proj.vector);
        NormalSummary summary = summarize(projected, proj.grid, query.id());
        const DominancePoint point =
            to_dominance_point(summary.normal, proj.grid.t_min(), proj.grid.t_max(), query.id());
        out.projections.push_back({std::move(projected), std::move(summary), point});
    }
    return out;
}

double ProjectionFilter::bound(const Index& index, const QuerySummary& query, std::size_t position) const {
    const auto projections = index.projections();
    std::vector<double> bounds(projections.size());
    for (std::size_t j = 0; j < projections.size(); ++j) {
        bounds[j] = projection_emd(project(index.object(position), projections[j].vector),
                                   query.projections[j].projected);
    }
    return combine_projection_bounds(bounds);
}

RefinePipeline::RefinePipeline() { filters_.push_back(std::make_unique<ProjectionFilter>()); }

void RefinePipeline::add(std::unique_ptr<RefineFilter> filter) { filters_.push_back(std::move(filter)); }

// Threshold-algorithm search. Each projection runs a best-first traversal of
// its tree keyed by emd_br (nodes) and emd_lb (entries), keys made monotone
// along root-to-leaf paths. The first time any traversal emits an object, its
// combined normal bound over all projections is computed directly and the
// object joins a candidate heap. A candidate is refined once its bound falls
// below the combined frontier of the traversals, which lower-bounds every
// object not yet emitted; candidates are therefore refined in ascending
// (bound, id) order regardless of tree shape.
QueryOutcome knn(const Index& index, const DiscreteDistribution& query, std::size_t k,
                 const QueryOptions& options) {
    check_query(index, query, k);
    const RefinePipeline& pipeline = options.pipeline ? *options.pipeline : default_pipeline();
    QueryOutcome out;
    QueryStats& stats = out.stats;
    const auto start = Clock::now();

    const QuerySummary q = summarize_query(index, query);
    stats.summary_seconds = seconds_since(start);

    const auto projections = index.projections();
    const std::size_t p_count = projections.size();
    const double scale = 1.0 / std::sqrt(static_cast<double>(p_count));

    std::vector<MinQueue> queues(p_count);
    for (std::size_t j = 0; j < p_count; ++j) {
        const auto& proj = projections[j];
        const double key = emd_br(proj.tree.root().region, q.projections[j].summary, q.projections[j].point, proj.grid);
        queues[j].push({key, 0, true});
    }

    auto frontier = [&] {
        double sum = 0.0;
        for (const auto& queue : queues) {
            if (queue.empty()) {
                return kInf;
            }
            sum += queue.top().key;
        }
        return scale * sum;
    };

    auto normal_bound = [&](std::size_t position) {
        double sum = 0.0;
        for (std::size_t j = 0; j < p_count; ++j) {
            sum += emd_lb(projections[j].summaries[position], q.projections[j].summary, projections[j].grid);
        }
        return scale * sum;
    };

    std::vector<char> seen(index.size(), 0);
    std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> candidates;
    auto worse = [](const Neighbor& a, const Neighbor& b) { return closer(a, b); };
    std::priority_queue<Neighbor, std::vector<Neighbor>, decltype(worse)> best(worse);
    auto threshold = [&] { return best.size() < k ? kInf : best.top().distance; };

    double filter_seconds = 0.0;
    double exact_seconds = 0.0;

    auto refine = [&](const Candidate& c) {
        ++stats.index_survivors;
        CandidateTrace trace{c.id, c.bound, -1.0, -1.0};
        auto t0 = Clock::now();
        bool pruned = false;
        for (std::size_t f = 0; f < pipeline.filters().size(); ++f) {
            const double b = pipeline.filters()[f]->bound(index, q, c.position);
            if (f == 0) {
                trace.projection_bound = b;
            }
            if (exceeds(b, threshold())) {
                pruned = true;
                break;
            }
        }
        filter_seconds += seconds_since(t0);
        if (!pruned) {
            ++stats.projection_survivors;
            t0 = Clock::now();
            const double d = exact_emd(index.object(c.position), query);
            exact_seconds += seconds_since(t0);
            ++stats.exact_emds_performed;
            trace.exact = d;
            const Neighbor n{c.id, d};
            if (best.size() < k) {
                best.push(n);
            } else if (closer(n, best.top())) {
                best.pop();
                best.push(n);
            }
        }
        if (options.trace) {
            options.trace->push_back(trace);
        }
    };

    auto advance = [&](std::size_t j) {
        const auto& proj = projections[j];
        const auto& qp = q.projections[j];
        const QueueItem item = queues[j].top();
        queues[j].pop();
        if (!item.is_node) {
            if (!seen[item.index]) {
                seen[item.index] = 1;
                candidates.push({normal_bound(item.index), index.object(item.index).id(), item.index});
            }
            return;
        }
        ++stats.nodes_visited;
        const auto& node = proj.tree.nodes()[item.index];
        for (const auto child : node.children) {
            const double b = emd_br(proj.tree.nodes()[child].region, qp.summary, qp.point, proj.grid);
            queues[j].push({std::max(item.key, b), child, true});
        }
        for (const auto entry : node.entries) {
            const double b = emd_lb(proj.summaries[entry], qp.summary, proj.grid);
            queues[j].push({std::max(item.key, b), entry, false});
        }
    };

    const auto search_start = Clock::now();
    std::size_t turn = 0;
    while (true) {
        const double f = frontier();
        if (!candidates.empty() && (candidates.top().bound < f || f == kInf)) {
            const Candidate c = candidates.top();
            candidates.pop();
            if (exceeds(c.bound, threshold())) {
                break;  // every later candidate and every unseen object bounds at least as high
            }
            refine(c);
            continue;
        }
        if (f == kInf || exceeds(f, threshold())) {
            break;
        }
        while (queues[turn % p_count].empty()) {
            ++turn;
        }
        advance(turn % p_count);
        ++turn;
    }
    const double search_seconds = seconds_since(search_start);
    stats.filter_seconds = filter_seconds;
    stats.exact_seconds = exact_seconds;
    stats.index_seconds = std::max(0.0, search_seconds - filter_seconds - exact_seconds);

    out.result.neighbors.resize(best.size());
    for (std::size_t i = best.size(); i-- > 0;) {
        out.result.neighbors[i] = best.top();
        best.pop();
    }
    stats.total_seconds = seconds_since(start);
    return out;
}

BatchReport aggregate(std::span<const QueryOutcome> outcomes, std::size_t database_size) {
    BatchReport r;
    r.queries = outcomes.size();
    if (outcomes.empty()) {
        return r;
    }
    std::vector<double> times;
    times.reserve(outcomes.size());
    for (const auto& o : outcomes) {
        times.push_back(o.stats.total_seconds);
        r.mean_seconds += o.stats.total_seconds;
        r.mean_nodes_visited += static_cast<double>(o.stats.nodes_visited);
        r.mean_index_survivors += static_cast<double>(o.stats.index_survivors);
        r.mean_projection_survivors += static_cast<double>(o.stats.projection_survivors);
        r.mean_exact_emds += static_cast<double>(o.stats.exact_emds_performed);
    }
    const double n = static_cast<double>(outcomes.size());
    r.mean_seconds /= n;
    r.mean_nodes_visited /= n;
    r.mean_index_survivors /= n;
    r.mean_projection_survivors /= n;
    r.mean_exact_emds /= n;
    r.exact_fraction = database_size ? r.mean_exact_emds / static_cast<double>(database_size) : 0.0;
    std::sort(times.begin(), times.end());
    const std::size_t mid = times.size() / 2;
    r.median_seconds = times.size() % 2 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
    return r;
}

BatchOutcome batch_query(const Index& index, std::span<const DiscreteDistribution> queries, std::size_t k,
                         std::size_t threads, const QueryOptions& options) {
    for (const auto& q : queries) {
        check_query(index, q, k);
    }
    QueryOptions per_query = options;
    per_query.trace = nullptr;  // traces are per-query and not collected in batches

    BatchOutcome out;
    out.outcomes.resize(queries.size());
    const std::size_t workers = std::max<std::size_t>(1, std::min(threads, queries.size()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    auto work = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= queries.size()) {
                return;
            }
            try {
                out.outcomes[i] = knn(index, queries[i], k, per_query);
            } catch (...) {
                std::lock_guard lock(failure_lock);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t t = 0; t < workers; ++t) {
            pool.emplace_back(work);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    out.report = aggregate(out.outcomes, index.size());
    return out;
}

std::string format_real(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

void write_results(std::ostream& out, std::span<const DiscreteDistribution> queries,
                   std::span<const QueryOutcome> outcomes) {
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& neighbors = outcomes[i].result.neighbors;
        for (std::size_t r = 0; r < neighbors.size(); ++r) {
            out << queries[i].id() << '\t' << (r + 1) << '\t' << neighbors[r].object_id << '\t'
                << format_real(neighbors[r].distance) << '\n';
        }
    }
}

}  // namespace nlbi
