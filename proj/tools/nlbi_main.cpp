// nlbi command-line tool: one subcommand per stage of the index lifecycle.

#include "nlbi/dataset_io.hpp"
#include "nlbi/index_io.hpp"
#include "nlbi/oracle.hpp"
#include "nlbi/query.hpp"
#include "nlbi/synthetic.hpp"
#include "nlbi/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::size_t> parse_list(const std::string& text, const char* flag) {
    std::vector<std::size_t> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(item, &used);
            if (used != item.size() || v <= 0) {
                throw std::invalid_argument(item);
            }
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw UsageError(std::string(flag) + ": expected a comma-separated list of positive integers");
        }
    }
    if (out.empty()) {
        throw UsageError(std::string(flag) + ": empty list");
    }
    return out;
}

nlohmann::json stats_json(const nlbi::QueryStats& s) {
    return {{"nodes_visited", s.nodes_visited},
            {"index_survivors", s.index_survivors},
            {"projection_survivors", s.projection_survivors},
            {"exact_emds_performed", s.exact_emds_performed},
            {"summary_seconds", s.summary_seconds},
            {"index_seconds", s.index_seconds},
            {"filter_seconds", s.filter_seconds},
            {"exact_seconds", s.exact_seconds},
            {"total_seconds", s.total_seconds}};
}

nlohmann::json report_json(const nlbi::BatchReport& r) {
    return {{"queries", r.queries},
            {"mean_seconds", r.mean_seconds},
            {"median_seconds", r.median_seconds},
            {"mean_nodes_visited", r.mean_nodes_visited},
            {"mean_index_survivors", r.mean_index_survivors},
            {"mean_projection_survivors", r.mean_projection_survivors},
            {"mean_exact_emds", r.mean_exact_emds},
            {"exact_fraction", r.exact_fraction}};
}

struct GenArgs {
    long long count = 1000;
    long long bins = 16;
    long long dim = 2;
    long long clusters = 10;
    double spread = 0.25;
    std::string layout = "grid";
    std::uint64_t seed = 1;
    std::uint64_t first_id = 0;
    std::string out;
};

int run_gen(const GenArgs& a) {
    if (a.count <= 0 || a.bins <= 0 || a.dim <= 0 || a.clusters < 0) {
        throw UsageError("--n-dists, --bins and --dim must be positive; --clusters must be non-negative");
    }
    nlbi::CorpusSpec recipe;
    recipe.count = static_cast<std::size_t>(a.count);
    recipe.bins = static_cast<std::size_t>(a.bins);
    recipe.dim = static_cast<std::size_t>(a.dim);
    recipe.clusters = static_cast<std::size_t>(a.clusters);
    recipe.spread = a.spread;
    recipe.layout = nlbi::parse_layout(a.layout);
    recipe.first_id = a.first_id;
    const auto corpus = nlbi::generate_synthetic(recipe, a.seed);
    if (a.out.empty() || a.out == "-") {
        nlbi::write_dataset(std::cout, corpus);
    } else {
        nlbi::save_dataset(a.out, corpus);
    }
    return kExitOk;
}

struct BuildArgs {
    std::string dataset;
    std::string out;
    std::optional<long long> projections;
    std::optional<long long> sub_intervals;
    long long node_capacity = static_cast<long long>(nlbi::kDefaultNodeCapacity);
    bool renormalize = false;
};

int run_build(const BuildArgs& a) {
    if ((a.projections && *a.projections <= 0) || (a.sub_intervals && *a.sub_intervals <= 0) ||
        a.node_capacity <= 0) {
        throw UsageError("--projections, --sub-intervals and --node-capacity must be positive");
    }
    auto dataset = nlbi::load_dataset(a.dataset, {a.renormalize});
    if (dataset.empty()) {
        throw nlbi::InputError("dataset " + a.dataset + " holds no distributions");
    }
    if (a.projections && static_cast<std::size_t>(*a.projections) > dataset.front().dim()) {
        throw UsageError("--projections " + std::to_string(*a.projections) + " exceeds the data dimension " +
                         std::to_string(dataset.front().dim()));
    }
    nlbi::BuildConfig config;
    if (a.projections) {
        config.projections = static_cast<std::size_t>(*a.projections);
    }
    if (a.sub_intervals) {
        config.sub_intervals = static_cast<std::size_t>(*a.sub_intervals);
    }
    config.node_capacity = static_cast<std::size_t>(a.node_capacity);
    const auto index = nlbi::build_index(std::move(dataset), config);
    nlbi::save_index(a.out, index);

    const std::uint64_t reals = nlbi::summary_table_reals(index);
    std::cout << "objects " << index.size() << "\n"
              << "dimension " << index.dim() << "\n"
              << "projections " << index.projections().size() << "\n"
              << "sub_intervals " << index.sub_intervals() << "\n"
              << "node_capacity " << index.node_capacity() << "\n"
              << "summary_reals_per_object_per_projection " << 3 + 2 * index.sub_intervals() << "\n"
              << "summary_table_reals " << reals << "\n"
              << "summary_table_bytes " << reals * sizeof(double) << "\n";
    for (std::size_t j = 0; j < index.projections().size(); ++j) {
        std::cout << "tree_nodes_" << j << " " << index.projections()[j].tree.nodes().size() << "\n";
    }
    return kExitOk;
}

struct QueryArgs {
    std::string index;
    std::string queries;
    long long k = 4;
    long long threads = 1;
    bool oracle = false;
    bool renormalize = false;
    std::string out;
    std::string stats;
};

bool same_result(const nlbi::QueryResult& a, const nlbi::QueryResult& b) {
    if (a.neighbors.size() != b.neighbors.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.neighbors.size(); ++i) {
        if (a.neighbors[i].object_id != b.neighbors[i].object_id ||
            std::abs(a.neighbors[i].distance - b.neighbors[i].distance) > 1e-9) {
            return false;
        }
    }
    return true;
}

int run_query(const QueryArgs& a) {
    if (a.k <= 0 || a.threads <= 0) {
        throw UsageError("--k and --threads must be positive");
    }
    const auto index = nlbi::load_index(a.index);
    const auto queries = nlbi::load_dataset(a.queries, {a.renormalize});
    if (static_cast<std::size_t>(a.k) > index.size()) {
        throw UsageError("--k " + std::to_string(a.k) + " exceeds the " + std::to_string(index.size()) +
                         " indexed objects");
    }
    const auto k = static_cast<std::size_t>(a.k);
    const auto threads = static_cast<std::size_t>(a.threads);
    const auto batch = nlbi::batch_query(index, queries, k, threads);

    if (a.out.empty() || a.out == "-") {
        nlbi::write_results(std::cout, queries, batch.outcomes);
    } else {
        std::ofstream out(a.out);
        if (!out) {
            throw std::runtime_error("cannot open " + a.out + " for writing");
        }
        nlbi::write_results(out, queries, batch.outcomes);
    }

    nlohmann::json report = {{"k", k}, {"objects", index.size()}, {"aggregate", report_json(batch.report)}};
    nlohmann::json per_query = nlohmann::json::array();
    for (std::size_t i = 0; i < queries.size(); ++i) {
        auto entry = stats_json(batch.outcomes[i].stats);
        entry["query_id"] = queries[i].id();
        per_query.push_back(std::move(entry));
    }
    report["queries"] = std::move(per_query);

    int status = kExitOk;
    if (a.oracle) {
        std::size_t mismatches = 0;
        for (std::size_t i = 0; i < queries.size(); ++i) {
            const auto expected = nlbi::oracle_knn(index.objects(), queries[i], k, threads);
            if (!same_result(expected, batch.outcomes[i].result)) {
                ++mismatches;
                std::cerr << "oracle mismatch on query " << queries[i].id() << "\n";
            }
        }
        report["oracle_mismatches"] = mismatches;
        std::cerr << "oracle check: " << queries.size() - mismatches << "/" << queries.size() << " queries agree\n";
        if (mismatches) {
            status = kExitVerifyFailed;
        }
    }
    if (!a.stats.empty()) {
        std::ofstream out(a.stats);
        if (!out) {
            throw std::runtime_error("cannot open " + a.stats + " for writing");
        }
        out << report.dump(2) << "\n";
    } else {
        std::cerr << report["aggregate"].dump() << "\n";
    }
    return status;
}

struct BenchArgs {
    std::string index;
    std::string queries;
    std::string k_values = "4";
    std::string sub_interval_values;
    std::string capacity_values;
    long long threads = 1;
    bool renormalize = false;
    std::string out;
};

int run_bench(const BenchArgs& a) {
    if (a.threads <= 0) {
        throw UsageError("--threads must be positive");
    }
    const auto ks = parse_list(a.k_values, "--k-values");
    const auto base = nlbi::load_index(a.index);
    const auto queries = nlbi::load_dataset(a.queries, {a.renormalize});
    const auto s_values = a.sub_interval_values.empty() ? std::vector<std::size_t>{base.sub_intervals()}
                                                        : parse_list(a.sub_interval_values, "--sub-interval-values");
    const auto capacities = a.capacity_values.empty() ? std::vector<std::size_t>{base.node_capacity()}
                                                      : parse_list(a.capacity_values, "--node-capacity-values");
    for (auto k : ks) {
        if (k > base.size()) {
            throw UsageError("--k-values: " + std::to_string(k) + " exceeds the indexed object count");
        }
    }
    std::vector<nlbi::ProjectionVector> vectors;
    for (const auto& p : base.projections()) {
        vectors.push_back(p.vector);
    }
    const std::vector<nlbi::DiscreteDistribution> objects(base.objects().begin(), base.objects().end());

    std::ofstream file;
    if (!a.out.empty() && a.out != "-") {
        file.open(a.out);
        if (!file) {
            throw std::runtime_error("cannot open " + a.out + " for writing");
        }
    }
    std::ostream& out = file.is_open() ? static_cast<std::ostream&>(file) : std::cout;
    out << "k,sub_intervals,node_capacity,queries,mean_query_ms,median_query_ms,mean_nodes_visited,"
           "mean_index_survivors,mean_projection_survivors,mean_exact_emds,exact_fraction\n";
    for (auto s : s_values) {
        for (auto capacity : capacities) {
            const bool reuse = s == base.sub_intervals() && capacity == base.node_capacity();
            std::optional<nlbi::Index> rebuilt;
            if (!reuse) {
                rebuilt.emplace(nlbi::build_index(objects, vectors, s, capacity));
            }
            const nlbi::Index& index = reuse ? base : *rebuilt;
            for (auto k : ks) {
                const auto batch = nlbi::batch_query(index, queries, k, static_cast<std::size_t>(a.threads));
                const auto& r = batch.report;
                out << k << ',' << s << ',' << capacity << ',' << r.queries << ',' << r.mean_seconds * 1e3 << ','
                    << r.median_seconds * 1e3 << ',' << r.mean_nodes_visited << ',' << r.mean_index_survivors << ','
                    << r.mean_projection_survivors << ',' << r.mean_exact_emds << ',' << r.exact_fraction << '\n';
            }
        }
    }
    return kExitOk;
}

struct VerifyArgs {
    std::string index;
    long long pairs = 500;
    long long knn_queries = 2;
    std::uint64_t seed = 1;
    long long threads = 1;
};

int run_verify(const VerifyArgs& a) {
    if (a.pairs < 0 || a.knn_queries < 0 || a.threads <= 0) {
        throw UsageError("--pairs and --knn-queries must be non-negative, --threads positive");
    }
    nlbi::IndexFileLayout layout;
    const auto index = nlbi::load_index(a.index, &layout);
    nlbi::VerifyOptions options;
    options.bound_pairs = static_cast<std::size_t>(a.pairs);
    options.knn_queries = static_cast<std::size_t>(a.knn_queries);
    options.seed = a.seed;
    options.threads = static_cast<std::size_t>(a.threads);
    const auto report = nlbi::verify_index(index, &layout, options);
    for (const auto& line : report.passed) {
        std::cout << "ok    " << line << "\n";
    }
    for (const auto& line : report.failures) {
        std::cout << "FAIL  " << line << "\n";
    }
    std::cout << (report.ok() ? "verify: passed" : "verify: FAILED") << "\n";
    return report.ok() ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact EMD K-NN search with normal lower bounds and a dominance-space quad-tree"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic corpus");
    gen_cmd->add_option("--n-dists", gen.count, "Number of distributions")->capture_default_str();
    gen_cmd->add_option("--bins", gen.bins, "Bins per distribution")->capture_default_str();
    gen_cmd->add_option("--dim", gen.dim, "Dimension of bin locations")->capture_default_str();
    gen_cmd->add_option("--clusters", gen.clusters, "Cluster count (0 = independent draws)")->capture_default_str();
    gen_cmd->add_option("--spread", gen.spread, "Perturbation strength within a cluster")->capture_default_str();
    gen_cmd->add_option("--layout", gen.layout, "Bin layout: grid or scattered")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
    gen_cmd->add_option("--first-id", gen.first_id, "Id of the first distribution")->capture_default_str();
    gen_cmd->add_option("-o,--out", gen.out, "Output file (default: stdout)");

    BuildArgs build;
    auto* build_cmd = app.add_subcommand("build", "Build an index file from a dataset");
    build_cmd->add_option("-i,--dataset", build.dataset, "Dataset file")->required();
    build_cmd->add_option("-o,--out", build.out, "Index file to write")->required();
    build_cmd->add_option("--projections", build.projections, "Number of PCA projections");
    build_cmd->add_option("--sub-intervals", build.sub_intervals, "Sub-intervals per projection range");
    build_cmd->add_option("--node-capacity", build.node_capacity, "Quad-tree leaf capacity")->capture_default_str();
    build_cmd->add_flag("--renormalize", build.renormalize, "Rescale weights that do not sum to one");

    QueryArgs query;
    auto* query_cmd = app.add_subcommand("query", "Answer K-NN queries against an index");
    query_cmd->add_option("--index", query.index, "Index file")->required();
    query_cmd->add_option("-q,--queries", query.queries, "Query dataset file")->required();
    query_cmd->add_option("--k", query.k, "Neighbors per query")->capture_default_str();
    query_cmd->add_option("--threads", query.threads, "Worker threads")->capture_default_str();
    query_cmd->add_flag("--oracle", query.oracle, "Cross-check every answer against a linear scan");
    query_cmd->add_flag("--renormalize", query.renormalize, "Rescale query weights that do not sum to one");
    query_cmd->add_option("-o,--out", query.out, "Results file (default: stdout)");
    query_cmd->add_option("--stats", query.stats, "Write the JSON stats report here (default: summary on stderr)");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Sweep k, sub-intervals and node capacity; CSV report");
    bench_cmd->add_option("--index", bench.index, "Index file (its stored objects are re-indexed for sweeps)")
        ->required();
    bench_cmd->add_option("-q,--queries", bench.queries, "Query dataset file")->required();
    bench_cmd->add_option("--k-values,--k", bench.k_values, "Comma-separated k values")->capture_default_str();
    bench_cmd->add_option("--sub-interval-values,--sub-intervals", bench.sub_interval_values,
                          "Comma-separated sub-interval counts (default: the index's)");
    bench_cmd->add_option("--node-capacity-values,--node-capacity", bench.capacity_values,
                          "Comma-separated node capacities (default: the index's)");
    bench_cmd->add_option("--threads", bench.threads, "Worker threads")->capture_default_str();
    bench_cmd->add_flag("--renormalize", bench.renormalize, "Rescale query weights that do not sum to one");
    bench_cmd->add_option("-o,--out", bench.out, "CSV file (default: stdout)");

    VerifyArgs verify;
    auto* verify_cmd = app.add_subcommand("verify", "Audit an index file");
    verify_cmd->add_option("--index", verify.index, "Index file")->required();
    verify_cmd->add_option("--pairs", verify.pairs, "Sampled pairs for the bound chain")->capture_default_str();
    verify_cmd->add_option("--knn-queries", verify.knn_queries, "Stored objects re-queried against a linear scan")
        ->capture_default_str();
    verify_cmd->add_option("--seed", verify.seed, "Sampling seed")->capture_default_str();
    verify_cmd->add_option("--threads", verify.threads, "Worker threads for the linear scan")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (gen_cmd->parsed()) {
            return run_gen(gen);
        }
        if (build_cmd->parsed()) {
            return run_build(build);
        }
        if (query_cmd->parsed()) {
            return run_query(query);
        }
        if (bench_cmd->parsed()) {
            return run_bench(bench);
        }
        return run_verify(verify);
    } catch (const nlbi::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const nlbi::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const nlbi::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const nlbi::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
