#include "nlbi/emd.hpp"

#include <algorithm>
#include <limits>

namespace nlbi {

namespace {

// Remaining supply/demand below this is treated as exhausted.
constexpr double kMassEps = 1e-13;
// Flows below this are snapped to zero after an augmentation.
constexpr double kFlowEps = 1e-15;

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

// Successive shortest paths on the dense bipartite residual graph with
// Johnson potentials. Node layout: sources [0, n), sinks [n, n + m).
TransportPlan solve_transport(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    if (p.dim() != q.dim()) {
        throw InputError("exact_emd: dimension mismatch (" + std::to_string(p.dim()) + " vs " +
                         std::to_string(q.dim()) + ")");
    }
    if (p.size() == 0 || q.size() == 0) {
        throw InputError("exact_emd: empty distribution");
    }

    const std::size_t n = p.size();
    const std::size_t m = q.size();
    const std::size_t nodes = n + m;

    TransportPlan plan;
    plan.rows = n;
    plan.cols = m;
    plan.flow.assign(n * m, 0.0);

    std::vector<double> cost(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            cost[i * m + j] = ground_distance(p.bin(i), q.bin(j));
        }
    }

    std::vector<double> supply(p.weights().begin(), p.weights().end());
    std::vector<double> demand(q.weights().begin(), q.weights().end());
    std::vector<double> pot(nodes, 0.0);
    std::vector<double> dist(nodes);
    std::vector<std::ptrdiff_t> pred(nodes);
    std::vector<char> done(nodes);

    auto has_supply = [&] {
        return std::any_of(supply.begin(), supply.end(), [](double s) { return s > kMassEps; });
    };
    auto has_demand = [&] {
        return std::any_of(demand.begin(), demand.end(), [](double d) { return d > kMassEps; });
    };

    while (has_supply() && has_demand()) {
        std::fill(dist.begin(), dist.end(), kInf);
        std::fill(pred.begin(), pred.end(), -1);
        std::fill(done.begin(), done.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            if (supply[i] > kMassEps) {
                dist[i] = 0.0;
            }
        }

        std::ptrdiff_t target = -1;
        while (true) {
            std::ptrdiff_t x = -1;
            double best = kInf;
            for (std::size_t v = 0; v < nodes; ++v) {
                if (!done[v] && dist[v] < best) {
                    best = dist[v];
                    x = static_cast<std::ptrdiff_t>(v);
                }
            }
            if (x < 0) {
                break;
            }
            done[x] = 1;
            const auto ux = static_cast<std::size_t>(x);
            if (ux >= n && demand[ux - n] > kMassEps) {
                target = x;
                break;
            }
            if (ux < n) {
                for (std::size_t j = 0; j < m; ++j) {
                    const std::size_t y = n + j;
                    if (done[y]) {
                        continue;
                    }
                    const double reduced = std::max(0.0, cost[ux * m + j] + pot[ux] - pot[y]);
                    const double nd = dist[ux] + reduced;
                    if (nd < dist[y]) {
                        dist[y] = nd;
                        pred[y] = x;
                    }
                }
            } else {
                const std::size_t j = ux - n;
                for (std::size_t i = 0; i < n; ++i) {
                    if (done[i] || plan.flow[i * m + j] <= 0.0) {
                        continue;
                    }
                    const double reduced = std::max(0.0, -cost[i * m + j] + pot[ux] - pot[i]);
                    const double nd = dist[ux] + reduced;
                    if (nd < dist[i]) {
                        dist[i] = nd;
                        pred[i] = x;
                    }
                }
            }
        }
        if (target < 0) {
            break;  // unreachable for a complete bipartite graph with remaining demand
        }

        const double cap = dist[target];
        for (std::size_t v = 0; v < nodes; ++v) {
            pot[v] += std::min(dist[v], cap);
        }

        // Bottleneck along the path, then augment.
        double delta = demand[target - n];
        std::ptrdiff_t v = target;
        while (pred[v] >= 0) {
            const std::ptrdiff_t u = pred[v];
            if (static_cast<std::size_t>(u) >= n) {  // reverse edge sink u -> source v
                delta = std::min(delta, plan.flow[v * m + (u - n)]);
            }
            v = u;
        }
        const std::ptrdiff_t source = v;
        delta = std::min(delta, supply[source]);

        v = target;
        while (pred[v] >= 0) {
            const std::ptrdiff_t u = pred[v];
            if (static_cast<std::size_t>(u) < n) {
                plan.flow[u * m + (v - n)] += delta;
            } else {
                double& f = plan.flow[v * m + (u - n)];
                f -= delta;
                if (f < kFlowEps) {
                    f = 0.0;
                }
            }
            v = u;
        }
        supply[source] -= delta;
        demand[target - n] -= delta;
    }

    plan.row_dual.resize(n);
    plan.col_dual.resize(m);
    for (std::size_t i = 0; i < n; ++i) {
        plan.row_dual[i] = -pot[i];
    }
    for (std::size_t j = 0; j < m; ++j) {
        plan.col_dual[j] = pot[n + j];
    }
    double total = 0.0;
    for (std::size_t k = 0; k < n * m; ++k) {
        total += plan.flow[k] * cost[k];
    }
    plan.cost = total;
    return plan;
}

double exact_emd(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    return solve_transport(p, q).cost;
}

}  // namespace nlbi
