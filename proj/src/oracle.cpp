#include "nlbi/oracle.hpp"

#include "nlbi/emd.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace nlbi {

namespace {

double phi(double mu, double sigma, double t) { return 0.5 * std::erfc(-(t - mu) / (sigma * std::sqrt(2.0))); }

double simpson(double mu, double sigma, double a, double b) {
    return (b - a) / 6.0 * (phi(mu, sigma, a) + 4.0 * phi(mu, sigma, 0.5 * (a + b)) + phi(mu, sigma, b));
}

double adaptive(double mu, double sigma, double a, double b, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double left = simpson(mu, sigma, a, m);
    const double right = simpson(mu, sigma, m, b);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive(mu, sigma, a, m, left, 0.5 * tol, depth - 1) +
           adaptive(mu, sigma, m, b, right, 0.5 * tol, depth - 1);
}

}  // namespace

double oracle_emd_1d(const ProjectedDistribution& p, const ProjectedDistribution& q) {
    struct Event {
        double t;
        double delta;
    };
    std::vector<Event> events;
    for (const auto& pt : p.points()) {
        events.push_back({pt.t, pt.weight});
    }
    for (const auto& pt : q.points()) {
        events.push_back({pt.t, -pt.weight});
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.t < b.t; });
    double running = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < events.size(); ++i) {
        running += events[i].delta;
        total += std::abs(running) * (events[i + 1].t - events[i].t);
    }
    return total;
}

QueryResult oracle_knn(std::span<const DiscreteDistribution> dataset, const DiscreteDistribution& query,
                       std::size_t k, std::size_t threads) {
    if (k > dataset.size()) {
        throw InputError("oracle_knn: k exceeds the dataset size");
    }
    std::vector<Neighbor> all(dataset.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < dataset.size(); i = next.fetch_add(1)) {
            all[i] = {dataset[i].id(), exact_emd(dataset[i], query)};
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, threads);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t) {
            pool.emplace_back(work);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    std::sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
        return a.distance != b.distance ? a.distance < b.distance : a.object_id < b.object_id;
    });
    all.resize(k);
    return {std::move(all)};
}

ErrorExtrema oracle_error_extrema(const ProjectedDistribution& p, const NormalParams& normal,
                                  const SubIntervalGrid& grid, std::size_t samples) {
    const auto bounds = grid.boundaries();
    const std::size_t s = grid.count();
    samples = std::max<std::size_t>(samples, 2);

    // Sample locations: a uniform grid in each sub-interval plus every step
    // breakpoint, tagged with the sub-interval(s) they belong to.
    struct Sample {
        double t;
        std::size_t cell;
    };
    std::vector<Sample> pts;
    pts.reserve(s * (samples + 1) + p.points().size());
    for (std::size_t c = 0; c < s; ++c) {
        const double lo = bounds[c];
        const double hi = bounds[c + 1];
        for (std::size_t i = 0; i <= samples; ++i) {
            const double t = i == samples ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples);
            pts.push_back({t, c});
        }
    }
    for (const auto& pt : p.points()) {
        if (pt.t > bounds.front() && pt.t < bounds.back()) {
            const auto cell = static_cast<std::size_t>(std::upper_bound(bounds.begin(), bounds.end(), pt.t) -
                                                       bounds.begin()) - 1;
            pts.push_back({pt.t, std::min(cell, s - 1)});
        }
    }
    std::sort(pts.begin(), pts.end(), [](const Sample& a, const Sample& b) { return a.t < b.t; });

    // Running integral of the error from t_min along the sorted samples. On each
    // gap the step CDF is constant at its value at the left end.
    auto step = [&](double t) {
        double acc = 0.0;
        for (const auto& pt : p.points()) {
            if (pt.t <= t) {
                acc += pt.weight;
            }
        }
        return acc;
    };
    std::vector<double> integral(pts.size(), 0.0);
    double level = step(pts.front().t);
    std::size_t next_point = 0;
    const auto ppts = p.points();
    while (next_point < ppts.size() && ppts[next_point].t <= pts.front().t) {
        ++next_point;
    }
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double a = pts[i - 1].t;
        const double b = pts[i].t;
        double area = 0.0;
        if (b > a) {
            // A gap wider than a fraction of sigma can hide the steep part of Φ.
            area = b - a > 0.25 * normal.sigma ? oracle_cdf_area(normal.mu, normal.sigma, a, b)
                                               : simpson(normal.mu, normal.sigma, a, b);
        }
        integral[i] = integral[i - 1] + level * (b - a) - area;
        while (next_point < ppts.size() && ppts[next_point].t <= b) {
            level += ppts[next_point].weight;
            ++next_point;
        }
    }
    const double full = integral.back();

    ErrorExtrema out;
    out.err_min.assign(s, std::numeric_limits<double>::infinity());
    out.err_max.assign(s, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = 2.0 * integral[i] - full;
        out.err_min[pts[i].cell] = std::min(out.err_min[pts[i].cell], d);
        out.err_max[pts[i].cell] = std::max(out.err_max[pts[i].cell], d);
    }
    return out;
}

double oracle_cdf_area(double mu, double sigma, double a, double b, double tolerance) {
    if (a == b) {
        return 0.0;
    }
    // Split the range into pieces so the recursion sees the curved part resolved.
    const int pieces = static_cast<int>(std::clamp(std::ceil((b - a) / sigma), 1.0, 4096.0));
    double total = 0.0;
    for (int i = 0; i < pieces; ++i) {
        const double lo = a + (b - a) * i / pieces;
        const double hi = i + 1 == pieces ? b : a + (b - a) * (i + 1) / pieces;
        total += adaptive(mu, sigma, lo, hi, simpson(mu, sigma, lo, hi), tolerance / pieces, 50);
    }
    return total;
}

}  // namespace nlbi
