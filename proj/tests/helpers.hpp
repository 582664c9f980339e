#pragma once

#include "nlbi/emd.hpp"
#include "nlbi/normal_bound.hpp"
#include "nlbi/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace testing_support {

using nlbi::DiscreteDistribution;

/// Distribution with n random bins in [0,1]^d and random weights.
inline DiscreteDistribution random_distribution(std::mt19937_64& rng, std::size_t dim, std::size_t n,
                                                nlbi::ObjectId id = 0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> coords(n * dim);
    std::vector<double> weights(n);
    for (double& c : coords) {
        c = u(rng);
    }
    for (double& w : weights) {
        w = u(rng) + 1e-3;
    }
    return {id, dim, std::move(coords), std::move(weights), nlbi::Normalization::Renormalize};
}

/// A random 2-D distribution whose generator settings are themselves drawn at
/// random, with at most max_bins bins.
inline DiscreteDistribution mixed_distribution(std::mt19937_64& rng, std::size_t max_bins, nlbi::ObjectId id) {
    nlbi::CorpusSpec recipe;
    recipe.count = 1;
    recipe.dim = 2;
    recipe.bins = std::uniform_int_distribution<std::size_t>(1, max_bins)(rng);
    recipe.layout = rng() % 2 ? nlbi::BinLayout::Grid : nlbi::BinLayout::Scattered;
    recipe.clusters = rng() % 3;
    recipe.spread = std::uniform_real_distribution<double>(0.05, 0.6)(rng);
    recipe.first_id = id;
    return nlbi::generate_synthetic(recipe, rng())[0];
}

/// Adaptive Simpson integration of f over [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-11,
                        int depth = 40) {
    auto simpson = [&](double lo, double hi) {
        return (hi - lo) / 6.0 * (f(lo) + 4.0 * f(0.5 * (lo + hi)) + f(hi));
    };
    std::function<double(double, double, double, double, int)> rec = [&](double lo, double hi, double whole,
                                                                         double t, int d) {
        const double mid = 0.5 * (lo + hi);
        const double l = simpson(lo, mid);
        const double r = simpson(mid, hi);
        if (d <= 0 || std::abs(l + r - whole) <= 15.0 * t) {
            return l + r + (l + r - whole) / 15.0;
        }
        return rec(lo, mid, l, 0.5 * t, d - 1) + rec(mid, hi, r, 0.5 * t, d - 1);
    };
    const int pieces = 64;
    double total = 0.0;
    for (int i = 0; i < pieces; ++i) {
        const double lo = a + (b - a) * i / pieces;
        const double hi = a + (b - a) * (i + 1) / pieces;
        total += rec(lo, hi, simpson(lo, hi), tol / pieces, depth);
    }
    return total;
}

inline double std_normal_cdf(double mu, double sigma, double t) {
    return 0.5 * std::erfc(-(t - mu) / (sigma * std::sqrt(2.0)));
}

}  // namespace testing_support

namespace testing_support {

/// Frame of the 1-D line on [t_min, t_max], used to tag hand-built projections.
inline std::uint64_t line_frame_id(double t_min, double t_max) {
    nlbi::ProjectionVector s;
    s.components = {1.0};
    s.t_min = t_min;
    s.t_max = t_max;
    return s.fingerprint();
}

/// n random points around `center` with half-width `spread`, clamped to the range.
inline nlbi::ProjectedDistribution line_sample(std::mt19937_64& rng, std::size_t n, double center, double spread,
                                               double t_min, double t_max) {
    std::uniform_real_distribution<double> offset(-spread, spread);
    std::uniform_real_distribution<double> weight(0.01, 1.0);
    std::vector<nlbi::ProjectedPoint> pts;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = weight(rng);
        pts.push_back({std::clamp(center + offset(rng), t_min, t_max), w});
        total += w;
    }
    for (auto& p : pts) {
        p.weight /= total;
    }
    return {std::move(pts), t_min, t_max, line_frame_id(t_min, t_max)};
}

}  // namespace testing_support
