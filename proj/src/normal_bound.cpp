#include "nlbi/normal_bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace nlbi {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double std_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }
double std_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// Antiderivative of the N(mu, sigma) CDF: (t - mu) Φ(z) + σ φ(z).
double cdf_antiderivative(double mu, double sigma, double t) {
    const double z = (t - mu) / sigma;
    return (t - mu) * std_cdf(z) + sigma * std_pdf(z);
}

// Point in (lo, hi) where Φ_n(t) = level, given Φ_n(lo) < level < Φ_n(hi).
// Newton steps safeguarded by bisection.
double solve_cdf_level(const NormalParams& n, double level, double lo, double hi) {
    double t = 0.5 * (lo + hi);
    for (int iter = 0; iter < 100; ++iter) {
        const double g = normal_cdf(n, t) - level;
        if (g > 0.0) {
            hi = t;
        } else {
            lo = t;
        }
        const double slope = std_pdf((t - n.mu) / n.sigma) / n.sigma;
        double next = slope > 0.0 ? t - g / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - t) <= 1e-15 * (1.0 + std::abs(t)) || hi - lo <= 1e-15 * (1.0 + std::abs(t))) {
            return next;
        }
        t = next;
    }
    return t;
}

}  // namespace

double sigma_floor(double t_min, double t_max) { return 1e-6 * (t_max - t_min); }

NormalParams fit_normal(const ProjectedDistribution& p) {
    double mu = 0.0;
    for (const auto& pt : p.points()) {
        mu += pt.weight * pt.t;
    }
    double var = 0.0;
    for (const auto& pt : p.points()) {
        const double d = pt.t - mu;
        var += pt.weight * d * d;
    }
    return {mu, std::max(std::sqrt(var), sigma_floor(p.t_min(), p.t_max()))};
}

double normal_cdf(const NormalParams& n, double t) { return std_cdf((t - n.mu) / n.sigma); }

double normal_cdf_area(double mu, double sigma, double a, double b) {
    if (a > b) {
        throw InputError("normal_cdf_area: empty interval has a > b");
    }
    if (!(sigma > 0.0)) {
        throw InputError("normal_cdf_area: sigma must be positive");
    }
    if (a == b) {
        return 0.0;
    }
    return cdf_antiderivative(mu, sigma, b) - cdf_antiderivative(mu, sigma, a);
}

std::optional<double> intersection_point(const NormalParams& a, const NormalParams& b) {
    const double dsigma = b.sigma - a.sigma;
    if (std::abs(dsigma) <= 1e-12) {
        return std::nullopt;
    }
    return (a.mu * b.sigma - b.mu * a.sigma) / dsigma;
}

double emd_normal(const NormalParams& a, const NormalParams& b, double t_min, double t_max) {
    auto piece = [&](double lo, double hi) {
        const double da = cdf_antiderivative(a.mu, a.sigma, hi) - cdf_antiderivative(a.mu, a.sigma, lo);
        const double db = cdf_antiderivative(b.mu, b.sigma, hi) - cdf_antiderivative(b.mu, b.sigma, lo);
        return std::abs(da - db);
    };
    const auto cross = intersection_point(a, b);
    if (cross && *cross > t_min && *cross < t_max) {
        return piece(t_min, *cross) + piece(*cross, t_max);
    }
    return piece(t_min, t_max);
}

double normal_excess(const NormalParams& a, const NormalParams& b, double t_min, double t_max) {
    auto piece = [&](double lo, double hi) {
        const double da = cdf_antiderivative(a.mu, a.sigma, hi) - cdf_antiderivative(a.mu, a.sigma, lo);
        const double db = cdf_antiderivative(b.mu, b.sigma, hi) - cdf_antiderivative(b.mu, b.sigma, lo);
        return std::max(0.0, da - db);
    };
    const auto cross = intersection_point(a, b);
    if (cross && *cross > t_min && *cross < t_max) {
        return piece(t_min, *cross) + piece(*cross, t_max);
    }
    return piece(t_min, t_max);
}

SubIntervalGrid::SubIntervalGrid(std::size_t count, double t_min, double t_max) {
    if (count == 0) {
        throw InputError("sub-interval count must be positive");
    }
    if (!(t_min < t_max)) {
        throw InputError("sub-interval grid needs t_min < t_max");
    }
    boundaries_.resize(count + 1);
    const double width = t_max - t_min;
    for (std::size_t i = 0; i < count; ++i) {
        boundaries_[i] = t_min + width * (static_cast<double>(i) / static_cast<double>(count));
    }
    boundaries_[count] = t_max;
}

std::optional<std::size_t> SubIntervalGrid::locate(double t) const {
    if (!(t > boundaries_.front()) || t > boundaries_.back()) {
        return std::nullopt;
    }
    const auto it = std::lower_bound(boundaries_.begin(), boundaries_.end(), t);
    return static_cast<std::size_t>(it - boundaries_.begin()) - 1;
}

std::size_t default_sub_intervals(std::size_t bins) {
    if (bins <= 1) {
        return 1;
    }
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::log(static_cast<double>(bins)))));
}

ErrorProfile precompute_errors(const ProjectedDistribution& p, const NormalParams& normal,
                               const SubIntervalGrid& grid) {
    if (grid.t_min() != p.t_min() || grid.t_max() != p.t_max()) {
        throw InputError("precompute_errors: grid range differs from the projection range");
    }
    const double a = grid.t_min();
    const double b = grid.t_max();
    const auto pts = p.points();
    const auto bounds = grid.boundaries();
    const std::size_t s = grid.count();
    const double base = cdf_antiderivative(normal.mu, normal.sigma, a);

    std::size_t first = 0;
    double level_a = 0.0;
    while (first < pts.size() && pts[first].t <= a) {
        level_a += pts[first].weight;
        ++first;
    }

    // Integral of the step CDF over [a, b].
    double step_area = 0.0;
    {
        double x = a;
        double level = level_a;
        for (std::size_t k = first; k < pts.size() && pts[k].t < b; ++k) {
            step_area += level * (pts[k].t - x);
            x = pts[k].t;
            level += pts[k].weight;
        }
        step_area += level * (b - x);
    }
    const double full = step_area - (cdf_antiderivative(normal.mu, normal.sigma, b) - base);

    ErrorProfile out;
    out.err_full = full;
    out.err_min.assign(s, std::numeric_limits<double>::infinity());
    out.err_max.assign(s, -std::numeric_limits<double>::infinity());

    // D(t) = 2 I(t) - full with I(t) = ∫_a^t Err = G(t) - (F(t) - F(a)).
    auto d_at = [&](double t, double g) {
        const double integral = g - (cdf_antiderivative(normal.mu, normal.sigma, t) - base);
        return 2.0 * integral - full;
    };
    auto offer = [&](std::size_t cell, double value) {
        out.err_min[cell] = std::min(out.err_min[cell], value);
        out.err_max[cell] = std::max(out.err_max[cell], value);
    };

    std::size_t cell = 0;
    std::size_t k = first;
    double x = a;
    double level = level_a;
    double g = 0.0;
    double cdf_x = normal_cdf(normal, x);
    offer(0, d_at(a, 0.0));
    while (true) {
        const double next_bound = bounds[cell + 1];
        const double next_point = (k < pts.size() && pts[k].t < b) ? pts[k].t : std::numeric_limits<double>::infinity();
        const double y = std::min(next_bound, next_point);
        const double cdf_y = normal_cdf(normal, y);
        // The error changes sign inside the segment where Φ crosses the step level.
        if (level > 0.0 && level < 1.0 && cdf_x < level && level < cdf_y) {
            const double root = solve_cdf_level(normal, level, x, y);
            offer(cell, d_at(root, g + level * (root - x)));
        }
        g += level * (y - x);
        x = y;
        cdf_x = cdf_y;
        const double d_y = d_at(y, g);
        offer(cell, d_y);
        if (y == next_point) {
            level += pts[k].weight;
            ++k;
        }
        if (y == next_bound) {
            if (cell + 1 == s) {
                break;
            }
            ++cell;
            offer(cell, d_y);
        }
    }
    return out;
}

NormalSummary::NormalSummary(ObjectId id, NormalParams n, ErrorProfile e)
    : object_id(id), normal(n), errors(std::move(e)) {
    lowest_err_min = *std::min_element(errors.err_min.begin(), errors.err_min.end());
    highest_err_max = *std::max_element(errors.err_max.begin(), errors.err_max.end());
}

NormalSummary summarize(const ProjectedDistribution& p, const SubIntervalGrid& grid, ObjectId id) {
    const NormalParams n = fit_normal(p);
    return {id, n, precompute_errors(p, n, grid)};
}

double emd_lb(const NormalSummary& p, const NormalSummary& q, const SubIntervalGrid& grid) {
    if (p.sub_intervals() != grid.count() || q.sub_intervals() != grid.count()) {
        throw InputError("emd_lb: summaries do not match the sub-interval grid");
    }
    const double a = grid.t_min();
    const double b = grid.t_max();
    const double normal_term = emd_normal(p.normal, q.normal, a, b);

    const auto cross = intersection_point(p.normal, q.normal);
    const auto cell = cross ? grid.locate(*cross) : std::nullopt;
    double correction = 0.0;
    if (cell) {
        // The CDF with the larger spread lies above the other left of the crossing.
        if (p.normal.sigma > q.normal.sigma) {
            correction = p.errors.err_min[*cell] - q.errors.err_max[*cell];
        } else {
            correction = -p.errors.err_max[*cell] + q.errors.err_min[*cell];
        }
    } else {
        // One normal lies below the other over the whole range.
        const double mid = 0.5 * (a + b);
        const double zp = (mid - p.normal.mu) / p.normal.sigma;
        const double zq = (mid - q.normal.mu) / q.normal.sigma;
        const double fp = p.errors.err_full;
        const double fq = q.errors.err_full;
        if (zp < zq) {
            correction = fq - fp;
        } else if (zq < zp) {
            correction = fp - fq;
        } else {
            correction = std::abs(fp - fq);
        }
    }
    return std::max(0.0, normal_term + correction);
}

}  // namespace nlbi
