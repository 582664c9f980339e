#include "nlbi/projection.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

namespace nlbi {

namespace {

void mix(std::uint64_t& h, double x) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    for (int k = 0; k < 8; ++k) {
        h ^= (bits >> (8 * k)) & 0xffu;
        h *= 0x100000001b3ull;
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        acc += a[k] * b[k];
    }
    return acc;
}

void fix_sign(std::vector<double>& v) {
    std::size_t arg = 0;
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (std::abs(v[k]) > std::abs(v[arg])) {
            arg = k;
        }
    }
    if (v[arg] < 0.0) {
        for (double& x : v) {
            x = -x;
        }
    }
}

// Center = unweighted mean of all projected bin locations; the range is then
// widened if needed so that t_min < 0 < t_max holds strictly.
void fit_frame(std::span<const DiscreteDistribution> dataset, ProjectionVector& s) {
    double sum = 0.0;
    std::size_t count = 0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& dist : dataset) {
        for (std::size_t i = 0; i < dist.size(); ++i) {
            const double t = dot(s.components, dist.bin(i));
            sum += t;
            ++count;
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
    }
    s.center = sum / static_cast<double>(count);
    s.t_min = lo - s.center;
    s.t_max = hi - s.center;
    const double span = s.t_max - s.t_min;
    if (!(span > 1e-9)) {
        s.t_min = -0.5;
        s.t_max = 0.5;
        return;
    }
    if (s.t_min >= 0.0) {
        s.t_min = -1e-6 * span;
    }
    if (s.t_max <= 0.0) {
        s.t_max = 1e-6 * span;
    }
}

}  // namespace

std::uint64_t ProjectionVector::fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (double c : components) {
        mix(h, c);
    }
    mix(h, center);
    mix(h, t_min);
    mix(h, t_max);
    return h;
}

ProjectedDistribution::ProjectedDistribution(std::vector<ProjectedPoint> points, double t_min,
                                             double t_max, std::uint64_t frame)
    : t_min_(t_min), t_max_(t_max), frame_(frame) {
    if (points.empty()) {
        throw InputError("projected distribution: no points");
    }
    if (!(t_min < t_max)) {
        throw InputError("projected distribution: t_min must be below t_max");
    }
    std::stable_sort(points.begin(), points.end(),
                     [](const ProjectedPoint& a, const ProjectedPoint& b) { return a.t < b.t; });
    double total = 0.0;
    for (const auto& pt : points) {
        if (!(pt.weight >= 0.0) || !std::isfinite(pt.t)) {
            throw InputError("projected distribution: invalid point");
        }
        total += pt.weight;
        if (!points_.empty() && points_.back().t == pt.t) {
            points_.back().weight += pt.weight;
        } else {
            points_.push_back(pt);
        }
    }
    if (std::abs(total - 1.0) > kWeightSumTolerance) {
        throw InputError("projected distribution: weights sum to " + std::to_string(total));
    }
}

double ProjectedDistribution::cdf(double t) const {
    double acc = 0.0;
    for (const auto& pt : points_) {
        if (pt.t > t) {
            break;
        }
        acc += pt.weight;
    }
    return acc;
}

std::size_t default_projection_count(std::size_t dim) { return dim >= 2 ? 2 : 1; }

std::vector<ProjectionVector> select_projections(std::span<const DiscreteDistribution> dataset,
                                                 std::size_t count) {
    if (dataset.empty()) {
        throw InputError("select_projections: empty dataset");
    }
    const std::size_t d = dataset.front().dim();
    if (count == 0 || count > d) {
        throw InputError("select_projections: projection count " + std::to_string(count) +
                         " must be in [1, " + std::to_string(d) + "]");
    }

    // Mass-weighted covariance of the pooled bin cloud.
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    for (const auto& dist : dataset) {
        if (dist.dim() != d) {
            throw InputError("select_projections: mixed dimensions");
        }
        for (std::size_t i = 0; i < dist.size(); ++i) {
            const auto b = dist.bin(i);
            for (std::size_t k = 0; k < d; ++k) {
                mean[static_cast<Eigen::Index>(k)] += dist.weights()[i] * b[k];
            }
        }
    }
    const double objects = static_cast<double>(dataset.size());
    mean /= objects;

    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    Eigen::VectorXd x(static_cast<Eigen::Index>(d));
    for (const auto& dist : dataset) {
        for (std::size_t i = 0; i < dist.size(); ++i) {
            const auto b = dist.bin(i);
            for (std::size_t k = 0; k < d; ++k) {
                x[static_cast<Eigen::Index>(k)] = b[k] - mean[static_cast<Eigen::Index>(k)];
            }
            cov.noalias() += dist.weights()[i] * (x * x.transpose());
        }
    }
    cov /= objects;

    std::vector<ProjectionVector> out(count);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    const bool degenerate = solver.info() != Eigen::Success || !(solver.eigenvalues().maxCoeff() > 1e-300);
    if (degenerate) {
        std::clog << "warning: zero-variance bin cloud; using canonical axes as projections\n";
    }
    for (std::size_t j = 0; j < count; ++j) {
        auto& s = out[j];
        s.components.assign(d, 0.0);
        if (degenerate) {
            s.components[j] = 1.0;
        } else {
            const auto col = solver.eigenvectors().col(static_cast<Eigen::Index>(d - 1 - j));
            for (std::size_t k = 0; k < d; ++k) {
                s.components[k] = col[static_cast<Eigen::Index>(k)];
            }
            const double norm = std::sqrt(dot(s.components, s.components));
            for (double& c : s.components) {
                c /= norm;
            }
            fix_sign(s.components);
        }
        fit_frame(dataset, s);
    }
    return out;
}

ProjectionVector make_projection(std::span<const DiscreteDistribution> dataset, std::vector<double> direction) {
    if (dataset.empty()) {
        throw InputError("make_projection: empty dataset");
    }
    if (direction.size() != dataset.front().dim()) {
        throw InputError("make_projection: direction dimension mismatch");
    }
    const double norm = std::sqrt(dot(direction, direction));
    if (!(norm > 0.0)) {
        throw InputError("make_projection: zero direction");
    }
    ProjectionVector s;
    s.components = std::move(direction);
    for (double& c : s.components) {
        c /= norm;
    }
    fit_frame(dataset, s);
    return s;
}

ProjectedDistribution project(const DiscreteDistribution& p, const ProjectionVector& s) {
    if (p.dim() != s.components.size()) {
        throw InputError("project: distribution has dimension " + std::to_string(p.dim()) +
                         ", projection has " + std::to_string(s.components.size()));
    }
    std::vector<ProjectedPoint> pts;
    pts.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        pts.push_back({dot(s.components, p.bin(i)) - s.center, p.weights()[i]});
    }
    return {std::move(pts), s.t_min, s.t_max, s.fingerprint()};
}

double projection_emd(const ProjectedDistribution& p, const ProjectedDistribution& q) {
    if (p.frame() != q.frame() || p.t_min() != q.t_min() || p.t_max() != q.t_max()) {
        throw InputError("projection_emd: distributions come from different projections");
    }
    const auto a = p.points();
    const auto b = q.points();
    std::size_t i = 0;
    std::size_t j = 0;
    double cdf_a = 0.0;
    double cdf_b = 0.0;
    double prev = std::min(a.front().t, b.front().t);
    double total = 0.0;
    while (i < a.size() || j < b.size()) {
        const double next = (j >= b.size() || (i < a.size() && a[i].t <= b[j].t)) ? a[i].t : b[j].t;
        total += std::abs(cdf_a - cdf_b) * (next - prev);
        while (i < a.size() && a[i].t == next) {
            cdf_a += a[i++].weight;
        }
        while (j < b.size() && b[j].t == next) {
            cdf_b += b[j++].weight;
        }
        prev = next;
    }
    return total;
}

double combine_projection_bounds(std::span<const double> bounds) {
    if (bounds.empty()) {
        throw InputError("combine_projection_bounds: no bounds");
    }
    const double sum = std::accumulate(bounds.begin(), bounds.end(), 0.0);
    return sum / std::sqrt(static_cast<double>(bounds.size()));
}

}  // namespace nlbi
