#include "nlbi/index.hpp"

#include <algorithm>
#include <unordered_set>

namespace nlbi {

namespace {

void check_dataset(std::span<const DiscreteDistribution> dataset) {
    if (dataset.empty()) {
        throw InputError("cannot index an empty dataset");
    }
    const std::size_t dim = dataset.front().dim();
    std::unordered_set<ObjectId> ids;
    for (const auto& p : dataset) {
        if (p.dim() != dim) {
            throw InputError("distribution " + std::to_string(p.id()) + " has dimension " +
                             std::to_string(p.dim()) + ", expected " + std::to_string(dim));
        }
        if (!ids.insert(p.id()).second) {
            throw InputError("duplicate object id " + std::to_string(p.id()));
        }
    }
}

}  // namespace

Index::Index(std::vector<DiscreteDistribution> objects, std::vector<ProjectionIndex> projections,
             std::size_t node_capacity)
    : objects_(std::move(objects)), projections_(std::move(projections)), node_capacity_(node_capacity) {
    if (objects_.empty() || projections_.empty()) {
        throw InputError("index needs at least one object and one projection");
    }
    positions_.reserve(objects_.size());
    for (std::size_t i = 0; i < objects_.size(); ++i) {
        positions_.emplace(objects_[i].id(), i);
    }
}

std::optional<std::size_t> Index::position_of(ObjectId id) const {
    const auto it = positions_.find(id);
    if (it == positions_.end()) {
        return std::nullopt;
    }
    return it->second;
}

ProjectionIndex build_projection(std::span<const DiscreteDistribution> dataset, ProjectionVector vector,
                                 std::size_t sub_intervals, std::size_t node_capacity) {
    SubIntervalGrid grid(sub_intervals, vector.t_min, vector.t_max);
    std::vector<NormalSummary> summaries;
    std::vector<DominancePoint> points;
    summaries.reserve(dataset.size());
    points.reserve(dataset.size());
    for (const auto& p : dataset) {
        summaries.push_back(summarize(project(p, vector), grid, p.id()));
        points.push_back(to_dominance_point(summaries.back().normal, grid.t_min(), grid.t_max(), p.id()));
    }
    QuadTree tree = build_quadtree(points, summaries, node_capacity);
    return {std::move(vector), std::move(grid), std::move(summaries), std::move(points), std::move(tree)};
}

Index build_index(std::vector<DiscreteDistribution> dataset, std::vector<ProjectionVector> projections,
                  std::size_t sub_intervals, std::size_t node_capacity) {
    check_dataset(dataset);
    if (projections.empty()) {
        throw InputError("at least one projection is required");
    }
    if (sub_intervals == 0) {
        throw InputError("sub-interval count must be positive");
    }
    if (node_capacity == 0) {
        throw InputError("node capacity must be positive");
    }
    std::vector<ProjectionIndex> built;
    built.reserve(projections.size());
    for (auto& vector : projections) {
        if (vector.components.size() != dataset.front().dim()) {
            throw InputError("projection dimension differs from the dataset");
        }
        built.push_back(build_projection(dataset, std::move(vector), sub_intervals, node_capacity));
    }
    return {std::move(dataset), std::move(built), node_capacity};
}

Index build_index(std::vector<DiscreteDistribution> dataset, const BuildConfig& config) {
    check_dataset(dataset);
    const std::size_t dim = dataset.front().dim();
    const std::size_t count = config.projections.value_or(default_projection_count(dim));
    if (count == 0 || count > dim) {
        throw InputError("projection count must be between 1 and the dimension " + std::to_string(dim));
    }
    std::size_t max_bins = 0;
    for (const auto& p : dataset) {
        max_bins = std::max(max_bins, p.size());
    }
    const std::size_t s = config.sub_intervals.value_or(default_sub_intervals(max_bins));
    auto vectors = select_projections(dataset, count);
    return build_index(std::move(dataset), std::move(vectors), s, config.node_capacity);
}

std::uint64_t summary_table_reals(const Index& index) {
    return static_cast<std::uint64_t>(index.size()) * index.projections().size() *
           (3 + 2 * static_cast<std::uint64_t>(index.sub_intervals()));
}

}  // namespace nlbi
