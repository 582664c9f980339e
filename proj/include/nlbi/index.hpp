#pragma once

#include "nlbi/quadtree.hpp"

#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace nlbi {

/// Index construction parameters. Unset counts take their data-driven defaults.
struct BuildConfig {
    std::optional<std::size_t> projections;    // default: 2 when d >= 2, else 1
    std::optional<std::size_t> sub_intervals;  // default: round(ln n) for the largest bin count n
    std::size_t node_capacity = kDefaultNodeCapacity;
};

/// Everything stored for one projection direction.
struct ProjectionIndex {
    ProjectionVector vector;
    SubIntervalGrid grid;
    std::vector<NormalSummary> summaries;  // by object position
    std::vector<DominancePoint> points;    // by object position
    QuadTree tree;
};

/**
 * @brief Immutable search index: the objects plus, per projection, their normal
 * summaries and a dominance-space quad-tree.
 *
 * Objects are addressed by position (0..size()-1); position_of maps ids back.
 */
class Index {
public:
    Index(std::vector<DiscreteDistribution> objects, std::vector<ProjectionIndex> projections,
          std::size_t node_capacity);

    std::span<const DiscreteDistribution> objects() const noexcept { return objects_; }
    const DiscreteDistribution& object(std::size_t position) const { return objects_[position]; }
    std::size_t size() const noexcept { return objects_.size(); }
    std::size_t dim() const noexcept { return objects_.front().dim(); }

    std::span<const ProjectionIndex> projections() const noexcept { return projections_; }
    std::size_t sub_intervals() const noexcept { return projections_.front().grid.count(); }
    std::size_t node_capacity() const noexcept { return node_capacity_; }

    std::optional<std::size_t> position_of(ObjectId id) const;

private:
    std::vector<DiscreteDistribution> objects_;
    std::vector<ProjectionIndex> projections_;
    std::size_t node_capacity_;
    std::unordered_map<ObjectId, std::size_t> positions_;
};

/// Selects PCA projections and builds the index.
Index build_index(std::vector<DiscreteDistribution> dataset, const BuildConfig& config = {});

/// Builds with caller-supplied projection frames, e.g. to sweep s or node
/// capacity while keeping the directions fixed.
Index build_index(std::vector<DiscreteDistribution> dataset, std::vector<ProjectionVector> projections,
                  std::size_t sub_intervals, std::size_t node_capacity);

/// Per-projection summary and dominance point of one object.
ProjectionIndex build_projection(std::span<const DiscreteDistribution> dataset, ProjectionVector vector,
                                 std::size_t sub_intervals, std::size_t node_capacity);

/// Number of reals in the serialized summary table: N * P * (3 + 2s).
std::uint64_t summary_table_reals(const Index& index);

}  // namespace nlbi
