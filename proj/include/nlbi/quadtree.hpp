#pragma once

#include "nlbi/dominance.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nlbi {

inline constexpr std::size_t kDefaultNodeCapacity = 100;
inline constexpr std::size_t kMaxTreeDepth = 32;

struct QuadTreeNode {
    BoundingRegion region;
    std::vector<std::uint32_t> children;  // node indices, empty for leaves
    std::vector<std::uint32_t> entries;   // object positions, leaves only
    std::uint32_t depth = 0;

    bool is_leaf() const noexcept { return children.empty(); }
};

/**
 * @brief Quad-tree over sheared dominance coordinates.
 *
 * Nodes are stored in preorder; node 0 is the root. Each node's region is the
 * tight box of the points below it, split at the box midpoint. Splitting stops
 * once a node fits within `capacity` entries or cannot be split further.
 */
class QuadTree {
public:
    QuadTree() = default;
    QuadTree(std::vector<QuadTreeNode> nodes, std::size_t capacity);

    std::span<const QuadTreeNode> nodes() const noexcept { return nodes_; }
    const QuadTreeNode& root() const { return nodes_.front(); }
    std::size_t capacity() const noexcept { return capacity_; }
    bool empty() const noexcept { return nodes_.empty(); }

private:
    std::vector<QuadTreeNode> nodes_;
    std::size_t capacity_ = kDefaultNodeCapacity;
};

QuadTree build_quadtree(std::span<const DominancePoint> points, std::span<const NormalSummary> summaries,
                        std::size_t capacity = kDefaultNodeCapacity);

/// Structural audit: containment, envelopes, capacity, every entry in exactly
/// one leaf. Returns human-readable problems; empty when the tree is sound.
std::vector<std::string> audit_quadtree(const QuadTree& tree, std::span<const DominancePoint> points,
                                        std::span<const NormalSummary> summaries);

}  // namespace nlbi
