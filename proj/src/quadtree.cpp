#include "nlbi/quadtree.hpp"

#include <array>
#include <numeric>

namespace nlbi {

namespace {

std::size_t quadrant(const BoundingRegion& r, const DominancePoint& p) {
    const double um = 0.5 * (r.u_lo + r.u_hi);
    const double vm = 0.5 * (r.v_lo + r.v_hi);
    return (p.u > um ? 1u : 0u) | (p.v > vm ? 2u : 0u);
}

// True when a midpoint split would leave every entry in one quadrant.
bool inseparable(const BoundingRegion& r, std::span<const std::uint32_t> members,
                 std::span<const DominancePoint> points) {
    const std::size_t first = quadrant(r, points[members.front()]);
    for (const auto idx : members) {
        if (quadrant(r, points[idx]) != first) {
            return false;
        }
    }
    return true;
}

class Builder {
public:
    Builder(std::span<const DominancePoint> points, std::span<const NormalSummary> summaries, std::size_t capacity)
        : points_(points), summaries_(summaries), capacity_(capacity) {}

    std::uint32_t build(std::vector<std::uint32_t> members, std::uint32_t depth) {
        const auto index = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();
        nodes_[index].depth = depth;
        nodes_[index].region = build_bounding_region(members, points_, summaries_);
        const BoundingRegion& region = nodes_[index].region;

        if (members.size() <= capacity_ || depth >= kMaxTreeDepth || inseparable(region, members, points_)) {
            nodes_[index].entries = std::move(members);
            return index;
        }

        std::array<std::vector<std::uint32_t>, 4> parts;
        for (const auto idx : members) {
            parts[quadrant(region, points_[idx])].push_back(idx);
        }
        members.clear();
        members.shrink_to_fit();
        for (auto& part : parts) {
            if (!part.empty()) {
                const auto child = build(std::move(part), depth + 1);
                nodes_[index].children.push_back(child);
            }
        }
        return index;
    }

    std::vector<QuadTreeNode> take() { return std::move(nodes_); }

private:
    std::span<const DominancePoint> points_;
    std::span<const NormalSummary> summaries_;
    std::size_t capacity_;
    std::vector<QuadTreeNode> nodes_;
};

}  // namespace

QuadTree::QuadTree(std::vector<QuadTreeNode> nodes, std::size_t capacity)
    : nodes_(std::move(nodes)), capacity_(capacity) {}

QuadTree build_quadtree(std::span<const DominancePoint> points, std::span<const NormalSummary> summaries,
                        std::size_t capacity) {
    if (points.empty()) {
        throw InputError("build_quadtree: no entries");
    }
    if (points.size() != summaries.size()) {
        throw InputError("build_quadtree: points and summaries differ in length");
    }
    if (capacity == 0) {
        throw InputError("build_quadtree: node capacity must be positive");
    }
    std::vector<std::uint32_t> all(points.size());
    std::iota(all.begin(), all.end(), 0u);
    Builder builder(points, summaries, capacity);
    builder.build(std::move(all), 0);
    return {builder.take(), capacity};
}

std::vector<std::string> audit_quadtree(const QuadTree& tree, std::span<const DominancePoint> points,
                                        std::span<const NormalSummary> summaries) {
    std::vector<std::string> problems;
    auto fail = [&](std::size_t node, const std::string& what) {
        problems.push_back("node " + std::to_string(node) + ": " + what);
    };
    if (tree.empty()) {
        problems.emplace_back("tree has no nodes");
        return problems;
    }
    const auto nodes = tree.nodes();
    std::vector<std::uint32_t> seen(points.size(), 0);
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        const auto& node = nodes[n];
        const auto& r = node.region;
        if (!(r.u_lo <= r.u_hi && r.v_lo <= r.v_hi)) {
            fail(n, "inverted box");
        }
        if (node.is_leaf()) {
            if (node.entries.empty()) {
                fail(n, "empty leaf");
                continue;
            }
            if (node.entries.size() > tree.capacity() && node.depth < kMaxTreeDepth &&
                !inseparable(r, node.entries, points)) {
                fail(n, "leaf exceeds capacity");
            }
            if (r.member_count != node.entries.size()) {
                fail(n, "member count mismatch");
            }
            for (const auto idx : node.entries) {
                if (idx >= points.size()) {
                    fail(n, "entry out of range");
                    continue;
                }
                ++seen[idx];
                const auto& p = points[idx];
                const auto& e = summaries[idx].errors;
                if (!r.contains(p.u, p.v)) {
                    fail(n, "entry outside its box");
                }
                for (std::size_t i = 0; i < r.err_min.size(); ++i) {
                    if (e.err_min[i] < r.err_min[i] || e.err_max[i] > r.err_max[i]) {
                        fail(n, "entry error outside envelope");
                        break;
                    }
                }
                if (e.err_full < r.err_full_min || e.err_full > r.err_full_max) {
                    fail(n, "entry err_full outside envelope");
                }
            }
            continue;
        }
        if (!node.entries.empty()) {
            fail(n, "internal node carries entries");
        }
        std::uint64_t total = 0;
        for (const auto c : node.children) {
            if (c <= n || c >= nodes.size()) {
                fail(n, "child index out of preorder");
                continue;
            }
            const auto& cr = nodes[c].region;
            total += cr.member_count;
            if (nodes[c].depth != node.depth + 1) {
                fail(n, "child depth mismatch");
            }
            if (!(cr.u_lo >= r.u_lo && cr.u_hi <= r.u_hi && cr.v_lo >= r.v_lo && cr.v_hi <= r.v_hi)) {
                fail(n, "child box escapes parent");
            }
            for (std::size_t i = 0; i < r.err_min.size(); ++i) {
                if (cr.err_min[i] < r.err_min[i] || cr.err_max[i] > r.err_max[i]) {
                    fail(n, "child envelope escapes parent");
                    break;
                }
            }
            if (cr.err_full_min < r.err_full_min || cr.err_full_max > r.err_full_max) {
                fail(n, "child err_full envelope escapes parent");
            }
        }
        if (total != r.member_count) {
            fail(n, "member count differs from children");
        }
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (seen[i] != 1) {
            problems.push_back("entry " + std::to_string(i) + " appears in " + std::to_string(seen[i]) + " leaves");
        }
    }
    return problems;
}

}  // namespace nlbi
