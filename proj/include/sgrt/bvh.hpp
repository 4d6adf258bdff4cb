#pragma once

#include "sgrt/gaussian.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sgrt {

/// Slab test against [ray.t_min, t_max]. The far plane is widened by a few
/// ulps so boxes touched exactly at a boundary are reported. Returns the entry
/// distance on hit.
std::optional<double> intersect_box(const Aabb &box, const Vec3 &origin, const Vec3 &inv_dir,
                                    double t_min, double t_max);

inline Vec3 safe_inverse(const Vec3 &d) {
    return Vec3(1.0 / d.x(), 1.0 / d.y(), 1.0 / d.z());
}

struct TraversalStats {
    std::size_t nodes_visited = 0;
    std::size_t prims_tested = 0;
};

/// Binary bounding volume hierarchy over primitive boxes.
///
/// Nodes are stored depth-first: an interior node's left child immediately
/// follows it, `right` indexes the right child. Leaves reference the range
/// [first, first + count) of `prim_order()`.
class Bvh {
public:
    static constexpr int kMaxDepth = 64;

    struct Node {
        Aabb box;
        std::uint32_t first_or_right = 0;
        std::uint32_t count = 0; // 0 for interior nodes

        bool is_leaf() const { return count > 0; }
    };

    Bvh() = default;

    /// Binned SAH build; falls back to a median split deeper in the tree so
    /// the depth never exceeds kMaxDepth.
    static Bvh build(std::span<const Aabb> boxes, int leaf_size = 4);

    bool empty() const { return nodes_.empty(); }
    std::span<const Node> nodes() const { return nodes_; }
    std::span<const std::uint32_t> prim_order() const { return prim_order_; }
    std::span<const Aabb> prim_boxes() const { return prim_boxes_; }
    int leaf_size() const { return leaf_size_; }
    int depth() const { return depth_; }

    /// Calls `visit(prim_id)` for every primitive whose box overlaps the
    /// ray's current [t_min, t_max]. The visitor may shrink `ray.t_max`;
    /// nodes and primitives entered strictly beyond it are then skipped.
    /// Children are visited near-to-far.
    template <class Visitor>
    void traverse(Ray &ray, Visitor &&visit, TraversalStats *stats = nullptr) const {
        if (nodes_.empty())
            return;
        const Vec3 inv_dir = safe_inverse(ray.direction);
        std::uint32_t stack[kMaxDepth + 1];
        int top = 0;
        if (!intersect_box(nodes_[0].box, ray.origin, inv_dir, ray.t_min, ray.t_max))
            return;
        stack[top++] = 0;
        while (top > 0) {
            const Node &node = nodes_[stack[--top]];
            // Re-test: t_max may have shrunk since this node was pushed.
            if (!intersect_box(node.box, ray.origin, inv_dir, ray.t_min, ray.t_max))
                continue;
            if (stats)
                ++stats->nodes_visited;
            if (node.is_leaf()) {
                for (std::uint32_t i = node.first_or_right; i < node.first_or_right + node.count;
                     ++i) {
                    if (!intersect_box(prim_boxes_[i], ray.origin, inv_dir, ray.t_min, ray.t_max))
                        continue;
                    if (stats)
                        ++stats->prims_tested;
                    visit(static_cast<std::size_t>(prim_order_[i]));
                }
                continue;
            }
            const std::uint32_t self = static_cast<std::uint32_t>(&node - nodes_.data());
            const std::uint32_t left = self + 1;
            const std::uint32_t right = node.first_or_right;
            const auto t_left =
                intersect_box(nodes_[left].box, ray.origin, inv_dir, ray.t_min, ray.t_max);
            const auto t_right =
                intersect_box(nodes_[right].box, ray.origin, inv_dir, ray.t_min, ray.t_max);
            if (t_left && t_right) {
                if (*t_left <= *t_right) {
                    stack[top++] = right;
                    stack[top++] = left;
                } else {
                    stack[top++] = left;
                    stack[top++] = right;
                }
            } else if (t_left) {
                stack[top++] = left;
            } else if (t_right) {
                stack[top++] = right;
            }
        }
    }

private:
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> prim_order_;
    std::vector<Aabb> prim_boxes_; // boxes permuted into prim_order_
    int leaf_size_ = 4;
    int depth_ = 0;
};

} // namespace sgrt
