#include "sgrt/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sgrt {

namespace {

constexpr double gamma3() {
    constexpr double eps = std::numeric_limits<double>::epsilon() * 0.5;
    return 3.0 * eps / (1.0 - 3.0 * eps);
}

constexpr int kBins = 16;
constexpr int kMedianOnlyDepth = 40;

struct Builder {
    std::span<const Aabb> boxes;
    std::vector<Vec3> centroids;
    std::vector<std::uint32_t> order;
    std::vector<Bvh::Node> nodes;
    int leaf_size;
    int max_depth = 0;

    Aabb bounds_of(std::uint32_t begin, std::uint32_t end) const {
        Aabb b;
        for (std::uint32_t i = begin; i < end; ++i)
            b.expand(boxes[order[i]]);
        return b;
    }

    // Returns the split position in [begin, end), or end when no SAH split exists.
    std::uint32_t sah_split(std::uint32_t begin, std::uint32_t end, const Aabb &node_box) {
        Aabb cbox;
        for (std::uint32_t i = begin; i < end; ++i)
            cbox.expand(centroids[order[i]]);
        const Vec3 extent = cbox.extent();
        int axis = 0;
        if (extent.y() > extent[axis])
            axis = 1;
        if (extent.z() > extent[axis])
            axis = 2;
        if (!(extent[axis] > 0.0))
            return end;

        struct Bin {
            Aabb box;
            std::uint32_t count = 0;
        };
        Bin bins[kBins];
        const double scale = kBins / extent[axis];
        auto bin_of = [&](std::uint32_t prim) {
            const int b = static_cast<int>((centroids[prim][axis] - cbox.lo[axis]) * scale);
            return std::clamp(b, 0, kBins - 1);
        };
        for (std::uint32_t i = begin; i < end; ++i) {
            Bin &bin = bins[bin_of(order[i])];
            bin.box.expand(boxes[order[i]]);
            ++bin.count;
        }

        double right_area[kBins];
        std::uint32_t right_count[kBins];
        Aabb acc;
        std::uint32_t n = 0;
        for (int b = kBins - 1; b > 0; --b) {
            acc.expand(bins[b].box);
            n += bins[b].count;
            right_area[b] = acc.surface_area();
            right_count[b] = n;
        }

        double best_cost = std::numeric_limits<double>::infinity();
        int best_bin = -1;
        acc = Aabb{};
        n = 0;
        for (int b = 1; b < kBins; ++b) {
            acc.expand(bins[b - 1].box);
            n += bins[b - 1].count;
            if (n == 0 || right_count[b] == 0)
                continue;
            const double cost = acc.surface_area() * n + right_area[b] * right_count[b];
            if (cost < best_cost) {
                best_cost = cost;
                best_bin = b;
            }
        }
        if (best_bin < 0 || !(node_box.surface_area() > 0.0))
            return end;

        auto mid = std::partition(order.begin() + begin, order.begin() + end,
                                  [&](std::uint32_t prim) { return bin_of(prim) < best_bin; });
        return static_cast<std::uint32_t>(mid - order.begin());
    }

    std::uint32_t median_split(std::uint32_t begin, std::uint32_t end, const Aabb &node_box) {
        const Vec3 extent = node_box.extent();
        int axis = 0;
        if (extent.y() > extent[axis])
            axis = 1;
        if (extent.z() > extent[axis])
            axis = 2;
        const std::uint32_t mid = begin + (end - begin) / 2;
        std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                         [&](std::uint32_t a, std::uint32_t b) {
                             if (centroids[a][axis] != centroids[b][axis])
                                 return centroids[a][axis] < centroids[b][axis];
                             return a < b;
                         });
        return mid;
    }

    std::uint32_t build(std::uint32_t begin, std::uint32_t end, int depth) {
        max_depth = std::max(max_depth, depth);
        const std::uint32_t index = static_cast<std::uint32_t>(nodes.size());
        nodes.emplace_back();
        const Aabb box = bounds_of(begin, end);
        nodes[index].box = box;

        const std::uint32_t count = end - begin;
        if (count <= static_cast<std::uint32_t>(leaf_size)) {
            nodes[index].first_or_right = begin;
            nodes[index].count = count;
            return index;
        }

        std::uint32_t mid = end;
        if (depth < kMedianOnlyDepth)
            mid = sah_split(begin, end, box);
        if (mid == begin || mid == end)
            mid = median_split(begin, end, box);

        build(begin, mid, depth + 1);
        const std::uint32_t right = build(mid, end, depth + 1);
        nodes[index].first_or_right = right;
        nodes[index].count = 0;
        return index;
    }
};

} // namespace

std::optional<double> intersect_box(const Aabb &box, const Vec3 &origin, const Vec3 &inv_dir,
                                    double t_min, double t_max) {
    double t0 = t_min;
    double t1 = t_max;
    for (int axis = 0; axis < 3; ++axis) {
        if (std::isinf(inv_dir[axis])) {
            // Parallel to this slab pair.
            if (origin[axis] < box.lo[axis] || origin[axis] > box.hi[axis])
                return std::nullopt;
            continue;
        }
        double t_near = (box.lo[axis] - origin[axis]) * inv_dir[axis];
        double t_far = (box.hi[axis] - origin[axis]) * inv_dir[axis];
        if (t_near > t_far)
            std::swap(t_near, t_far);
        t_far *= 1.0 + 2.0 * gamma3();
        t0 = t_near > t0 ? t_near : t0;
        t1 = t_far < t1 ? t_far : t1;
        if (t0 > t1)
            return std::nullopt;
    }
    return t0;
}

Bvh Bvh::build(std::span<const Aabb> boxes, int leaf_size) {
    if (leaf_size < 1)
        throw Error("BVH leaf size must be at least 1");
    Bvh bvh;
    bvh.leaf_size_ = leaf_size;
    if (boxes.empty())
        return bvh;

    Builder b{boxes, {}, {}, {}, leaf_size};
    b.centroids.reserve(boxes.size());
    for (const Aabb &box : boxes)
        b.centroids.push_back(box.center());
    b.order.resize(boxes.size());
    std::iota(b.order.begin(), b.order.end(), 0u);
    b.nodes.reserve(2 * boxes.size() / static_cast<std::size_t>(leaf_size) + 1);
    b.build(0, static_cast<std::uint32_t>(boxes.size()), 0);

    if (b.max_depth > kMaxDepth)
        throw Error("BVH depth exceeds traversal stack");

    bvh.nodes_ = std::move(b.nodes);
    bvh.prim_order_ = std::move(b.order);
    bvh.prim_boxes_.reserve(boxes.size());
    for (std::uint32_t prim : bvh.prim_order_)
        bvh.prim_boxes_.push_back(boxes[prim]);
    bvh.depth_ = b.max_depth;
    return bvh;
}

} // namespace sgrt
