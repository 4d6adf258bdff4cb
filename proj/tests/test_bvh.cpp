#include "sgrt/bvh.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

using namespace sgrt;

namespace {

// Brute-force overlap of a segment with a box, axis by axis.
bool segment_overlaps(const Aabb &b, const Ray &r, double t_max) {
    const double widen = 1.0 + 2.0 * (3.0 * 0.5 * std::numeric_limits<double>::epsilon()) /
                                   (1.0 - 3.0 * 0.5 * std::numeric_limits<double>::epsilon());
    double lo = r.t_min, hi = t_max;
    for (int a = 0; a < 3; ++a) {
        const double o = r.origin[a], d = r.direction[a];
        if (d == 0.0) {
            if (o < b.lo[a] || o > b.hi[a])
                return false;
            continue;
        }
        double t0 = (b.lo[a] - o) / d, t1 = (b.hi[a] - o) / d;
        if (t0 > t1)
            std::swap(t0, t1);
        lo = std::max(lo, t0);
        hi = std::min(hi, t1 * widen);
    }
    return lo <= hi;
}

std::vector<Aabb> random_boxes(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(-10.0, 10.0);
    std::uniform_real_distribution<double> size(0.01, 0.6);
    std::vector<Aabb> boxes;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 c(pos(rng), pos(rng), pos(rng));
        const Vec3 h(size(rng), size(rng), size(rng));
        boxes.push_back({c - h, c + h});
    }
    return boxes;
}

Ray random_ray(std::mt19937_64 &rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    Ray r;
    r.origin = 20.0 * Vec3(n(rng), n(rng), n(rng)).normalized();
    r.direction = (Vec3(u(rng), u(rng), u(rng)) - r.origin).normalized();
    return r;
}

void audit(const Bvh &bvh, std::uint32_t node, std::span<const Aabb> boxes,
           std::vector<int> &reached, int &bad) {
    const auto &n = bvh.nodes()[node];
    if (n.is_leaf()) {
        for (std::uint32_t i = n.first_or_right; i < n.first_or_right + n.count; ++i) {
            const std::uint32_t prim = bvh.prim_order()[i];
            ++reached[prim];
            bad += n.box.contains(boxes[prim]) ? 0 : 1;
        }
        return;
    }
    for (std::uint32_t child : {node + 1, n.first_or_right}) {
        bad += n.box.contains(bvh.nodes()[child].box) ? 0 : 1;
        audit(bvh, child, boxes, reached, bad);
    }
}

} // namespace

TEST_CASE("empty BVH visits nothing") {
    const Bvh bvh = Bvh::build({});
    CHECK(bvh.empty());
    Ray r;
    int visits = 0;
    bvh.traverse(r, [&](std::size_t) { ++visits; });
    CHECK(visits == 0);
}

TEST_CASE("single box becomes a single leaf") {
    const std::vector<Aabb> boxes = {{Vec3(-1, -2, -3), Vec3(1, 2, 3)}};
    const Bvh bvh = Bvh::build(boxes);
    REQUIRE(bvh.nodes().size() == 1);
    CHECK(bvh.nodes()[0].is_leaf());
    CHECK(bvh.nodes()[0].box.lo == boxes[0].lo);
    CHECK(bvh.nodes()[0].box.hi == boxes[0].hi);
}

TEST_CASE("containment, permutation and depth invariants on 10^4 boxes") {
    const auto boxes = random_boxes(10000, 1);
    const Bvh bvh = Bvh::build(boxes);
    std::vector<int> reached(boxes.size(), 0);
    int bad = 0;
    audit(bvh, 0, boxes, reached, bad);
    CHECK(bad == 0);
    CHECK(std::all_of(reached.begin(), reached.end(), [](int c) { return c == 1; }));
    std::vector<std::uint32_t> order(bvh.prim_order().begin(), bvh.prim_order().end());
    std::sort(order.begin(), order.end());
    for (std::uint32_t i = 0; i < order.size(); ++i)
        REQUIRE(order[i] == i);
    CHECK(bvh.depth() <= Bvh::kMaxDepth);
    for (const auto &n : bvh.nodes()) {
        if (n.is_leaf())
            CHECK(n.count <= 4u);
    }
}

TEST_CASE("build is deterministic") {
    const auto boxes = random_boxes(3000, 2);
    const Bvh a = Bvh::build(boxes);
    const Bvh b = Bvh::build(boxes);
    REQUIRE(a.nodes().size() == b.nodes().size());
    CHECK(std::equal(a.prim_order().begin(), a.prim_order().end(), b.prim_order().begin()));
}

TEST_CASE("degenerate inputs stay within the depth bound") {
    // All centroids identical: SAH finds no split, median fallback applies.
    std::vector<Aabb> boxes(5000, Aabb{Vec3::Zero(), Vec3::Ones()});
    const Bvh bvh = Bvh::build(boxes);
    CHECK(bvh.depth() <= Bvh::kMaxDepth);
    Ray r;
    r.origin = Vec3(0.5, 0.5, -5);
    std::size_t visits = 0;
    bvh.traverse(r, [&](std::size_t) { ++visits; });
    CHECK(visits == boxes.size());
}

TEST_CASE("unclipped traversal equals brute-force slab tests") {
    const auto boxes = random_boxes(10000, 3);
    const Bvh bvh = Bvh::build(boxes);
    std::mt19937_64 rng(4);
    for (int i = 0; i < 200; ++i) {
        Ray r = random_ray(rng);
        std::set<std::size_t> visited;
        bvh.traverse(r, [&](std::size_t p) { CHECK(visited.insert(p).second); });
        std::set<std::size_t> expected;
        for (std::size_t p = 0; p < boxes.size(); ++p) {
            if (segment_overlaps(boxes[p], r, r.t_max))
                expected.insert(p);
        }
        REQUIRE(visited == expected);
    }
}

TEST_CASE("axis-parallel rays") {
    const auto boxes = random_boxes(2000, 5);
    const Bvh bvh = Bvh::build(boxes);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 100; ++i) {
        Ray r;
        r.origin = Vec3(u(rng), u(rng), -30.0);
        r.direction = Vec3::UnitZ();
        std::set<std::size_t> visited, expected;
        bvh.traverse(r, [&](std::size_t p) { visited.insert(p); });
        for (std::size_t p = 0; p < boxes.size(); ++p) {
            if (segment_overlaps(boxes[p], r, r.t_max))
                expected.insert(p);
        }
        CHECK(visited == expected);
    }
}

TEST_CASE("ray missing the scene bounds visits nothing") {
    const auto boxes = random_boxes(1000, 7);
    const Bvh bvh = Bvh::build(boxes);
    Ray r;
    r.origin = Vec3(100, 100, 100);
    r.direction = Vec3(1, 0, 0);
    int visits = 0;
    TraversalStats stats;
    bvh.traverse(r, [&](std::size_t) { ++visits; }, &stats);
    CHECK(visits == 0);
    CHECK(stats.nodes_visited == 0);
}

TEST_CASE("clipping never skips a primitive overlapping the final segment") {
    const auto boxes = random_boxes(10000, 8);
    const Bvh bvh = Bvh::build(boxes);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::size_t clipped_visits = 0, full_visits = 0;
    for (int i = 0; i < 300; ++i) {
        const Ray original = random_ray(rng);
        Ray r = original;
        std::set<std::size_t> visited;
        // Shrink to the box entry with some probability, like an acceptance.
        bvh.traverse(r, [&](std::size_t p) {
            visited.insert(p);
            if (coin(rng) < 0.2) {
                const auto entry = intersect_box(boxes[p], r.origin, safe_inverse(r.direction),
                                                 r.t_min, r.t_max);
                REQUIRE(entry.has_value());
                r.t_max = std::max(*entry, r.t_min + 1e-9);
            }
        });
        clipped_visits += visited.size();
        for (std::size_t p = 0; p < boxes.size(); ++p) {
            if (segment_overlaps(boxes[p], original, r.t_max)) {
                CHECK(visited.count(p) == 1);
            }
        }
        Ray full = original;
        bvh.traverse(full, [&](std::size_t) { ++full_visits; });
    }
    CHECK(clipped_visits < full_visits);
}

TEST_CASE("primitives entered beyond a shrunk far bound are skipped") {
    // Boxes along +z; the visitor clips to the first box it sees.
    std::vector<Aabb> boxes;
    for (int i = 0; i < 64; ++i)
        boxes.push_back({Vec3(-1, -1, 2.0 * i), Vec3(1, 1, 2.0 * i + 1)});
    const Bvh bvh = Bvh::build(boxes);
    Ray r;
    r.origin = Vec3(0, 0, -1);
    std::vector<std::size_t> log;
    bvh.traverse(r, [&](std::size_t p) {
        log.push_back(p);
        r.t_max = std::min(r.t_max, 1.0 + 2.0 * static_cast<double>(p) + 0.5);
    });
    REQUIRE_FALSE(log.empty());
    // Near-to-far ordering reaches box 0 first; nothing beyond it afterwards.
    CHECK(log.front() == 0);
    CHECK(log.size() == 1);
}
