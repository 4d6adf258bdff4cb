#pragma once

#include "sgrt/hash_rng.hpp"
#include "sgrt/scene.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace sgrt {

inline constexpr std::size_t kNoPrim = std::numeric_limits<std::size_t>::max();
inline constexpr int kMaxMultisample = 256;

/// Closest accepted intersection of one stochastic sample.
struct HitRecord {
    std::size_t prim_id = kNoPrim;
    double t = kInfiniteT;

    bool hit() const { return prim_id != kNoPrim; }
    bool operator==(const HitRecord &) const = default;
};

struct MultiSampleState {
    std::vector<HitRecord> slots;
};

struct ShadeResult {
    Rgb radiance = Rgb::Zero();
    double opacity = 0.0;
};

struct TraceOptions {
    DepthMode depth_mode = DepthMode::Mean;
    /// Shrink the traversal's far bound on acceptance. Results do not depend
    /// on it; disabling only costs work.
    bool clip = true;
    /// Fault injection for the validation suite: accept iff xi >= alpha.
    bool invert_acceptance = false;
};

/// Source of the uniform number deciding a candidate's binary opacity. The
/// default keys it on the hit position; tests substitute forced outcomes.
struct PositionHashSource {
    double operator()(const Vec3 &position, std::size_t /*prim_id*/, std::uint32_t slot) const {
        return hash_position(position, slot);
    }
};

/// Geometric part of the intersection routine: depth per mode, strict range
/// test against (t_lo, t_hi) and the negligibility cull. No randomness.
std::optional<IntersectionCandidate> evaluate_candidate(const Scene &scene, std::size_t prim,
                                                        const Ray &r, DepthMode mode, double t_lo,
                                                        double t_hi);

/// Stand-alone intersection routine for one primitive against the ray's
/// current segment. Returns the accepted depth; the caller clips r.t_max.
std::optional<double> intersect_primitive(const Gaussian3D &g, const Ray &r, DepthMode mode,
                                          double s = kDefaultCutoff, std::uint32_t slot = 0);

namespace detail {

/// Strict total order on (t, prim_id): nearer wins, ties go to the lower id.
inline bool closer(double t, std::size_t prim, const HitRecord &best) {
    return t < best.t || (t == best.t && prim < best.prim_id);
}

inline bool accepts(double xi, double alpha, const TraceOptions &opt) {
    return opt.invert_acceptance ? !(xi < alpha) : xi < alpha;
}

} // namespace detail

template <class XiSource>
HitRecord trace_single_with(const Scene &scene, const Ray &r, const TraceOptions &opt,
                            XiSource &&xi, TraversalStats *stats = nullptr) {
    HitRecord best;
    Ray ray = r;
    const double t_hi = r.t_max;
    scene.bvh().traverse(
        ray,
        [&](std::size_t prim) {
            const auto cand = evaluate_candidate(scene, prim, r, opt.depth_mode, r.t_min, t_hi);
            if (!cand || !detail::closer(cand->t, prim, best))
                return;
            if (!detail::accepts(xi(cand->position, prim, 0u), cand->alpha, opt))
                return;
            best = {prim, cand->t};
            if (opt.clip)
                ray.t_max = cand->t;
        },
        stats);
    return best;
}

template <class XiSource>
MultiSampleState trace_multi_with(const Scene &scene, const Ray &r, int n,
                                  const TraceOptions &opt, XiSource &&xi,
                                  TraversalStats *stats = nullptr) {
    if (n < 1 || n > kMaxMultisample)
        throw Error("multi-sample count must be in [1, 256]");
    MultiSampleState state{std::vector<HitRecord>(static_cast<std::size_t>(n))};
    Ray ray = r;
    const double t_hi = r.t_max;
    std::size_t empty_slots = state.slots.size();
    scene.bvh().traverse(
        ray,
        [&](std::size_t prim) {
            const auto cand = evaluate_candidate(scene, prim, r, opt.depth_mode, r.t_min, t_hi);
            if (!cand)
                return;
            bool changed = false;
            for (std::uint32_t k = 0; k < state.slots.size(); ++k) {
                HitRecord &slot = state.slots[k];
                if (!detail::closer(cand->t, prim, slot))
                    continue;
                if (!detail::accepts(xi(cand->position, prim, k), cand->alpha, opt))
                    continue;
                if (!slot.hit())
                    --empty_slots;
                slot = {prim, cand->t};
                changed = true;
            }
            if (opt.clip && changed && empty_slots == 0) {
                double far = 0.0;
                for (const HitRecord &slot : state.slots)
                    far = std::max(far, slot.t);
                ray.t_max = far;
            }
        },
        stats);
    return state;
}

/// Nearest accepted intersection over one traversal.
HitRecord trace_single(const Scene &scene, const Ray &r, const TraceOptions &opt = {},
                       TraversalStats *stats = nullptr);

/// n independent nearest-accepted hits from one traversal; slot k draws its
/// binary opacities with hash slot k.
MultiSampleState trace_multi(const Scene &scene, const Ray &r, int n,
                             const TraceOptions &opt = {}, TraversalStats *stats = nullptr);

/// (color, 1) on hit, (background, 0) on miss.
ShadeResult shade_ray(const HitRecord &hit, const Scene &scene, const Ray &r,
                      const Rgb &background);

/// Product of (1 - alpha) over every valid candidate on the segment.
double transmittance(const Scene &scene, const Ray &r, DepthMode mode = DepthMode::Mean);

/// Stochastic-depth comparator: keeps the k nearest accepted candidates and
/// composites them with their fractional opacities. Biased by construction.
template <class XiSource>
ShadeResult biased_depth_trace_with(const Scene &scene, const Ray &r, int k,
                                    const Rgb &background, const TraceOptions &opt,
                                    XiSource &&xi) {
    if (k < 1)
        throw Error("k must be at least 1");
    std::vector<IntersectionCandidate> kept; // sorted by (t, prim_id)
    kept.reserve(static_cast<std::size_t>(k) + 1);
    Ray ray = r;
    const double t_hi = r.t_max;
    auto before = [](const IntersectionCandidate &a, const IntersectionCandidate &b) {
        return a.t < b.t || (a.t == b.t && a.prim_id < b.prim_id);
    };
    scene.bvh().traverse(ray, [&](std::size_t prim) {
        const auto cand = evaluate_candidate(scene, prim, r, opt.depth_mode, r.t_min, t_hi);
        if (!cand)
            return;
        if (static_cast<int>(kept.size()) == k && !before(*cand, kept.back()))
            return;
        if (!detail::accepts(xi(cand->position, prim, 0u), cand->alpha, opt))
            return;
        kept.insert(std::upper_bound(kept.begin(), kept.end(), *cand, before), *cand);
        if (static_cast<int>(kept.size()) > k)
            kept.pop_back();
        if (opt.clip && static_cast<int>(kept.size()) == k)
            ray.t_max = kept.back().t;
    });

    ShadeResult out;
    double trans = 1.0;
    for (const IntersectionCandidate &c : kept) {
        out.radiance += trans * c.alpha * eval_color(scene.gaussian(c.prim_id), r.direction);
        trans *= 1.0 - c.alpha;
    }
    out.radiance += trans * background;
    out.opacity = 1.0 - trans;
    return out;
}

ShadeResult biased_depth_trace(const Scene &scene, const Ray &r, int k, const Rgb &background,
                               const TraceOptions &opt = {});

} // namespace sgrt
