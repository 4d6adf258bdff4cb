#include "sgrt/reference.hpp"

#include <algorithm>
#include <bit>

namespace sgrt {

namespace {

void sort_candidates(std::vector<IntersectionCandidate> &c) {
    std::sort(c.begin(), c.end(), [](const IntersectionCandidate &a, const IntersectionCandidate &b) {
        return a.t < b.t || (a.t == b.t && a.prim_id < b.prim_id);
    });
}

} // namespace

std::vector<IntersectionCandidate> collect_candidates(const Scene &scene, const Ray &r,
                                                      DepthMode mode) {
    std::vector<IntersectionCandidate> out;
    for (std::size_t prim = 0; prim < scene.size(); ++prim) {
        if (auto cand = evaluate_candidate(scene, prim, r, mode, r.t_min, r.t_max))
            out.push_back(*cand);
    }
    sort_candidates(out);
    return out;
}

std::vector<IntersectionCandidate> collect_candidates_bvh(const Scene &scene, const Ray &r,
                                                          DepthMode mode) {
    std::vector<IntersectionCandidate> out;
    Ray ray = r;
    scene.bvh().traverse(ray, [&](std::size_t prim) {
        if (auto cand = evaluate_candidate(scene, prim, r, mode, r.t_min, r.t_max))
            out.push_back(*cand);
    });
    sort_candidates(out);
    return out;
}

ShadeResult composite_sorted(std::span<const IntersectionCandidate> candidates,
                             std::span<const Rgb> colors, const Rgb &background) {
    if (colors.size() != candidates.size())
        throw ContractError("composite_sorted: one color per candidate required");
    ShadeResult out;
    double trans = 1.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (i > 0 && candidates[i].t < candidates[i - 1].t)
            throw ContractError("composite_sorted: candidates are not sorted by depth");
        out.radiance += trans * candidates[i].alpha * colors[i];
        trans *= 1.0 - candidates[i].alpha;
    }
    out.radiance += trans * background;
    out.opacity = 1.0 - trans;
    return out;
}

ShadeResult enumerate_expectation(std::span<const IntersectionCandidate> candidates,
                                  std::span<const Rgb> colors, const Rgb &background) {
    const std::size_t m = candidates.size();
    if (m > static_cast<std::size_t>(kMaxEnumeration))
        throw ContractError("enumerate_expectation: too many candidates to enumerate");
    if (colors.size() != m)
        throw ContractError("enumerate_expectation: one color per candidate required");
    for (std::size_t i = 1; i < m; ++i) {
        if (candidates[i].t < candidates[i - 1].t)
            throw ContractError("enumerate_expectation: candidates are not sorted by depth");
    }

    ShadeResult out;
    const std::uint64_t outcomes = std::uint64_t{1} << m;
    for (std::uint64_t mask = 0; mask < outcomes; ++mask) {
        double p = 1.0;
        for (std::size_t i = 0; i < m; ++i)
            p *= (mask >> i & 1u) ? candidates[i].alpha : 1.0 - candidates[i].alpha;
        if (p == 0.0)
            continue;
        if (mask == 0) {
            out.radiance += p * background;
            continue;
        }
        // Closest accepted = lowest set bit.
        const int first = std::countr_zero(mask);
        out.radiance += p * colors[static_cast<std::size_t>(first)];
        out.opacity += p;
    }
    return out;
}

std::vector<Rgb> candidate_colors(const Scene &scene, std::span<const IntersectionCandidate> c,
                                  const Vec3 &view_dir) {
    std::vector<Rgb> colors;
    colors.reserve(c.size());
    for (const IntersectionCandidate &cand : c)
        colors.push_back(eval_color(scene.gaussian(cand.prim_id), view_dir));
    return colors;
}

ShadeResult reference_shade(const Scene &scene, const Ray &r, DepthMode mode,
                            const Rgb &background) {
    const auto cands = collect_candidates_bvh(scene, r, mode);
    const auto colors = candidate_colors(scene, cands, r.direction);
    return composite_sorted(cands, colors, background);
}

} // namespace sgrt
