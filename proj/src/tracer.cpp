#include "sgrt/tracer.hpp"

namespace sgrt {

std::optional<IntersectionCandidate> evaluate_candidate(const Scene &scene, std::size_t prim,
                                                        const Ray &r, DepthMode mode, double t_lo,
                                                        double t_hi) {
    const WhitenedGaussian &g = scene.whitened(prim);
    const RayPeak peak = ray_peak_1d(g, r);
    const double t =
        mode == DepthMode::Mean ? peak.t_peak : (g.mean - r.origin).dot(r.direction);
    if (!(t > t_lo && t < t_hi))
        return std::nullopt;
    const Vec3 p = r.at(t);
    if (is_negligible(g, p, scene.cutoff()))
        return std::nullopt;
    return IntersectionCandidate{prim, t, peak.alpha, p};
}

std::optional<double> intersect_primitive(const Gaussian3D &g, const Ray &r, DepthMode mode,
                                          double s, std::uint32_t slot) {
    const WhitenedGaussian w = WhitenedGaussian::from(g);
    const RayPeak peak = ray_peak_1d(w, r);
    const double t = mode == DepthMode::Mean ? peak.t_peak : depth_center(g, r);
    if (t <= r.t_min || t >= r.t_max)
        return std::nullopt;
    const Vec3 p = r.at(t);
    if (is_negligible(w, p, s))
        return std::nullopt;
    if (!(hash_position(p, slot) < peak.alpha))
        return std::nullopt;
    return t;
}

HitRecord trace_single(const Scene &scene, const Ray &r, const TraceOptions &opt,
                       TraversalStats *stats) {
    return trace_single_with(scene, r, opt, PositionHashSource{}, stats);
}

MultiSampleState trace_multi(const Scene &scene, const Ray &r, int n, const TraceOptions &opt,
                             TraversalStats *stats) {
    return trace_multi_with(scene, r, n, opt, PositionHashSource{}, stats);
}

ShadeResult shade_ray(const HitRecord &hit, const Scene &scene, const Ray &r,
                      const Rgb &background) {
    if (!hit.hit())
        return {background, 0.0};
    return {eval_color(scene.gaussian(hit.prim_id), r.direction), 1.0};
}

double transmittance(const Scene &scene, const Ray &r, DepthMode mode) {
    double trans = 1.0;
    Ray ray = r;
    scene.bvh().traverse(ray, [&](std::size_t prim) {
        if (const auto cand = evaluate_candidate(scene, prim, r, mode, r.t_min, r.t_max))
            trans *= 1.0 - cand->alpha;
    });
    return trans;
}

ShadeResult biased_depth_trace(const Scene &scene, const Ray &r, int k, const Rgb &background,
                               const TraceOptions &opt) {
    return biased_depth_trace_with(scene, r, k, background, opt, PositionHashSource{});
}

} // namespace sgrt
