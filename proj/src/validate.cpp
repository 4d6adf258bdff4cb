#include "sgrt/validate.hpp"

#include "sgrt/reference.hpp"
#include "sgrt/stats.hpp"
#include "sgrt/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

namespace sgrt {

namespace {

std::string format(const char *fmt, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), fmt, args...);
    return buf;
}

Ray random_scene_ray(std::mt19937_64 &rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec3 dir(n(rng), n(rng), n(rng));
    const Vec3 origin = 3.0 * dir.normalized();
    const Vec3 target(u(rng), u(rng), u(rng));
    Ray r;
    r.origin = origin;
    r.direction = (target - origin).normalized();
    return r;
}

CheckResult check_enumeration(std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> m_dist(1, 12);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int m = m_dist(rng);
        std::vector<IntersectionCandidate> c(static_cast<std::size_t>(m));
        std::vector<Rgb> colors(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            c[static_cast<std::size_t>(i)] = {static_cast<std::size_t>(i), 1.0 + i, u(rng), Vec3::Zero()};
            colors[static_cast<std::size_t>(i)] = Rgb(u(rng), u(rng), u(rng));
        }
        const Rgb bg(u(rng), u(rng), u(rng));
        const ShadeResult a = composite_sorted(c, colors, bg);
        const ShadeResult b = enumerate_expectation(c, colors, bg);
        worst = std::max({worst, (a.radiance - b.radiance).abs().maxCoeff(),
                          std::abs(a.opacity - b.opacity)});
    }
    return {"enumeration-identity", worst <= 1e-12, format("max |diff| = %.3e (limit 1e-12)", worst)};
}

std::vector<Gaussian3D> unbiasedness_chain() {
    return gaussian_chain({0.3, 0.6, 0.2, 0.8},
                          {Rgb(1, 0, 0), Rgb(0, 1, 0), Rgb(0, 0, 1), Rgb(1, 1, 1)});
}

std::pair<CheckResult, CheckResult> check_estimator(std::mt19937_64 &rng,
                                                    const ValidateOptions &opt) {
    const Scene scene(unbiasedness_chain());
    TraceOptions trace;
    trace.invert_acceptance = opt.invert_acceptance;
    const Rgb bg = Rgb::Zero();
    constexpr int kRays = 200000;
    RunningStats est[4], exact_mean[4];
    RunningStats miss, trans;
    double worst_trans = 0.0;
    for (int i = 0; i < kRays; ++i) {
        const Ray r = jittered_ray(rng, Vec3(0, 0, -3), Vec3::UnitZ(), 1e-3);
        const HitRecord hit = trace_single(scene, r, trace);
        const ShadeResult s = shade_ray(hit, scene, r, bg);
        const auto cands = collect_candidates(scene, r, DepthMode::Mean);
        const auto colors = candidate_colors(scene, cands, r.direction);
        const ShadeResult e = composite_sorted(cands, colors, bg);
        for (int c = 0; c < 3; ++c) {
            est[c].add(s.radiance[c]);
            exact_mean[c].add(e.radiance[c]);
        }
        est[3].add(s.opacity);
        exact_mean[3].add(e.opacity);
        miss.add(hit.hit() ? 0.0 : 1.0);
        const double t = transmittance(scene, r);
        trans.add(t);
        double product = 1.0;
        for (const auto &cand : cands)
            product *= 1.0 - cand.alpha;
        worst_trans = std::max(worst_trans, std::abs(product - t));
    }
    double worst_z = 0.0;
    for (int c = 0; c < 4; ++c) {
        const double se = std::max(est[c].std_error(), 1e-12);
        worst_z = std::max(worst_z, std::abs(est[c].mean() - exact_mean[c].mean()) / se);
    }
    CheckResult unbiased{"statistical-unbiasedness", worst_z <= 4.0,
                         format("mean (%.4f, %.4f, %.4f | %.4f) vs exact (%.4f, %.4f, %.4f | %.4f); "
                                "worst |z| = %.2f (limit 4)",
                                est[0].mean(), est[1].mean(), est[2].mean(), est[3].mean(),
                                exact_mean[0].mean(), exact_mean[1].mean(), exact_mean[2].mean(),
                                exact_mean[3].mean(), worst_z)};
    const double p = trans.mean();
    const double sigma = std::sqrt(p * (1.0 - p) / kRays);
    const double z = std::abs(miss.mean() - p) / sigma;
    CheckResult miss_rate{"miss-rate-vs-transmittance", z <= 4.0 && worst_trans <= 1e-12,
                          format("miss %.5f vs T %.5f, |z| = %.2f (limit 4); "
                                 "max |T - prod| = %.2e (limit 1e-12)",
                                 miss.mean(), p, z, worst_trans)};
    return {unbiased, miss_rate};
}

std::vector<Gaussian3D> validation_cloud(std::uint64_t seed) {
    CloudParams p;
    p.count = 2000;
    return random_cloud(p, seed);
}

CheckResult check_bvh(std::mt19937_64 &rng, const Scene &scene) {
    constexpr int kRays = 300;
    int mismatches = 0;
    std::size_t total = 0;
    for (int i = 0; i < kRays; ++i) {
        const Ray r = random_scene_ray(rng);
        for (DepthMode mode : {DepthMode::Mean, DepthMode::Center}) {
            const auto brute = collect_candidates(scene, r, mode);
            const auto fast = collect_candidates_bvh(scene, r, mode);
            total += brute.size();
            bool same = brute.size() == fast.size();
            for (std::size_t k = 0; same && k < brute.size(); ++k)
                same = brute[k].prim_id == fast[k].prim_id && brute[k].t == fast[k].t;
            mismatches += same ? 0 : 1;
        }
    }
    return {"bvh-equivalence", mismatches == 0,
            format("%d rays x 2 depth modes, %zu candidates, %d mismatching rays", kRays, total,
                   mismatches)};
}

CheckResult check_clipping(std::mt19937_64 &rng, const Scene &scene, const ValidateOptions &opt) {
    constexpr int kRays = 5000;
    TraceOptions clipped, unclipped;
    clipped.invert_acceptance = unclipped.invert_acceptance = opt.invert_acceptance;
    unclipped.clip = false;
    int mismatches = 0, hits = 0;
    TraversalStats with_clip, without_clip;
    for (int i = 0; i < kRays; ++i) {
        const Ray r = random_scene_ray(rng);
        const HitRecord a = trace_single(scene, r, clipped, &with_clip);
        const HitRecord b = trace_single(scene, r, unclipped, &without_clip);
        mismatches += a == b ? 0 : 1;
        hits += a.hit() ? 1 : 0;
    }
    return {"clipping-neutrality", mismatches == 0,
            format("%d rays (%d hits), %d mismatches; primitives tested %zu clipped vs %zu "
                   "unclipped",
                   kRays, hits, mismatches, with_clip.prims_tested, without_clip.prims_tested)};
}

CheckResult check_hash(const Scene &scene, std::uint64_t seed) {
    constexpr std::size_t kDraws = 200000;
    const auto xs = hit_point_hashes(scene, default_camera(), 64, 64, kDraws, seed);
    if (xs.size() < kDraws)
        return {"hash-uniformity", false, format("only %zu draws gathered", xs.size())};
    const ChiSquareResult chi = chi_square_uniform(xs, 256);
    RunningStats m;
    for (double x : xs)
        m.add(x);
    const double tol = 3.0 / std::sqrt(12.0 * static_cast<double>(kDraws));
    const bool ok = chi.p_value > 0.001 && std::abs(m.mean() - 0.5) <= tol;
    return {"hash-uniformity", ok,
            format("%zu draws, chi2 = %.1f (dof %.0f), p = %.4f (limit 0.001); mean %.5f "
                   "(0.5 +/- %.5f)",
                   xs.size(), chi.statistic, chi.dof, chi.p_value, m.mean(), tol)};
}

} // namespace

std::vector<double> hit_point_hashes(const Scene &scene, const CameraConfig &camera, int width,
                                     int height, std::size_t count, std::uint64_t seed,
                                     DepthMode mode, int max_frames) {
    RenderSettings s;
    s.width = width;
    s.height = height;
    s.seed = seed;
    std::vector<double> out;
    out.reserve(count);
    for (int f = 0; f < max_frames; ++f) {
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const Ray r = generate_camera_ray(camera, x, y, static_cast<std::uint32_t>(f), s);
                for (const auto &c : collect_candidates_bvh(scene, r, mode)) {
                    out.push_back(hash_position(c.position));
                    if (out.size() == count)
                        return out;
                }
            }
        }
    }
    return out;
}

std::vector<CheckResult> run_validation(const ValidateOptions &options) {
    std::mt19937_64 rng(options.seed);
    std::vector<CheckResult> out;
    out.push_back(check_enumeration(rng));
    auto [unbiased, miss] = check_estimator(rng, options);
    out.push_back(unbiased);
    out.push_back(miss);
    const Scene cloud(validation_cloud(options.seed));
    out.push_back(check_bvh(rng, cloud));
    out.push_back(check_clipping(rng, cloud, options));
    out.push_back(check_hash(cloud, options.seed));
    return out;
}

} // namespace sgrt
