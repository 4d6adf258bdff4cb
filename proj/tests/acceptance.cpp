// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "sgrt/rasterizer.hpp"
#include "sgrt/reference.hpp"
#include "sgrt/render.hpp"
#include "sgrt/scene_io.hpp"
#include "sgrt/stats.hpp"
#include "sgrt/synthetic.hpp"
#include "sgrt/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>

using namespace sgrt;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string format(const char *fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), fmt, args...);
    return buf;
}

Ray random_cloud_ray(std::mt19937_64 &rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Ray r;
    r.origin = 3.0 * Vec3(n(rng), n(rng), n(rng)).normalized();
    r.direction = (Vec3(u(rng), u(rng), u(rng)) - r.origin).normalized();
    return r;
}

bool within(double value, double expected, double se, double k = 3.0) {
    return std::abs(value - expected) <= k * se;
}

// 1. Enumeration over all binary outcomes equals sorted compositing on real
// candidate lists from random chains.
Outcome enumeration_identity() {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> m_dist(1, 12);
    std::normal_distribution<double> n(0.0, 0.05);
    double worst = 0.0;
    int mismatched_counts = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int m = m_dist(rng);
        std::vector<Gaussian3D> gs;
        for (int i = 0; i < m; ++i) {
            Gaussian3D g = make_colored(Vec3(n(rng), n(rng), 0.8 * i), 0.3, u(rng),
                                        Rgb(u(rng), u(rng), u(rng)));
            g.rotation = random_rotation(rng);
            g.scale = Vec3(0.3, 0.25, 0.35);
            gs.push_back(g);
        }
        const Scene scene(gs);
        const Ray r = jittered_ray(rng, Vec3(0, 0, -3), Vec3::UnitZ(), 0.02);
        const auto cands = collect_candidates(scene, r, DepthMode::Mean);
        mismatched_counts += static_cast<int>(cands.size()) == m ? 0 : 1;
        const auto colors = candidate_colors(scene, cands, r.direction);
        const Rgb bg(u(rng), u(rng), u(rng));
        const ShadeResult a = enumerate_expectation(cands, colors, bg);
        const ShadeResult b = composite_sorted(cands, colors, bg);
        worst = std::max({worst, (a.radiance - b.radiance).abs().maxCoeff(),
                          std::abs(a.opacity - b.opacity)});
    }
    return {worst <= 1e-12 && mismatched_counts == 0,
            format("max |enum - composite| = %.2e (limit 1e-12), rays missing a Gaussian: %d",
                   worst, mismatched_counts)};
}

// 2. Mean of shade_ray over 10^6 rays on the two-Gaussian scene.
Outcome statistical_unbiasedness() {
    const Scene scene(two_gaussian_scene());
    std::mt19937_64 rng(102);
    RunningStats ch[3], op;
    for (int i = 0; i < 1000000; ++i) {
        const Ray r = jittered_ray(rng, Vec3(0, 0, -5), Vec3::UnitZ(), 1e-4);
        const ShadeResult s = shade_ray(trace_single(scene, r), scene, r, Rgb::Zero());
        for (int c = 0; c < 3; ++c)
            ch[c].add(s.radiance[c]);
        op.add(s.opacity);
    }
    const bool ok = within(ch[0].mean(), 0.5, ch[0].std_error()) && ch[1].mean() == 0.0 &&
                    within(ch[2].mean(), 0.25, ch[2].std_error()) &&
                    within(op.mean(), 0.75, op.std_error());
    return {ok, format("mean (%.5f, %.5f, %.5f) +- (%.5f, -, %.5f), opacity %.5f +- %.5f; "
                       "expected (0.5, 0, 0.25), 0.75",
                       ch[0].mean(), ch[1].mean(), ch[2].mean(), ch[0].std_error(),
                       ch[2].std_error(), op.mean(), op.std_error())};
}

// 3. Frequency of misses on a random 8-Gaussian chain against the product
// of (1 - alpha) along each ray.
Outcome miss_rate() {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> u(0.05, 0.5);
    std::uniform_real_distribution<double> c(0.0, 1.0);
    std::vector<double> alphas;
    std::vector<Rgb> colors;
    for (int i = 0; i < 8; ++i) {
        alphas.push_back(u(rng));
        colors.emplace_back(c(rng), c(rng), c(rng));
    }
    const Scene scene(gaussian_chain(alphas, colors));
    double worst_product_error = 0.0;
    double expected_sum = 0.0, var_sum = 0.0;
    std::uint64_t misses = 0;
    constexpr int kRays = 1000000;
    for (int i = 0; i < kRays; ++i) {
        const Ray r = jittered_ray(rng, Vec3(0, 0, -3), Vec3::UnitZ(), 1e-3);
        const double t = transmittance(scene, r);
        if (i % 100 == 0) {
            double product = 1.0;
            for (const auto &cand : collect_candidates(scene, r, DepthMode::Mean))
                product *= 1.0 - cand.alpha;
            worst_product_error = std::max(worst_product_error, std::abs(product - t));
        }
        expected_sum += t;
        var_sum += t * (1.0 - t);
        misses += trace_single(scene, r).hit() ? 0 : 1;
    }
    double product_nominal = 1.0;
    for (double a : alphas)
        product_nominal *= 1.0 - a;
    const double rate = static_cast<double>(misses) / kRays;
    const double expected = expected_sum / kRays;
    const double sigma = std::sqrt(var_sum) / kRays;
    return {within(rate, expected, sigma) && worst_product_error <= 1e-12,
            format("miss rate %.6f, expected %.6f (nominal prod %.6f), 3 sigma %.6f; "
                   "max |transmittance - product| %.1e",
                   rate, expected, product_nominal, 3 * sigma, worst_product_error)};
}

// 4. trace_single with and without far-bound clipping.
Outcome clipping_neutrality(const Scene &scene) {
    std::mt19937_64 rng(104);
    TraceOptions clipped, unclipped;
    unclipped.clip = false;
    int mismatches = 0, hits = 0;
    TraversalStats sc, su;
    for (int i = 0; i < 10000; ++i) {
        const Ray r = random_cloud_ray(rng);
        clipped.depth_mode = unclipped.depth_mode = i % 2 ? DepthMode::Center : DepthMode::Mean;
        const HitRecord a = trace_single(scene, r, clipped, &sc);
        const HitRecord b = trace_single(scene, r, unclipped, &su);
        mismatches += a == b ? 0 : 1;
        hits += a.hit() ? 1 : 0;
    }
    return {mismatches == 0,
            format("10000 rays, %d mismatches, %d hits; primitives tested clipped %llu vs "
                   "unclipped %llu",
                   mismatches, hits, static_cast<unsigned long long>(sc.prims_tested),
                   static_cast<unsigned long long>(su.prims_tested))};
}

// 5. Candidates gathered through the BVH equal brute force.
Outcome bvh_correctness(const Scene &scene) {
    std::mt19937_64 rng(105);
    int mismatches = 0;
    std::size_t total = 0;
    for (int i = 0; i < 1000; ++i) {
        const Ray r = random_cloud_ray(rng);
        const DepthMode mode = i % 2 ? DepthMode::Center : DepthMode::Mean;
        const auto a = collect_candidates(scene, r, mode);
        const auto b = collect_candidates_bvh(scene, r, mode);
        total += a.size();
        bool same = a.size() == b.size();
        for (std::size_t k = 0; same && k < a.size(); ++k)
            same = a[k].prim_id == b[k].prim_id && a[k].t == b[k].t && a[k].alpha == b[k].alpha;
        mismatches += same ? 0 : 1;
    }
    return {mismatches == 0,
            format("1000 rays x %zu Gaussians, %zu candidates, %d set mismatches", scene.size(),
                   total, mismatches)};
}

// 6. Per-pixel MSE against the exact reference for the same camera rays.
Outcome convergence() {
    const SplatAsset asset = load_asset("builtin:cloud1k");
    const Scene scene(asset.gaussians);
    const CameraConfig cam = default_camera();
    RenderSettings s;
    s.width = 64;
    s.height = 64;
    double mse[3];
    const int spps[3] = {64, 256, 1024};
    for (int i = 0; i < 3; ++i) {
        s.spp = spps[i];
        s.reference_mode = false;
        const AccumBuffer stochastic = render(scene, cam, s);
        s.reference_mode = true;
        const AccumBuffer reference = render(scene, cam, s);
        mse[i] = image_metrics(stochastic, reference).mse;
    }
    const double r1 = mse[0] / mse[1], r2 = mse[1] / mse[2];
    const bool ok = r1 >= 3.0 && r1 <= 5.0 && r2 >= 3.0 && r2 <= 5.0;
    return {ok, format("MSE %.3e / %.3e / %.3e at 64 / 256 / 1024 spp; ratios %.3f, %.3f "
                       "(band [3, 5])",
                       mse[0], mse[1], mse[2], r1, r2)};
}

// 7. Slot outcome histogram and variance of the slot mean.
Outcome multisample_equivalence() {
    const Scene scene(gaussian_chain({0.4, 0.5, 0.6}, {Rgb(1, 0, 0), Rgb(0, 1, 0), Rgb(0, 0, 1)}));
    constexpr int kRays = 20000, kSlots = 16;
    std::mt19937_64 rng(107);
    std::vector<std::uint64_t> multi(4, 0), single(4, 0);
    auto bucket = [](const HitRecord &h) { return h.hit() ? h.prim_id : 3; };
    RunningStats slot_means, singles;
    for (int i = 0; i < kRays; ++i) {
        const Ray r = jittered_ray(rng, Vec3(0, 0, -3), Vec3::UnitZ(), 1e-3);
        double sum = 0.0;
        for (const HitRecord &h : trace_multi(scene, r, kSlots).slots) {
            ++multi[bucket(h)];
            sum += shade_ray(h, scene, r, Rgb::Zero()).radiance.sum();
        }
        slot_means.add(sum / kSlots);
    }
    for (int i = 0; i < kRays * kSlots; ++i) {
        const Ray r = jittered_ray(rng, Vec3(0, 0, -3), Vec3::UnitZ(), 1e-3);
        const HitRecord h = trace_single(scene, r);
        ++single[bucket(h)];
        singles.add(shade_ray(h, scene, r, Rgb::Zero()).radiance.sum());
    }
    const ChiSquareResult chi = chi_square_two_sample(multi, single);
    const double ratio = slot_means.variance() / (singles.variance() / kSlots);
    return {chi.p_value > 0.001 && ratio >= 0.8 && ratio <= 1.25,
            format("N=16 histogram (%llu, %llu, %llu, miss %llu) vs single: chi2 %.3f, p %.4f; "
                   "variance ratio %.4f (band [0.8, 1.25])",
                   static_cast<unsigned long long>(multi[0]),
                   static_cast<unsigned long long>(multi[1]),
                   static_cast<unsigned long long>(multi[2]),
                   static_cast<unsigned long long>(multi[3]), chi.statistic, chi.p_value, ratio)};
}

// 8. The k = 1 stochastic-depth comparator converges to half the answer.
Outcome bias_demonstration() {
    const Scene scene(two_gaussian_scene());
    std::mt19937_64 rng(108);
    RunningStats b[3], u[3];
    for (int i = 0; i < 1000000; ++i) {
        const Ray r = jittered_ray(rng, Vec3(0, 0, -5), Vec3::UnitZ(), 1e-4);
        const ShadeResult biased = biased_depth_trace(scene, r, 1, Rgb::Zero());
        const ShadeResult unbiased = shade_ray(trace_single(scene, r), scene, r, Rgb::Zero());
        for (int c = 0; c < 3; ++c) {
            b[c].add(biased.radiance[c]);
            u[c].add(unbiased.radiance[c]);
        }
    }
    const bool ok = within(b[0].mean(), 0.25, b[0].std_error()) && b[1].mean() == 0.0 &&
                    within(b[2].mean(), 0.125, b[2].std_error()) &&
                    within(u[0].mean(), 0.5, u[0].std_error()) && u[1].mean() == 0.0 &&
                    within(u[2].mean(), 0.25, u[2].std_error());
    return {ok, format("biased k=1 (%.5f, %.5f, %.5f) vs expected (0.25, 0, 0.125); "
                       "unbiased (%.5f, %.5f, %.5f) vs expected (0.5, 0, 0.25)",
                       b[0].mean(), b[1].mean(), b[2].mean(), u[0].mean(), u[1].mean(),
                       u[2].mean())};
}

// 9. Uniformity of the hash at render hit points.
Outcome hash_quality() {
    const SplatAsset asset = load_asset("builtin:cloud1k");
    const Scene scene(asset.gaussians);
    constexpr std::size_t kDraws = 1000000;
    const auto xs = hit_point_hashes(scene, default_camera(), 128, 128, kDraws, 109);
    if (xs.size() != kDraws)
        return {false, format("only %zu hit points gathered", xs.size())};
    const ChiSquareResult chi = chi_square_uniform(xs, 256);
    RunningStats m;
    for (double x : xs)
        m.add(x);
    return {chi.p_value > 0.001 && std::abs(m.mean() - 0.5) <= 0.003,
            format("10^6 draws: chi2 %.1f (255 dof), p %.4f; mean %.5f", chi.statistic,
                   chi.p_value, m.mean())};
}

// 10. Bitwise identical renders across thread counts and repeats.
Outcome determinism() {
    const SplatAsset asset = load_asset("builtin:cloud10k");
    const Scene scene(asset.gaussians);
    RenderSettings s;
    s.width = 128;
    s.height = 128;
    s.spp = 64;
    s.seed = 110;
    s.threads = 1;
    const AccumBuffer one = render(scene, default_camera(), s);
    s.threads = 8;
    const AccumBuffer eight = render(scene, default_camera(), s);
    const AccumBuffer again = render(scene, default_camera(), s);
    return {one == eight && eight == again,
            format("1 vs 8 threads identical: %s; repeated 8-thread run identical: %s",
                   one == eight ? "yes" : "no", eight == again ? "yes" : "no")};
}

// 11. Center depth mode matches a rasterized image better than mean mode.
// SGRT_ACCEPTANCE_SCENE may name a scene config for a trained asset;
// otherwise the synthetic overlapping patch stands in.
Outcome depth_mode_fidelity() {
    SceneConfig cfg;
    cfg.asset = "builtin:patch";
    cfg.camera = default_camera();
    cfg.settings.width = 96;
    cfg.settings.height = 96;
    if (const char *path = std::getenv("SGRT_ACCEPTANCE_SCENE"))
        cfg = load_scene_config(path);
    const SplatAsset asset = load_asset(cfg.asset);
    const Scene scene(asset.gaussians, cfg.settings.cutoff_s);
    RenderSettings s = cfg.settings;
    s.spp = 256;
    s.multisample_n = 1;
    RasterSettings rs;
    rs.width = s.width;
    rs.height = s.height;
    rs.background = s.background;
    rs.samples = s.spp;
    rs.seed = s.seed;
    const AccumBuffer raster = rasterize(asset.gaussians, cfg.camera, rs);
    s.depth_mode = DepthMode::Center;
    const double center = image_metrics(render(scene, cfg.camera, s), raster).psnr;
    s.depth_mode = DepthMode::Mean;
    const double mean = image_metrics(render(scene, cfg.camera, s), raster).psnr;
    return {center > mean, format("%s (%zu Gaussians) vs rasterizer: PSNR center %.3f dB, "
                                  "mean %.3f dB",
                                  cfg.asset.c_str(), asset.gaussians.size(), center, mean)};
}

} // namespace

int main() {
    CloudParams p;
    p.count = 10000;
    const Scene cloud(random_cloud(p, 2024));

    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria = {
        {"unbiasedness identity", enumeration_identity},
        {"statistical unbiasedness", statistical_unbiasedness},
        {"miss rate equals transmittance", miss_rate},
        {"clipping neutrality", [&] { return clipping_neutrality(cloud); }},
        {"bvh correctness", [&] { return bvh_correctness(cloud); }},
        {"monte carlo convergence", convergence},
        {"multi-sample equivalence", multisample_equivalence},
        {"bias demonstration", bias_demonstration},
        {"hash quality", hash_quality},
        {"determinism", determinism},
        {"depth-mode fidelity", depth_mode_fidelity},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s %zu %s: %s [%.1f s]\n", o.passed ? "PASS" : "FAIL", i + 1,
                    criteria[i].first, o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.passed ? 0 : 1;
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
    return failed == 0 ? 0 : 1;
}
