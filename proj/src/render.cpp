#include "sgrt/render.hpp"

#include "sgrt/hash_rng.hpp"
#include "sgrt/reference.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

namespace sgrt {

AccumBuffer::AccumBuffer(int width, int height)
    : width_(width), height_(height),
      radiance_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), Rgb::Zero()),
      opacity_(radiance_.size(), 0.0), count_(radiance_.size(), 0) {
    if (width < 0 || height < 0)
        throw Error("image dimensions must be nonnegative");
}

void AccumBuffer::add_sample(int x, int y, const Rgb &radiance, double opacity) {
    const std::size_t i = index(x, y);
    const std::uint32_t n = ++count_[i];
    const double w = 1.0 / n;
    radiance_[i] += (radiance - radiance_[i]) * w;
    opacity_[i] += (opacity - opacity_[i]) * w;
}

void AccumBuffer::set(int x, int y, const Rgb &radiance, double opacity, std::uint32_t count) {
    const std::size_t i = index(x, y);
    radiance_[i] = radiance;
    opacity_[i] = opacity;
    count_[i] = count;
}

bool AccumBuffer::operator==(const AccumBuffer &other) const {
    if (width_ != other.width_ || height_ != other.height_)
        return false;
    for (std::size_t i = 0; i < radiance_.size(); ++i) {
        if ((radiance_[i] != other.radiance_[i]).any() || opacity_[i] != other.opacity_[i] ||
            count_[i] != other.count_[i])
            return false;
    }
    return true;
}

Ray camera_ray_at(const CameraConfig &camera, double film_x, double film_y, int width,
                  int height) {
    const Vec3 forward = (camera.look_at - camera.position).normalized();
    const Vec3 right = forward.cross(camera.up).normalized();
    const Vec3 up = right.cross(forward);
    const double tan_half = std::tan(0.5 * camera.vertical_fov * std::numbers::pi / 180.0);
    const double aspect = static_cast<double>(width) / height;
    const double ndc_x = 2.0 * film_x / width - 1.0;
    const double ndc_y = 1.0 - 2.0 * film_y / height;
    Ray r;
    r.origin = camera.position;
    r.direction = (forward + ndc_x * tan_half * aspect * right + ndc_y * tan_half * up).normalized();
    r.t_min = 0.0;
    r.t_max = kInfiniteT;
    return r;
}

Ray generate_camera_ray(const CameraConfig &camera, int x, int y, std::uint32_t frame,
                        const RenderSettings &settings) {
    const Vec2 j = pixel_jitter(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y),
                                frame, settings.seed);
    return camera_ray_at(camera, x + j.x(), y + j.y(), settings.width, settings.height);
}

namespace {

constexpr int kTileSize = 16;

void render_pixel(const Scene &scene, const CameraConfig &camera, const RenderSettings &s,
                  const RenderExtras &extras, int x, int y, AccumBuffer &out, RenderStats &stats) {
    TraceOptions opt = extras.trace;
    opt.depth_mode = s.depth_mode;
    if (s.reference_mode || extras.biased_k > 0) {
        for (int f = 0; f < s.spp; ++f) {
            const Ray r = generate_camera_ray(camera, x, y, static_cast<std::uint32_t>(f), s);
            const ShadeResult res =
                s.reference_mode ? reference_shade(scene, r, s.depth_mode, s.background)
                                 : biased_depth_trace(scene, r, extras.biased_k, s.background, opt);
            out.add_sample(x, y, res.radiance, res.opacity);
            ++stats.traversals;
            ++stats.samples;
        }
        return;
    }
    const int n = s.multisample_n;
    const int passes = (s.spp + n - 1) / n;
    for (int pass = 0; pass < passes; ++pass) {
        const int slots = std::min(n, s.spp - pass * n);
        const Ray r = generate_camera_ray(camera, x, y, static_cast<std::uint32_t>(pass), s);
        ++stats.traversals;
        if (slots == 1) {
            const ShadeResult res = shade_ray(trace_single(scene, r, opt), scene, r, s.background);
            out.add_sample(x, y, res.radiance, res.opacity);
            ++stats.samples;
            continue;
        }
        const MultiSampleState state = trace_multi(scene, r, slots, opt);
        for (const HitRecord &hit : state.slots) {
            const ShadeResult res = shade_ray(hit, scene, r, s.background);
            out.add_sample(x, y, res.radiance, res.opacity);
            ++stats.samples;
        }
    }
}

} // namespace

AccumBuffer render(const Scene &scene, const CameraConfig &camera,
                   const RenderSettings &settings, const RenderExtras &extras,
                   RenderStats *stats) {
    settings.validate();
    camera.validate();
    AccumBuffer out(settings.width, settings.height);

    const int tiles_x = (settings.width + kTileSize - 1) / kTileSize;
    const int tiles_y = (settings.height + kTileSize - 1) / kTileSize;
    const int tile_count = tiles_x * tiles_y;
    int threads = settings.threads > 0 ? settings.threads
                                       : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, std::max(1, tile_count));

    std::atomic<int> next_tile{0};
    std::vector<RenderStats> per_thread(static_cast<std::size_t>(threads));
    auto worker = [&](int id) {
        RenderStats &local = per_thread[static_cast<std::size_t>(id)];
        for (int tile = next_tile++; tile < tile_count; tile = next_tile++) {
            const int x0 = (tile % tiles_x) * kTileSize;
            const int y0 = (tile / tiles_x) * kTileSize;
            const int x1 = std::min(x0 + kTileSize, settings.width);
            const int y1 = std::min(y0 + kTileSize, settings.height);
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x)
                    render_pixel(scene, camera, settings, extras, x, y, out, local);
            }
        }
    };

    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(worker, t);
    }

    if (stats) {
        for (const RenderStats &s : per_thread) {
            stats->traversals += s.traversals;
            stats->samples += s.samples;
        }
    }
    return out;
}

ImageMetrics image_metrics(const AccumBuffer &a, const AccumBuffer &b) {
    if (a.width() != b.width() || a.height() != b.height())
        throw Error("image_metrics: dimension mismatch");
    double sum = 0.0;
    double peak = 0.0;
    for (int y = 0; y < a.height(); ++y) {
        for (int x = 0; x < a.width(); ++x) {
            sum += (a.radiance(x, y) - b.radiance(x, y)).square().sum();
            peak = std::max(peak, b.radiance(x, y).maxCoeff());
        }
    }
    const double n = 3.0 * a.width() * a.height();
    ImageMetrics m;
    m.mse = n > 0 ? sum / n : 0.0;
    m.psnr = m.mse == 0.0 ? std::numeric_limits<double>::infinity()
                          : 10.0 * std::log10(peak * peak / m.mse);
    return m;
}

} // namespace sgrt
