#pragma once

#include "sgrt/scene.hpp"
#include "sgrt/settings.hpp"
#include "sgrt/tracer.hpp"

#include <cstdint>
#include <vector>

namespace sgrt {

/// Per-pixel running means of radiance (background already composited) and
/// opacity, plus the number of samples folded in.
class AccumBuffer {
public:
    AccumBuffer() = default;
    AccumBuffer(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    void add_sample(int x, int y, const Rgb &radiance, double opacity);

    const Rgb &radiance(int x, int y) const { return radiance_[index(x, y)]; }
    double opacity(int x, int y) const { return opacity_[index(x, y)]; }
    std::uint32_t count(int x, int y) const { return count_[index(x, y)]; }

    /// Direct write access, e.g. for image readers.
    void set(int x, int y, const Rgb &radiance, double opacity, std::uint32_t count);

    bool operator==(const AccumBuffer &other) const;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<Rgb> radiance_;
    std::vector<double> opacity_;
    std::vector<std::uint32_t> count_;
};

/// Pinhole camera ray through continuous film position (film_x, film_y),
/// measured in pixels from the top-left corner.
Ray camera_ray_at(const CameraConfig &camera, double film_x, double film_y, int width,
                  int height);

/// Ray through pixel (x, y) offset by pixel_jitter(x, y, frame, seed).
Ray generate_camera_ray(const CameraConfig &camera, int x, int y, std::uint32_t frame,
                        const RenderSettings &settings);

struct RenderStats {
    std::uint64_t traversals = 0;
    std::uint64_t samples = 0;
};

/// Extra render knobs that are not part of scene configuration.
struct RenderExtras {
    /// >0 renders with the k-nearest stochastic-depth comparator instead.
    int biased_k = 0;
    TraceOptions trace{};
};

/// Progressive render: `spp` samples per pixel, drawn as ceil(spp / N)
/// multi-sample traversals. Frame j of a pixel uses jitter index j.
/// reference_mode composites every camera ray exactly instead. The result
/// is independent of the thread count. The scene's own cutoff is used.
AccumBuffer render(const Scene &scene, const CameraConfig &camera,
                   const RenderSettings &settings, const RenderExtras &extras = {},
                   RenderStats *stats = nullptr);

struct ImageMetrics {
    double mse = 0.0;
    double psnr = 0.0; // +inf when mse == 0
};

/// MSE over linear RGB; PSNR against the peak channel value of `b`.
ImageMetrics image_metrics(const AccumBuffer &a, const AccumBuffer &b);

} // namespace sgrt
