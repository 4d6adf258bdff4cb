#pragma once

#include "sgrt/render.hpp"

#include <span>

namespace sgrt {

struct RasterSettings {
    int width = 256;
    int height = 256;
    Rgb background = Rgb::Zero();
    /// Film positions per pixel, taken from the same jitter sequence as the
    /// ray tracer (frame 0..samples-1) so both integrate identical footprints.
    int samples = 1;
    std::uint64_t seed = 0;
};

/// Splat rasterizer in the style of the common 3DGS forward pass: EWA
/// projection of each covariance to screen space with a 0.3 px^2 low-pass,
/// one global sort by view-space depth of the centers, front-to-back
/// blending with alpha capped at 0.99 and contributions under 1/255 skipped.
/// Serves as the reference image for depth-convention comparisons.
AccumBuffer rasterize(std::span<const Gaussian3D> gaussians, const CameraConfig &camera,
                      const RasterSettings &settings);

} // namespace sgrt
