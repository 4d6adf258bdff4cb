#pragma once

#include "sgrt/gaussian.hpp"

#include <cstdint>
#include <string>

namespace sgrt {

struct CameraConfig {
    Vec3 position = Vec3(0.0, 0.0, -5.0);
    Vec3 look_at = Vec3::Zero();
    Vec3 up = Vec3::UnitY();
    double vertical_fov = 60.0; // degrees

    void validate() const;
};

struct RenderSettings {
    int width = 256;
    int height = 256;
    int spp = 64;
    DepthMode depth_mode = DepthMode::Mean;
    double cutoff_s = kDefaultCutoff;
    int multisample_n = 1;
    Rgb background = Rgb::Zero();
    std::uint64_t seed = 0;
    bool reference_mode = false;
    int threads = 0; // 0: one per hardware thread

    void validate() const;
};

} // namespace sgrt
