#pragma once

#include "sgrt/render.hpp"
#include "sgrt/scene.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sgrt {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail; // measured statistics
};

struct ValidateOptions {
    std::uint64_t seed = 1;
    /// Mutation switch: accept when xi >= alpha.
    bool invert_acceptance = false;
};

/// Oracle suite over built-in synthetic scenes: enumeration identity,
/// statistical unbiasedness, miss rate vs transmittance, BVH equivalence,
/// clipping neutrality, hash uniformity.
std::vector<CheckResult> run_validation(const ValidateOptions &options);

/// Hash values drawn at the valid candidate positions of jittered camera
/// rays, until `count` values are gathered (or `max_frames` is exhausted).
std::vector<double> hit_point_hashes(const Scene &scene, const CameraConfig &camera, int width,
                                     int height, std::size_t count, std::uint64_t seed,
                                     DepthMode mode = DepthMode::Mean, int max_frames = 1 << 16);

} // namespace sgrt
