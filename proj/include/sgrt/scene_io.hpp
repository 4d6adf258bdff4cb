#pragma once

#include "sgrt/settings.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace sgrt {

class FormatError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

struct SplatAsset {
    std::vector<Gaussian3D> gaussians;
    int sh_degree = 0;
    std::string source_path;
};

/// Reads a splat PLY (ascii or binary little-endian) and applies the stored
/// activations: exp for scales, sigmoid for opacity, quaternion normalization.
/// Scales below 1e-8 of the scene extent are clamped up to that floor.
SplatAsset load_ply(const std::filesystem::path &path);

/// Writes the inverse activations so load_ply reproduces the asset.
void write_ply(const SplatAsset &asset, const std::filesystem::path &path, bool binary = true);

/// Relative scale floor applied at load time.
inline constexpr double kMinRelativeScale = 1e-8;

struct SceneConfig {
    std::string asset; // resolved relative to the config file's directory
    CameraConfig camera;
    RenderSettings settings;
};

/// Flat `key = value` file; `#` starts a comment. Vectors are comma
/// separated. Keys: asset, cam_pos, cam_look_at, cam_up, fov_deg, width,
/// height, spp, depth_mode, cutoff_s, multisample, background, seed.
SceneConfig load_scene_config(const std::filesystem::path &path);
SceneConfig parse_scene_config(const std::string &text,
                               const std::filesystem::path &base_dir = {});

Vec3 parse_vec3(const std::string &text);

} // namespace sgrt
