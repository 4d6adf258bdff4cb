#pragma once

#include "sgrt/scene_io.hpp"
#include "sgrt/settings.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace sgrt {

/// SH coefficients whose degree-0 evaluation yields exactly `color`.
Gaussian3D make_colored(const Vec3 &mean, double scale, double opacity, const Rgb &color);

/// Uniformly distributed random rotation.
Quat random_rotation(std::mt19937_64 &rng);

struct CloudParams {
    std::size_t count = 1000;
    double half_extent = 1.0;
    double min_scale = 0.02;
    double max_scale = 0.12;
    double min_opacity = 0.05;
    double max_opacity = 0.95;
    int sh_degree = 1;
};

/// Random anisotropic Gaussians inside the cube [-h, h]^3.
std::vector<Gaussian3D> random_cloud(const CloudParams &params, std::uint64_t seed);

/// Red (nearer) and blue Gaussians on the z axis at z = 0 and z = 4, both
/// with peak opacity `alpha`; view them along +z from z < -2.
std::vector<Gaussian3D> two_gaussian_scene(double alpha = 0.5);

/// Isotropic Gaussians on the z axis, spaced 2 apart starting at z = 0.
std::vector<Gaussian3D> gaussian_chain(const std::vector<double> &alphas,
                                       const std::vector<Rgb> &colors, double scale = 0.3);

/// Densely overlapping, moderately anisotropic splats resembling a
/// reconstructed surface patch; used for depth-convention comparisons.
std::vector<Gaussian3D> overlapping_patch(std::size_t count, std::uint64_t seed);

/// Camera looking at the origin from -z at the given distance.
CameraConfig default_camera(double distance = 3.5, double fov_deg = 45.0);

/// Resolves "builtin:<name>" (cloud1k, cloud10k, two, chain8, patch) or
/// loads a PLY file.
SplatAsset load_asset(const std::string &source);

/// Ray along `dir` whose origin is `origin` displaced laterally by a random
/// offset of at most `radius`.
Ray jittered_ray(std::mt19937_64 &rng, const Vec3 &origin, const Vec3 &dir, double radius);

} // namespace sgrt
