#pragma once

#include "sgrt/gaussian.hpp"

#include <array>
#include <cstdint>

namespace sgrt {

/// Coefficients of the trigonometric hash pair
///   r1(q) = fract(b1 sin(a1 q)),  r2(q) = fract(b2 sin(a2 . q)).
struct HashCoefficients {
    double a1 = 91.3458;
    double b1 = 47453.5453;
    std::array<double, 2> a2 = {12.9898, 78.233};
    std::array<double, 2> b2 = {43758.5453, 43758.5453};
};

inline constexpr HashCoefficients kHashCoefficients{};

/// z offset applied per multi-sample slot (golden-ratio conjugate).
inline constexpr double kSlotOffset = 0.6180339887498949;

/// x - floor(x), kept inside [0, 1) even when rounding lands on 1.
double fractional(double x);

double hash_scalar(double q);

/// Position-keyed uniform number in [0, 1): r2(p.xy + r1(p.z)), first
/// component. Nonzero slots shift p.z by slot * kSlotOffset first.
double hash_position(const Vec3 &p, std::uint32_t slot = 0);

/// Frame-th point of a 2D Sobol sequence, XOR-scrambled per (pixel, seed).
Vec2 pixel_jitter(std::uint32_t x, std::uint32_t y, std::uint32_t frame, std::uint64_t seed = 0);

/// Unscrambled 2D Sobol point as 32-bit fixed-point integers.
std::array<std::uint32_t, 2> sobol_2d(std::uint32_t index);

/// 64-bit integer mixer (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

} // namespace sgrt
