#include "sgrt/hash_rng.hpp"

#include <cmath>

namespace sgrt {

double fractional(double x) {
    const double f = x - std::floor(x);
    return f < 1.0 ? f : 0.0;
}

double hash_scalar(double q) {
    return fractional(kHashCoefficients.b1 * std::sin(kHashCoefficients.a1 * q));
}

double hash_position(const Vec3 &p, std::uint32_t slot) {
    const double z = slot == 0 ? p.z() : p.z() + static_cast<double>(slot) * kSlotOffset;
    const double shift = hash_scalar(z);
    const double phase =
        kHashCoefficients.a2[0] * (p.x() + shift) + kHashCoefficients.a2[1] * (p.y() + shift);
    // Both output components share sin(phase) and b2 has equal entries, so
    // component 0 is the whole result.
    return fractional(kHashCoefficients.b2[0] * std::sin(phase));
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::array<std::uint32_t, 2> sobol_2d(std::uint32_t index) {
    std::uint32_t d0 = 0;
    std::uint32_t d1 = 0;
    std::uint32_t v1 = 1u << 31;
    for (std::uint32_t bit = 0; index != 0; index >>= 1, ++bit, v1 ^= v1 >> 1) {
        if (index & 1u) {
            d0 ^= 1u << (31 - bit);
            d1 ^= v1;
        }
    }
    return {d0, d1};
}

Vec2 pixel_jitter(std::uint32_t x, std::uint32_t y, std::uint32_t frame, std::uint64_t seed) {
    const std::uint64_t key = mix64(seed ^ mix64((static_cast<std::uint64_t>(x) << 32) | y));
    const auto [s0, s1] = sobol_2d(frame);
    const std::uint32_t u = s0 ^ static_cast<std::uint32_t>(key);
    const std::uint32_t v = s1 ^ static_cast<std::uint32_t>(key >> 32);
    constexpr double k2Pow32 = 4294967296.0;
    return {u / k2Pow32, v / k2Pow32};
}

} // namespace sgrt
