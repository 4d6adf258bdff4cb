#pragma once

#include "sgrt/tracer.hpp"

#include <span>
#include <vector>

namespace sgrt {

inline constexpr int kMaxEnumeration = 20;

/// Tests every primitive (no acceleration) and returns the valid candidates
/// sorted by (t, prim_id).
std::vector<IntersectionCandidate> collect_candidates(const Scene &scene, const Ray &r,
                                                      DepthMode mode);

/// Same set gathered through one unclipped BVH traversal, then sorted.
std::vector<IntersectionCandidate> collect_candidates_bvh(const Scene &scene, const Ray &r,
                                                          DepthMode mode);

/// Front-to-back compositing over sorted candidates:
///   L = sum_i T_i a_i c_i + T_{M+1} background, opacity = 1 - T_{M+1}.
/// Throws ContractError if candidates are not sorted by t.
ShadeResult composite_sorted(std::span<const IntersectionCandidate> candidates,
                             std::span<const Rgb> colors, const Rgb &background);

/// Expectation of the closest-accepted shading over all 2^M binary opacity
/// assignments. Refuses M > kMaxEnumeration.
ShadeResult enumerate_expectation(std::span<const IntersectionCandidate> candidates,
                                  std::span<const Rgb> colors, const Rgb &background);

/// Colors of the candidates' primitives seen along the ray direction.
std::vector<Rgb> candidate_colors(const Scene &scene, std::span<const IntersectionCandidate> c,
                                  const Vec3 &view_dir);

/// Exact sorted-compositing radiance for one ray (BVH gathering).
ShadeResult reference_shade(const Scene &scene, const Ray &r, DepthMode mode,
                            const Rgb &background);

} // namespace sgrt
