#pragma once

#include "sgrt/bvh.hpp"
#include "sgrt/gaussian.hpp"

#include <vector>

namespace sgrt {

/// Gaussians prepared for tracing: cached whitening frames, bounding boxes
/// for a fixed negligibility cutoff, and a BVH over those boxes. Immutable
/// after construction and safe to share between threads.
class Scene {
public:
    Scene() : Scene(std::vector<Gaussian3D>{}) {}
    explicit Scene(std::vector<Gaussian3D> gaussians, double cutoff = kDefaultCutoff,
                   int leaf_size = 4);

    std::size_t size() const { return gaussians_.size(); }
    bool empty() const { return gaussians_.empty(); }
    double cutoff() const { return cutoff_; }

    const Gaussian3D &gaussian(std::size_t i) const { return gaussians_[i]; }
    const WhitenedGaussian &whitened(std::size_t i) const { return whitened_[i]; }
    const Aabb &box(std::size_t i) const { return boxes_[i]; }
    std::span<const Gaussian3D> gaussians() const { return gaussians_; }
    std::span<const Aabb> boxes() const { return boxes_; }
    const Bvh &bvh() const { return bvh_; }
    Aabb bounds() const;

private:
    std::vector<Gaussian3D> gaussians_;
    std::vector<WhitenedGaussian> whitened_;
    std::vector<Aabb> boxes_;
    Bvh bvh_;
    double cutoff_;
};

} // namespace sgrt
