#include "sgrt/scene.hpp"

namespace sgrt {

Scene::Scene(std::vector<Gaussian3D> gaussians, double cutoff, int leaf_size)
    : gaussians_(std::move(gaussians)), cutoff_(cutoff) {
    if (!(cutoff > 0.0))
        throw Error("cutoff must be positive");
    whitened_.reserve(gaussians_.size());
    boxes_.reserve(gaussians_.size());
    for (const Gaussian3D &g : gaussians_) {
        g.validate();
        whitened_.push_back(WhitenedGaussian::from(g));
        boxes_.push_back(compute_aabb(g, cutoff));
    }
    bvh_ = Bvh::build(boxes_, leaf_size);
}

Aabb Scene::bounds() const {
    Aabb b;
    for (const Aabb &box : boxes_)
        b.expand(box);
    return b;
}

} // namespace sgrt
