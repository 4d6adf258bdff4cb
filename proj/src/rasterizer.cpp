#include "sgrt/rasterizer.hpp"

#include "sgrt/hash_rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace sgrt {

namespace {

struct Splat {
    Vec2 center;      // film coordinates, pixels
    Eigen::Matrix2d conic; // inverse screen covariance
    double opacity;
    double radius;    // 3 sigma, pixels
    double depth;
    Rgb color;
};

constexpr double kNearPlane = 0.2;

} // namespace

AccumBuffer rasterize(std::span<const Gaussian3D> gaussians, const CameraConfig &camera,
                      const RasterSettings &s) {
    camera.validate();
    if (s.width < 1 || s.height < 1 || s.samples < 1)
        throw Error("rasterize: invalid image settings");

    const Vec3 forward = (camera.look_at - camera.position).normalized();
    const Vec3 right = forward.cross(camera.up).normalized();
    const Vec3 up = right.cross(forward);
    Mat3 world_to_cam;
    world_to_cam.row(0) = right;
    world_to_cam.row(1) = up;
    world_to_cam.row(2) = forward;
    const double tan_half = std::tan(0.5 * camera.vertical_fov * std::numbers::pi / 180.0);
    const double aspect = static_cast<double>(s.width) / s.height;
    const double focal = s.height / (2.0 * tan_half);
    const double lim_x = 1.3 * tan_half * aspect;
    const double lim_y = 1.3 * tan_half;

    std::vector<Splat> splats;
    splats.reserve(gaussians.size());
    for (const Gaussian3D &g : gaussians) {
        const Vec3 pc = world_to_cam * (g.mean - camera.position);
        if (pc.z() <= kNearPlane)
            continue;
        const double tx = std::clamp(pc.x() / pc.z(), -lim_x, lim_x) * pc.z();
        const double ty = std::clamp(pc.y() / pc.z(), -lim_y, lim_y) * pc.z();
        // Film y grows downwards, hence the sign flip on the second row.
        Eigen::Matrix<double, 2, 3> jac;
        jac << focal / pc.z(), 0.0, -focal * tx / (pc.z() * pc.z()), 0.0, -focal / pc.z(),
            focal * ty / (pc.z() * pc.z());
        const Eigen::Matrix<double, 2, 3> t = jac * world_to_cam;
        Eigen::Matrix2d cov = t * covariance(g) * t.transpose();
        cov(0, 0) += 0.3;
        cov(1, 1) += 0.3;
        const double det = cov.determinant();
        if (!(det > 0.0))
            continue;
        const double mid = 0.5 * (cov(0, 0) + cov(1, 1));
        const double lambda = mid + std::sqrt(std::max(0.1, mid * mid - det));
        Splat sp;
        sp.center = Vec2(0.5 * s.width + focal * pc.x() / pc.z(),
                         0.5 * s.height - focal * pc.y() / pc.z());
        sp.conic = cov.inverse();
        sp.opacity = g.base_opacity;
        sp.radius = std::ceil(3.0 * std::sqrt(lambda));
        sp.depth = pc.z();
        sp.color = eval_color(g, (g.mean - camera.position).normalized());
        splats.push_back(sp);
    }

    std::vector<std::size_t> order(splats.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return splats[a].depth < splats[b].depth; });

    AccumBuffer out(s.width, s.height);
    std::vector<Vec2> film(static_cast<std::size_t>(s.samples));
    for (int y = 0; y < s.height; ++y) {
        for (int x = 0; x < s.width; ++x) {
            for (int f = 0; f < s.samples; ++f) {
                film[static_cast<std::size_t>(f)] =
                    s.samples == 1
                        ? Vec2(x + 0.5, y + 0.5)
                        : Vec2(x, y) + pixel_jitter(static_cast<std::uint32_t>(x),
                                                    static_cast<std::uint32_t>(y),
                                                    static_cast<std::uint32_t>(f), s.seed);
            }
            for (const Vec2 &p : film) {
                Rgb c = Rgb::Zero();
                double trans = 1.0;
                for (std::size_t idx : order) {
                    const Splat &sp = splats[idx];
                    const Vec2 d = p - sp.center;
                    if (std::abs(d.x()) > sp.radius + 1.0 || std::abs(d.y()) > sp.radius + 1.0)
                        continue;
                    const double power = -0.5 * d.dot(sp.conic * d);
                    if (power > 0.0)
                        continue;
                    const double alpha = std::min(0.99, sp.opacity * std::exp(power));
                    if (alpha < 1.0 / 255.0)
                        continue;
                    const double next = trans * (1.0 - alpha);
                    if (next < 1e-4)
                        break;
                    c += alpha * trans * sp.color;
                    trans = next;
                }
                out.add_sample(x, y, c + trans * s.background, 1.0 - trans);
            }
        }
    }
    return out;
}

} // namespace sgrt
