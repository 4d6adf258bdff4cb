#include "sgrt/gaussian.hpp"

#include <algorithm>
#include <cmath>

namespace sgrt {

const char *to_string(DepthMode mode) { return mode == DepthMode::Mean ? "mean" : "center"; }

DepthMode parse_depth_mode(const std::string &text) {
    if (text == "mean")
        return DepthMode::Mean;
    if (text == "center")
        return DepthMode::Center;
    throw Error("depth mode must be 'mean' or 'center', got '" + text + "'");
}

void Gaussian3D::validate() const {
    if (!mean.allFinite())
        throw Error("gaussian mean is not finite");
    if (std::abs(rotation.norm() - 1.0) > 1e-6)
        throw Error("gaussian rotation is not a unit quaternion");
    for (int i = 0; i < 3; ++i) {
        if (!(scale[i] > 0.0) || !std::isfinite(scale[i]))
            throw Error("gaussian scale must be positive and finite");
    }
    if (!(base_opacity >= 0.0 && base_opacity <= 1.0))
        throw Error("gaussian opacity must lie in [0, 1]");
    if (sh_degree < 0 || sh_degree > 3)
        throw Error("gaussian SH degree must be 0..3");
}

void Ray::validate() const {
    if (!origin.allFinite() || !direction.allFinite())
        throw Error("ray origin/direction must be finite");
    if (std::abs(direction.norm() - 1.0) > 1e-6)
        throw Error("ray direction must be unit length");
    if (!(t_min >= 0.0 && t_min < t_max))
        throw Error("ray range must satisfy 0 <= t_min < t_max");
}

Mat3 rotation_matrix(const Gaussian3D &g) {
    return g.rotation.normalized().toRotationMatrix().transpose();
}

Mat3 covariance(const Gaussian3D &g) {
    const Mat3 r = rotation_matrix(g);
    const Eigen::DiagonalMatrix<double, 3> s2(g.scale.cwiseProduct(g.scale));
    Mat3 sigma = r.transpose() * s2 * r;
    // Exact symmetry; the product is symmetric only up to rounding.
    return 0.5 * (sigma + sigma.transpose());
}

Aabb compute_aabb(const Gaussian3D &g, double s) {
    const Mat3 local_to_world = rotation_matrix(g).transpose();
    const Vec3 half = s * g.scale;
    Aabb box;
    for (int corner = 0; corner < 8; ++corner) {
        const Vec3 local((corner & 1) ? half.x() : -half.x(), (corner & 2) ? half.y() : -half.y(),
                         (corner & 4) ? half.z() : -half.z());
        box.expand(Vec3(g.mean + local_to_world * local));
    }
    return box;
}

WhitenedGaussian WhitenedGaussian::from(const Gaussian3D &g) {
    WhitenedGaussian w;
    w.mean = g.mean;
    w.whiten = g.scale.cwiseInverse().asDiagonal() * rotation_matrix(g);
    w.base_opacity = g.base_opacity;
    return w;
}

RayPeak ray_peak_1d(const WhitenedGaussian &g, const Ray &r) {
    // In the whitened frame A = Sigma^-1 becomes the identity.
    const Vec3 v = g.whiten * (r.origin - g.mean);
    const Vec3 d = g.whiten * r.direction;
    const double dad = d.squaredNorm();
    if (!(dad > 0.0) || !std::isfinite(dad))
        throw DegenerateCovarianceError("degenerate covariance along ray");
    const double dav = d.dot(v);
    const double t_peak = -dav / dad;
    const double exponent = std::max(0.0, v.squaredNorm() - dav * dav / dad);
    return {t_peak, g.base_opacity * std::exp(-0.5 * exponent)};
}

RayPeak ray_peak_1d(const Gaussian3D &g, const Ray &r) {
    return ray_peak_1d(WhitenedGaussian::from(g), r);
}

bool is_negligible(const WhitenedGaussian &g, const Vec3 &position, double s) {
    return (g.whiten * (position - g.mean)).squaredNorm() > s * s;
}

bool is_negligible(const Gaussian3D &g, const Vec3 &position, double s) {
    return is_negligible(WhitenedGaussian::from(g), position, s);
}

double depth_center(const Gaussian3D &g, const Ray &r) {
    return (g.mean - r.origin).dot(r.direction);
}

namespace {

constexpr double kShC1 = 0.4886025119029199;
constexpr double kShC2[] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                            -1.0925484305920792, 0.5462742152960396};
constexpr double kShC3[] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
                            0.3731763325901154,  -0.4570457994644658, 1.445305721320277,
                            -0.5900435899266435};

} // namespace

void sh_basis(int degree, const Vec3 &dir, std::span<double> out) {
    const double x = dir.x(), y = dir.y(), z = dir.z();
    out[0] = kShC0;
    if (degree < 1)
        return;
    out[1] = -kShC1 * y;
    out[2] = kShC1 * z;
    out[3] = -kShC1 * x;
    if (degree < 2)
        return;
    const double xx = x * x, yy = y * y, zz = z * z;
    out[4] = kShC2[0] * x * y;
    out[5] = kShC2[1] * y * z;
    out[6] = kShC2[2] * (2.0 * zz - xx - yy);
    out[7] = kShC2[3] * x * z;
    out[8] = kShC2[4] * (xx - yy);
    if (degree < 3)
        return;
    out[9] = kShC3[0] * y * (3.0 * xx - yy);
    out[10] = kShC3[1] * x * y * z;
    out[11] = kShC3[2] * y * (4.0 * zz - xx - yy);
    out[12] = kShC3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy);
    out[13] = kShC3[4] * x * (4.0 * zz - xx - yy);
    out[14] = kShC3[5] * z * (xx - yy);
    out[15] = kShC3[6] * x * (xx - 3.0 * yy);
}

Rgb eval_color(const Gaussian3D &g, const Vec3 &view_dir) {
    std::array<double, 16> basis{};
    sh_basis(g.sh_degree, view_dir, basis);
    Rgb c = Rgb::Constant(0.5);
    for (int i = 0; i < sh_coeff_count(g.sh_degree); ++i)
        c += basis[i] * g.sh[i];
    return c.max(0.0);
}

} // namespace sgrt
