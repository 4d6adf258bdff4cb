#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgrt {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;
using Rgb = Eigen::Array3d;

/// Default negligibility radius in standard deviations (2*sqrt(2)).
inline constexpr double kDefaultCutoff = 2.8284271247461903;

/// Largest finite double; used as the "unbounded" far end of a ray.
inline constexpr double kInfiniteT = std::numeric_limits<double>::max();

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateCovarianceError : public Error {
public:
    using Error::Error;
};

class ContractError : public Error {
public:
    using Error::Error;
};

enum class DepthMode { Mean, Center };

const char *to_string(DepthMode mode);
DepthMode parse_depth_mode(const std::string &text);

/// Number of SH coefficients per channel for degree 0..3.
constexpr int sh_coeff_count(int degree) { return (degree + 1) * (degree + 1); }

/// One anisotropic 3D Gaussian.
///
/// `rotation` follows the splat-asset convention: its matrix maps the local
/// (principal) axes to world, so the covariance is M diag(scale^2) M^T.
/// `sh` holds up to 16 RGB coefficients in basis order; entries beyond
/// sh_coeff_count(sh_degree) are ignored.
struct Gaussian3D {
    Vec3 mean = Vec3::Zero();
    Quat rotation = Quat::Identity();
    Vec3 scale = Vec3::Ones();
    double base_opacity = 1.0;
    int sh_degree = 0;
    std::array<Rgb, 16> sh{};

    /// Throws Error when a type invariant does not hold.
    void validate() const;
};

struct Ray {
    Vec3 origin = Vec3::Zero();
    Vec3 direction = Vec3::UnitZ();
    double t_min = 0.0;
    double t_max = kInfiniteT;

    Vec3 at(double t) const { return origin + t * direction; }
    void validate() const;
};

struct Aabb {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

    bool empty() const { return (lo.array() > hi.array()).any(); }
    void expand(const Vec3 &p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    void expand(const Aabb &b) {
        lo = lo.cwiseMin(b.lo);
        hi = hi.cwiseMax(b.hi);
    }
    bool contains(const Vec3 &p) const {
        return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
    }
    bool contains(const Aabb &b) const { return contains(b.lo) && contains(b.hi); }
    Vec3 center() const { return 0.5 * (lo + hi); }
    Vec3 extent() const { return hi - lo; }
    double surface_area() const {
        if (empty())
            return 0.0;
        const Vec3 e = extent();
        return 2.0 * (e.x() * e.y() + e.y() * e.z() + e.z() * e.x());
    }
};

struct IntersectionCandidate {
    std::size_t prim_id = 0;
    double t = 0.0;
    double alpha = 0.0;
    Vec3 position = Vec3::Zero();
};

struct RayPeak {
    double t_peak;
    double alpha;
};

/// World-to-local rotation R, i.e. the transpose of the quaternion's matrix.
Mat3 rotation_matrix(const Gaussian3D &g);

/// Sigma = R^T S^2 R.
Mat3 covariance(const Gaussian3D &g);

/// Box around the rotated corners of mean +/- s*scale.
Aabb compute_aabb(const Gaussian3D &g, double s = kDefaultCutoff);

/// Peak of the 1D Gaussian obtained by restricting g to the ray's line, and
/// the opacity there. Throws DegenerateCovarianceError when d^T Sigma^-1 d is
/// not positive and finite.
RayPeak ray_peak_1d(const Gaussian3D &g, const Ray &r);

/// True iff the Mahalanobis radius of `position` exceeds s.
bool is_negligible(const Gaussian3D &g, const Vec3 &position, double s = kDefaultCutoff);

/// Projection of the Gaussian center onto the ray direction.
double depth_center(const Gaussian3D &g, const Ray &r);

/// Spherical-harmonic color with the +0.5 offset, clamped below at 0.
Rgb eval_color(const Gaussian3D &g, const Vec3 &view_dir);

/// Real SH basis values Y_0..Y_{(degree+1)^2-1} for a unit direction.
void sh_basis(int degree, const Vec3 &dir, std::span<double> out);

/// Per-primitive data precomputed for tracing: mean, the whitening map
/// S^-1 R (Mahalanobis frame) and the base opacity.
struct WhitenedGaussian {
    Vec3 mean = Vec3::Zero();
    Mat3 whiten = Mat3::Identity();
    double base_opacity = 1.0;

    static WhitenedGaussian from(const Gaussian3D &g);
};

RayPeak ray_peak_1d(const WhitenedGaussian &g, const Ray &r);
bool is_negligible(const WhitenedGaussian &g, const Vec3 &position, double s);

inline constexpr double kShC0 = 0.28209479177387814;

} // namespace sgrt
