#include "sgrt/synthetic.hpp"

#include <cmath>
#include <numbers>

namespace sgrt {

Gaussian3D make_colored(const Vec3 &mean, double scale, double opacity, const Rgb &color) {
    Gaussian3D g;
    g.mean = mean;
    g.scale = Vec3::Constant(scale);
    g.base_opacity = opacity;
    g.sh_degree = 0;
    g.sh[0] = (color - 0.5) / kShC0;
    return g;
}

Quat random_rotation(std::mt19937_64 &rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Quat q(n(rng), n(rng), n(rng), n(rng));
    return q.normalized();
}

std::vector<Gaussian3D> random_cloud(const CloudParams &p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pos(-p.half_extent, p.half_extent);
    std::uniform_real_distribution<double> log_scale(std::log(p.min_scale), std::log(p.max_scale));
    std::uniform_real_distribution<double> opacity(p.min_opacity, p.max_opacity);
    std::uniform_real_distribution<double> color(-1.2, 1.2);
    std::uniform_real_distribution<double> rest(-0.3, 0.3);
    std::vector<Gaussian3D> out;
    out.reserve(p.count);
    for (std::size_t i = 0; i < p.count; ++i) {
        Gaussian3D g;
        g.mean = Vec3(pos(rng), pos(rng), pos(rng));
        g.rotation = random_rotation(rng);
        g.scale = Vec3(std::exp(log_scale(rng)), std::exp(log_scale(rng)), std::exp(log_scale(rng)));
        g.base_opacity = opacity(rng);
        g.sh_degree = p.sh_degree;
        g.sh[0] = Rgb(color(rng), color(rng), color(rng));
        for (int k = 1; k < sh_coeff_count(p.sh_degree); ++k)
            g.sh[static_cast<std::size_t>(k)] = Rgb(rest(rng), rest(rng), rest(rng));
        out.push_back(g);
    }
    return out;
}

std::vector<Gaussian3D> two_gaussian_scene(double alpha) {
    return {make_colored(Vec3(0, 0, 0), 0.5, alpha, Rgb(1, 0, 0)),
            make_colored(Vec3(0, 0, 4), 0.5, alpha, Rgb(0, 0, 1))};
}

std::vector<Gaussian3D> gaussian_chain(const std::vector<double> &alphas,
                                       const std::vector<Rgb> &colors, double scale) {
    std::vector<Gaussian3D> out;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const Rgb c = i < colors.size() ? colors[i] : Rgb::Constant(0.5);
        out.push_back(make_colored(Vec3(0, 0, 2.0 * static_cast<double>(i)), scale, alphas[i], c));
    }
    return out;
}

std::vector<Gaussian3D> overlapping_patch(std::size_t count, std::uint64_t seed) {
    CloudParams p;
    p.count = count;
    p.half_extent = 0.8;
    p.min_scale = 0.05;
    p.max_scale = 0.25;
    p.min_opacity = 0.4;
    p.max_opacity = 0.99;
    p.sh_degree = 1;
    return random_cloud(p, seed);
}

CameraConfig default_camera(double distance, double fov_deg) {
    CameraConfig c;
    c.position = Vec3(0.0, 0.0, -distance);
    c.look_at = Vec3::Zero();
    c.up = Vec3::UnitY();
    c.vertical_fov = fov_deg;
    return c;
}

SplatAsset load_asset(const std::string &source) {
    const std::string prefix = "builtin:";
    if (source.rfind(prefix, 0) != 0)
        return load_ply(source);
    const std::string name = source.substr(prefix.size());
    SplatAsset a;
    a.source_path = source;
    if (name == "cloud1k" || name == "cloud10k") {
        CloudParams p;
        p.count = name == "cloud1k" ? 1000 : 10000;
        a.gaussians = random_cloud(p, 1);
        a.sh_degree = p.sh_degree;
    } else if (name == "two") {
        a.gaussians = two_gaussian_scene();
    } else if (name == "chain8") {
        a.gaussians = gaussian_chain({0.3, 0.5, 0.2, 0.7, 0.4, 0.6, 0.25, 0.9},
                                     {Rgb(1, 0, 0), Rgb(0, 1, 0), Rgb(0, 0, 1), Rgb(1, 1, 0),
                                      Rgb(0, 1, 1), Rgb(1, 0, 1), Rgb(1, 1, 1), Rgb(0.5, 0.2, 0.1)});
    } else if (name == "patch") {
        a.gaussians = overlapping_patch(2000, 3);
        a.sh_degree = 1;
    } else {
        throw Error("unknown builtin asset '" + name +
                    "' (available: cloud1k, cloud10k, two, chain8, patch)");
    }
    return a;
}

Ray jittered_ray(std::mt19937_64 &rng, const Vec3 &origin, const Vec3 &dir, double radius) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Vec3 d = dir.normalized();
    const Vec3 a = std::abs(d.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 e1 = d.cross(a).normalized();
    const Vec3 e2 = d.cross(e1);
    double x, y;
    do {
        x = u(rng);
        y = u(rng);
    } while (x * x + y * y > 1.0);
    Ray r;
    r.origin = origin + radius * (x * e1 + y * e2);
    r.direction = d;
    return r;
}

} // namespace sgrt
