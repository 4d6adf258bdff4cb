// sgrt: stochastic ray tracing of Gaussian splat assets.
//
//   sgrt render   --scene s.cfg --out img.png [--reference] [--multisample N] ...
//   sgrt bench    --scene s.cfg [--grid 1024x1,256x4,64x16] [--compare-biased k]
//   sgrt validate [--seed S]
//   sgrt raster   --scene s.cfg --out raster.pfm [--samples S]
//
// Precedence: command-line flags > scene file > built-in defaults.
// Statistics go to stderr; CSV and reports go to stdout.

#include "sgrt/image_io.hpp"
#include "sgrt/rasterizer.hpp"
#include "sgrt/render.hpp"
#include "sgrt/scene_io.hpp"
#include "sgrt/synthetic.hpp"
#include "sgrt/validate.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

using namespace sgrt;

namespace {

struct CommonFlags {
    std::string scene;
    std::optional<int> spp;
    std::optional<std::string> depth_mode;
    std::optional<int> multisample;
    std::optional<std::string> background;
    std::optional<std::uint64_t> seed;
    int threads = 0;
};

void add_common(CLI::App *cmd, CommonFlags &f) {
    cmd->add_option("--scene", f.scene, "Scene config file (key = value lines)")->required();
    cmd->add_option("--spp", f.spp, "Samples per pixel (default: scene file, else 64)");
    cmd->add_option("--depth-mode", f.depth_mode,
                    "Hit depth convention: mean or center (default: scene file, else mean)")
        ->check(CLI::IsMember({"mean", "center"}));
    cmd->add_option("--multisample", f.multisample,
                    "Samples per traversal, 1..256 (default: scene file, else 1)")
        ->check(CLI::Range(1, 256));
    cmd->add_option("--background", f.background, "Background color r,g,b (default 0,0,0)");
    cmd->add_option("--seed", f.seed, "Jitter seed (default: scene file, else 0)");
    cmd->add_option("--threads", f.threads, "Worker threads, 0 = all cores (default 0)")
        ->check(CLI::NonNegativeNumber);
}

SceneConfig resolve(const CommonFlags &f) {
    SceneConfig cfg = load_scene_config(f.scene);
    RenderSettings &s = cfg.settings;
    if (f.spp)
        s.spp = *f.spp;
    if (f.depth_mode)
        s.depth_mode = parse_depth_mode(*f.depth_mode);
    if (f.multisample)
        s.multisample_n = *f.multisample;
    if (f.background) {
        const Vec3 b = parse_vec3(*f.background);
        s.background = Rgb(b.x(), b.y(), b.z());
    }
    if (f.seed)
        s.seed = *f.seed;
    s.threads = f.threads;
    s.validate();
    return cfg;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string csv_field(const std::string &s) {
    if (s.find(',') == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s)
        q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

struct GridEntry {
    int passes;
    int multisample;
};

std::vector<GridEntry> parse_grid(const std::string &text) {
    std::vector<GridEntry> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (item.empty())
            continue;
        const auto x = item.find('x');
        if (x == std::string::npos)
            throw CLI::ValidationError("--grid", "entries must look like PASSESxN, got '" + item + "'");
        GridEntry e{};
        try {
            e.passes = std::stoi(item.substr(0, x));
            e.multisample = std::stoi(item.substr(x + 1));
        } catch (const std::exception &) {
            throw CLI::ValidationError("--grid", "entries must look like PASSESxN, got '" + item + "'");
        }
        if (e.passes < 1 || e.multisample < 1 || e.multisample > 256)
            throw CLI::ValidationError("--grid", "passes >= 1 and 1 <= N <= 256 required");
        out.push_back(e);
    }
    if (out.empty())
        throw CLI::ValidationError("--grid", "grid is empty");
    return out;
}

int cmd_render(const CommonFlags &f, bool reference, const std::string &out,
               const std::optional<std::string> &format) {
    SceneConfig cfg = resolve(f);
    cfg.settings.reference_mode = reference;
    const SplatAsset asset = load_asset(cfg.asset);
    const Scene scene(asset.gaussians, cfg.settings.cutoff_s);

    const auto start = std::chrono::steady_clock::now();
    RenderStats stats;
    const AccumBuffer img = render(scene, cfg.camera, cfg.settings, {}, &stats);
    const double wall = seconds_since(start);

    write_image(img, out, format ? parse_image_format(*format) : image_format_for(out));
    std::fprintf(stderr,
                 "gaussians=%zu spp=%d N=%d depth_mode=%s mode=%s wall_s=%.3f rays_per_s=%.0f\n",
                 scene.size(), cfg.settings.spp, cfg.settings.multisample_n,
                 to_string(cfg.settings.depth_mode), reference ? "reference" : "stochastic", wall,
                 wall > 0 ? static_cast<double>(stats.traversals) / wall : 0.0);
    return 0;
}

int cmd_bench(const CommonFlags &f, const std::string &grid_text, std::optional<int> biased_k) {
    const SceneConfig cfg = resolve(f);
    const std::vector<GridEntry> grid = parse_grid(grid_text);
    const SplatAsset asset = load_asset(cfg.asset);
    const Scene scene(asset.gaussians, cfg.settings.cutoff_s);

    int ref_spp = 0;
    for (const GridEntry &e : grid)
        ref_spp = std::max(ref_spp, e.passes * e.multisample);
    RenderSettings ref_settings = cfg.settings;
    ref_settings.reference_mode = true;
    ref_settings.spp = ref_spp;
    ref_settings.multisample_n = 1;
    auto start = std::chrono::steady_clock::now();
    const AccumBuffer reference = render(scene, cfg.camera, ref_settings);
    std::fprintf(stderr, "reference: gaussians=%zu spp=%d wall_s=%.3f\n", scene.size(), ref_spp,
                 seconds_since(start));

    std::printf("config,method,passes,multisample,spp,wall_ms,mse,psnr\n");
    auto row = [&](const std::string &config, const std::string &method, int passes, int n,
                   const RenderSettings &s, const RenderExtras &extras) {
        const auto t0 = std::chrono::steady_clock::now();
        const AccumBuffer img = render(scene, cfg.camera, s, extras);
        const double ms = 1000.0 * seconds_since(t0);
        const ImageMetrics m = image_metrics(img, reference);
        std::printf("%s,%s,%d,%d,%d,%.3f,%.6e,%.4f\n", csv_field(config).c_str(),
                    csv_field(method).c_str(), passes, n, s.spp, ms, m.mse, m.psnr);
        std::fflush(stdout);
    };
    for (const GridEntry &e : grid) {
        RenderSettings s = cfg.settings;
        s.spp = e.passes * e.multisample;
        s.multisample_n = e.multisample;
        row(std::to_string(e.passes) + "x" + std::to_string(e.multisample), "stochastic", e.passes,
            e.multisample, s, {});
    }
    if (biased_k) {
        RenderSettings s = cfg.settings;
        s.spp = ref_spp;
        s.multisample_n = 1;
        RenderExtras extras;
        extras.biased_k = *biased_k;
        row(std::to_string(ref_spp) + "x1", "biased-k" + std::to_string(*biased_k), ref_spp, 1, s,
            extras);
    }
    return 0;
}

int cmd_validate(std::uint64_t seed, const std::string &fault) {
    ValidateOptions opt;
    opt.seed = seed;
    opt.invert_acceptance = fault == "invert-acceptance";
    const auto results = run_validation(opt);
    int failed = 0;
    for (const CheckResult &r : results) {
        std::printf("%s %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        failed += r.passed ? 0 : 1;
    }
    std::printf("%zu checks, %d failed\n", results.size(), failed);
    return failed == 0 ? 0 : 1;
}

int cmd_raster(const CommonFlags &f, const std::string &out, int samples,
               const std::optional<std::string> &format) {
    const SceneConfig cfg = resolve(f);
    const SplatAsset asset = load_asset(cfg.asset);
    RasterSettings rs;
    rs.width = cfg.settings.width;
    rs.height = cfg.settings.height;
    rs.background = cfg.settings.background;
    rs.samples = samples;
    rs.seed = cfg.settings.seed;
    const auto start = std::chrono::steady_clock::now();
    const AccumBuffer img = rasterize(asset.gaussians, cfg.camera, rs);
    write_image(img, out, format ? parse_image_format(*format) : image_format_for(out));
    std::fprintf(stderr, "gaussians=%zu samples=%d wall_s=%.3f\n", asset.gaussians.size(), samples,
                 seconds_since(start));
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Stochastic ray tracer for 3D Gaussian splat assets"};
    app.require_subcommand(1);

    CommonFlags render_flags;
    std::string render_out;
    bool reference = false;
    std::optional<std::string> render_format;
    auto *render_cmd = app.add_subcommand("render", "Render an image");
    add_common(render_cmd, render_flags);
    render_cmd->add_option("--out", render_out, "Output image path (.png or .pfm)")->required();
    render_cmd->add_flag("--reference", reference,
                         "Exact sorted compositing instead of stochastic sampling");
    render_cmd->add_option("--format", render_format, "png or pfm (default: from extension)")
        ->check(CLI::IsMember({"png", "pfm"}));

    CommonFlags bench_flags;
    std::string grid = "1024x1,256x4,64x16";
    std::optional<int> biased_k;
    auto *bench_cmd = app.add_subcommand("bench", "Sweep passes x multisample at fixed totals");
    add_common(bench_cmd, bench_flags);
    bench_cmd->add_option("--grid", grid, "Comma-separated PASSESxN entries")->capture_default_str();
    bench_cmd->add_option("--compare-biased", biased_k,
                          "Add a k-nearest stochastic-depth row for comparison")
        ->check(CLI::Range(1, 1 << 16));

    std::uint64_t validate_seed = 1;
    std::string fault = "none";
    auto *validate_cmd = app.add_subcommand("validate", "Run the oracle suite");
    validate_cmd->add_option("--seed", validate_seed, "Seed for ray sampling")->capture_default_str();
    validate_cmd->add_option("--inject-fault", fault, "Mutation for testing the suite itself")
        ->check(CLI::IsMember({"none", "invert-acceptance"}))
        ->capture_default_str();

    CommonFlags raster_flags;
    std::string raster_out;
    int raster_samples = 16;
    std::optional<std::string> raster_format;
    auto *raster_cmd = app.add_subcommand("raster", "Rasterize with the splatting reference");
    add_common(raster_cmd, raster_flags);
    raster_cmd->add_option("--out", raster_out, "Output image path")->required();
    raster_cmd->add_option("--samples", raster_samples, "Film samples per pixel")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    raster_cmd->add_option("--format", raster_format, "png or pfm (default: from extension)")
        ->check(CLI::IsMember({"png", "pfm"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (render_cmd->parsed())
            return cmd_render(render_flags, reference, render_out, render_format);
        if (bench_cmd->parsed())
            return cmd_bench(bench_flags, grid, biased_k);
        if (validate_cmd->parsed())
            return cmd_validate(validate_seed, fault);
        if (raster_cmd->parsed())
            return cmd_raster(raster_flags, raster_out, raster_samples, raster_format);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
