#include "sgrt/scene_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace sgrt {

void CameraConfig::validate() const {
    if (!position.allFinite() || !look_at.allFinite() || !up.allFinite())
        throw ConfigError("camera vectors must be finite");
    if ((look_at - position).norm() == 0.0)
        throw ConfigError("cam_look_at must differ from cam_pos");
    if (!(vertical_fov > 0.0 && vertical_fov < 180.0))
        throw ConfigError("fov_deg must lie in (0, 180)");
    if ((look_at - position).normalized().cross(up).norm() < 1e-9)
        throw ConfigError("cam_up must not be parallel to the view direction");
}

void RenderSettings::validate() const {
    if (width < 1 || height < 1)
        throw ConfigError("width and height must be at least 1");
    if (spp < 1)
        throw ConfigError("spp must be at least 1");
    if (multisample_n < 1 || multisample_n > 256)
        throw ConfigError("multisample must lie in [1, 256]");
    if (!(cutoff_s > 0.0) || !std::isfinite(cutoff_s))
        throw ConfigError("cutoff_s must be positive");
    if (!background.allFinite() || (background < 0.0).any())
        throw ConfigError("background must be finite and nonnegative");
    if (threads < 0)
        throw ConfigError("threads must be nonnegative");
}

namespace {

enum class PlyType { I8, U8, I16, U16, I32, U32, F32, F64 };

std::optional<PlyType> ply_type(const std::string &name) {
    static const std::map<std::string, PlyType> kTypes = {
        {"char", PlyType::I8},     {"int8", PlyType::I8},     {"uchar", PlyType::U8},
        {"uint8", PlyType::U8},    {"short", PlyType::I16},   {"int16", PlyType::I16},
        {"ushort", PlyType::U16},  {"uint16", PlyType::U16},  {"int", PlyType::I32},
        {"int32", PlyType::I32},   {"uint", PlyType::U32},    {"uint32", PlyType::U32},
        {"float", PlyType::F32},   {"float32", PlyType::F32}, {"double", PlyType::F64},
        {"float64", PlyType::F64}};
    const auto it = kTypes.find(name);
    if (it == kTypes.end())
        return std::nullopt;
    return it->second;
}

std::size_t type_size(PlyType t) {
    switch (t) {
    case PlyType::I8:
    case PlyType::U8:
        return 1;
    case PlyType::I16:
    case PlyType::U16:
        return 2;
    case PlyType::I32:
    case PlyType::U32:
    case PlyType::F32:
        return 4;
    case PlyType::F64:
        return 8;
    }
    return 0;
}

template <class T> T read_le(const unsigned char *p) {
    T value;
    std::memcpy(&value, p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        auto *bytes = reinterpret_cast<unsigned char *>(&value);
        std::reverse(bytes, bytes + sizeof(T));
    }
    return value;
}

double decode(PlyType t, const unsigned char *p) {
    switch (t) {
    case PlyType::I8:
        return read_le<std::int8_t>(p);
    case PlyType::U8:
        return read_le<std::uint8_t>(p);
    case PlyType::I16:
        return read_le<std::int16_t>(p);
    case PlyType::U16:
        return read_le<std::uint16_t>(p);
    case PlyType::I32:
        return read_le<std::int32_t>(p);
    case PlyType::U32:
        return read_le<std::uint32_t>(p);
    case PlyType::F32:
        return read_le<float>(p);
    case PlyType::F64:
        return read_le<double>(p);
    }
    return 0.0;
}

struct PlyProperty {
    std::string name;
    PlyType type;
    std::size_t offset;
};

struct PlyHeader {
    bool binary = false;
    std::size_t vertex_count = 0;
    std::vector<PlyProperty> properties;
    std::size_t stride = 0;
};

PlyHeader read_header(std::istream &in, const std::string &path) {
    std::string line;
    if (!std::getline(in, line) || line.substr(0, 3) != "ply")
        throw FormatError(path + ": not a PLY file");
    PlyHeader h;
    bool have_format = false;
    bool in_vertex = false;
    bool seen_vertex = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::istringstream ls(line);
        std::string keyword;
        ls >> keyword;
        if (keyword == "end_header") {
            if (!have_format)
                throw FormatError(path + ": missing format line");
            if (!seen_vertex)
                throw FormatError(path + ": missing vertex element");
            return h;
        }
        if (keyword == "comment" || keyword == "obj_info" || keyword.empty())
            continue;
        if (keyword == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt == "ascii")
                h.binary = false;
            else if (fmt == "binary_little_endian")
                h.binary = true;
            else
                throw FormatError(path + ": unsupported PLY format '" + fmt + "'");
            have_format = true;
        } else if (keyword == "element") {
            std::string name;
            std::size_t count = 0;
            ls >> name >> count;
            if (name == "vertex") {
                if (seen_vertex)
                    throw FormatError(path + ": duplicate vertex element");
                h.vertex_count = count;
                in_vertex = seen_vertex = true;
            } else {
                if (!seen_vertex)
                    throw FormatError(path + ": element '" + name +
                                      "' before vertex is not supported");
                in_vertex = false;
            }
        } else if (keyword == "property") {
            if (!in_vertex)
                continue;
            std::string type_name, name;
            ls >> type_name;
            if (type_name == "list")
                throw FormatError(path + ": list properties are not supported on vertices");
            ls >> name;
            const auto type = ply_type(type_name);
            if (!type)
                throw FormatError(path + ": unknown property type '" + type_name + "'");
            h.properties.push_back({name, *type, h.stride});
            h.stride += type_size(*type);
        } else {
            throw FormatError(path + ": unexpected header line '" + line + "'");
        }
    }
    throw FormatError(path + ": header not terminated by end_header");
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

} // namespace

SplatAsset load_ply(const std::filesystem::path &path) {
    const std::string name = path.string();
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FormatError(name + ": cannot open file");
    const PlyHeader h = read_header(in, name);
    if (h.vertex_count == 0)
        throw FormatError(name + ": asset has zero vertices");

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < h.properties.size(); ++i)
        index[h.properties[i].name] = i;
    auto require = [&](const std::string &prop) {
        const auto it = index.find(prop);
        if (it == index.end())
            throw FormatError(name + ": missing required property '" + prop + "'");
        return it->second;
    };
    const std::size_t ix = require("x"), iy = require("y"), iz = require("z");
    const std::size_t iscale[3] = {require("scale_0"), require("scale_1"), require("scale_2")};
    const std::size_t irot[4] = {require("rot_0"), require("rot_1"), require("rot_2"),
                                 require("rot_3")};
    const std::size_t iopacity = require("opacity");
    const std::size_t idc[3] = {require("f_dc_0"), require("f_dc_1"), require("f_dc_2")};

    std::size_t rest_count = 0;
    while (index.count("f_rest_" + std::to_string(rest_count)))
        ++rest_count;
    const auto rest_props = std::count_if(h.properties.begin(), h.properties.end(), [](const auto &p) {
        return p.name.rfind("f_rest_", 0) == 0;
    });
    if (static_cast<std::size_t>(rest_props) != rest_count)
        throw FormatError(name + ": f_rest properties are not numbered contiguously from 0");
    int degree = -1;
    for (int d = 0; d <= 3; ++d) {
        if (rest_count == static_cast<std::size_t>(3 * (sh_coeff_count(d) - 1)))
            degree = d;
    }
    if (degree < 0)
        throw FormatError(name + ": unsupported f_rest count " + std::to_string(rest_count) +
                          " (expected 0, 9, 24 or 45)");
    std::vector<std::size_t> irest(rest_count);
    for (std::size_t i = 0; i < rest_count; ++i)
        irest[i] = index.at("f_rest_" + std::to_string(i));
    const std::size_t rest_per_channel = rest_count / 3;

    std::vector<double> values(h.properties.size());
    std::vector<unsigned char> record(h.stride);
    SplatAsset asset;
    asset.sh_degree = degree;
    asset.source_path = name;
    asset.gaussians.reserve(h.vertex_count);

    for (std::size_t v = 0; v < h.vertex_count; ++v) {
        if (h.binary) {
            if (!in.read(reinterpret_cast<char *>(record.data()),
                         static_cast<std::streamsize>(h.stride)))
                throw FormatError(name + ": truncated vertex data at record " + std::to_string(v));
            for (std::size_t i = 0; i < h.properties.size(); ++i)
                values[i] = decode(h.properties[i].type, record.data() + h.properties[i].offset);
        } else {
            for (std::size_t i = 0; i < h.properties.size(); ++i) {
                if (!(in >> values[i]))
                    throw FormatError(name + ": truncated or malformed ascii record " +
                                      std::to_string(v));
            }
        }
        for (double x : values) {
            if (!std::isfinite(x))
                throw FormatError(name + ": non-finite value in record " + std::to_string(v));
        }

        Gaussian3D g;
        g.mean = Vec3(values[ix], values[iy], values[iz]);
        g.scale = Vec3(std::exp(values[iscale[0]]), std::exp(values[iscale[1]]),
                       std::exp(values[iscale[2]]));
        Quat q(values[irot[0]], values[irot[1]], values[irot[2]], values[irot[3]]);
        if (q.norm() == 0.0)
            throw FormatError(name + ": zero quaternion in record " + std::to_string(v));
        g.rotation = q.normalized();
        g.base_opacity = sigmoid(values[iopacity]);
        g.sh_degree = degree;
        g.sh[0] = Rgb(values[idc[0]], values[idc[1]], values[idc[2]]);
        for (std::size_t k = 1; k < static_cast<std::size_t>(sh_coeff_count(degree)); ++k) {
            for (std::size_t c = 0; c < 3; ++c)
                g.sh[k][static_cast<Eigen::Index>(c)] =
                    values[irest[c * rest_per_channel + (k - 1)]];
        }
        asset.gaussians.push_back(g);
    }

    // Clamp near-flat splats relative to the extent of the means.
    Aabb means;
    for (const Gaussian3D &g : asset.gaussians)
        means.expand(g.mean);
    double extent = means.extent().norm();
    if (!(extent > 0.0))
        extent = 1.0;
    const double floor = kMinRelativeScale * extent;
    for (Gaussian3D &g : asset.gaussians) {
        g.scale = g.scale.cwiseMax(floor);
        if (!g.scale.allFinite())
            throw FormatError(name + ": scale overflows");
    }
    return asset;
}

void write_ply(const SplatAsset &asset, const std::filesystem::path &path, bool binary) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(path.string() + ": cannot open for writing");
    const int degree = asset.sh_degree;
    const int rest_per_channel = sh_coeff_count(degree) - 1;

    std::vector<std::string> names = {"x", "y", "z"};
    for (int i = 0; i < 3; ++i)
        names.push_back("f_dc_" + std::to_string(i));
    for (int i = 0; i < 3 * rest_per_channel; ++i)
        names.push_back("f_rest_" + std::to_string(i));
    names.push_back("opacity");
    for (int i = 0; i < 3; ++i)
        names.push_back("scale_" + std::to_string(i));
    for (int i = 0; i < 4; ++i)
        names.push_back("rot_" + std::to_string(i));

    out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n";
    out << "element vertex " << asset.gaussians.size() << "\n";
    for (const auto &n : names)
        out << "property float " << n << "\n";
    out << "end_header\n";

    std::vector<float> row;
    row.reserve(names.size());
    for (const Gaussian3D &g : asset.gaussians) {
        row.clear();
        for (int i = 0; i < 3; ++i)
            row.push_back(static_cast<float>(g.mean[i]));
        for (int c = 0; c < 3; ++c)
            row.push_back(static_cast<float>(g.sh[0][c]));
        for (int c = 0; c < 3; ++c) {
            for (int k = 1; k <= rest_per_channel; ++k)
                row.push_back(static_cast<float>(g.sh[static_cast<std::size_t>(k)][c]));
        }
        const double a = std::clamp(g.base_opacity, 1e-7, 1.0 - 1e-7);
        row.push_back(static_cast<float>(std::log(a / (1.0 - a))));
        for (int i = 0; i < 3; ++i)
            row.push_back(static_cast<float>(std::log(g.scale[i])));
        const Quat q = g.rotation.normalized();
        row.push_back(static_cast<float>(q.w()));
        row.push_back(static_cast<float>(q.x()));
        row.push_back(static_cast<float>(q.y()));
        row.push_back(static_cast<float>(q.z()));

        if (binary) {
            for (float f : row) {
                unsigned char bytes[4];
                std::memcpy(bytes, &f, 4);
                if constexpr (std::endian::native == std::endian::big)
                    std::reverse(bytes, bytes + 4);
                out.write(reinterpret_cast<const char *>(bytes), 4);
            }
        } else {
            out.precision(9);
            for (std::size_t i = 0; i < row.size(); ++i)
                out << (i ? " " : "") << row[i];
            out << "\n";
        }
    }
    if (!out)
        throw Error(path.string() + ": write failed");
}

Vec3 parse_vec3(const std::string &text) {
    std::string s = text;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    Vec3 v;
    std::string rest;
    if (!(in >> v.x() >> v.y() >> v.z()) || (in >> rest))
        throw ConfigError("expected three comma-separated numbers, got '" + text + "'");
    return v;
}

namespace {

std::string trim(const std::string &s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const char *const kConfigKeys[] = {"asset",  "cam_pos",  "cam_look_at", "cam_up", "fov_deg",
                                   "width",  "height",   "spp",         "depth_mode",
                                   "cutoff_s", "multisample", "background", "seed"};

long long parse_int(const std::string &key, const std::string &value) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(value, &used);
    } catch (const std::exception &) {
        throw ConfigError(key + ": expected an integer, got '" + value + "'");
    }
    if (used != value.size())
        throw ConfigError(key + ": expected an integer, got '" + value + "'");
    return v;
}

double parse_double(const std::string &key, const std::string &value) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception &) {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    }
    if (used != value.size())
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    return v;
}

int to_int_in_range(const std::string &key, long long v, long long lo, long long hi) {
    if (v < lo || v > hi)
        throw ConfigError(key + ": value " + std::to_string(v) + " out of range [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(v);
}

} // namespace

SceneConfig parse_scene_config(const std::string &text, const std::filesystem::path &base_dir) {
    SceneConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool have_asset = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "asset") {
            std::filesystem::path p(value);
            if (value.rfind("builtin:", 0) != 0 && p.is_relative() && !base_dir.empty())
                p = base_dir / p;
            cfg.asset = value.rfind("builtin:", 0) == 0 ? value : p.string();
            have_asset = true;
        } else if (key == "cam_pos") {
            cfg.camera.position = parse_vec3(value);
        } else if (key == "cam_look_at") {
            cfg.camera.look_at = parse_vec3(value);
        } else if (key == "cam_up") {
            cfg.camera.up = parse_vec3(value);
        } else if (key == "fov_deg") {
            cfg.camera.vertical_fov = parse_double(key, value);
        } else if (key == "width") {
            cfg.settings.width = to_int_in_range(key, parse_int(key, value), 1, 1 << 16);
        } else if (key == "height") {
            cfg.settings.height = to_int_in_range(key, parse_int(key, value), 1, 1 << 16);
        } else if (key == "spp") {
            cfg.settings.spp = to_int_in_range(key, parse_int(key, value), 1, 1 << 24);
        } else if (key == "depth_mode") {
            try {
                cfg.settings.depth_mode = parse_depth_mode(value);
            } catch (const Error &e) {
                throw ConfigError(std::string("depth_mode: ") + e.what());
            }
        } else if (key == "cutoff_s") {
            cfg.settings.cutoff_s = parse_double(key, value);
        } else if (key == "multisample") {
            cfg.settings.multisample_n = to_int_in_range(key, parse_int(key, value), 1, 256);
        } else if (key == "background") {
            const Vec3 b = parse_vec3(value);
            cfg.settings.background = Rgb(b.x(), b.y(), b.z());
        } else if (key == "seed") {
            const long long s = parse_int(key, value);
            if (s < 0)
                throw ConfigError("seed: must be nonnegative");
            cfg.settings.seed = static_cast<std::uint64_t>(s);
        } else {
            std::string valid;
            for (const char *k : kConfigKeys)
                valid += (valid.empty() ? "" : ", ") + std::string(k);
            throw ConfigError("unknown key '" + key + "'; valid keys: " + valid);
        }
    }
    if (!have_asset)
        throw ConfigError("missing required key 'asset'");
    cfg.camera.validate();
    cfg.settings.validate();
    return cfg;
}

SceneConfig load_scene_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path.string() + ": cannot open config");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scene_config(buf.str(), path.parent_path());
}

} // namespace sgrt
