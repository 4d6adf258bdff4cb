#include "sgrt/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

namespace sgrt {

ImageFormat parse_image_format(const std::string &text) {
    if (text == "png")
        return ImageFormat::Png;
    if (text == "pfm")
        return ImageFormat::Pfm;
    throw Error("image format must be 'png' or 'pfm', got '" + text + "'");
}

ImageFormat image_format_for(const std::filesystem::path &path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".pfm")
        return ImageFormat::Pfm;
    return ImageFormat::Png;
}

std::uint8_t encode_srgb8(double linear) {
    if (!(linear > 0.0))
        return 0;
    if (linear >= 1.0)
        return 255;
    const double s = linear <= 0.0031308 ? 12.92 * linear
                                         : 1.055 * std::pow(linear, 1.0 / 2.4) - 0.055;
    return static_cast<std::uint8_t>(std::lround(std::clamp(s, 0.0, 1.0) * 255.0));
}

namespace {

void write_png(const AccumBuffer &buf, const std::filesystem::path &path) {
    std::unique_ptr<FILE, int (*)(FILE *)> fp(std::fopen(path.string().c_str(), "wb"), &std::fclose);
    if (!fp)
        throw Error(path.string() + ": cannot open for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error(path.string() + ": libpng initialization failed");
    }
    std::vector<std::uint8_t> rows(static_cast<std::size_t>(buf.width()) * buf.height() * 4);
    for (int y = 0; y < buf.height(); ++y) {
        for (int x = 0; x < buf.width(); ++x) {
            std::uint8_t *px = &rows[(static_cast<std::size_t>(y) * buf.width() + x) * 4];
            const Rgb &c = buf.radiance(x, y);
            px[0] = encode_srgb8(c[0]);
            px[1] = encode_srgb8(c[1]);
            px[2] = encode_srgb8(c[2]);
            px[3] = 255;
        }
    }
    std::vector<png_bytep> row_ptrs(static_cast<std::size_t>(buf.height()));
    for (int y = 0; y < buf.height(); ++y)
        row_ptrs[static_cast<std::size_t>(y)] = &rows[static_cast<std::size_t>(y) * buf.width() * 4];

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(path.string() + ": PNG encoding failed");
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(buf.width()),
                 static_cast<png_uint_32>(buf.height()), 8, PNG_COLOR_TYPE_RGBA,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_set_sRGB(png, info, PNG_sRGB_INTENT_PERCEPTUAL);
    png_write_info(png, info);
    png_write_image(png, row_ptrs.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void write_pfm(const AccumBuffer &buf, const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(path.string() + ": cannot open for writing");
    out << "PF\n" << buf.width() << " " << buf.height() << "\n-1.0\n";
    for (int y = buf.height() - 1; y >= 0; --y) {
        for (int x = 0; x < buf.width(); ++x) {
            for (int c = 0; c < 3; ++c) {
                const float f = static_cast<float>(buf.radiance(x, y)[c]);
                unsigned char bytes[4];
                std::memcpy(bytes, &f, 4);
                if constexpr (std::endian::native == std::endian::big)
                    std::reverse(bytes, bytes + 4);
                out.write(reinterpret_cast<const char *>(bytes), 4);
            }
        }
    }
    if (!out)
        throw Error(path.string() + ": write failed");
}

} // namespace

void write_image(const AccumBuffer &buf, const std::filesystem::path &path, ImageFormat format) {
    if (format == ImageFormat::Png)
        write_png(buf, path);
    else
        write_pfm(buf, path);
}

AccumBuffer read_pfm(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(path.string() + ": cannot open");
    std::string magic;
    int width = 0, height = 0;
    double scale = 0.0;
    in >> magic >> width >> height >> scale;
    if (magic != "PF" || width <= 0 || height <= 0 || scale == 0.0)
        throw Error(path.string() + ": not a color PFM");
    in.get(); // single whitespace before raster data
    const bool little = scale < 0.0;
    const bool swap = little != (std::endian::native == std::endian::little);
    AccumBuffer buf(width, height);
    std::vector<unsigned char> row(static_cast<std::size_t>(width) * 12);
    for (int y = height - 1; y >= 0; --y) {
        if (!in.read(reinterpret_cast<char *>(row.data()), static_cast<std::streamsize>(row.size())))
            throw Error(path.string() + ": truncated PFM data");
        for (int x = 0; x < width; ++x) {
            Rgb c;
            for (int ch = 0; ch < 3; ++ch) {
                unsigned char *b = &row[static_cast<std::size_t>(x) * 12 + ch * 4];
                if (swap)
                    std::reverse(b, b + 4);
                float f;
                std::memcpy(&f, b, 4);
                c[ch] = f;
            }
            buf.set(x, y, c, 1.0, 1);
        }
    }
    return buf;
}

} // namespace sgrt
