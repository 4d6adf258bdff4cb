#pragma once

#include "sgrt/render.hpp"

#include <filesystem>
#include <string>

namespace sgrt {

enum class ImageFormat { Png, Pfm };

ImageFormat parse_image_format(const std::string &text);
/// Format from the file extension (.png / .pfm).
ImageFormat image_format_for(const std::filesystem::path &path);

/// png: 8-bit sRGB RGBA, alpha 255 (background is already in the radiance).
/// pfm: 32-bit float linear RGB, little-endian, bottom-up scanlines.
void write_image(const AccumBuffer &buf, const std::filesystem::path &path, ImageFormat format);

/// Reads a color PFM of either endianness; opacity is set to 1, count to 1.
AccumBuffer read_pfm(const std::filesystem::path &path);

/// Linear [0, 1] -> 8-bit sRGB with clamping.
std::uint8_t encode_srgb8(double linear);

} // namespace sgrt
