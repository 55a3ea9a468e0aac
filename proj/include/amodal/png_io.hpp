#pragma once

#include <filesystem>
#include <string>

#include "amodal/raster.hpp"

namespace amodal {

// 8-bit RGB PNG.
std::string encode_png(const Appearance& image);
Appearance decode_png(const std::string& bytes);
// 8-bit RGBA PNG, opaque where `alpha` is set and transparent elsewhere.
std::string encode_png_rgba(const Appearance& image, const Mask& alpha);

// 1-bit grayscale PNG; set bits are white.
std::string encode_mask_png(const Mask& mask);
// Any PNG; a pixel is set when its gray level is >= 128.
Mask decode_mask_png(const std::string& bytes);

void write_png(const Appearance& image, const std::filesystem::path& path);
Appearance read_png(const std::filesystem::path& path);
void write_mask_png(const Mask& mask, const std::filesystem::path& path);
Mask read_mask_png(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace amodal
