#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "foldgan/folding.hpp"

namespace foldgan::io {

struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};

/// Pixel (x = c, y = r) = round(255 * value). Width D, height P; row 0 (first
/// sample of the day) at the top, column 0 (first day) at the left. Throws
/// DataError unless the heatmap is normalized.
GrayImage heatmap_image(const Heatmap& h);

/// Writes an 8-bit grayscale PNG.
void write_png(const GrayImage& img, const std::string& path);
void render_png(const Heatmap& h, const std::string& path);

/// Reads an 8-bit grayscale PNG.
GrayImage read_png(const std::string& path);

}  // namespace foldgan::io
