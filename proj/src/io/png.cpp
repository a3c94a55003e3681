#include "foldgan/io/png.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

namespace foldgan::io {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void on_png_error(png_structp png, png_const_charp msg) {
  auto* what = static_cast<std::string*>(png_get_error_ptr(png));
  *what = msg;
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

}  // namespace

GrayImage heatmap_image(const Heatmap& h) {
  h.validate();
  if (!h.normalized) throw DataError("render: heatmap '" + h.id + "' is not normalized");
  GrayImage img;
  img.width = h.D;
  img.height = h.P;
  img.pixels.resize(h.P * h.D);
  for (std::size_t r = 0; r < h.P; ++r)
    for (std::size_t c = 0; c < h.D; ++c)
      img.pixels[r * h.D + c] = static_cast<std::uint8_t>(std::lround(255.0 * h.at(r, c)));
  return img;
}

// libpng reports errors through longjmp; nothing with a non-trivial
// destructor is created between setjmp and the libpng calls.
void write_png(const GrayImage& img, const std::string& path) {
  if (img.width == 0 || img.height == 0 || img.pixels.size() != img.width * img.height)
    throw std::invalid_argument("write_png: bad image dimensions");
  File f(std::fopen(path.c_str(), "wb"));
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  std::string error;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error, on_png_error, on_png_warning);
  if (!png) throw std::runtime_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  std::vector<png_bytep> rows(img.height);
  for (std::size_t y = 0; y < img.height; ++y) rows[y] = const_cast<png_bytep>(img.pixels.data() + y * img.width);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("writing '" + path + "': " + (error.empty() ? "libpng error" : error));
  }
  png_init_io(png, f.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void render_png(const Heatmap& h, const std::string& path) { write_png(heatmap_image(h), path); }

GrayImage read_png(const std::string& path) {
  File f(std::fopen(path.c_str(), "rb"));
  if (!f) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::string error;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error, on_png_error, on_png_warning);
  if (!png) throw std::runtime_error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  GrayImage img;
  std::vector<png_bytep> rows;
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("reading '" + path + "': " + (error.empty() ? "libpng error" : error));
  }
  png_init_io(png, f.get());
  png_read_info(png, info);
  if (png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY || png_get_bit_depth(png, info) != 8)
    png_error(png, "not an 8-bit grayscale image");
  img.width = png_get_image_width(png, info);
  img.height = png_get_image_height(png, info);
  img.pixels.resize(img.width * img.height);
  rows.resize(img.height);
  for (std::size_t y = 0; y < img.height; ++y) rows[y] = img.pixels.data() + y * img.width;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

}  // namespace foldgan::io
