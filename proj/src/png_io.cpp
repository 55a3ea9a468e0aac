#include "amodal/png_io.hpp"

#include <png.h>

#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

namespace amodal {

namespace {

// Interleaved 8-bit pixels, with an alpha byte per pixel when `alpha` is set.
std::string encode_raw(const Appearance& image, const Mask* alpha) {
  const int w = image.width(), h = image.height();
  const int n = alpha ? 4 : 3;
  std::vector<png_byte> pixels(static_cast<std::size_t>(w) * h * n);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const Rgb c = image.at(x, y);
      png_byte* p = &pixels[(static_cast<std::size_t>(y) * w + x) * n];
      p[0] = c.r;
      p[1] = c.g;
      p[2] = c.b;
      if (alpha) p[3] = (*alpha)(x, y) ? 255 : 0;
    }

  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(w);
  img.height = static_cast<png_uint_32>(h);
  img.format = alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, pixels.data(), 0,
                                 nullptr))
    throw Error(std::string("png encode: ") + img.message);
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, pixels.data(), 0,
                                 nullptr))
    throw Error(std::string("png encode: ") + img.message);
  out.resize(size);
  return out;
}

}  // namespace

std::string encode_png(const Appearance& image) {
  return encode_raw(image, nullptr);
}

std::string encode_png_rgba(const Appearance& image, const Mask& alpha) {
  require_same_dims(image, alpha, "encode_png_rgba");
  return encode_raw(image, &alpha);
}

namespace {

std::vector<png_byte> decode_raw(const std::string& bytes, png_uint_32 format,
                                 int& width, int& height) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()))
    throw ParseError(std::string("png decode: ") + img.message);
  img.format = format;
  std::vector<png_byte> pixels(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, pixels.data(), 0, nullptr)) {
    png_image_free(&img);
    throw ParseError(std::string("png decode: ") + img.message);
  }
  width = static_cast<int>(img.width);
  height = static_cast<int>(img.height);
  return pixels;
}

void append_bytes(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), length);
}

void no_flush(png_structp) {}

}  // namespace

Appearance decode_png(const std::string& bytes) {
  int w = 0, h = 0;
  auto pixels = decode_raw(bytes, PNG_FORMAT_RGB, w, h);
  Appearance out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const png_byte* p = &pixels[(static_cast<std::size_t>(y) * w + x) * 3];
      out.set(x, y, {p[0], p[1], p[2]});
    }
  return out;
}

namespace {

void write_mask_rows(png_structp png, png_infop info, const Mask& mask) {
  const int w = mask.width(), h = mask.height();
  png_set_IHDR(png, info, static_cast<png_uint_32>(w),
               static_cast<png_uint_32>(h), 1, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row((w + 7) / 8);
  for (int y = 0; y < h; ++y) {
    std::fill(row.begin(), row.end(), 0);
    for (int x = 0; x < w; ++x)
      if (mask(x, y)) row[x / 8] |= static_cast<png_byte>(0x80 >> (x % 8));
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
}

}  // namespace

std::string encode_mask_png(const Mask& mask) {
  std::string out;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error("png encode: cannot allocate writer");
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("png encode: libpng error");
  }
  png_set_write_fn(png, &out, append_bytes, no_flush);
  write_mask_rows(png, info, mask);
  png_destroy_write_struct(&png, &info);
  return out;
}

Mask decode_mask_png(const std::string& bytes) {
  int w = 0, h = 0;
  auto pixels = decode_raw(bytes, PNG_FORMAT_GRAY, w, h);
  Mask out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out.set(x, y, pixels[static_cast<std::size_t>(y) * w + x] >= 128);
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_png(const Appearance& image, const std::filesystem::path& path) {
  write_file(path, encode_png(image));
}

Appearance read_png(const std::filesystem::path& path) {
  return decode_png(read_file(path));
}

void write_mask_png(const Mask& mask, const std::filesystem::path& path) {
  write_file(path, encode_mask_png(mask));
}

Mask read_mask_png(const std::filesystem::path& path) {
  return decode_mask_png(read_file(path));
}

}  // namespace amodal
