#include "mlmunmix/raster.hpp"

#include "mlmunmix/io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace mlmunmix::io {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

std::filesystem::path scale_path(const std::filesystem::path& png) {
  return std::filesystem::path(png.string() + ".scale");
}

RasterScale write_gray_png(const std::filesystem::path& path, const VectorXd& values, Index height,
                           Index width, std::optional<RasterScale> fixed) {
  if (height * width != values.size()) throw DimensionError("write_gray_png: grid does not match value count");
  RasterScale scale = fixed.value_or(RasterScale{values.minCoeff(), values.maxCoeff()});
  const double span = scale.max - scale.min;

  std::vector<png_byte> pixels(static_cast<std::size_t>(values.size()));
  for (Index i = 0; i < values.size(); ++i) {
    double g = span > 0.0 ? 255.0 * (values(i) - scale.min) / span : 0.0;
    pixels[static_cast<std::size_t>(i)] = static_cast<png_byte>(std::lround(std::clamp(g, 0.0, 255.0)));
  }

  File fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot open " + path.string() + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed writing PNG " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (Index r = 0; r < height; ++r) png_write_row(png, pixels.data() + r * width);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);

  write_key_value(scale_path(path), {{"min", format_double(scale.min)}, {"max", format_double(scale.max)}});
  return scale;
}

GrayImage read_gray_png(const std::filesystem::path& path) {
  File fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path.string() + " for reading");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed reading PNG " + path.string());
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  if (png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY || png_get_bit_depth(png, info) != 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(path.string() + ": not an 8-bit grayscale PNG");
  }
  GrayImage img;
  img.height = png_get_image_height(png, info);
  img.width = png_get_image_width(png, info);
  img.pixels.resize(static_cast<std::size_t>(img.height * img.width));
  for (Index r = 0; r < img.height; ++r) png_read_row(png, img.pixels.data() + r * img.width, nullptr);
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

RasterScale read_scale(const std::filesystem::path& png) {
  const auto kv = read_key_value(scale_path(png));
  auto get = [&](const char* key) {
    auto v = lookup(kv, key);
    auto d = v ? parse_double(*v) : std::nullopt;
    if (!d) throw IoError(scale_path(png).string() + ": missing or bad '" + key + "'");
    return *d;
  };
  return {get("min"), get("max")};
}

}  // namespace mlmunmix::io
