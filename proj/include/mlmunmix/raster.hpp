#pragma once

#include "mlmunmix/core.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace mlmunmix::io {

/// Linear map between raster values and 8-bit gray levels:
/// gray = round(255 (v - min) / (max - min)), clamped; 0 everywhere when max == min.
struct RasterScale {
  double min = 0.0;
  double max = 1.0;
};

std::filesystem::path scale_path(const std::filesystem::path& png);

/// Writes an 8-bit grayscale PNG (row-major, pixel i at row i / width) and a
/// `<png>.scale` sidecar with the min/max of the mapping. Without a fixed
/// scale the image's own value range is used.
RasterScale write_gray_png(const std::filesystem::path& path, const VectorXd& values, Index height,
                           Index width, std::optional<RasterScale> fixed = {});

struct GrayImage {
  Index height = 0;
  Index width = 0;
  std::vector<std::uint8_t> pixels;
};

GrayImage read_gray_png(const std::filesystem::path& path);
RasterScale read_scale(const std::filesystem::path& png);

}  // namespace mlmunmix::io
