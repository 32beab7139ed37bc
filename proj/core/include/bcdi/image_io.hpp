#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "bcdi/grid.hpp"

namespace bcdi {

/// Binary PGM (P5), 8 or 16 bit. Values are divided by maxval.
RealGrid read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const RealGrid& g);

enum class RenderScale { linear, log };

struct RenderOptions {
  RenderScale scale = RenderScale::log;
  /// Decades of dynamic range for the log scale: log(1 + v/vmax·10^k).
  double log_decades = 4.0;
  /// Applied as v^(1/gamma) after scaling to [0, 1].
  double gamma = 1.0;
  /// Central window to keep; nullopt keeps the whole grid.
  std::optional<Shape> crop;
};

/// Grid values mapped to [0, 65535] under the options. Row-major, same shape
/// as the (cropped) grid.
std::vector<std::uint16_t> render_levels(const RealGrid& g, const RenderOptions& opts);

/// 16-bit grayscale PNG bytes; identical input and options give identical bytes.
std::vector<std::uint8_t> encode_png(const RealGrid& g, const RenderOptions& opts);
void write_png(const std::filesystem::path& path, const RealGrid& g, const RenderOptions& opts);

}  // namespace bcdi
