#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "bcdi/grid.hpp"

namespace bcdi {

/// On-disk grid: 24-byte header then W·L little-endian float64 values.
///
///   0  "BCDI"        4  u16 version     6  u16 flags
///   8  u32 width    12  u32 height     16  u8 domain    17  7 reserved bytes
namespace pattern_file {
inline constexpr std::uint16_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 24;
}  // namespace pattern_file

std::vector<std::uint8_t> encode_pattern(const RealGrid& g, std::uint16_t flags = 0);
/// Throws IoError on bad magic, version, domain tag or payload length.
RealGrid decode_pattern(std::span<const std::uint8_t> bytes);

void write_pattern(const std::filesystem::path& path, const RealGrid& g);
RealGrid read_pattern(const std::filesystem::path& path);

}  // namespace bcdi
