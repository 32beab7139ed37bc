#include "bcdi/pattern_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace bcdi {

namespace {

constexpr char kMagic[4] = {'B', 'C', 'D', 'I'};

template <class U>
void put_le(std::vector<std::uint8_t>& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <class U>
U get_le(const std::uint8_t* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<U>(p[i]) << (8 * i));
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_pattern(const RealGrid& g, std::uint16_t flags) {
  std::vector<std::uint8_t> out;
  out.reserve(pattern_file::kHeaderSize + 8 * g.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_le<std::uint16_t>(out, pattern_file::kVersion);
  put_le<std::uint16_t>(out, flags);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.width()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.height()));
  out.push_back(static_cast<std::uint8_t>(g.domain()));
  out.resize(pattern_file::kHeaderSize, 0);
  for (double v : g) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

RealGrid decode_pattern(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < pattern_file::kHeaderSize) {
    throw IoError("pattern file truncated: " + std::to_string(bytes.size()) + " bytes, header needs " +
                  std::to_string(pattern_file::kHeaderSize));
  }
  const std::uint8_t* p = bytes.data();
  if (std::memcmp(p, kMagic, 4) != 0) throw IoError("not a BCDI pattern file (bad magic)");
  const auto version = get_le<std::uint16_t>(p + 4);
  if (version != pattern_file::kVersion) {
    throw IoError("unsupported pattern file version " + std::to_string(version) + " (expected " +
                  std::to_string(pattern_file::kVersion) + ")");
  }
  const std::size_t w = get_le<std::uint32_t>(p + 8);
  const std::size_t h = get_le<std::uint32_t>(p + 12);
  const std::uint8_t domain = p[16];
  if (domain > 2) throw IoError("unknown domain tag " + std::to_string(domain));
  const std::size_t expected = pattern_file::kHeaderSize + 8 * w * h;
  if (bytes.size() != expected) {
    throw IoError("pattern payload is " + std::to_string(bytes.size() - pattern_file::kHeaderSize) +
                  " bytes, expected " + std::to_string(8 * w * h) + " for " + std::to_string(w) +
                  "x" + std::to_string(h));
  }
  if (w < 2 || h < 2) throw IoError("pattern file dimensions below 2x2");
  std::vector<double> values(w * h);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::bit_cast<double>(get_le<std::uint64_t>(p + pattern_file::kHeaderSize + 8 * i));
  }
  return RealGrid(Shape{w, h}, std::move(values), static_cast<Domain>(domain));
}

void write_pattern(const std::filesystem::path& path, const RealGrid& g) {
  const auto bytes = encode_pattern(g);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("write failed for " + path.string());
}

RealGrid read_pattern(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  try {
    return decode_pattern(bytes);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace bcdi
