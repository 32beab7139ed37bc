#include "bcdi/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

namespace bcdi {

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string pgm_token(const std::vector<std::uint8_t>& buf, std::size_t& pos) {
  while (pos < buf.size()) {
    if (buf[pos] == '#') {
      while (pos < buf.size() && buf[pos] != '\n') ++pos;
    } else if (std::isspace(buf[pos]) != 0) {
      ++pos;
    } else {
      break;
    }
  }
  std::string tok;
  while (pos < buf.size() && std::isspace(buf[pos]) == 0) tok.push_back(static_cast<char>(buf[pos++]));
  return tok;
}

std::size_t pgm_number(const std::vector<std::uint8_t>& buf, std::size_t& pos, const std::string& file) {
  const std::string tok = pgm_token(buf, pos);
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos) {
    throw IoError(file + ": malformed PGM header near '" + tok + "'");
  }
  return std::stoul(tok);
}

}  // namespace

RealGrid read_pgm(const std::filesystem::path& path) {
  const std::string file = path.string();
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + file);
  const std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  if (pgm_token(buf, pos) != "P5") throw IoError(file + ": not a binary PGM (P5) image");
  const std::size_t w = pgm_number(buf, pos, file);
  const std::size_t h = pgm_number(buf, pos, file);
  const std::size_t maxval = pgm_number(buf, pos, file);
  if (maxval == 0 || maxval > 65535) throw IoError(file + ": PGM maxval out of range");
  ++pos;  // single whitespace before the raster
  const std::size_t bpp = maxval < 256 ? 1 : 2;
  if (buf.size() < pos + w * h * bpp) throw IoError(file + ": PGM raster truncated");
  if (w < 2 || h < 2) throw IoError(file + ": image smaller than 2x2");

  RealGrid g(Shape{w, h}, Domain::object);
  for (std::size_t i = 0; i < w * h; ++i) {
    const std::size_t v = bpp == 1 ? buf[pos + i]
                                   : (static_cast<std::size_t>(buf[pos + 2 * i]) << 8) | buf[pos + 2 * i + 1];
    g[i] = static_cast<double>(v) / static_cast<double>(maxval);
  }
  return g;
}

void write_pgm(const std::filesystem::path& path, const RealGrid& g) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << "P5\n" << g.width() << ' ' << g.height() << "\n65535\n";
  const double peak = max_value(g);
  for (double v : g) {
    const double t = peak > 0.0 ? std::clamp(v / peak, 0.0, 1.0) : 0.0;
    const auto q = static_cast<std::uint16_t>(std::lround(t * 65535.0));
    os.put(static_cast<char>(q >> 8));
    os.put(static_cast<char>(q & 0xFF));
  }
  if (!os) throw IoError("write failed for " + path.string());
}

std::vector<std::uint16_t> render_levels(const RealGrid& g, const RenderOptions& opts) {
  if (!(opts.gamma > 0.0)) throw ConfigError("render gamma must be > 0");
  if (!(opts.log_decades > 0.0)) throw ConfigError("render log decades must be > 0");
  RealGrid view = g;
  if (opts.crop) {
    const Shape c = *opts.crop;
    if (c.width > g.width() || c.height > g.height() || c.width < 2 || c.height < 2) {
      throw ConfigError("render crop " + to_string(c) + " does not fit " + to_string(g.shape()));
    }
    view = RealGrid(c, g.domain());
    const std::size_t x0 = g.shape().center_x() - c.center_x();
    const std::size_t y0 = g.shape().center_y() - c.center_y();
    for (std::size_t y = 0; y < c.height; ++y) {
      for (std::size_t x = 0; x < c.width; ++x) view(x, y) = g(x0 + x, y0 + y);
    }
  }

  const double peak = max_value(view);
  const double gain = std::pow(10.0, opts.log_decades);
  const double log_norm = std::log1p(gain);
  std::vector<std::uint16_t> out(view.size(), 0);
  if (!(peak > 0.0)) return out;
  for (std::size_t i = 0; i < view.size(); ++i) {
    const double v = std::max(view[i], 0.0) / peak;
    double t = opts.scale == RenderScale::log ? std::log1p(v * gain) / log_norm : v;
    t = std::pow(std::clamp(t, 0.0, 1.0), 1.0 / opts.gamma);
    out[i] = static_cast<std::uint16_t>(std::lround(t * 65535.0));
  }
  return out;
}

namespace {

void png_append(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + len);
}

void png_flush_noop(png_structp) {}

}  // namespace

std::vector<std::uint8_t> encode_png(const RealGrid& g, const RenderOptions& opts) {
  const std::vector<std::uint16_t> levels = render_levels(g, opts);
  const std::size_t w = opts.crop ? opts.crop->width : g.width();
  const std::size_t h = opts.crop ? opts.crop->height : g.height();

  std::vector<std::uint8_t> rows(levels.size() * 2);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    rows[2 * i] = static_cast<std::uint8_t>(levels[i] >> 8);
    rows[2 * i + 1] = static_cast<std::uint8_t>(levels[i] & 0xFF);
  }

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw IoError("libpng: cannot create write struct");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng: cannot create info struct");
  }
  std::vector<std::uint8_t> out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng: encoding failed");
  }
  png_set_write_fn(png, &out, png_append, png_flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 16,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (std::size_t y = 0; y < h; ++y) png_write_row(png, rows.data() + y * w * 2);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

void write_png(const std::filesystem::path& path, const RealGrid& g, const RenderOptions& opts) {
  const auto bytes = encode_png(g, opts);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("write failed for " + path.string());
}

}  // namespace bcdi
