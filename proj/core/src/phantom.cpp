#include "bcdi/phantom.hpp"

#include <array>
#include <cmath>
#include <filesystem>
#include <string_view>

#include "bcdi/image_io.hpp"
#include "bcdi/random.hpp"

namespace bcdi {

std::string to_string(PhantomKind kind) {
  switch (kind) {
    case PhantomKind::file: return "file";
    case PhantomKind::disk: return "disk";
    case PhantomKind::digit: return "digit";
    case PhantomKind::blobs: return "blobs";
    case PhantomKind::testcard: return "testcard";
  }
  return "unknown";
}

double Phantom::oversampling_x() const {
  return static_cast<double>(embedded.width()) / static_cast<double>(object.width());
}
double Phantom::oversampling_y() const {
  return static_cast<double>(embedded.height()) / static_cast<double>(object.height());
}
double Phantom::oversampling() const { return std::min(oversampling_x(), oversampling_y()); }

namespace {

// 5×7 glyphs, one row per byte, bit 4 is the leftmost column.
constexpr std::array<std::array<std::uint8_t, 7>, 10> kGlyphs{{
    {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E},
    {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E},
    {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F},
    {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E},
    {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02},
    {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E},
    {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E},
    {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08},
    {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E},
    {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C},
}};

void normalize_peak(RealGrid& g) {
  const double peak = max_value(g);
  if (!(peak > 0.0)) throw ConfigError("phantom object has no positive values");
  for (auto& v : g) v = std::max(v, 0.0) / peak;
}

// Separable blur with a truncated Gaussian and zero boundary, so the object
// never leaks past its own frame.
RealGrid blur_zero_boundary(const RealGrid& g, double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i) k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
  const auto w = static_cast<int>(g.width());
  const auto h = static_cast<int>(g.height());
  RealGrid tmp(g.shape(), g.domain());
  RealGrid out(g.shape(), g.domain());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int xx = x + i;
        if (xx >= 0 && xx < w) s += k[i + radius] * g(xx, y);
      }
      tmp(x, y) = s;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        const int yy = y + i;
        if (yy >= 0 && yy < h) s += k[i + radius] * tmp(x, yy);
      }
      out(x, y) = s;
    }
  }
  return out;
}

void fill_ellipse(RealGrid& g, double cx, double cy, double rx, double ry, double value) {
  for (std::size_t y = 0; y < g.height(); ++y) {
    for (std::size_t x = 0; x < g.width(); ++x) {
      const double dx = (static_cast<double>(x) - cx) / rx;
      const double dy = (static_cast<double>(y) - cy) / ry;
      if (dx * dx + dy * dy <= 1.0) g(x, y) = value;
    }
  }
}

std::pair<std::string_view, std::string_view> split_spec(std::string_view s) {
  const auto colon = s.find(':');
  if (colon == std::string_view::npos) return {s, {}};
  return {s.substr(0, colon), s.substr(colon + 1)};
}

double parse_number(std::string_view text, double fallback, const std::string& what) {
  if (text.empty()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(text), &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad parameter '" + std::string(text) + "' for builtin phantom " + what);
  }
}

}  // namespace

RealGrid disk_object(Shape shape, double radius) {
  if (!(radius > 0.0)) throw ConfigError("disk radius must be > 0");
  RealGrid g(shape, Domain::object);
  const double cx = static_cast<double>(shape.center_x());
  const double cy = static_cast<double>(shape.center_y());
  for (std::size_t y = 0; y < shape.height; ++y) {
    for (std::size_t x = 0; x < shape.width; ++x) {
      const double dx = static_cast<double>(x) - cx;
      const double dy = static_cast<double>(y) - cy;
      if (dx * dx + dy * dy <= radius * radius) g(x, y) = 1.0;
    }
  }
  return g;
}

RealGrid digit_object(Shape shape, int digit) {
  if (digit < 0 || digit > 9) throw ConfigError("digit must be 0..9, got " + std::to_string(digit));
  const auto& glyph = kGlyphs[static_cast<std::size_t>(digit)];
  RealGrid g(shape, Domain::object);
  // Glyph box covers 60% of the width and 80% of the height, centered.
  const double bw = 0.6 * static_cast<double>(shape.width);
  const double bh = 0.8 * static_cast<double>(shape.height);
  const double x0 = (static_cast<double>(shape.width) - bw) / 2.0;
  const double y0 = (static_cast<double>(shape.height) - bh) / 2.0;
  constexpr int kSub = 4;
  for (std::size_t y = 0; y < shape.height; ++y) {
    for (std::size_t x = 0; x < shape.width; ++x) {
      int hits = 0;
      for (int sy = 0; sy < kSub; ++sy) {
        for (int sx = 0; sx < kSub; ++sx) {
          const double u = (static_cast<double>(x) + (sx + 0.5) / kSub - x0) / bw * 5.0;
          const double v = (static_cast<double>(y) + (sy + 0.5) / kSub - y0) / bh * 7.0;
          if (u < 0.0 || v < 0.0 || u >= 5.0 || v >= 7.0) continue;
          const int col = static_cast<int>(u);
          const int row = static_cast<int>(v);
          hits += (glyph[row] >> (4 - col)) & 1;
        }
      }
      g(x, y) = static_cast<double>(hits) / (kSub * kSub);
    }
  }
  const double sigma = std::max(0.5, 0.015 * static_cast<double>(std::min(shape.width, shape.height)));
  g = blur_zero_boundary(g, sigma);
  normalize_peak(g);
  return g;
}

RealGrid blobs_object(Shape shape, int count, std::uint64_t seed) {
  if (count < 1) throw ConfigError("blob count must be >= 1");
  Rng rng(seed);
  RealGrid g(shape, Domain::object);
  const double w = static_cast<double>(shape.width);
  const double h = static_cast<double>(shape.height);
  const double scale = std::min(w, h);
  for (int b = 0; b < count; ++b) {
    const double cx = w / 2.0 + (uniform01(rng) - 0.5) * 0.5 * w;
    const double cy = h / 2.0 + (uniform01(rng) - 0.5) * 0.5 * h;
    const double s = scale * (0.04 + 0.06 * uniform01(rng));
    const double a = 0.3 + 0.7 * uniform01(rng);
    for (std::size_t y = 0; y < shape.height; ++y) {
      for (std::size_t x = 0; x < shape.width; ++x) {
        const double dx = static_cast<double>(x) - cx;
        const double dy = static_cast<double>(y) - cy;
        const double r2 = (dx * dx + dy * dy) / (s * s);
        if (r2 < 9.0) g(x, y) += a * std::exp(-0.5 * r2);
      }
    }
  }
  normalize_peak(g);
  return g;
}

RealGrid testcard_object(Shape shape) {
  RealGrid g(shape, Domain::object);
  const double w = static_cast<double>(shape.width);
  const double h = static_cast<double>(shape.height);
  const double cx = w / 2.0;
  const double cy = h / 2.0;
  fill_ellipse(g, cx, cy - 0.05 * h, 0.3 * w, 0.36 * h, 0.6);
  fill_ellipse(g, cx - 0.11 * w, cy - 0.14 * h, 0.05 * w, 0.035 * h, 1.0);
  fill_ellipse(g, cx + 0.11 * w, cy - 0.14 * h, 0.05 * w, 0.035 * h, 1.0);
  fill_ellipse(g, cx, cy + 0.14 * h, 0.12 * w, 0.03 * h, 0.2);
  // Gauge of bars with rising intensity below the head.
  const auto y_lo = static_cast<std::size_t>(0.82 * h);
  const auto y_hi = static_cast<std::size_t>(0.9 * h);
  for (int bar = 0; bar < 5; ++bar) {
    const auto x_lo = static_cast<std::size_t>((0.22 + 0.12 * bar) * w);
    const auto x_hi = static_cast<std::size_t>((0.28 + 0.12 * bar) * w);
    for (std::size_t y = y_lo; y < y_hi; ++y) {
      for (std::size_t x = x_lo; x < x_hi; ++x) g(x, y) = 0.2 * (bar + 1);
    }
  }
  normalize_peak(g);
  return g;
}

Phantom make_phantom(RealGrid object, Shape embed, PhantomKind kind, std::string source,
                     bool allow_undersampled) {
  const Shape os = object.shape();
  if (embed.width < os.width || embed.height < os.height) {
    throw ShapeError("embed shape " + to_string(embed) + " is smaller than object " + to_string(os));
  }
  if (!allow_undersampled && (embed.width < 2 * os.width || embed.height < 2 * os.height)) {
    throw ShapeError("oversampling below 2: object " + to_string(os) + " in " + to_string(embed) +
                     "; the autocorrelation would not fit the detector grid");
  }
  normalize_peak(object);
  object.set_domain(Domain::object);
  Phantom p;
  p.embedded = pad_center(object, embed);
  p.embedded.set_domain(Domain::object);
  p.object = std::move(object);
  p.kind = kind;
  p.source = std::move(source);
  return p;
}

Phantom load_phantom(const std::string& source, Shape embed, const PhantomOptions& opts) {
  Shape os = opts.object_shape;
  if (os.width == 0 || os.height == 0) os = {embed.width / 2, embed.height / 2};
  const auto [name, param] = split_spec(source);
  const bool under = opts.allow_undersampled;
  if (name == "disk") {
    const double r = parse_number(param, 0.3 * static_cast<double>(std::min(os.width, os.height)), source);
    return make_phantom(disk_object(os, r), embed, PhantomKind::disk, source, under);
  }
  if (name == "digit") {
    const double d = parse_number(param, 3.0, source);
    if (d != std::floor(d)) throw ConfigError("digit phantom needs an integer, got " + source);
    return make_phantom(digit_object(os, static_cast<int>(d)), embed, PhantomKind::digit, source,
                        under);
  }
  if (name == "blobs") {
    const double n = parse_number(param, 6.0, source);
    return make_phantom(blobs_object(os, static_cast<int>(n), opts.seed), embed, PhantomKind::blobs,
                        source, under);
  }
  if (name == "testcard") {
    return make_phantom(testcard_object(os), embed, PhantomKind::testcard, source, under);
  }
  if (!std::filesystem::exists(source)) {
    throw IoError("phantom source '" + source + "' is neither a builtin nor an existing file");
  }
  return make_phantom(read_pgm(source), embed, PhantomKind::file, source, under);
}

}  // namespace bcdi
