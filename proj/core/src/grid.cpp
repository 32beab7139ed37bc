#include "bcdi/grid.hpp"

#include <cmath>
#include <limits>

namespace bcdi {

std::string to_string(const Shape& shape) {
  return std::to_string(shape.width) + "x" + std::to_string(shape.height);
}

namespace {

void check_even_difference(Shape larger, Shape smaller, const char* op) {
  if (larger.width < smaller.width || larger.height < smaller.height) {
    throw ShapeError(std::string(op) + ": cannot map " + to_string(larger) + " onto " +
                     to_string(smaller));
  }
  if ((larger.width - smaller.width) % 2 != 0 || (larger.height - smaller.height) % 2 != 0) {
    throw ShapeError(std::string(op) + ": size difference between " + to_string(larger) +
                     " and " + to_string(smaller) + " must be even");
  }
}

}  // namespace

template <class T>
Grid2D<T> pad_center(const Grid2D<T>& g, Shape target) {
  check_even_difference(target, g.shape(), "pad_center");
  Grid2D<T> out(target, g.domain());
  const std::size_t ox = (target.width - g.width()) / 2;
  const std::size_t oy = (target.height - g.height()) / 2;
  for (std::size_t y = 0; y < g.height(); ++y) {
    std::copy_n(&g(0, y), g.width(), &out(ox, y + oy));
  }
  return out;
}

template <class T>
Grid2D<T> crop_center(const Grid2D<T>& g, Shape target) {
  check_even_difference(g.shape(), target, "crop_center");
  Grid2D<T> out(target, g.domain());
  const std::size_t ox = (g.width() - target.width) / 2;
  const std::size_t oy = (g.height() - target.height) / 2;
  for (std::size_t y = 0; y < target.height; ++y) {
    std::copy_n(&g(ox, y + oy), target.width, &out(0, y));
  }
  return out;
}

template RealGrid pad_center(const RealGrid&, Shape);
template ComplexGrid pad_center(const ComplexGrid&, Shape);
template RealGrid crop_center(const RealGrid&, Shape);
template ComplexGrid crop_center(const ComplexGrid&, Shape);

ComplexGrid to_complex(const RealGrid& g) {
  ComplexGrid out(g.shape(), g.domain());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i];
  return out;
}

RealGrid real_part(const ComplexGrid& g) {
  RealGrid out(g.shape(), g.domain());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i].real();
  return out;
}

RealGrid imag_part(const ComplexGrid& g) {
  RealGrid out(g.shape(), g.domain());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i].imag();
  return out;
}

RealGrid magnitude(const ComplexGrid& g) {
  RealGrid out(g.shape(), g.domain());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = std::abs(g[i]);
  return out;
}

double dot(const RealGrid& a, const RealGrid& b) {
  a.require_same_shape(b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const RealGrid& g) { return std::sqrt(dot(g, g)); }

double norm(const ComplexGrid& g) {
  double s = 0.0;
  for (const auto& v : g) s += std::norm(v);
  return std::sqrt(s);
}

double sum(const RealGrid& g) {
  double s = 0.0;
  for (double v : g) s += v;
  return s;
}

double max_value(const RealGrid& g) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : g) m = std::max(m, v);
  return m;
}

double min_value(const RealGrid& g) {
  double m = std::numeric_limits<double>::infinity();
  for (double v : g) m = std::min(m, v);
  return m;
}

bool all_finite(const RealGrid& g) {
  return std::all_of(g.begin(), g.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace bcdi
