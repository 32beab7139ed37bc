#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bcdi/error.hpp"

namespace bcdi {

using complex = std::complex<double>;

/// Width (x, fast axis) by height (y, slow axis) in pixels.
struct Shape {
  std::size_t width = 0;
  std::size_t height = 0;

  std::size_t size() const noexcept { return width * height; }
  /// The DC pixel of the centered convention.
  std::size_t center_x() const noexcept { return width / 2; }
  std::size_t center_y() const noexcept { return height / 2; }

  friend bool operator==(const Shape&, const Shape&) = default;
};

std::string to_string(const Shape& shape);

/// What a grid holds. Values match the on-disk domain tag.
enum class Domain : std::uint8_t { pattern = 0, object = 1, autocorrelation = 2 };

/// Row-major W×L array with DC at (W/2, L/2) (integer division).
///
/// Element (x, y) lives at index y*W + x. Grids are plain values: copy to
/// share, move to hand over.
template <class T>
class Grid2D {
 public:
  using value_type = T;

  Grid2D() = default;

  explicit Grid2D(Shape shape, Domain domain = Domain::pattern)
      : shape_(checked(shape)), domain_(domain), data_(shape.size(), T{}) {}

  Grid2D(Shape shape, std::vector<T> data, Domain domain = Domain::pattern)
      : shape_(checked(shape)), domain_(domain), data_(std::move(data)) {
    if (data_.size() != shape_.size()) {
      throw ShapeError("grid data length " + std::to_string(data_.size()) +
                       " does not match shape " + to_string(shape_));
    }
  }

  static Grid2D filled(Shape shape, T value, Domain domain = Domain::pattern) {
    Grid2D g(shape, domain);
    std::fill(g.data_.begin(), g.data_.end(), value);
    return g;
  }

  const Shape& shape() const noexcept { return shape_; }
  std::size_t width() const noexcept { return shape_.width; }
  std::size_t height() const noexcept { return shape_.height; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  Domain domain() const noexcept { return domain_; }
  void set_domain(Domain domain) noexcept { domain_ = domain; }

  T& operator()(std::size_t x, std::size_t y) { return data_[y * shape_.width + x]; }
  const T& operator()(std::size_t x, std::size_t y) const { return data_[y * shape_.width + x]; }

  /// Access relative to the DC pixel.
  T& centered(std::ptrdiff_t dx, std::ptrdiff_t dy) {
    return (*this)(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(shape_.center_x()) + dx),
                   static_cast<std::size_t>(static_cast<std::ptrdiff_t>(shape_.center_y()) + dy));
  }
  const T& centered(std::ptrdiff_t dx, std::ptrdiff_t dy) const {
    return const_cast<Grid2D&>(*this).centered(dx, dy);
  }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  Grid2D& operator+=(const Grid2D& other) {
    require_same_shape(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
  }
  Grid2D& operator-=(const Grid2D& other) {
    require_same_shape(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
  }
  Grid2D& operator*=(double s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend Grid2D operator+(Grid2D a, const Grid2D& b) { return a += b; }
  friend Grid2D operator-(Grid2D a, const Grid2D& b) { return a -= b; }
  friend Grid2D operator*(Grid2D a, double s) { return a *= s; }
  friend Grid2D operator*(double s, Grid2D a) { return a *= s; }

  void require_same_shape(const Grid2D& other) const {
    if (other.shape_ != shape_) {
      throw ShapeError("shape mismatch: " + to_string(shape_) + " vs " + to_string(other.shape_));
    }
  }

  friend bool operator==(const Grid2D& a, const Grid2D& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  static Shape checked(Shape shape) {
    if (shape.width < 2 || shape.height < 2) {
      throw ShapeError("grid dimensions must be at least 2x2, got " + to_string(shape));
    }
    return shape;
  }

  Shape shape_{};
  Domain domain_ = Domain::pattern;
  std::vector<T> data_;
};

using RealGrid = Grid2D<double>;
using ComplexGrid = Grid2D<complex>;

/// Zero-pad symmetrically so the source DC pixel lands on the target DC pixel.
/// Both size differences must be even.
template <class T>
Grid2D<T> pad_center(const Grid2D<T>& g, Shape target);

/// Central sub-grid of `target` shape; DC pixel preserved. Even differences only.
template <class T>
Grid2D<T> crop_center(const Grid2D<T>& g, Shape target);

extern template RealGrid pad_center(const RealGrid&, Shape);
extern template ComplexGrid pad_center(const ComplexGrid&, Shape);
extern template RealGrid crop_center(const RealGrid&, Shape);
extern template ComplexGrid crop_center(const ComplexGrid&, Shape);

ComplexGrid to_complex(const RealGrid& g);
RealGrid real_part(const ComplexGrid& g);
RealGrid imag_part(const ComplexGrid& g);
RealGrid magnitude(const ComplexGrid& g);

/// Euclidean inner product <a, b>.
double dot(const RealGrid& a, const RealGrid& b);
double norm(const RealGrid& g);
double norm(const ComplexGrid& g);
double sum(const RealGrid& g);
double max_value(const RealGrid& g);
double min_value(const RealGrid& g);
bool all_finite(const RealGrid& g);

}  // namespace bcdi
