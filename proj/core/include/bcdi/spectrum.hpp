#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bcdi/grid.hpp"
#include "bcdi/transfer.hpp"

namespace bcdi {

/// Wavelength ratio λ/λ₀ and relative intensity.
struct SpectralChannel {
  double ratio = 1.0;
  double weight = 0.0;

  friend bool operator==(const SpectralChannel&, const SpectralChannel&) = default;
};

class PolychromaticOperator;

/// Ordered set of channels anchored at the reference (shortest) wavelength.
///
/// Channels are sorted by ratio on construction and rescaled so the smallest
/// ratio is exactly 1. Weights are kept as given: no implicit normalization.
class Spectrum {
 public:
  explicit Spectrum(std::vector<SpectralChannel> channels);

  const std::vector<SpectralChannel>& channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return channels_.size(); }
  double total_weight() const noexcept;
  double max_ratio() const noexcept { return channels_.back().ratio; }

  Spectrum scaled(double factor) const;
  /// Weights rescaled to sum to one.
  Spectrum normalized_to_unit_sum() const;

  /// Channel geometries for a W×L detector. Channels whose rounded geometry
  /// coincides are merged by summing their weights.
  PolychromaticOperator bind(Shape shape) const;

 private:
  std::vector<SpectralChannel> channels_;
};

/// Harmonic orders q of a common fundamental: ratio = q_max / q, weight i
/// belongs to orders[i].
Spectrum harmonics_spectrum(std::span<const int> orders, std::span<const double> weights);

/// n_points wavelengths evenly spanning λ_c·(1 ± Δ/2), Gaussian profile with
/// FWHM = Δ·λ_c, peak-normalized to 1, ratios relative to the shortest.
Spectrum continuous_spectrum(double center, double fractional_bandwidth, std::size_t n_points);

/// A channel after binding to a detector shape.
struct BoundChannel {
  TransferGeometry geometry;
  double weight = 0.0;
  /// Spectrum channels that collapsed onto this geometry.
  std::size_t merged = 1;
};

/// b = Σ aᵢ Âᵢ(x) and its transpose, matrix-free.
class PolychromaticOperator {
 public:
  PolychromaticOperator(Shape shape, std::vector<BoundChannel> channels);

  const Shape& shape() const noexcept { return shape_; }
  const std::vector<BoundChannel>& channels() const noexcept { return channels_; }
  double max_realized_ratio() const noexcept;

  RealGrid apply(const RealGrid& x, TransferStats* stats = nullptr) const;
  RealGrid apply_adjoint(const RealGrid& z, TransferStats* stats = nullptr) const;

 private:
  void require_shape(const RealGrid& g) const;

  Shape shape_;
  std::vector<BoundChannel> channels_;
};

RealGrid apply_poly(const RealGrid& x, const PolychromaticOperator& op);
RealGrid apply_poly_adjoint(const RealGrid& z, const PolychromaticOperator& op);

}  // namespace bcdi
