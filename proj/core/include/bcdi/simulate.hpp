#pragma once

#include <cstddef>
#include <cstdint>

#include "bcdi/grid.hpp"
#include "bcdi/phantom.hpp"
#include "bcdi/spectrum.hpp"

namespace bcdi {

/// |centered_fft(embedded)|².
RealGrid simulate_mono(const Phantom& p);

/// Broadband pattern built from the object side: each channel embeds the
/// object in its own padded grid, transforms, squares, crops to W×L and scales
/// by 1/(r̂x·r̂y). Shares geometry bookkeeping with the operator but none of
/// its transforms. Throws ConfigError if a padded extent exceeds max_extent.
RealGrid simulate_poly_independent(const Phantom& p, const Spectrum& spectrum,
                                   std::size_t max_extent = 8192);

enum class NrmseRegion { full, low_frequency };

/// Central block of `shape` recoverable under a spectrum reaching r_max:
/// floor(W/r_max) per axis, reduced by one where needed to keep the DC pixel.
Shape low_frequency_block(Shape shape, double r_max);

/// ‖x − ref‖ / ‖ref‖ over the whole grid or the low-frequency block.
double pattern_nrmse(const RealGrid& x, const RealGrid& ref, NrmseRegion region,
                     double r_max = 1.0);

struct NoiseModel {
  enum class Kind { none, poisson, gaussian };
  Kind kind = Kind::none;
  /// Poisson: expected photon count summed over the frame.
  double photons = 1e9;
  /// Gaussian: absolute standard deviation.
  double sigma = 0.0;
};

/// Deterministic for a given seed. Poisson counts are drawn at `photons` per
/// frame and divided back into the input's units, so the total is preserved
/// in expectation and values stay non-negative.
RealGrid add_noise(const RealGrid& b, const NoiseModel& model, std::uint64_t seed);

}  // namespace bcdi
