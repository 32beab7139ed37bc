#pragma once

#include <cstddef>
#include <vector>

#include "bcdi/grid.hpp"

namespace bcdi {

/// One wavelength channel: maps a W×L pattern at the reference wavelength to
/// the pattern at ratio r = λ/λ₀ ≥ 1, seen through the same W×L detector.
///
/// The autocorrelation is zero-padded by (pad_x, pad_y) per side, so the
/// padded extent is (W + 2·pad_x) × (L + 2·pad_y) and the ratio actually
/// realized is padded/base, which may differ from the request by ≤ 1/W.
struct TransferGeometry {
  Shape base;
  double requested_ratio = 1.0;
  std::size_t pad_x = 0;
  std::size_t pad_y = 0;
  Shape padded;

  double realized_ratio_x() const noexcept {
    return static_cast<double>(padded.width) / static_cast<double>(base.width);
  }
  double realized_ratio_y() const noexcept {
    return static_cast<double>(padded.height) / static_cast<double>(base.height);
  }
  /// Realized ratio along x; the canonical value stored with spectrum weights.
  double realized_ratio() const noexcept { return realized_ratio_x(); }

  /// W·L / (B_x·B_y): the Fraunhofer 1/λ² intensity prefactor. Applied by the
  /// forward operator so total flux is conserved across channels.
  double flux_scale() const noexcept {
    return static_cast<double>(base.size()) / static_cast<double>(padded.size());
  }

  bool is_identity() const noexcept { return pad_x == 0 && pad_y == 0; }

  friend bool operator==(const TransferGeometry&, const TransferGeometry&) = default;
};

/// pad = round((r-1)·W/2) per axis. Throws ConfigError for r < 1: a longer
/// wavelength can be derived from a shorter one, never the reverse.
TransferGeometry geometry_for_ratio(double ratio, Shape shape);

/// Magnitude of what was discarded when an operator took its real part.
struct TransferStats {
  double real_norm = 0.0;
  double discarded_imag_norm = 0.0;
};

/// Â(x) = (WL/B²)·Re CROP{FFT_B{PAD[IFFT_W(x)]}}. Exact identity when r = 1.
RealGrid apply_transfer(const RealGrid& x, const TransferGeometry& geom,
                        TransferStats* stats = nullptr);

/// Âᵀ(z) = Re FFT_W{CROP{IFFT_B[PAD(z)]}}, the exact transpose of apply_transfer.
RealGrid apply_adjoint(const RealGrid& z, const TransferGeometry& geom,
                       TransferStats* stats = nullptr);

/// Forward operator starting from an already computed autocorrelation
/// IFFT_W(x), returning the complex result before the real part is taken.
/// Lets a multi-channel operator share one W-sized transform.
ComplexGrid transfer_from_autocorrelation(const ComplexGrid& autocorrelation,
                                          const TransferGeometry& geom);

/// CROP{IFFT_B[PAD(z)]}: the adjoint up to its final W-sized FFT, which is
/// linear and can be applied once to a sum of channels.
ComplexGrid adjoint_to_autocorrelation(const RealGrid& z, const TransferGeometry& geom);

/// The transferred pattern on the full padded B_x×B_y grid, before the
/// detector crop (same flux scaling as apply_transfer).
RealGrid transfer_padded(const RealGrid& x, const TransferGeometry& geom);

/// Row-major dense matrix. Grids flatten as index = y·W + x.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// Summation range of the exponential kernel.
///   reduced: frequencies inside the base W×L window, which is what the
///            zero-padding operator computes.
///   full:    the whole padded range, i.e. a periodically extended
///            autocorrelation. Kept to quantify the difference.
enum class DenseRange { reduced, full };

/// Explicit WL×WL matrix of the transfer operator, by direct summation of
/// the exponential kernel (no FFT involved). W·L ≤ 4096.
DenseMatrix dense_matrix(const TransferGeometry& geom, DenseRange range = DenseRange::reduced);

/// Bilinear magnification by r about DC with zero fill, resampled onto
/// `output` (defaults to the input shape), with the same 1/r² flux factor as
/// apply_transfer. The sparse baseline the FFT operator is compared against.
RealGrid interpolation_transfer(const RealGrid& x, double ratio);
RealGrid interpolation_transfer(const RealGrid& x, double ratio, Shape output);

/// Fraction of |IFFT(pattern)|² lying outside the central `region`.
double autocorrelation_leakage(const RealGrid& pattern, Shape region);

}  // namespace bcdi
