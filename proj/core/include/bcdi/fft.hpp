#pragma once

#include "bcdi/grid.hpp"

namespace bcdi {

/// Forward DFT with DC centered on both sides, unnormalized:
///   out(u) = sum_k in(k) exp(-2 pi i (u-c)(k-c) / N)   per axis, c = N/2.
ComplexGrid centered_fft(const ComplexGrid& g);
ComplexGrid centered_fft(const RealGrid& g);

/// Exact inverse of centered_fft; carries the 1/(W*L) factor.
ComplexGrid centered_ifft(const ComplexGrid& g);
ComplexGrid centered_ifft(const RealGrid& g);

enum class FftDirection { forward, inverse };

/// CROP_{W×L}(DFT_B(PAD_B(g))) without materializing the padded grid.
///
/// `padded` must be at least g's shape with even differences. The transform
/// is unnormalized in both directions (the inverse uses +i and no 1/N); the
/// caller applies whatever scale it needs. Runs as two passes of 1-D
/// transforms over only the rows and columns that carry data.
ComplexGrid padded_dft_cropped(const ComplexGrid& g, Shape padded, FftDirection direction);

/// Drops every cached FFTW plan. Only needed by tests and long-lived hosts.
void clear_fft_plan_cache();

}  // namespace bcdi
