#include "bcdi/transfer.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "bcdi/fft.hpp"

namespace bcdi {
namespace {

std::size_t pad_for(double ratio, std::size_t extent) {
  return static_cast<std::size_t>(std::llround((ratio - 1.0) * static_cast<double>(extent) / 2.0));
}

void require_base(const RealGrid& g, const TransferGeometry& geom) {
  if (g.shape() != geom.base) {
    throw ShapeError("grid " + to_string(g.shape()) + " does not match transfer geometry base " +
                     to_string(geom.base));
  }
}

RealGrid take_real(const ComplexGrid& c, TransferStats* stats) {
  RealGrid out = real_part(c);
  if (stats != nullptr) {
    stats->real_norm = norm(out);
    stats->discarded_imag_norm = norm(imag_part(c));
  }
  return out;
}

// Kernel of one axis: K(m, n) = sum_k exp(-2πi k (x_m/B - x_n/W)), coordinates
// relative to DC, k over the window [-c, n_terms - c).
std::vector<complex> axis_kernel(std::size_t w, std::size_t b, std::size_t n_terms) {
  const auto cw = static_cast<double>(w / 2);
  const auto ck = static_cast<double>(n_terms / 2);
  std::vector<complex> k(w * w);
  for (std::size_t m = 0; m < w; ++m) {
    const double xm = static_cast<double>(m) - cw;
    for (std::size_t n = 0; n < w; ++n) {
      const double xn = static_cast<double>(n) - cw;
      const double phase = xm / static_cast<double>(b) - xn / static_cast<double>(w);
      complex acc = 0.0;
      for (std::size_t t = 0; t < n_terms; ++t) {
        const double kk = static_cast<double>(t) - ck;
        acc += std::polar(1.0, -2.0 * std::numbers::pi * kk * phase);
      }
      k[m * w + n] = acc;
    }
  }
  return k;
}

}  // namespace

TransferGeometry geometry_for_ratio(double ratio, Shape shape) {
  if (!(ratio >= 1.0) || !std::isfinite(ratio)) {
    throw ConfigError("wavelength ratio must be >= 1 (derive longer wavelengths from shorter), got " +
                      std::to_string(ratio));
  }
  TransferGeometry g;
  g.base = Shape{shape.width, shape.height};
  g.requested_ratio = ratio;
  g.pad_x = pad_for(ratio, shape.width);
  g.pad_y = pad_for(ratio, shape.height);
  g.padded = Shape{shape.width + 2 * g.pad_x, shape.height + 2 * g.pad_y};
  return g;
}

ComplexGrid transfer_from_autocorrelation(const ComplexGrid& autocorrelation,
                                          const TransferGeometry& geom) {
  if (autocorrelation.shape() != geom.base) {
    throw ShapeError("autocorrelation " + to_string(autocorrelation.shape()) +
                     " does not match geometry base " + to_string(geom.base));
  }
  ComplexGrid y = padded_dft_cropped(autocorrelation, geom.padded, FftDirection::forward);
  y *= geom.flux_scale();
  y.set_domain(Domain::pattern);
  return y;
}

ComplexGrid adjoint_to_autocorrelation(const RealGrid& z, const TransferGeometry& geom) {
  require_base(z, geom);
  ComplexGrid t = padded_dft_cropped(to_complex(z), geom.padded, FftDirection::inverse);
  t *= 1.0 / static_cast<double>(geom.padded.size());
  t.set_domain(Domain::autocorrelation);
  return t;
}

RealGrid apply_transfer(const RealGrid& x, const TransferGeometry& geom, TransferStats* stats) {
  require_base(x, geom);
  if (geom.is_identity()) {
    if (stats != nullptr) *stats = {norm(x), 0.0};
    return x;
  }
  return take_real(transfer_from_autocorrelation(centered_ifft(x), geom), stats);
}

RealGrid apply_adjoint(const RealGrid& z, const TransferGeometry& geom, TransferStats* stats) {
  require_base(z, geom);
  if (geom.is_identity()) {
    if (stats != nullptr) *stats = {norm(z), 0.0};
    return z;
  }
  return take_real(centered_fft(adjoint_to_autocorrelation(z, geom)), stats);
}

RealGrid transfer_padded(const RealGrid& x, const TransferGeometry& geom) {
  require_base(x, geom);
  const ComplexGrid padded = pad_center(centered_ifft(x), geom.padded);
  RealGrid out = real_part(centered_fft(padded));
  out *= geom.flux_scale();
  return out;
}

DenseMatrix dense_matrix(const TransferGeometry& geom, DenseRange range) {
  const std::size_t w = geom.base.width;
  const std::size_t l = geom.base.height;
  const std::size_t n = w * l;
  if (n > 4096) {
    throw ShapeError("dense_matrix is an oracle for small grids (W*L <= 4096), got " +
                     to_string(geom.base));
  }
  const bool full = range == DenseRange::full;
  const auto kx = axis_kernel(w, geom.padded.width, full ? geom.padded.width : w);
  const auto ky = axis_kernel(l, geom.padded.height, full ? geom.padded.height : l);
  const double scale = geom.flux_scale() / static_cast<double>(n);

  DenseMatrix a{n, n, std::vector<double>(n * n)};
  for (std::size_t my = 0; my < l; ++my) {
    for (std::size_t mx = 0; mx < w; ++mx) {
      const std::size_t row = my * w + mx;
      for (std::size_t ny = 0; ny < l; ++ny) {
        for (std::size_t nx = 0; nx < w; ++nx) {
          const complex v = kx[mx * w + nx] * ky[my * l + ny];
          a(row, ny * w + nx) = scale * v.real();
        }
      }
    }
  }
  return a;
}

RealGrid interpolation_transfer(const RealGrid& x, double ratio) {
  return interpolation_transfer(x, ratio, x.shape());
}

RealGrid interpolation_transfer(const RealGrid& x, double ratio, Shape output) {
  if (!(ratio >= 1.0) || !std::isfinite(ratio)) {
    throw ConfigError("interpolation ratio must be >= 1, got " + std::to_string(ratio));
  }
  const auto w = static_cast<std::ptrdiff_t>(x.width());
  const auto h = static_cast<std::ptrdiff_t>(x.height());
  const auto cx = static_cast<double>(x.shape().center_x());
  const auto cy = static_cast<double>(x.shape().center_y());
  auto sample = [&](std::ptrdiff_t ix, std::ptrdiff_t iy) {
    if (ix < 0 || iy < 0 || ix >= w || iy >= h) return 0.0;
    return x(static_cast<std::size_t>(ix), static_cast<std::size_t>(iy));
  };
  const double flux = 1.0 / (ratio * ratio);
  RealGrid out(output, Domain::pattern);
  for (std::size_t v = 0; v < output.height; ++v) {
    const double sy = (static_cast<double>(v) - static_cast<double>(output.center_y())) / ratio + cy;
    const double fy = std::floor(sy);
    const double ty = sy - fy;
    const auto iy = static_cast<std::ptrdiff_t>(fy);
    for (std::size_t u = 0; u < output.width; ++u) {
      const double sx =
          (static_cast<double>(u) - static_cast<double>(output.center_x())) / ratio + cx;
      const double fx = std::floor(sx);
      const double tx = sx - fx;
      const auto ix = static_cast<std::ptrdiff_t>(fx);
      const double value = (1 - tx) * (1 - ty) * sample(ix, iy) + tx * (1 - ty) * sample(ix + 1, iy) +
                           (1 - tx) * ty * sample(ix, iy + 1) + tx * ty * sample(ix + 1, iy + 1);
      out(u, v) = flux * value;
    }
  }
  return out;
}

double autocorrelation_leakage(const RealGrid& pattern, Shape region) {
  const ComplexGrid ac = centered_ifft(pattern);
  RealGrid energy(ac.shape());
  for (std::size_t i = 0; i < ac.size(); ++i) energy[i] = std::norm(ac[i]);
  const double total = sum(energy);
  if (total == 0.0) return 0.0;
  const double inside = sum(crop_center(energy, region));
  return std::max(0.0, total - inside) / total;
}

}  // namespace bcdi
