#include "bcdi/simulate.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bcdi/fft.hpp"
#include "bcdi/parallel.hpp"
#include "bcdi/random.hpp"

namespace bcdi {

namespace {

RealGrid intensity(const ComplexGrid& f) {
  RealGrid out(f.shape(), Domain::pattern);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::norm(f[i]);
  return out;
}

}  // namespace

RealGrid simulate_mono(const Phantom& p) { return intensity(centered_fft(p.embedded)); }

RealGrid simulate_poly_independent(const Phantom& p, const Spectrum& spectrum,
                                   std::size_t max_extent) {
  const Shape det = p.embedded.shape();
  const PolychromaticOperator bound = spectrum.bind(det);
  const auto& channels = bound.channels();
  for (const auto& c : channels) {
    if (c.geometry.padded.width > max_extent || c.geometry.padded.height > max_extent) {
      throw ConfigError("channel grid " + to_string(c.geometry.padded) + " exceeds the limit of " +
                        std::to_string(max_extent) + " pixels per axis");
    }
  }

  std::vector<RealGrid> terms(channels.size());
  parallel_for(channels.size(), [&](std::size_t i) {
    const auto& g = channels[i].geometry;
    const RealGrid wide = pad_center(p.embedded, g.padded);
    RealGrid t = crop_center(intensity(centered_fft(wide)), det);
    t *= channels[i].weight * g.flux_scale();
    terms[i] = std::move(t);
  });
  RealGrid b = pairwise_sum(std::span<const RealGrid>(terms));
  b.set_domain(Domain::pattern);
  return b;
}

Shape low_frequency_block(Shape shape, double r_max) {
  if (!(r_max >= 1.0) || !std::isfinite(r_max)) {
    throw ConfigError("low-frequency block needs r_max >= 1, got " + std::to_string(r_max));
  }
  auto axis = [r_max](std::size_t n) {
    auto m = static_cast<std::size_t>(std::floor(static_cast<double>(n) / r_max));
    if ((n - m) % 2 != 0) --m;
    return std::max<std::size_t>(m, 2);
  };
  return {axis(shape.width), axis(shape.height)};
}

double pattern_nrmse(const RealGrid& x, const RealGrid& ref, NrmseRegion region, double r_max) {
  ref.require_same_shape(x);
  RealGrid diff = x - ref;
  RealGrid base = ref;
  if (region == NrmseRegion::low_frequency) {
    const Shape block = low_frequency_block(ref.shape(), r_max);
    diff = crop_center(diff, block);
    base = crop_center(base, block);
  }
  const double den = norm(base);
  const double num = norm(diff);
  if (den > 0.0) return num / den;
  return num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

RealGrid add_noise(const RealGrid& b, const NoiseModel& model, std::uint64_t seed) {
  RealGrid out = b;
  Rng rng(seed);
  switch (model.kind) {
    case NoiseModel::Kind::none:
      return out;
    case NoiseModel::Kind::gaussian: {
      if (!(model.sigma >= 0.0)) throw ConfigError("gaussian noise sigma must be >= 0");
      if (model.sigma == 0.0) return out;
      // Box-Muller on the library's own uniforms keeps the stream portable.
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double u1 = 1.0 - uniform01(rng);
        const double u2 = uniform01(rng);
        const double n = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        out[i] += model.sigma * n;
      }
      return out;
    }
    case NoiseModel::Kind::poisson: {
      if (!(model.photons > 0.0)) throw ConfigError("poisson noise needs photons > 0");
      double total = 0.0;
      for (double v : b) {
        if (v < 0.0) throw ConfigError("poisson noise needs a non-negative pattern");
        total += v;
      }
      if (!(total > 0.0)) return out;
      const double scale = model.photons / total;
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double mean = b[i] * scale;
        if (mean <= 0.0) continue;
        std::poisson_distribution<long long> draw(mean);
        out[i] = static_cast<double>(draw(rng)) / scale;
      }
      return out;
    }
  }
  return out;
}

}  // namespace bcdi
