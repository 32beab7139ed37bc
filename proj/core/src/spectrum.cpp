#include "bcdi/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <string>

#include "bcdi/fft.hpp"
#include "bcdi/parallel.hpp"

namespace bcdi {

Spectrum::Spectrum(std::vector<SpectralChannel> channels) : channels_(std::move(channels)) {
  if (channels_.empty()) throw ConfigError("spectrum needs at least one channel");
  bool any_positive = false;
  for (const auto& c : channels_) {
    if (!std::isfinite(c.ratio) || c.ratio <= 0.0) {
      throw ConfigError("spectrum ratios must be finite and positive, got " + std::to_string(c.ratio));
    }
    if (!std::isfinite(c.weight) || c.weight < 0.0) {
      throw ConfigError("spectrum weights must be finite and >= 0, got " + std::to_string(c.weight));
    }
    any_positive = any_positive || c.weight > 0.0;
  }
  if (!any_positive) throw ConfigError("spectrum needs at least one positive weight");

  std::sort(channels_.begin(), channels_.end(),
            [](const auto& a, const auto& b) { return a.ratio < b.ratio; });
  for (std::size_t i = 1; i < channels_.size(); ++i) {
    if (!(channels_[i].ratio > channels_[i - 1].ratio)) {
      throw ConfigError("spectrum ratios must be distinct, " + std::to_string(channels_[i].ratio) +
                        " appears twice");
    }
  }
  const double anchor = channels_.front().ratio;
  if (anchor != 1.0) {
    for (auto& c : channels_) c.ratio /= anchor;
    channels_.front().ratio = 1.0;
  }
}

double Spectrum::total_weight() const noexcept {
  double s = 0.0;
  for (const auto& c : channels_) s += c.weight;
  return s;
}

Spectrum Spectrum::scaled(double factor) const {
  auto copy = channels_;
  for (auto& c : copy) c.weight *= factor;
  return Spectrum(std::move(copy));
}

Spectrum Spectrum::normalized_to_unit_sum() const { return scaled(1.0 / total_weight()); }

PolychromaticOperator Spectrum::bind(Shape shape) const {
  std::vector<BoundChannel> bound;
  for (const auto& c : channels_) {
    TransferGeometry g = geometry_for_ratio(c.ratio, shape);
    if (!bound.empty() && bound.back().geometry.padded == g.padded) {
      bound.back().weight += c.weight;
      ++bound.back().merged;
    } else {
      bound.push_back({g, c.weight, 1});
    }
  }
  return PolychromaticOperator(shape, std::move(bound));
}

Spectrum harmonics_spectrum(std::span<const int> orders, std::span<const double> weights) {
  if (orders.size() != weights.size()) {
    throw ConfigError("harmonic orders and weights differ in length (" +
                      std::to_string(orders.size()) + " vs " + std::to_string(weights.size()) + ")");
  }
  if (orders.empty()) throw ConfigError("harmonic spectrum needs at least one order");
  std::set<int> seen;
  for (int q : orders) {
    if (q <= 0) throw ConfigError("harmonic orders must be positive, got " + std::to_string(q));
    if (!seen.insert(q).second) throw ConfigError("harmonic order listed twice: " + std::to_string(q));
  }
  const double q_max = *seen.rbegin();
  std::vector<SpectralChannel> channels;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    channels.push_back({q_max / static_cast<double>(orders[i]), weights[i]});
  }
  return Spectrum(std::move(channels));
}

Spectrum continuous_spectrum(double center, double fractional_bandwidth, std::size_t n_points) {
  if (!(center > 0.0) || !std::isfinite(center)) {
    throw ConfigError("continuous spectrum center must be positive");
  }
  if (!(fractional_bandwidth > 0.0 && fractional_bandwidth < 2.0)) {
    throw ConfigError("fractional bandwidth must lie in (0, 2), got " +
                      std::to_string(fractional_bandwidth));
  }
  if (n_points < 2) throw ConfigError("continuous spectrum needs at least 2 points");

  const double fwhm = fractional_bandwidth * center;
  const double lo = center * (1.0 - fractional_bandwidth / 2.0);
  const double step = fwhm / static_cast<double>(n_points - 1);
  std::vector<SpectralChannel> channels(n_points);
  double peak = 0.0;
  for (std::size_t j = 0; j < n_points; ++j) {
    const double lambda = lo + step * static_cast<double>(j);
    const double d = (lambda - center) / fwhm;
    channels[j] = {lambda / lo, std::exp(-4.0 * std::numbers::ln2 * d * d)};
    peak = std::max(peak, channels[j].weight);
  }
  channels.front().ratio = 1.0;
  for (auto& c : channels) c.weight /= peak;
  return Spectrum(std::move(channels));
}

PolychromaticOperator::PolychromaticOperator(Shape shape, std::vector<BoundChannel> channels)
    : shape_(shape), channels_(std::move(channels)) {
  if (channels_.empty()) throw ConfigError("polychromatic operator needs at least one channel");
  for (const auto& c : channels_) {
    if (c.geometry.base != shape_) {
      throw ShapeError("channel geometry base " + to_string(c.geometry.base) +
                       " does not match operator shape " + to_string(shape_));
    }
  }
}

double PolychromaticOperator::max_realized_ratio() const noexcept {
  double r = 1.0;
  for (const auto& c : channels_) r = std::max(r, c.geometry.realized_ratio());
  return r;
}

void PolychromaticOperator::require_shape(const RealGrid& g) const {
  if (g.shape() != shape_) {
    throw ShapeError("grid " + to_string(g.shape()) + " does not match operator shape " +
                     to_string(shape_));
  }
}

RealGrid PolychromaticOperator::apply(const RealGrid& x, TransferStats* stats) const {
  require_shape(x);
  std::vector<const BoundChannel*> active;
  for (const auto& c : channels_) {
    if (c.weight > 0.0) active.push_back(&c);
  }
  const bool needs_autocorrelation =
      std::any_of(active.begin(), active.end(), [](auto* c) { return !c->geometry.is_identity(); });
  const std::optional<ComplexGrid> ac =
      needs_autocorrelation ? std::optional(centered_ifft(x)) : std::nullopt;

  std::vector<ComplexGrid> terms(active.size());
  parallel_for(active.size(), [&](std::size_t i) {
    const BoundChannel& c = *active[i];
    ComplexGrid t = c.geometry.is_identity() ? to_complex(x) : transfer_from_autocorrelation(*ac, c.geometry);
    t *= c.weight;
    terms[i] = std::move(t);
  });
  const ComplexGrid total = pairwise_sum(std::span<const ComplexGrid>(terms));
  RealGrid out = real_part(total);
  out.set_domain(Domain::pattern);
  if (stats != nullptr) {
    stats->real_norm = norm(out);
    stats->discarded_imag_norm = norm(imag_part(total));
  }
  return out;
}

RealGrid PolychromaticOperator::apply_adjoint(const RealGrid& z, TransferStats* stats) const {
  require_shape(z);
  double identity_weight = 0.0;
  std::vector<const BoundChannel*> padded;
  for (const auto& c : channels_) {
    if (c.weight <= 0.0) continue;
    if (c.geometry.is_identity()) {
      identity_weight += c.weight;
    } else {
      padded.push_back(&c);
    }
  }

  RealGrid out = z * identity_weight;
  out.set_domain(Domain::pattern);
  double imag = 0.0;
  if (!padded.empty()) {
    std::vector<ComplexGrid> terms(padded.size());
    parallel_for(padded.size(), [&](std::size_t i) {
      ComplexGrid t = adjoint_to_autocorrelation(z, padded[i]->geometry);
      t *= padded[i]->weight;
      terms[i] = std::move(t);
    });
    const ComplexGrid spectrum = centered_fft(pairwise_sum(std::span<const ComplexGrid>(terms)));
    out += real_part(spectrum);
    imag = norm(imag_part(spectrum));
  }
  if (stats != nullptr) {
    stats->real_norm = norm(out);
    stats->discarded_imag_norm = imag;
  }
  return out;
}

RealGrid apply_poly(const RealGrid& x, const PolychromaticOperator& op) { return op.apply(x); }

RealGrid apply_poly_adjoint(const RealGrid& z, const PolychromaticOperator& op) {
  return op.apply_adjoint(z);
}

}  // namespace bcdi
