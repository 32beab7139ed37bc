#include "bcdi/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bcdi/fft.hpp"
#include "bcdi/parallel.hpp"
#include "bcdi/random.hpp"

namespace bcdi {

void RetrievalConfig::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw ConfigError("retrieval beta must lie in (0, 1), got " + std::to_string(beta));
  }
  if (iterations < 1) throw ConfigError("retrieval iterations must be >= 1");
  if (shrinkwrap.interval < 1) throw ConfigError("shrinkwrap interval must be >= 1");
  if (!(shrinkwrap.threshold > 0.0 && shrinkwrap.threshold < 1.0)) {
    throw ConfigError("shrinkwrap threshold must lie in (0, 1)");
  }
  if (!(shrinkwrap.sigma > 0.0) || !(shrinkwrap.min_sigma > 0.0)) {
    throw ConfigError("shrinkwrap sigma must be > 0");
  }
  if (!(shrinkwrap.sigma_decay > 0.0 && shrinkwrap.sigma_decay <= 1.0)) {
    throw ConfigError("shrinkwrap sigma decay must lie in (0, 1]");
  }
  if (!(autocorrelation_threshold > 0.0 && autocorrelation_threshold < 1.0)) {
    throw ConfigError("autocorrelation threshold must lie in (0, 1)");
  }
}

std::size_t SupportMask::area() const {
  std::size_t n = 0;
  for (auto v : mask) n += v != 0;
  return n;
}

namespace {

SupportMask threshold_mask(const RealGrid& g, double fraction, std::size_t iteration) {
  const double cut = fraction * max_value(g);
  SupportMask s{Grid2D<std::uint8_t>(g.shape(), Domain::object), iteration};
  for (std::size_t i = 0; i < g.size(); ++i) s.mask[i] = g[i] > cut ? 1 : 0;
  return s;
}

// Object-domain constraint for a pixel inside the support.
complex constrain(complex v, bool complex_object) {
  if (complex_object) return v;
  return {std::max(v.real(), 0.0), 0.0};
}

bool admissible(complex v, bool complex_object) { return complex_object || v.real() >= 0.0; }

}  // namespace

RetrievalState init_retrieval(const RealGrid& pattern, const RetrievalConfig& cfg) {
  RetrievalState st;
  st.amplitude = RealGrid(pattern.shape(), Domain::pattern);
  double clipped = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const double p = pattern[i];
    if (!std::isfinite(p)) throw ConfigError("pattern contains non-finite values");
    total += std::abs(p);
    if (p < 0.0) clipped += -p;
    st.amplitude[i] = std::sqrt(std::max(p, 0.0));
  }
  if (!(max_value(st.amplitude) > 0.0)) {
    throw ConfigError("pattern has no positive intensity to retrieve a phase from");
  }
  st.clipped_fraction = total > 0.0 ? clipped / total : 0.0;

  Rng rng(cfg.seed);
  ComplexGrid start(pattern.shape(), Domain::pattern);
  for (std::size_t i = 0; i < start.size(); ++i) {
    start[i] = std::polar(st.amplitude[i], 2.0 * std::numbers::pi * uniform01(rng));
  }
  st.object = centered_ifft(start);
  st.object.set_domain(Domain::object);
  if (!cfg.complex_object) {
    for (auto& v : st.object) v = {v.real(), 0.0};
  }

  RealGrid clipped_pattern(pattern.shape());
  for (std::size_t i = 0; i < pattern.size(); ++i) clipped_pattern[i] = std::max(pattern[i], 0.0);
  st.support = threshold_mask(magnitude(centered_ifft(clipped_pattern)),
                              cfg.autocorrelation_threshold, 0);
  st.sigma = cfg.shrinkwrap.sigma;
  return st;
}

ComplexGrid fourier_projection(const ComplexGrid& object, const RealGrid& amplitude) {
  if (object.shape() != amplitude.shape()) {
    throw ShapeError("object " + to_string(object.shape()) + " does not match amplitudes " +
                     to_string(amplitude.shape()));
  }
  ComplexGrid f = centered_fft(object);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double m = std::abs(f[i]);
    f[i] = m > 0.0 ? f[i] * (amplitude[i] / m) : complex(amplitude[i], 0.0);
  }
  ComplexGrid out = centered_ifft(f);
  out.set_domain(Domain::object);
  return out;
}

ComplexGrid support_projection(const ComplexGrid& object, const SupportMask& support,
                               bool complex_object) {
  if (object.shape() != support.mask.shape()) {
    throw ShapeError("object " + to_string(object.shape()) + " does not match support " +
                     to_string(support.mask.shape()));
  }
  ComplexGrid out(object.shape(), Domain::object);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (support.contains(i)) out[i] = constrain(object[i], complex_object);
  }
  return out;
}

void hio_iterate(RetrievalState& st, const RetrievalConfig& cfg) {
  const ComplexGrid pm = fourier_projection(st.object, st.amplitude);
  for (std::size_t i = 0; i < pm.size(); ++i) {
    const complex est = cfg.complex_object ? pm[i] : complex(pm[i].real(), 0.0);
    if (st.support.contains(i) && admissible(est, cfg.complex_object)) {
      st.object[i] = est;
    } else {
      st.object[i] -= cfg.beta * est;
    }
  }
  ++st.iteration;
}

void raar_iterate(RetrievalState& st, const RetrievalConfig& cfg) {
  const ComplexGrid pm = fourier_projection(st.object, st.amplitude);
  ComplexGrid reflected = pm * 2.0;
  reflected -= st.object;
  const ComplexGrid ps = support_projection(reflected, st.support, cfg.complex_object);
  const double b = cfg.beta;
  for (std::size_t i = 0; i < pm.size(); ++i) {
    st.object[i] = b * (ps[i] - pm[i] + st.object[i]) + (1.0 - b) * pm[i];
  }
  ++st.iteration;
}

RealGrid gaussian_blur(const RealGrid& g, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("blur sigma must be > 0");
  ComplexGrid f = centered_fft(g);
  const double w = static_cast<double>(g.width());
  const double h = static_cast<double>(g.height());
  const double k = -2.0 * std::numbers::pi * std::numbers::pi * sigma * sigma;
  for (std::size_t y = 0; y < g.height(); ++y) {
    const double fy = (static_cast<double>(y) - static_cast<double>(g.shape().center_y())) / h;
    for (std::size_t x = 0; x < g.width(); ++x) {
      const double fx = (static_cast<double>(x) - static_cast<double>(g.shape().center_x())) / w;
      f(x, y) *= std::exp(k * (fx * fx + fy * fy));
    }
  }
  RealGrid out = real_part(centered_ifft(f));
  out.set_domain(g.domain());
  return out;
}

void shrinkwrap(RetrievalState& st, const RetrievalConfig& cfg) {
  const RealGrid blurred = gaussian_blur(magnitude(st.object), st.sigma);
  if (max_value(blurred) > 0.0) {
    SupportMask next = threshold_mask(blurred, cfg.shrinkwrap.threshold, st.iteration);
    if (next.area() > 0) st.support = std::move(next);
  }
  st.sigma = std::max(st.sigma * cfg.shrinkwrap.sigma_decay, cfg.shrinkwrap.min_sigma);
}

double fourier_error(const ComplexGrid& object, const RealGrid& amplitude) {
  if (object.shape() != amplitude.shape()) {
    throw ShapeError("object " + to_string(object.shape()) + " does not match amplitudes " +
                     to_string(amplitude.shape()));
  }
  const ComplexGrid f = centered_fft(object);
  double num = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = std::abs(f[i]) - amplitude[i];
    num += d * d;
  }
  const double den = norm(amplitude);
  return den > 0.0 ? std::sqrt(num) / den : std::sqrt(num);
}

double fourier_error(const RetrievalState& st) { return fourier_error(st.object, st.amplitude); }

ComplexGrid current_estimate(const RetrievalState& st, const RetrievalConfig& cfg) {
  return support_projection(fourier_projection(st.object, st.amplitude), st.support,
                            cfg.complex_object);
}

RetrievalResult reconstruct(const RealGrid& pattern, const RetrievalConfig& cfg) {
  cfg.validate();
  RetrievalState st = init_retrieval(pattern, cfg);
  RetrievalResult res;
  res.seed = cfg.seed;
  res.clipped_fraction = st.clipped_fraction;
  res.trace.reserve(cfg.iterations);
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    res.trace.push_back({it, fourier_error(st), st.support.area()});
    if (cfg.algorithm == RetrievalAlgorithm::hio) {
      hio_iterate(st, cfg);
    } else {
      raar_iterate(st, cfg);
    }
    if (st.iteration % cfg.shrinkwrap.interval == 0) shrinkwrap(st, cfg);
  }
  res.complex_object = current_estimate(st, cfg);
  res.final_error = fourier_error(res.complex_object, st.amplitude);
  res.object = cfg.complex_object ? magnitude(res.complex_object) : real_part(res.complex_object);
  res.object.set_domain(Domain::object);
  res.support = std::move(st.support);
  return res;
}

MultiStartResult reconstruct_best_of(const RealGrid& pattern, const RetrievalConfig& cfg,
                                     std::size_t starts) {
  if (starts < 1) throw ConfigError("need at least one restart");
  cfg.validate();
  MultiStartResult out;
  out.runs.resize(starts);
  parallel_for(starts, [&](std::size_t k) {
    RetrievalConfig c = cfg;
    c.seed = cfg.seed + k;
    out.runs[k] = reconstruct(pattern, c);
  });
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < starts; ++k) {
    if (out.runs[k].final_error < best) {
      best = out.runs[k].final_error;
      out.best = k;
    }
  }
  return out;
}

namespace {

RealGrid centered_copy(const RealGrid& g) {
  RealGrid out = g;
  const double mean = sum(g) / static_cast<double>(g.size());
  for (auto& v : out) v -= mean;
  return out;
}

// Point reflection about the DC pixel, cyclic.
RealGrid point_reflect(const RealGrid& g) {
  RealGrid out(g.shape(), g.domain());
  const std::size_t w = g.width();
  const std::size_t h = g.height();
  const std::size_t cx = g.shape().center_x();
  const std::size_t cy = g.shape().center_y();
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      out((2 * cx + w - x) % w, (2 * cy + h - y) % h) = g(x, y);
    }
  }
  return out;
}

Registration best_shift(const RealGrid& obj, const RealGrid& ref, double scale, bool twin) {
  const ComplexGrid fo = centered_fft(obj);
  ComplexGrid prod = centered_fft(ref);
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = fo[i] * std::conj(prod[i]);
  const ComplexGrid cc = centered_ifft(prod);

  Registration r{-std::numeric_limits<double>::infinity(), 0, 0, twin};
  const auto w = static_cast<std::ptrdiff_t>(obj.width());
  const auto h = static_cast<std::ptrdiff_t>(obj.height());
  for (std::ptrdiff_t y = 0; y < h; ++y) {
    for (std::ptrdiff_t x = 0; x < w; ++x) {
      const double s = cc(static_cast<std::size_t>(x), static_cast<std::size_t>(y)).real() * scale;
      if (s > r.score) {
        r.score = s;
        r.shift_x = x - static_cast<std::ptrdiff_t>(obj.shape().center_x());
        r.shift_y = y - static_cast<std::ptrdiff_t>(obj.shape().center_y());
      }
    }
  }
  auto wrap = [](std::ptrdiff_t s, std::ptrdiff_t n) {
    s = ((s % n) + n) % n;
    return s >= (n + 1) / 2 ? s - n : s;
  };
  r.shift_x = wrap(r.shift_x, w);
  r.shift_y = wrap(r.shift_y, h);
  return r;
}

}  // namespace

Registration register_and_compare(const RealGrid& object, const RealGrid& reference) {
  if (object.shape() != reference.shape()) {
    throw ShapeError("cannot register " + to_string(object.shape()) + " against " +
                     to_string(reference.shape()));
  }
  const RealGrid o = centered_copy(object);
  const RealGrid r = centered_copy(reference);
  const double no = norm(o);
  const double nr = norm(r);
  if (!(no > 0.0) || !(nr > 0.0)) return Registration{0.0, 0, 0, false};
  const double scale = 1.0 / (no * nr);

  Registration direct = best_shift(o, r, scale, false);
  Registration twin = best_shift(point_reflect(o), r, scale, true);
  Registration best = twin.score > direct.score ? twin : direct;
  best.score = std::clamp(best.score, -1.0, 1.0);
  return best;
}

}  // namespace bcdi
