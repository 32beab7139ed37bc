#include "bcdi/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace bcdi {
namespace {

static_assert(sizeof(complex) == sizeof(fftw_complex));

// FFTW's planner is not reentrant; execution of an existing plan on new
// arrays is. Plans are made once per (geometry, sign) under a lock and then
// shared. FFTW_ESTIMATE keeps plan selection independent of timing, and
// FFTW_UNALIGNED lets one plan serve any std::vector buffer, so a given
// transform size always runs the same codelets.
class PlanCache {
 public:
  using Key = std::tuple<int, int, int, int>;  // rank-2: (n0, n1, 1, sign); rank-1 many: (0, n, howmany, sign)

  fftw_plan plan_2d(int n0, int n1, int sign) {
    return get({n0, n1, 1, sign}, [&](fftw_complex* buf) {
      return fftw_plan_dft_2d(n0, n1, buf, buf, sign, kFlags);
    });
  }

  fftw_plan plan_many(int n, int howmany, int sign) {
    return get({0, n, howmany, sign}, [&](fftw_complex* buf) {
      return fftw_plan_many_dft(1, &n, howmany, buf, nullptr, 1, n, buf, nullptr, 1, n, sign,
                                kFlags);
    });
  }

  void clear() {
    std::lock_guard lock(mutex_);
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    plans_.clear();
  }

  ~PlanCache() { clear(); }

 private:
  static constexpr unsigned kFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

  template <class Make>
  fftw_plan get(const Key& key, Make make) {
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const auto n = static_cast<std::size_t>(std::get<1>(key)) *
                   static_cast<std::size_t>(std::max(std::get<0>(key), std::get<2>(key)));
    auto* buf = fftw_alloc_complex(n);
    fftw_plan plan = make(buf);
    fftw_free(buf);
    if (plan == nullptr) throw Error("FFTW failed to create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
};

PlanCache& plans() {
  static PlanCache cache;
  return cache;
}

fftw_complex* as_fftw(complex* p) { return reinterpret_cast<fftw_complex*>(p); }

// Position of centered index `i` (DC at `center`) in an n-long FFTW natural-order
// buffer. n may exceed the grid extent, which places the data zero-padded.
inline std::size_t natural(std::size_t i, std::size_t center, std::size_t n) {
  return (i + n - center) % n;
}

ComplexGrid centered_transform(const ComplexGrid& g, int sign) {
  const Shape s = g.shape();
  const std::size_t w = s.width;
  const std::size_t h = s.height;
  std::vector<complex> buf(s.size());
  for (std::size_t y = 0; y < h; ++y) {
    const std::size_t ny = natural(y, s.center_y(), h) * w;
    for (std::size_t x = 0; x < w; ++x) buf[ny + natural(x, s.center_x(), w)] = g(x, y);
  }
  fftw_plan plan = plans().plan_2d(static_cast<int>(h), static_cast<int>(w), sign);
  fftw_execute_dft(plan, as_fftw(buf.data()), as_fftw(buf.data()));
  ComplexGrid out(s, g.domain());
  for (std::size_t y = 0; y < h; ++y) {
    const std::size_t ny = natural(y, s.center_y(), h) * w;
    for (std::size_t x = 0; x < w; ++x) out(x, y) = buf[ny + natural(x, s.center_x(), w)];
  }
  return out;
}

}  // namespace

ComplexGrid centered_fft(const ComplexGrid& g) {
  auto out = centered_transform(g, FFTW_FORWARD);
  out.set_domain(Domain::pattern);
  return out;
}

ComplexGrid centered_fft(const RealGrid& g) { return centered_fft(to_complex(g)); }

ComplexGrid centered_ifft(const ComplexGrid& g) {
  auto out = centered_transform(g, FFTW_BACKWARD);
  out *= 1.0 / static_cast<double>(g.size());
  out.set_domain(g.domain() == Domain::pattern ? Domain::autocorrelation : Domain::object);
  return out;
}

ComplexGrid centered_ifft(const RealGrid& g) { return centered_ifft(to_complex(g)); }

ComplexGrid padded_dft_cropped(const ComplexGrid& g, Shape padded, FftDirection direction) {
  const Shape s = g.shape();
  if (padded.width < s.width || padded.height < s.height ||
      (padded.width - s.width) % 2 != 0 || (padded.height - s.height) % 2 != 0) {
    throw ShapeError("padded_dft_cropped: padded shape " + to_string(padded) +
                     " incompatible with " + to_string(s));
  }
  const int sign = direction == FftDirection::forward ? FFTW_FORWARD : FFTW_BACKWARD;
  const std::size_t w = s.width;
  const std::size_t h = s.height;
  const std::size_t bx = padded.width;
  const std::size_t by = padded.height;

  // Pass 1: the h data rows, each zero-extended to bx and transformed along x.
  std::vector<complex> rows(h * bx);
  for (std::size_t y = 0; y < h; ++y) {
    complex* row = rows.data() + y * bx;
    for (std::size_t x = 0; x < w; ++x) row[natural(x, s.center_x(), bx)] = g(x, y);
  }
  fftw_execute_dft(plans().plan_many(static_cast<int>(bx), static_cast<int>(h), sign),
                   as_fftw(rows.data()), as_fftw(rows.data()));

  // Pass 2: keep the central w outputs of each row, transpose into w columns
  // of length by, transform along y.
  std::vector<complex> cols(w * by);
  for (std::size_t y = 0; y < h; ++y) {
    const complex* row = rows.data() + y * bx;
    const std::size_t ny = natural(y, s.center_y(), by);
    for (std::size_t u = 0; u < w; ++u) {
      cols[u * by + ny] = row[natural(u, s.center_x(), bx)];
    }
  }
  fftw_execute_dft(plans().plan_many(static_cast<int>(by), static_cast<int>(w), sign),
                   as_fftw(cols.data()), as_fftw(cols.data()));

  ComplexGrid out(s, g.domain());
  for (std::size_t u = 0; u < w; ++u) {
    const complex* col = cols.data() + u * by;
    for (std::size_t v = 0; v < h; ++v) out(u, v) = col[natural(v, s.center_y(), by)];
  }
  return out;
}

void clear_fft_plan_cache() { plans().clear(); }

}  // namespace bcdi
