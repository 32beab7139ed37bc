#include "bcdi/parallel.hpp"

#include <tbb/blocked_range.h>
#include <tbb/global_control.h>
#include <tbb/info.h>
#include <tbb/parallel_for.h>

#include <cstdlib>
#include <memory>
#include <mutex>
#include <string>

namespace bcdi {
namespace {

std::mutex control_mutex;
std::unique_ptr<tbb::global_control> control;
std::size_t configured = 0;

template <class G>
G pairwise(std::span<const G> terms) {
  if (terms.empty()) throw Error("pairwise_sum of zero terms");
  if (terms.size() == 1) return terms.front();
  const std::size_t half = terms.size() / 2;
  G left = pairwise(terms.first(half));
  left += pairwise(terms.subspan(half));
  return left;
}

}  // namespace

void set_thread_count(std::size_t n) {
  std::lock_guard lock(control_mutex);
  control.reset();
  configured = n;
  if (n > 0) {
    control = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism, n);
  }
}

std::size_t thread_count() {
  std::lock_guard lock(control_mutex);
  if (configured > 0) return configured;
  return static_cast<std::size_t>(tbb::info::default_concurrency());
}

std::size_t thread_count_from_env() {
  const char* env = std::getenv("BCDI_THREADS");
  if (env == nullptr) return 0;
  try {
    const long v = std::stol(env);
    return v > 0 ? static_cast<std::size_t>(v) : 0;
  } catch (const std::exception&) {
    return 0;
  }
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  if (n == 1) {
    fn(0);
    return;
  }
  tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n, 1),
                    [&](const tbb::blocked_range<std::size_t>& r) {
                      for (std::size_t i = r.begin(); i != r.end(); ++i) fn(i);
                    },
                    tbb::simple_partitioner{});
}

RealGrid pairwise_sum(std::span<const RealGrid> terms) { return pairwise(terms); }
ComplexGrid pairwise_sum(std::span<const ComplexGrid> terms) { return pairwise(terms); }

}  // namespace bcdi
