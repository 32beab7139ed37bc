#include <benchmark/benchmark.h>

#include "bcdi/phantom.hpp"
#include "bcdi/retrieval.hpp"
#include "bcdi/simulate.hpp"
#include "bcdi/solver.hpp"
#include "bcdi/spectrum.hpp"
#include "bcdi/transfer.hpp"

namespace {

using namespace bcdi;

RealGrid mono_pattern(std::size_t side) {
  PhantomOptions opts;
  opts.object_shape = Shape{side / 2, side / 2};
  return simulate_mono(load_phantom("digit:3", Shape{side, side}, opts));
}

Spectrum five_harmonics() {
  const std::vector<int> orders{3, 5, 7, 9, 11};
  const std::vector<double> weights{0.2, 0.4, 0.4, 0.3, 0.2};
  return harmonics_spectrum(orders, weights);
}

void BM_Transfer(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const RealGrid x = mono_pattern(side);
  const auto g = geometry_for_ratio(2.0, x.shape());
  for (auto _ : state) benchmark::DoNotOptimize(apply_transfer(x, g));
}
BENCHMARK(BM_Transfer)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_Adjoint(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const RealGrid z = mono_pattern(side);
  const auto g = geometry_for_ratio(2.0, z.shape());
  for (auto _ : state) benchmark::DoNotOptimize(apply_adjoint(z, g));
}
BENCHMARK(BM_Adjoint)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_InterpolationTransfer(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const RealGrid x = mono_pattern(side);
  for (auto _ : state) benchmark::DoNotOptimize(interpolation_transfer(x, 2.0));
}
BENCHMARK(BM_InterpolationTransfer)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_ApplyPolyHarmonics(benchmark::State& state) {
  const RealGrid x = mono_pattern(128);
  const PolychromaticOperator op = five_harmonics().bind(x.shape());
  for (auto _ : state) benchmark::DoNotOptimize(apply_poly(x, op));
}
BENCHMARK(BM_ApplyPolyHarmonics)->Unit(benchmark::kMillisecond);

void BM_ApplyPolyContinuous(benchmark::State& state) {
  const RealGrid x = mono_pattern(96);
  const PolychromaticOperator op =
      continuous_spectrum(2.5, 0.8, 384).normalized_to_unit_sum().bind(x.shape());
  state.counters["channels"] = static_cast<double>(op.channels().size());
  for (auto _ : state) benchmark::DoNotOptimize(apply_poly(x, op));
}
BENCHMARK(BM_ApplyPolyContinuous)->Unit(benchmark::kMillisecond);

// One momentum step: residual, gradient, update.
void BM_SolverIteration(benchmark::State& state) {
  const RealGrid x = mono_pattern(128);
  const PolychromaticOperator op = five_harmonics().bind(x.shape());
  const RealGrid b = apply_poly(x, op);
  SolverState s = SolverState::start(b);
  const SolverConfig cfg;
  for (auto _ : state) {
    const Residual r = residual(s.x, b, op);
    step_momentum(s, gradient(r.delta_b, op), cfg.dt, cfg.friction, r.epsilon, true);
  }
}
BENCHMARK(BM_SolverIteration)->Unit(benchmark::kMillisecond);

void BM_RaarIteration(benchmark::State& state) {
  const RealGrid pattern = mono_pattern(128);
  RetrievalConfig cfg;
  cfg.seed = 1;
  RetrievalState s = init_retrieval(pattern, cfg);
  for (auto _ : state) raar_iterate(s, cfg);
}
BENCHMARK(BM_RaarIteration)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
