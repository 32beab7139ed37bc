#pragma once

#include <atomic>
#include <cstddef>
#include <vector>

#include "bcdi/grid.hpp"
#include "bcdi/spectrum.hpp"

namespace bcdi {

enum class SolverMode { plain, momentum };

struct SolverConfig {
  /// Step size of the plain gradient update.
  double alpha = 1.0;
  /// Time step of the momentum update; also its effective step size.
  double dt = 1.0;
  double friction = 0.2;
  std::size_t max_iter = 500;
  /// Stop once sqrt(ε)/‖b‖ ≤ residual_tol. 0 runs all max_iter steps.
  double residual_tol = 0.0;
  bool projection = true;
  SolverMode mode = SolverMode::momentum;
  /// Abort when ε_n exceeds this multiple of ε_0.
  double divergence_factor = 1e6;

  /// Throws ConfigError unless α > 0, dt > 0, 0 ≤ f·dt < 1, max_iter ≥ 1.
  void validate() const;
};

/// Iterate, velocity and residual history. trace[k] is ε at x_k, so after n
/// steps the trace holds n entries.
struct SolverState {
  RealGrid x;
  RealGrid v;
  std::size_t n = 0;
  std::vector<double> trace;

  /// x₀ = b, v₀ = 0.
  static SolverState start(const RealGrid& b);
};

struct Residual {
  double epsilon = 0.0;
  RealGrid delta_b;
};

/// Δb = b − Σ aᵢ Âᵢ(x), ε = ‖Δb‖².
Residual residual(const RealGrid& x, const RealGrid& b, const PolychromaticOperator& op);

/// ∇ε = −2 Σ aᵢ Âᵢᵀ(Δb).
RealGrid gradient(const RealGrid& delta_b, const PolychromaticOperator& op);

RealGrid project_nonneg(RealGrid x);

/// x ← x − α∇ε, then optional projection. Appends `epsilon` to the trace.
void step_plain(SolverState& state, const RealGrid& grad, double alpha, double epsilon,
                bool projection);

/// v ← (v − ∇ε)(1 − f·dt); x ← x + v·dt, then optional projection of x only.
void step_momentum(SolverState& state, const RealGrid& grad, double dt, double friction,
                   double epsilon, bool projection);

/// Lock-free progress snapshot a running solve publishes every iteration.
/// Observers read it from any thread; the solve never waits on them.
struct SolverProgress {
  std::atomic<std::size_t> iteration{0};
  std::atomic<double> epsilon{0.0};
};

struct SolveResult {
  RealGrid x;
  std::vector<double> trace;
  /// ε of the returned x.
  double final_epsilon = 0.0;
  double b_norm = 0.0;
  bool converged = false;

  std::size_t iterations() const noexcept { return trace.size(); }
  double relative_residual(std::size_t k) const;
  double final_relative_residual() const;
};

/// Runs the configured iteration from x₀ = b. Throws DivergenceError when x
/// turns non-finite or ε exceeds divergence_factor·ε₀.
SolveResult solve(const RealGrid& b, const PolychromaticOperator& op, const SolverConfig& cfg,
                  SolverProgress* progress = nullptr);

}  // namespace bcdi
