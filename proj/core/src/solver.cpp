#include "bcdi/solver.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace bcdi {

void SolverConfig::validate() const {
  if (!(alpha > 0.0)) throw ConfigError("solver alpha must be > 0");
  if (!(dt > 0.0)) throw ConfigError("solver dt must be > 0");
  if (!(friction >= 0.0) || !(friction * dt < 1.0)) {
    throw ConfigError("solver friction must satisfy 0 <= f*dt < 1");
  }
  if (max_iter < 1) throw ConfigError("solver max_iter must be >= 1");
  if (!(residual_tol >= 0.0)) throw ConfigError("solver residual_tol must be >= 0");
  if (!(divergence_factor > 1.0)) throw ConfigError("solver divergence_factor must be > 1");
}

SolverState SolverState::start(const RealGrid& b) {
  SolverState s;
  s.x = b;
  s.v = RealGrid(b.shape());
  return s;
}

Residual residual(const RealGrid& x, const RealGrid& b, const PolychromaticOperator& op) {
  b.require_same_shape(x);
  Residual r{0.0, b - op.apply(x)};
  r.epsilon = dot(r.delta_b, r.delta_b);
  return r;
}

RealGrid gradient(const RealGrid& delta_b, const PolychromaticOperator& op) {
  return op.apply_adjoint(delta_b) * -2.0;
}

RealGrid project_nonneg(RealGrid x) {
  for (auto& v : x) v = std::max(v, 0.0);
  return x;
}

void step_plain(SolverState& state, const RealGrid& grad, double alpha, double epsilon,
                bool projection) {
  state.x.require_same_shape(grad);
  for (std::size_t i = 0; i < state.x.size(); ++i) state.x[i] -= alpha * grad[i];
  if (projection) state.x = project_nonneg(std::move(state.x));
  state.trace.push_back(epsilon);
  ++state.n;
}

void step_momentum(SolverState& state, const RealGrid& grad, double dt, double friction,
                   double epsilon, bool projection) {
  state.x.require_same_shape(grad);
  const double damping = 1.0 - friction * dt;
  for (std::size_t i = 0; i < state.x.size(); ++i) {
    state.v[i] = (state.v[i] - grad[i]) * damping;
    state.x[i] += state.v[i] * dt;
  }
  if (projection) state.x = project_nonneg(std::move(state.x));
  state.trace.push_back(epsilon);
  ++state.n;
}

double SolveResult::relative_residual(std::size_t k) const {
  return b_norm > 0.0 ? std::sqrt(trace.at(k)) / b_norm : 0.0;
}

double SolveResult::final_relative_residual() const {
  return b_norm > 0.0 ? std::sqrt(final_epsilon) / b_norm : 0.0;
}

SolveResult solve(const RealGrid& b, const PolychromaticOperator& op, const SolverConfig& cfg,
                  SolverProgress* progress) {
  cfg.validate();
  if (b.shape() != op.shape()) {
    throw ShapeError("measurement " + to_string(b.shape()) + " does not match operator shape " +
                     to_string(op.shape()));
  }
  SolverState state = SolverState::start(b);
  const double b_norm = norm(b);
  const double tol_eps = cfg.residual_tol * cfg.residual_tol * b_norm * b_norm;

  auto diverged = [&](std::size_t n, double eps, const char* why) {
    std::ostringstream msg;
    msg << "monochromatization diverged at iteration " << n << " (" << why << ", epsilon=" << eps
        << ")";
    return DivergenceError(msg.str(), n, eps);
  };

  Residual r = residual(state.x, b, op);
  const double eps0 = r.epsilon;
  bool converged = false;
  while (true) {
    if (!std::isfinite(r.epsilon) || !all_finite(state.x)) {
      throw diverged(state.n, r.epsilon, "non-finite values");
    }
    if (r.epsilon > cfg.divergence_factor * eps0) {
      throw diverged(state.n, r.epsilon, "residual growth");
    }
    if (progress != nullptr) {
      progress->iteration.store(state.n, std::memory_order_relaxed);
      progress->epsilon.store(r.epsilon, std::memory_order_relaxed);
    }
    if (r.epsilon <= tol_eps) {
      converged = true;
      break;
    }
    if (state.n >= cfg.max_iter) break;

    const RealGrid grad = gradient(r.delta_b, op);
    if (cfg.mode == SolverMode::plain) {
      step_plain(state, grad, cfg.alpha, r.epsilon, cfg.projection);
    } else {
      step_momentum(state, grad, cfg.dt, cfg.friction, r.epsilon, cfg.projection);
    }
    r = residual(state.x, b, op);
  }

  SolveResult out;
  out.x = std::move(state.x);
  out.trace = std::move(state.trace);
  out.final_epsilon = r.epsilon;
  out.b_norm = b_norm;
  out.converged = converged;
  return out;
}

}  // namespace bcdi
