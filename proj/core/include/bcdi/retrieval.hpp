#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bcdi/grid.hpp"

namespace bcdi {

enum class RetrievalAlgorithm { hio, raar };

/// Support refinement cadence and blur/threshold parameters.
struct ShrinkwrapSchedule {
  std::size_t interval = 20;
  double sigma = 3.0;
  double sigma_decay = 0.98;
  double min_sigma = 1.5;
  /// Fraction of the blurred-magnitude maximum.
  double threshold = 0.1;
};

struct RetrievalConfig {
  RetrievalAlgorithm algorithm = RetrievalAlgorithm::raar;
  double beta = 0.9;
  std::size_t iterations = 1000;
  ShrinkwrapSchedule shrinkwrap;
  /// Initial support: |IFFT(pattern)| above this fraction of its maximum.
  double autocorrelation_threshold = 0.04;
  /// Drops the realness and positivity constraints inside the support.
  bool complex_object = false;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SupportMask {
  Grid2D<std::uint8_t> mask;
  /// Iteration at which the mask was last rebuilt (0 = initial).
  std::size_t updated_at = 0;

  std::size_t area() const;
  bool contains(std::size_t i) const { return mask[i] != 0; }
};

struct RetrievalState {
  /// Measured Fourier modulus, sqrt of the clipped pattern.
  RealGrid amplitude;
  ComplexGrid object;
  SupportMask support;
  double sigma = 0.0;
  std::size_t iteration = 0;
  /// Share of |pattern| that was negative and clipped before the square root.
  double clipped_fraction = 0.0;
};

/// Amplitudes from the pattern, random initial phases from `cfg.seed`, and an
/// autocorrelation-threshold support. Throws ConfigError on an all-zero pattern.
RetrievalState init_retrieval(const RealGrid& pattern, const RetrievalConfig& cfg);

/// Replace the Fourier modulus with `amplitude`, keeping the phase.
ComplexGrid fourier_projection(const ComplexGrid& object, const RealGrid& amplitude);

/// Zero outside the support; inside, real and non-negative unless complex_object.
ComplexGrid support_projection(const ComplexGrid& object, const SupportMask& support,
                               bool complex_object);

void hio_iterate(RetrievalState& state, const RetrievalConfig& cfg);
void raar_iterate(RetrievalState& state, const RetrievalConfig& cfg);

/// Threshold a Gaussian blur of the current Fourier-consistent estimate, then
/// decay sigma towards its floor.
void shrinkwrap(RetrievalState& state, const RetrievalConfig& cfg);

/// Circular Gaussian blur (sigma in pixels), applied in Fourier space.
RealGrid gaussian_blur(const RealGrid& g, double sigma);

/// ‖ |FFT(object)| − amplitude ‖ / ‖amplitude‖.
double fourier_error(const ComplexGrid& object, const RealGrid& amplitude);
double fourier_error(const RetrievalState& state);

/// Object estimate the state currently represents: support-projected
/// Fourier projection of the iterate.
ComplexGrid current_estimate(const RetrievalState& state, const RetrievalConfig& cfg);

struct RetrievalTraceRow {
  std::size_t iteration = 0;
  double fourier_error = 0.0;
  std::size_t support_area = 0;
};

struct RetrievalResult {
  /// Real part of the final estimate (magnitude in complex-object mode).
  RealGrid object;
  ComplexGrid complex_object;
  SupportMask support;
  std::vector<RetrievalTraceRow> trace;
  double final_error = 0.0;
  std::uint64_t seed = 0;
  double clipped_fraction = 0.0;
};

/// Full schedule for one start: iterate, shrink-wrap every interval.
RetrievalResult reconstruct(const RealGrid& pattern, const RetrievalConfig& cfg);

struct MultiStartResult {
  std::vector<RetrievalResult> runs;
  std::size_t best = 0;

  const RetrievalResult& best_run() const { return runs.at(best); }
};

/// Independent restarts with seeds cfg.seed, cfg.seed+1, ...; best is the
/// lowest final Fourier error (ties go to the lower index).
MultiStartResult reconstruct_best_of(const RealGrid& pattern, const RetrievalConfig& cfg,
                                     std::size_t starts);

struct Registration {
  double score = 0.0;
  std::ptrdiff_t shift_x = 0;
  std::ptrdiff_t shift_y = 0;
  /// The point-reflected twin matched better than the object itself.
  bool twin = false;
};

/// Best normalized cross-correlation between `object` (or its twin) and
/// `reference` over all cyclic translations. A shift s means object(x) ≈
/// reference(x − s).
Registration register_and_compare(const RealGrid& object, const RealGrid& reference);

}  // namespace bcdi
