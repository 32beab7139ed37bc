#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "bcdi/config.hpp"

namespace bcdi {

/// Where a command reads and writes; relative config paths resolve here.
struct RunContext {
  std::filesystem::path out_dir = ".";
  /// The command line or caller that produced this run, for provenance.
  std::string invocation;

  std::filesystem::path resolve(const std::string& name) const;
};

struct SimulateReport {
  std::filesystem::path phantom, mono, poly, provenance;
  std::size_t spectrum_channels = 0;
  std::size_t merged_channels = 0;
};

struct MonoReport {
  std::filesystem::path recovered, residual, provenance;
  std::size_t iterations = 0;
  double final_relative_residual = 0.0;
  bool converged = false;
};

struct ReconstructReport {
  std::filesystem::path object, provenance;
  std::vector<std::filesystem::path> traces;
  std::size_t best = 0;
  std::vector<double> final_errors;
};

struct MetricsReport {
  std::filesystem::path csv;
  double nrmse_full = 0.0;
  double nrmse_low = 0.0;
  double r_max = 1.0;
  bool has_registration = false;
  double registration = 0.0;
  bool has_residual = false;
  std::size_t residual_rows = 0;
  double residual_first = 0.0;
  double residual_last = 0.0;
};

SimulateReport cmd_simulate(const RunConfig& cfg, const RunContext& ctx);
/// Throws DivergenceError if the solver blows up; nothing is written then.
MonoReport cmd_monochromatize(const RunConfig& cfg, const RunContext& ctx);
ReconstructReport cmd_reconstruct(const RunConfig& cfg, const RunContext& ctx);
MetricsReport cmd_metrics(const RunConfig& cfg, const RunContext& ctx);
std::filesystem::path cmd_render(const RunConfig& cfg, const RunContext& ctx);

/// Solver trace as CSV: iteration,epsilon,relative_residual.
void write_residual_csv(const std::filesystem::path& path, const std::vector<double>& trace,
                        double b_norm);
/// Retrieval trace as CSV: iteration,fourier_error,support_area.
void write_retrieval_csv(const std::filesystem::path& path,
                         const std::vector<RetrievalTraceRow>& trace);

}  // namespace bcdi
