#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bcdi/image_io.hpp"
#include "bcdi/retrieval.hpp"
#include "bcdi/simulate.hpp"
#include "bcdi/solver.hpp"
#include "bcdi/spectrum.hpp"

namespace bcdi {

inline constexpr const char* kVersion = "0.1.0";

struct SpectrumSpec {
  enum class Form { harmonics, continuous, table };
  Form form = Form::table;
  std::vector<int> orders;
  std::vector<double> weights{1.0};
  std::vector<double> ratios{1.0};
  double center = 2.5;
  double bandwidth = 0.8;
  std::size_t points = 384;
  bool unit_sum = false;

  Spectrum build() const;
};

struct PhantomSpec {
  std::string source = "digit:3";
  Shape object{64, 64};
  Shape detector{128, 128};
  bool allow_undersampled = false;
};

/// File names; relative names resolve against the output directory, so each
/// command picks up what the previous one wrote.
struct RunPaths {
  std::string phantom = "phantom.bcdi";
  std::string mono = "mono.bcdi";
  std::string poly = "poly.bcdi";
  std::string recovered = "mono_recovered.bcdi";
  std::string residual = "residual.csv";
  std::string object = "object.bcdi";
  std::string metrics = "metrics.csv";
};

struct MetricsSpec {
  std::string candidate = "mono_recovered.bcdi";
  std::string reference = "mono.bcdi";
  /// Object pair for registration; empty skips it.
  std::string object = "object.bcdi";
  std::string object_reference = "phantom.bcdi";
};

struct RenderSpec {
  std::string input = "poly.bcdi";
  /// Empty: input name with a .png extension.
  std::string output;
  RenderOptions options;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  PhantomSpec phantom;
  SpectrumSpec spectrum;
  NoiseModel noise;
  SolverConfig solver;
  RetrievalConfig retrieval;
  std::size_t starts = 8;
  RunPaths paths;
  MetricsSpec metrics;
  RenderSpec render;
  /// Document the config was parsed from (empty for defaults).
  std::string source_text;

  void validate() const;
};

/// YAML document to RunConfig. Unknown keys, wrong types and invalid values
/// are ConfigErrors naming the offending key.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Annotated listing of every key with its default.
std::string config_reference();

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& data);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace bcdi
