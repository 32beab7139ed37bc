// Acceptance gate. `acceptance --criterion N` runs one criterion, `acceptance`
// runs all of them. Each prints a single PASS/FAIL line; the exit status is
// nonzero if any selected criterion failed.

#include <Eigen/Dense>

#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bcdi/config.hpp"
#include "bcdi/parallel.hpp"
#include "bcdi/phantom.hpp"
#include "bcdi/pipeline.hpp"
#include "bcdi/simulate.hpp"
#include "bcdi/solver.hpp"
#include "bcdi/spectrum.hpp"
#include "bcdi/transfer.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace bcdi;
using oracle::Gen;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

const fs::path kConfigs = BCDI_CONFIG_DIR;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bcdi_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const std::array<double, 4> kRatios{1.25, 1.5, 2.0, 3.0};
const std::array<std::size_t, 2> kSides{8, 16};

Outcome operator_oracle() {
  double worst = 0.0;
  Gen gen(101);
  for (std::size_t side : kSides) {
    const Shape s{side, side};
    for (double r : kRatios) {
      const auto g = geometry_for_ratio(r, s);
      const Eigen::MatrixXd a = oracle::to_eigen(dense_matrix(g));
      for (int k = 0; k < 10; ++k) {
        const RealGrid x = gen.real_grid(s);
        const RealGrid z = gen.real_grid(s);
        const RealGrid ax = oracle::unflatten(a * oracle::flatten(x), s);
        const RealGrid atz = oracle::unflatten(a.transpose() * oracle::flatten(z), s);
        worst = std::max(worst, oracle::relative_error(apply_transfer(x, g), ax));
        worst = std::max(worst, oracle::relative_error(apply_adjoint(z, g), atz));
        // Second route: the chain itself with direct DFTs.
        worst = std::max(worst, oracle::relative_error(apply_transfer(x, g), oracle::transfer(x, g)));
      }
    }
  }
  return {worst <= 1e-10, fmt("max relative error %.3e (bound 1e-10)", worst)};
}

Outcome adjoint_identity() {
  double worst = 0.0;
  Gen gen(202);
  for (std::size_t side : kSides) {
    const Shape s{side, side};
    for (double r : kRatios) {
      const auto g = geometry_for_ratio(r, s);
      for (int k = 0; k < 10; ++k) {
        const RealGrid x = gen.real_grid(s);
        const RealGrid z = gen.real_grid(s);
        const Eigen::VectorXd xv = oracle::flatten(x), zv = oracle::flatten(z);
        const double lhs = oracle::flatten(apply_transfer(x, g)).dot(zv);
        const double rhs = xv.dot(oracle::flatten(apply_adjoint(z, g)));
        worst = std::max(worst, std::abs(lhs - rhs) / (xv.norm() * zv.norm()));
      }
    }
  }
  return {worst <= 1e-10, fmt("max |<Ax,z>-<x,A^T z>|/(|x||z|) %.3e (bound 1e-10)", worst)};
}

// Deviation of a WL×WL matrix from identity on the central W/r block of
// indices and zero elsewhere.
template <typename M>
std::pair<double, double> block_deviation(const M& m, std::size_t side, double r) {
  const auto half = static_cast<long>(std::llround(side / (2.0 * r)));
  const auto center = static_cast<long>(side / 2);
  auto low = [&](Eigen::Index i) {
    const long x = static_cast<long>(i % side) - center;
    const long y = static_cast<long>(i / side) - center;
    return x >= -half && x < half && y >= -half && y < half;
  };
  double in = 0.0, out = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (low(i) && low(j)) {
        in = std::max(in, std::abs(m(i, j) - (i == j ? 1.0 : 0.0)));
      } else {
        out = std::max(out, std::abs(m(i, j)));
      }
    }
  }
  return {in, out};
}

Outcome gram_structure() {
  const std::size_t side = 8;
  const Shape s{side, side};
  const double r = 2.0;
  const auto g = geometry_for_ratio(r, s);
  const double tol = 1e-10;

  // Autocorrelation basis: x = F a, so the Gram matrix acts on a as F⁻¹ AᵀA F.
  const Eigen::MatrixXcd f = oracle::dft_matrix(s);
  const Eigen::MatrixXcd finv = f.inverse();
  auto in_acf_basis = [&](const Eigen::MatrixXd& a) {
    const Eigen::MatrixXcd gram = (a.transpose() * a).cast<std::complex<double>>();
    return Eigen::MatrixXcd(finv * gram * f);
  };

  const Eigen::MatrixXd reduced = oracle::to_eigen(dense_matrix(g));
  const auto [in, out] = block_deviation(in_acf_basis(reduced), side, r);

  const Eigen::MatrixXd full = oracle::to_eigen(dense_matrix(g, DenseRange::full));
  const auto [fin, fout] = block_deviation(Eigen::MatrixXd(full.transpose() * full), side, r);
  std::printf("  supplementary: full-range operator, pattern basis: low-block deviation %.3e, "
              "outside %.3e\n",
              fin, fout);

  std::string detail = "autocorrelation basis, detector operator: low-block deviation from I " +
                       fmt("%.3e", in) + ", max outside " + fmt("%.3e", out) + " (bound 1e-10)";
  return {in <= tol && out <= tol, detail};
}

Outcome route_equivalence() {
  struct Setup {
    const char* name;
    Spectrum spectrum;
    Shape detector;
    Shape object;
  };
  const std::vector<int> orders{3, 5, 7, 9, 11};
  const std::vector<double> weights{0.2, 0.4, 0.4, 0.3, 0.2};
  const std::vector<Setup> setups{
      {"harmonics", harmonics_spectrum(orders, weights), {128, 128}, {64, 64}},
      {"continuous", continuous_spectrum(2.5, 0.8, 384).normalized_to_unit_sum(), {96, 96},
       {48, 48}},
  };

  double worst = 0.0;
  double negative = std::numeric_limits<double>::infinity();
  for (const auto& st : setups) {
    const PolychromaticOperator op = st.spectrum.bind(st.detector);
    for (const char* src : {"disk", "digit:3"}) {
      PhantomOptions opts;
      opts.object_shape = st.object;
      const Phantom p = load_phantom(src, st.detector, opts);
      const double e = oracle::relative_error(simulate_poly_independent(p, st.spectrum),
                                              apply_poly(simulate_mono(p), op));
      std::printf("  %s %s: %.3e\n", st.name, src, e);
      worst = std::max(worst, e);
    }
    // Oversampling 1.5: the object's autocorrelation no longer fits.
    PhantomOptions under;
    const auto side = static_cast<std::size_t>(2 * std::llround(st.detector.width / 3.0));
    under.object_shape = Shape{side, side};
    under.allow_undersampled = true;
    const Phantom p = load_phantom("digit:3", st.detector, under);
    const double e = oracle::relative_error(simulate_poly_independent(p, st.spectrum),
                                            apply_poly(simulate_mono(p), op));
    std::printf("  %s digit:3 at oversampling 1.5: %.3e\n", st.name, e);
    negative = std::min(negative, e);
  }
  return {worst <= 1e-10 && negative > 1e-10,
          fmt("max route difference %.3e (bound 1e-10); ", worst) +
              fmt("undersampled minimum %.3e (must exceed bound)", negative)};
}

struct PipelineRun {
  MonoReport mono;
  MetricsReport metrics;
  std::map<std::string, std::string> hashes;
};

// simulate -> mono -> reconstruct -> metrics, hashing every data output.
PipelineRun run_pipeline(const RunConfig& cfg, const fs::path& dir) {
  RunContext ctx;
  ctx.out_dir = dir;
  ctx.invocation = "acceptance";
  PipelineRun run;
  cmd_simulate(cfg, ctx);
  run.mono = cmd_monochromatize(cfg, ctx);
  cmd_reconstruct(cfg, ctx);
  run.metrics = cmd_metrics(cfg, ctx);
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.find("provenance") != std::string::npos) continue;  // records the thread count
    run.hashes[name] = sha256_file(e.path());
  }
  return run;
}

Outcome fig3_analogue() {
  const RunConfig cfg = load_run_config(kConfigs / "harmonics.yaml");
  const fs::path dir = scratch("fig3");
  const PipelineRun raar = run_pipeline(cfg, dir);

  RunConfig hio = cfg;
  hio.retrieval.algorithm = RetrievalAlgorithm::hio;
  hio.retrieval.iterations = 2000;
  RunContext ctx;
  ctx.out_dir = dir;
  cmd_reconstruct(hio, ctx);
  const MetricsReport hio_metrics = cmd_metrics(hio, ctx);

  const double low = raar.metrics.nrmse_low;
  const double best = std::max(raar.metrics.registration, hio_metrics.registration);
  std::printf("  iterations %zu, final relative residual %.3e\n", raar.mono.iterations,
              raar.mono.final_relative_residual);
  std::printf("  registration: RAAR %.4f, HIO %.4f\n", raar.metrics.registration,
              hio_metrics.registration);
  return {raar.mono.iterations <= 500 && low <= 0.05 && best >= 0.9,
          fmt("low-frequency NRMSE %.3e (bound 0.05); ", low) +
              fmt("best registration %.4f (bound 0.9)", best)};
}

Outcome fig4_analogue() {
  const RunConfig cfg = load_run_config(kConfigs / "continuous.yaml");
  const std::size_t channels = cfg.spectrum.build().bind(cfg.phantom.detector).channels().size();
  const std::size_t at64 = cfg.spectrum.build().bind(Shape{64, 64}).channels().size();
  std::printf("  distinct merged channels: %zu at %zux%zu, %zu at 64x64\n", channels,
              cfg.phantom.detector.width, cfg.phantom.detector.height, at64);

  const PipelineRun run = run_pipeline(cfg, scratch("fig4"));
  const double first = run.metrics.residual_first;
  const double last = run.mono.final_relative_residual;
  const double reduction = first / last;
  std::printf("  relative residual %.3e -> %.3e over %zu iterations\n", first, last,
              run.mono.iterations);
  const bool pass = channels >= 64 && run.mono.iterations <= 500 && reduction >= 100.0 &&
                    run.metrics.nrmse_low <= 0.1 && run.metrics.registration >= 0.85;
  return {pass, fmt("residual reduction %.1fx (bound 100x); ", reduction) +
                    fmt("low-frequency NRMSE %.3e (bound 0.1); ", run.metrics.nrmse_low) +
                    fmt("correlation %.4f (bound 0.85)", run.metrics.registration)};
}

Outcome leakage_contrast() {
  const Shape detector{128, 128};
  PhantomOptions opts;
  opts.object_shape = Shape{64, 64};
  const RealGrid mono = simulate_mono(load_phantom("digit:3", detector, opts));
  const double r = 2.0;
  const Shape region{detector.width / 2, detector.height / 2};
  const double fft = autocorrelation_leakage(apply_transfer(mono, geometry_for_ratio(r, detector)), region);
  const double interp = autocorrelation_leakage(interpolation_transfer(mono, r), region);
  const double ratio = interp / fft;
  return {ratio >= 100.0, fmt("leakage FFT %.3e, ", fft) + fmt("interpolation %.3e, ", interp) +
                              fmt("ratio %.1fx (bound 100x)", ratio)};
}

Outcome gradient_check() {
  const Shape s{16, 16};
  const Spectrum spectrum({{1.0, 0.5}, {1.5, 0.3}, {2.2, 0.2}});
  const PolychromaticOperator op = spectrum.bind(s);
  if (op.channels().size() != 3) return {false, "expected 3 distinct channels"};
  Gen gen(808);
  const RealGrid x = gen.real_grid(s, 0.0, 1.0);
  const RealGrid b = gen.real_grid(s, 0.0, 1.0);
  const RealGrid grad = gradient(residual(x, b, op).delta_b, op);

  std::vector<std::size_t> coords(s.size());
  for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = i;
  const auto fd = oracle::central_differences(
      [&](const RealGrid& y) { return residual(y, b, op).epsilon; }, x, coords, 1e-4);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    num += (fd[i] - grad[i]) * (fd[i] - grad[i]);
    den += grad[i] * grad[i];
  }
  const double rel = std::sqrt(num / den);
  return {rel <= 1e-6, fmt("relative error %.3e over all 256 coordinates (bound 1e-6)", rel)};
}

Outcome determinism() {
  bool pass = true;
  std::string detail;
  for (const char* name : {"harmonics", "continuous"}) {
    const RunConfig cfg = load_run_config(kConfigs / (std::string(name) + ".yaml"));
    std::vector<std::map<std::string, std::string>> hashes;
    for (std::size_t threads : {1, 1, 4}) {
      set_thread_count(threads);
      hashes.push_back(run_pipeline(cfg, scratch(std::string("det_") + name)).hashes);
    }
    set_thread_count(0);
    const bool same = hashes[0] == hashes[1] && hashes[0] == hashes[2];
    std::printf("  %s: %zu outputs, %s\n", name, hashes[0].size(),
                same ? "bit-identical" : "DIFFER");
    pass = pass && same && !hashes[0].empty();
    if (!detail.empty()) detail += "; ";
    detail += std::string(name) + (same ? " identical" : " differs");
  }
  return {pass, detail + " (two runs at 1 thread, one at 4)"};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0: no runtime bound
  Outcome (*run)();
};

const std::vector<Criterion> kCriteria{
    {1, "operator vs dense oracle", 10, operator_oracle},
    {2, "adjoint identity", 5, adjoint_identity},
    {3, "Gram block structure at 8x8, r=2", 5, gram_structure},
    {4, "route equivalence", 30, route_equivalence},
    {5, "five-harmonic recovery and reconstruction", 300, fig3_analogue},
    {6, "continuous-spectrum recovery and reconstruction", 600, fig4_analogue},
    {7, "interpolation leakage contrast", 10, leakage_contrast},
    {8, "finite-difference gradient", 5, gradient_check},
    {9, "determinism across runs and thread counts", 0, determinism},
};

bool run_one(const Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = c.budget_s == 0 || secs < c.budget_s;
  const bool pass = o.pass && in_time;
  std::string timing = fmt("%.1f s", secs);
  if (c.budget_s > 0) timing += fmt(" / budget %.0f s", c.budget_s);
  std::printf("criterion %d [%s]: %s | %s | %s\n", c.id, c.name, pass ? "PASS" : "FAIL",
              o.detail.c_str(), timing.c_str());
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  bool all = true;
  bool found = false;
  for (const auto& c : kCriteria) {
    if (only != 0 && c.id != only) continue;
    found = true;
    all = run_one(c) && all;
  }
  if (!found) {
    std::fprintf(stderr, "no criterion %d\n", only);
    return 2;
  }
  return all ? 0 : 1;
}
