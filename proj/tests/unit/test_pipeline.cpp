#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bcdi/config.hpp"
#include "bcdi/pattern_file.hpp"
#include "bcdi/pipeline.hpp"
#include "bcdi/simulate.hpp"

namespace bcdi {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("bcdi_pipeline_" + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream is(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

// Small, quick configuration: 16×16 object on a 32×32 detector.
RunConfig small_config(const std::string& spectrum_yaml) {
  return parse_run_config(R"(
seed: 11
phantom:
  source: digit:2
  object: [16, 16]
  detector: [32, 32]
)" + spectrum_yaml + R"(
solver:
  max_iter: 40
retrieval:
  iterations: 60
  starts: 2
)");
}

const char* kOctave = "spectrum:\n  form: table\n  ratios: [1, 2]\n  weights: [0.5, 0.5]\n";

TEST(Pipeline, MonoOnlyPolyFileEqualsMonoFile) {
  TempDir dir;
  const RunConfig cfg = small_config("");
  const SimulateReport rep = cmd_simulate(cfg, {dir.path(), "test"});
  EXPECT_EQ(rep.spectrum_channels, 1u);
  EXPECT_EQ(slurp(rep.poly), slurp(rep.mono));

  const MonoReport mono = cmd_monochromatize(cfg, {dir.path(), "test"});
  EXPECT_EQ(read_pattern(mono.recovered), read_pattern(rep.poly));
  EXPECT_EQ(mono.final_relative_residual, 0.0);
  EXPECT_TRUE(mono.converged);
}

TEST(Pipeline, SimulateWritesFilesAndProvenance) {
  TempDir dir;
  const RunConfig cfg = small_config(kOctave);
  const SimulateReport rep = cmd_simulate(cfg, {dir.path(), "bcdi simulate"});
  const RealGrid phantom = read_pattern(rep.phantom);
  EXPECT_EQ(phantom.domain(), Domain::object);
  EXPECT_EQ(phantom.shape(), (Shape{32, 32}));
  EXPECT_EQ(read_pattern(rep.mono).domain(), Domain::pattern);

  const auto doc = nlohmann::json::parse(slurp(rep.provenance));
  EXPECT_EQ(doc["command"], "simulate");
  EXPECT_EQ(doc["version"], kVersion);
  EXPECT_EQ(doc["seed"], 11);
  EXPECT_EQ(doc["invocation"], "bcdi simulate");
  EXPECT_EQ(doc["config_sha256"], sha256_hex(cfg.source_text));
  EXPECT_EQ(doc["realized_spectrum"].size(), 2u);
  EXPECT_EQ(doc["realized_spectrum"][1]["realized_ratio_x"], 2.0);
  ASSERT_EQ(doc["outputs"].size(), 3u);
  EXPECT_EQ(doc["outputs"][2]["sha256"], sha256_file(rep.poly));
  // The recorded config text is enough to redo the run bit for bit.
  TempDir again;
  const SimulateReport rerun =
      cmd_simulate(parse_run_config(doc["config"].get<std::string>()), {again.path(), "rerun"});
  EXPECT_EQ(sha256_file(rerun.poly), doc["outputs"][2]["sha256"]);
}

TEST(Pipeline, RecipeChannelCounts) {
  TempDir dir;
  RunConfig fig3 = load_run_config(BCDI_CONFIG_DIR "/harmonics.yaml");
  EXPECT_EQ(cmd_simulate(fig3, {dir.path(), "t"}).spectrum_channels, 5u);
  RunConfig fig4 = load_run_config(BCDI_CONFIG_DIR "/continuous.yaml");
  const SimulateReport r4 = cmd_simulate(fig4, {dir.path(), "t"});
  EXPECT_EQ(r4.spectrum_channels, 384u);
  EXPECT_LE(r4.merged_channels, 384u);
  EXPECT_EQ(r4.merged_channels, 65u);
}

TEST(Pipeline, SingleIterationGivesOneResidualRow) {
  TempDir dir;
  RunConfig cfg = small_config(kOctave);
  cfg.solver.max_iter = 1;
  cmd_simulate(cfg, {dir.path(), "t"});
  const MonoReport rep = cmd_monochromatize(cfg, {dir.path(), "t"});
  const auto rows = lines(rep.residual);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "iteration,epsilon,relative_residual");
  EXPECT_EQ(rows[1].substr(0, 2), "0,");
  EXPECT_EQ(rep.iterations, 1u);
}

TEST(Pipeline, ReconstructEmitsOneTracePerStart) {
  TempDir dir;
  RunConfig cfg = small_config("");
  cfg.starts = 8;
  cmd_simulate(cfg, {dir.path(), "t"});
  cmd_monochromatize(cfg, {dir.path(), "t"});
  const ReconstructReport rep = cmd_reconstruct(cfg, {dir.path(), "t"});
  ASSERT_EQ(rep.traces.size(), 8u);
  ASSERT_EQ(rep.final_errors.size(), 8u);
  for (const auto& t : rep.traces) {
    EXPECT_TRUE(fs::exists(t));
    EXPECT_EQ(lines(t).size(), 61u);
    EXPECT_EQ(lines(t)[0], "iteration,fourier_error,support_area");
  }
  for (double e : rep.final_errors) EXPECT_LE(rep.final_errors[rep.best], e);
  const auto doc = nlohmann::json::parse(slurp(rep.provenance));
  EXPECT_EQ(doc["best"], rep.best);
  EXPECT_EQ(doc["starts"][3]["seed"], 14);
}

TEST(Pipeline, ReconstructIsHashStable) {
  TempDir a;
  TempDir b;
  RunConfig cfg = small_config(kOctave);
  cfg.starts = 1;
  for (const TempDir* d : {&a, &b}) {
    cmd_simulate(cfg, {d->path(), "t"});
    cmd_monochromatize(cfg, {d->path(), "t"});
    cmd_reconstruct(cfg, {d->path(), "t"});
  }
  EXPECT_EQ(sha256_file(a.path() / "object.bcdi"), sha256_file(b.path() / "object.bcdi"));
  EXPECT_EQ(sha256_file(a.path() / "mono_recovered.bcdi"), sha256_file(b.path() / "mono_recovered.bcdi"));
}

TEST(Pipeline, MetricsExamples) {
  TempDir dir;
  RunConfig cfg = small_config(kOctave);
  cmd_simulate(cfg, {dir.path(), "t"});

  cfg.metrics.candidate = "mono.bcdi";
  cfg.metrics.reference = "mono.bcdi";
  MetricsReport same = cmd_metrics(cfg, {dir.path(), "t"});
  EXPECT_EQ(same.nrmse_full, 0.0);
  EXPECT_EQ(same.nrmse_low, 0.0);
  EXPECT_EQ(same.r_max, 2.0);
  EXPECT_FALSE(same.has_registration);

  write_pattern(dir.path() / "zero.bcdi", RealGrid({32, 32}));
  cfg.metrics.candidate = "zero.bcdi";
  EXPECT_EQ(cmd_metrics(cfg, {dir.path(), "t"}).nrmse_full, 1.0);

  cfg.metrics.candidate = "poly.bcdi";
  const MetricsReport rep = cmd_metrics(cfg, {dir.path(), "t"});
  const RealGrid mono = read_pattern(dir.path() / "mono.bcdi");
  const RealGrid poly = read_pattern(dir.path() / "poly.bcdi");
  EXPECT_NEAR(rep.nrmse_full, pattern_nrmse(poly, mono, NrmseRegion::full), 1e-12);
  EXPECT_NEAR(rep.nrmse_low, pattern_nrmse(poly, mono, NrmseRegion::low_frequency, 2.0), 1e-12);
  const auto csv = lines(rep.csv);
  ASSERT_GE(csv.size(), 3u);
  EXPECT_EQ(csv[0], "metric,value");
  EXPECT_NEAR(std::stod(csv[1].substr(csv[1].find(',') + 1)), rep.nrmse_full, 1e-15);
}

TEST(Pipeline, FullChainComposesWithoutExtraSettings) {
  TempDir dir;
  RunConfig cfg = small_config(kOctave);
  const RunContext ctx{dir.path(), "t"};
  cmd_simulate(cfg, ctx);
  cmd_monochromatize(cfg, ctx);
  cmd_reconstruct(cfg, ctx);
  const MetricsReport m = cmd_metrics(cfg, ctx);
  EXPECT_TRUE(m.has_registration);
  EXPECT_TRUE(m.has_residual);
  EXPECT_EQ(m.residual_rows, 40u);
  EXPECT_LT(m.residual_last, m.residual_first);
  const fs::path png = cmd_render(cfg, ctx);
  EXPECT_EQ(png, dir.path() / "poly.png");
  EXPECT_TRUE(fs::exists(dir.path() / "poly.provenance.json"));
  for (const char* f : {"simulate.provenance.json", "mono.provenance.json", "reconstruct.provenance.json",
                        "metrics.provenance.json"}) {
    EXPECT_TRUE(fs::exists(dir.path() / f)) << f;
  }
}

TEST(Pipeline, MissingInputIsIoError) {
  TempDir dir;
  EXPECT_THROW(cmd_monochromatize(small_config(kOctave), {dir.path(), "t"}), IoError);
  EXPECT_THROW(cmd_reconstruct(small_config(kOctave), {dir.path(), "t"}), IoError);
}

TEST(Pipeline, DownstreamCommandsTakeShapeFromTheirInput) {
  TempDir dir;
  RunConfig cfg = small_config(kOctave);
  cmd_simulate(cfg, {dir.path(), "t"});
  cfg.phantom.detector = {64, 64};
  const MonoReport rep = cmd_monochromatize(cfg, {dir.path(), "t"});
  EXPECT_EQ(read_pattern(rep.recovered).shape(), (Shape{32, 32}));
}

TEST(Pipeline, MismatchedMetricsInputsAreShapeErrors) {
  TempDir dir;
  RunConfig cfg = small_config(kOctave);
  cmd_simulate(cfg, {dir.path(), "t"});
  write_pattern(dir.path() / "small.bcdi", RealGrid({16, 16}));
  cfg.metrics.candidate = "small.bcdi";
  EXPECT_THROW(cmd_metrics(cfg, {dir.path(), "t"}), ShapeError);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + BCDI_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  os << text;
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  const fs::path good = dir.path() / "good.yaml";
  write_text(good, "phantom:\n  source: digit:2\n  object: [16, 16]\n  detector: [32, 32]\n" +
                       std::string(kOctave) + "solver:\n  max_iter: 5\nretrieval:\n  iterations: 20\n  starts: 1\n");
  const std::string out = " --out \"" + dir.path().string() + "\"";

  EXPECT_EQ(run_cli("simulate --config \"" + good.string() + "\"" + out), 0);
  EXPECT_EQ(run_cli("mono --config \"" + good.string() + "\"" + out), 0);
  EXPECT_EQ(run_cli("reconstruct --config \"" + good.string() + "\"" + out + " --threads 1"), 0);
  EXPECT_EQ(run_cli("metrics" + out), 0);
  EXPECT_EQ(run_cli("render \"" + (dir.path() / "mono.bcdi").string() + "\" --scale linear" + out), 0);
  EXPECT_TRUE(fs::exists(dir.path() / "mono.png"));

  const fs::path typo = dir.path() / "typo.yaml";
  write_text(typo, "solver:\n  max_iters: 5\n");
  EXPECT_EQ(run_cli("simulate --config \"" + typo.string() + "\"" + out), 2);
  EXPECT_EQ(run_cli("simulate --no-such-flag"), 2);
  EXPECT_EQ(run_cli("simulate --config \"" + (dir.path() / "missing.yaml").string() + "\""), 3);

  TempDir empty;
  EXPECT_EQ(run_cli("mono --config \"" + good.string() + "\" --out \"" + empty.path().string() + "\""), 3);

  const fs::path wild = dir.path() / "wild.yaml";
  write_text(wild,
             "phantom:\n  source: digit:2\n  object: [16, 16]\n  detector: [32, 32]\n"
             "spectrum:\n  form: table\n  ratios: [1, 2]\n  weights: [10, 10]\n"
             "solver:\n  max_iter: 200\n  projection: false\n"
             "paths:\n  recovered: wild.bcdi\n");
  EXPECT_EQ(run_cli("simulate --config \"" + wild.string() + "\"" + out), 0);
  EXPECT_EQ(run_cli("mono --config \"" + wild.string() + "\"" + out), 4);
  EXPECT_FALSE(fs::exists(dir.path() / "wild.bcdi"));
}

}  // namespace
}  // namespace bcdi
