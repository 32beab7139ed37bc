// bcdi: simulate, monochromatize, reconstruct, score and render broadband
// diffraction data.
//
// Exit codes: 0 ok, 2 config error, 3 I/O error, 4 numerical divergence.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bcdi/config.hpp"
#include "bcdi/error.hpp"
#include "bcdi/parallel.hpp"
#include "bcdi/pipeline.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitDivergence = 4;

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::vector<std::string> files;
  std::string scale;
  std::optional<double> log_decades;
  std::optional<double> gamma;
};

bcdi::RunConfig load(const Options& o) {
  bcdi::RunConfig cfg = o.config.empty() ? bcdi::parse_run_config("") : bcdi::load_run_config(o.config);
  if (o.seed) {
    cfg.seed = *o.seed;
    cfg.retrieval.seed = *o.seed;
  }
  std::size_t threads = cfg.threads;
  if (threads == 0) threads = bcdi::thread_count_from_env();
  if (o.threads) threads = *o.threads;
  bcdi::set_thread_count(threads);
  return cfg;
}

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i > 0) s += ' ';
    s += argv[i];
  }
  return s;
}

void add_common(CLI::App* cmd, Options& o, bool config_required) {
  auto* c = cmd->add_option("--config,-c", o.config, "Run configuration (YAML)");
  if (config_required) c->required();
  cmd->add_option("--out,-o", o.out, "Output directory; relative paths in the config resolve here")
      ->capture_default_str();
  cmd->add_option("--seed", o.seed, "Override the config seed");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all; default from BCDI_THREADS)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Broadband coherent diffraction imaging: monochromatization and phase retrieval"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bcdi::kVersion));
  app.footer("Configuration keys and defaults:\n\n" + bcdi::config_reference());
  Options o;

  auto* sim = app.add_subcommand("simulate", "Phantom, mono pattern and broadband pattern");
  add_common(sim, o, true);
  auto* mono = app.add_subcommand("mono", "Recover the monochromatic pattern from a broadband one");
  add_common(mono, o, true);
  auto* rec = app.add_subcommand("reconstruct", "Phase retrieval with best-of-N restarts");
  add_common(rec, o, true);
  auto* met = app.add_subcommand("metrics", "NRMSE, registration and residual summary");
  add_common(met, o, false);
  met->add_option("files", o.files, "candidate reference [object object_reference]");
  auto* ren = app.add_subcommand("render", "16-bit PNG of a pattern or object file");
  add_common(ren, o, false);
  ren->add_option("files", o.files, "input [output]");
  ren->add_option("--scale", o.scale, "log or linear")->check(CLI::IsMember({"log", "linear"}));
  ren->add_option("--log-decades", o.log_decades, "Decades shown by the log scale");
  ren->add_option("--gamma", o.gamma, "Display gamma");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    bcdi::RunConfig cfg = load(o);
    bcdi::RunContext ctx{o.out, join_args(argc, argv)};

    if (sim->parsed()) {
      const auto rep = bcdi::cmd_simulate(cfg, ctx);
      std::cout << "wrote " << rep.phantom.string() << ", " << rep.mono.string() << ", "
                << rep.poly.string() << " (" << rep.spectrum_channels << " channels, "
                << rep.merged_channels << " after merging)\n";
    } else if (mono->parsed()) {
      const auto rep = bcdi::cmd_monochromatize(cfg, ctx);
      std::cout << "wrote " << rep.recovered.string() << " after " << rep.iterations
                << " iterations, relative residual " << rep.final_relative_residual << "\n";
    } else if (rec->parsed()) {
      const auto rep = bcdi::cmd_reconstruct(cfg, ctx);
      std::cout << "wrote " << rep.object.string() << " from start " << rep.best << " of "
                << rep.final_errors.size() << ", fourier error " << rep.final_errors[rep.best]
                << "\n";
    } else if (met->parsed()) {
      if (!o.files.empty()) cfg.metrics.candidate = o.files[0];
      if (o.files.size() > 1) cfg.metrics.reference = o.files[1];
      if (o.files.size() > 2) cfg.metrics.object = o.files[2];
      if (o.files.size() > 3) cfg.metrics.object_reference = o.files[3];
      const auto rep = bcdi::cmd_metrics(cfg, ctx);
      std::cout << "nrmse_full " << rep.nrmse_full << "\nnrmse_low_frequency " << rep.nrmse_low
                << "\n";
      if (rep.has_registration) std::cout << "registration " << rep.registration << "\n";
      if (rep.has_residual) {
        std::cout << "residual " << rep.residual_first << " -> " << rep.residual_last << " over "
                  << rep.residual_rows << " rows\n";
      }
    } else if (ren->parsed()) {
      if (!o.files.empty()) cfg.render.input = o.files[0];
      if (o.files.size() > 1) cfg.render.output = o.files[1];
      if (o.scale == "log") cfg.render.options.scale = bcdi::RenderScale::log;
      if (o.scale == "linear") cfg.render.options.scale = bcdi::RenderScale::linear;
      if (o.log_decades) cfg.render.options.log_decades = *o.log_decades;
      if (o.gamma) cfg.render.options.gamma = *o.gamma;
      std::cout << "wrote " << bcdi::cmd_render(cfg, ctx).string() << "\n";
    }
  } catch (const bcdi::DivergenceError& e) {
    std::cerr << "bcdi: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const bcdi::IoError& e) {
    std::cerr << "bcdi: " << e.what() << "\n";
    return kExitIo;
  } catch (const bcdi::ConfigError& e) {
    std::cerr << "bcdi: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const bcdi::ShapeError& e) {
    std::cerr << "bcdi: " << e.what() << "\n";
    return kExitConfig;
  } catch (const bcdi::Error& e) {
    std::cerr << "bcdi: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
