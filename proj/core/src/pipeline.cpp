#include "bcdi/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "bcdi/parallel.hpp"
#include "bcdi/pattern_file.hpp"
#include "bcdi/phantom.hpp"

namespace bcdi {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path RunContext::resolve(const std::string& name) const {
  const fs::path p(name);
  return p.is_absolute() ? p : out_dir / p;
}

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

json channel_table(const PolychromaticOperator& op) {
  json rows = json::array();
  for (const auto& c : op.channels()) {
    rows.push_back({{"requested_ratio", c.geometry.requested_ratio},
                    {"realized_ratio_x", c.geometry.realized_ratio_x()},
                    {"realized_ratio_y", c.geometry.realized_ratio_y()},
                    {"pad_x", c.geometry.pad_x},
                    {"pad_y", c.geometry.pad_y},
                    {"weight", c.weight},
                    {"merged", c.merged}});
  }
  return rows;
}

json base_provenance(const char* command, const RunConfig& cfg, const RunContext& ctx) {
  return {{"command", command},
          {"version", kVersion},
          {"invocation", ctx.invocation},
          {"seed", cfg.seed},
          {"threads", thread_count()},
          {"config_sha256", sha256_hex(cfg.source_text)},
          {"config", cfg.source_text}};
}

json file_entry(const fs::path& p) { return {{"path", p.string()}, {"sha256", sha256_file(p)}}; }

fs::path write_provenance(const fs::path& path, const json& doc) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << doc.dump(2) << '\n';
  if (!os) throw IoError("write failed for " + path.string());
  return path;
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << std::setprecision(17);
  return os;
}

RealGrid read_checked(const fs::path& path, Shape expected) {
  RealGrid g = read_pattern(path);
  if (g.shape() != expected) {
    throw ShapeError(path.string() + " is " + to_string(g.shape()) + " but the config expects " +
                     to_string(expected));
  }
  return g;
}

}  // namespace

void write_residual_csv(const fs::path& path, const std::vector<double>& trace, double b_norm) {
  std::ofstream os = open_csv(path);
  os << "iteration,epsilon,relative_residual\n";
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double rel = b_norm > 0.0 ? std::sqrt(trace[k]) / b_norm : 0.0;
    os << k << ',' << trace[k] << ',' << rel << '\n';
  }
  if (!os) throw IoError("write failed for " + path.string());
}

void write_retrieval_csv(const fs::path& path, const std::vector<RetrievalTraceRow>& trace) {
  std::ofstream os = open_csv(path);
  os << "iteration,fourier_error,support_area\n";
  for (const auto& row : trace) {
    os << row.iteration << ',' << row.fourier_error << ',' << row.support_area << '\n';
  }
  if (!os) throw IoError("write failed for " + path.string());
}

SimulateReport cmd_simulate(const RunConfig& cfg, const RunContext& ctx) {
  ensure_dir(ctx.out_dir);
  PhantomOptions opts;
  opts.object_shape = cfg.phantom.object;
  opts.seed = cfg.seed;
  opts.allow_undersampled = cfg.phantom.allow_undersampled;
  const Phantom p = load_phantom(cfg.phantom.source, cfg.phantom.detector, opts);
  const Spectrum spectrum = cfg.spectrum.build();
  const PolychromaticOperator op = spectrum.bind(p.embedded.shape());

  const RealGrid mono = simulate_mono(p);
  const RealGrid poly = add_noise(simulate_poly_independent(p, spectrum), cfg.noise, cfg.seed);

  SimulateReport rep;
  rep.phantom = ctx.resolve(cfg.paths.phantom);
  rep.mono = ctx.resolve(cfg.paths.mono);
  rep.poly = ctx.resolve(cfg.paths.poly);
  write_pattern(rep.phantom, p.embedded);
  write_pattern(rep.mono, mono);
  write_pattern(rep.poly, poly);
  rep.spectrum_channels = spectrum.size();
  rep.merged_channels = op.channels().size();

  json doc = base_provenance("simulate", cfg, ctx);
  doc["phantom"] = {{"source", p.source},
                    {"kind", to_string(p.kind)},
                    {"object", {p.object.width(), p.object.height()}},
                    {"detector", {p.embedded.width(), p.embedded.height()}},
                    {"oversampling", p.oversampling()}};
  doc["spectrum_channels"] = rep.spectrum_channels;
  doc["realized_spectrum"] = channel_table(op);
  doc["outputs"] = {file_entry(rep.phantom), file_entry(rep.mono), file_entry(rep.poly)};
  rep.provenance = write_provenance(ctx.resolve("simulate.provenance.json"), doc);
  return rep;
}

MonoReport cmd_monochromatize(const RunConfig& cfg, const RunContext& ctx) {
  ensure_dir(ctx.out_dir);
  const fs::path in = ctx.resolve(cfg.paths.poly);
  const RealGrid b = read_pattern(in);
  const PolychromaticOperator op = cfg.spectrum.build().bind(b.shape());
  const SolveResult res = solve(b, op, cfg.solver);

  MonoReport rep;
  rep.recovered = ctx.resolve(cfg.paths.recovered);
  rep.residual = ctx.resolve(cfg.paths.residual);
  RealGrid x = res.x;
  x.set_domain(Domain::pattern);
  write_pattern(rep.recovered, x);
  write_residual_csv(rep.residual, res.trace, res.b_norm);
  rep.iterations = res.iterations();
  rep.final_relative_residual = res.final_relative_residual();
  rep.converged = res.converged;

  json doc = base_provenance("mono", cfg, ctx);
  doc["inputs"] = {file_entry(in)};
  doc["realized_spectrum"] = channel_table(op);
  doc["iterations"] = rep.iterations;
  doc["final_relative_residual"] = rep.final_relative_residual;
  doc["converged"] = rep.converged;
  doc["outputs"] = {file_entry(rep.recovered), file_entry(rep.residual)};
  rep.provenance = write_provenance(ctx.resolve("mono.provenance.json"), doc);
  return rep;
}

ReconstructReport cmd_reconstruct(const RunConfig& cfg, const RunContext& ctx) {
  ensure_dir(ctx.out_dir);
  const fs::path in = ctx.resolve(cfg.paths.recovered);
  const RealGrid pattern = read_pattern(in);
  RetrievalConfig rc = cfg.retrieval;
  rc.seed = cfg.seed;
  const MultiStartResult runs = reconstruct_best_of(pattern, rc, cfg.starts);

  ReconstructReport rep;
  rep.best = runs.best;
  rep.object = ctx.resolve(cfg.paths.object);
  write_pattern(rep.object, runs.best_run().object);
  json starts = json::array();
  for (std::size_t k = 0; k < runs.runs.size(); ++k) {
    const auto& r = runs.runs[k];
    const fs::path trace = ctx.resolve("error_trace_" + std::to_string(k) + ".csv");
    write_retrieval_csv(trace, r.trace);
    rep.traces.push_back(trace);
    rep.final_errors.push_back(r.final_error);
    starts.push_back({{"index", k},
                      {"seed", r.seed},
                      {"final_fourier_error", r.final_error},
                      {"support_area", r.support.area()},
                      {"trace", trace.string()}});
  }

  json doc = base_provenance("reconstruct", cfg, ctx);
  doc["inputs"] = {file_entry(in)};
  doc["clipped_fraction"] = runs.best_run().clipped_fraction;
  doc["starts"] = starts;
  doc["best"] = rep.best;
  doc["outputs"] = {file_entry(rep.object)};
  rep.provenance = write_provenance(ctx.resolve("reconstruct.provenance.json"), doc);
  return rep;
}

MetricsReport cmd_metrics(const RunConfig& cfg, const RunContext& ctx) {
  ensure_dir(ctx.out_dir);
  const fs::path cand_path = ctx.resolve(cfg.metrics.candidate);
  const fs::path ref_path = ctx.resolve(cfg.metrics.reference);
  const RealGrid ref = read_pattern(ref_path);
  const RealGrid cand = read_checked(cand_path, ref.shape());

  MetricsReport rep;
  rep.r_max = cfg.spectrum.build().bind(ref.shape()).max_realized_ratio();
  rep.nrmse_full = pattern_nrmse(cand, ref, NrmseRegion::full);
  rep.nrmse_low = pattern_nrmse(cand, ref, NrmseRegion::low_frequency, rep.r_max);

  json doc = base_provenance("metrics", cfg, ctx);
  json inputs = {file_entry(cand_path), file_entry(ref_path)};

  if (!cfg.metrics.object.empty() && !cfg.metrics.object_reference.empty()) {
    const fs::path obj_path = ctx.resolve(cfg.metrics.object);
    const fs::path oref_path = ctx.resolve(cfg.metrics.object_reference);
    if (fs::exists(obj_path) && fs::exists(oref_path)) {
      const RealGrid oref = read_pattern(oref_path);
      const RealGrid obj = read_checked(obj_path, oref.shape());
      const Registration reg = register_and_compare(obj, oref);
      rep.has_registration = true;
      rep.registration = reg.score;
      doc["registration"] = {{"score", reg.score},
                             {"shift", {reg.shift_x, reg.shift_y}},
                             {"twin", reg.twin}};
      inputs.push_back(file_entry(obj_path));
      inputs.push_back(file_entry(oref_path));
    }
  }

  const fs::path residual_path = ctx.resolve(cfg.paths.residual);
  if (fs::exists(residual_path)) {
    std::ifstream is(residual_path);
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
      const auto last = line.rfind(',');
      if (last == std::string::npos) continue;
      const double rel = std::stod(line.substr(last + 1));
      if (rep.residual_rows == 0) rep.residual_first = rel;
      rep.residual_last = rel;
      ++rep.residual_rows;
    }
    rep.has_residual = true;
  }

  rep.csv = ctx.resolve(cfg.paths.metrics);
  {
    std::ofstream os = open_csv(rep.csv);
    os << "metric,value\n";
    os << "nrmse_full," << rep.nrmse_full << '\n';
    os << "nrmse_low_frequency," << rep.nrmse_low << '\n';
    os << "r_max," << rep.r_max << '\n';
    if (rep.has_registration) os << "registration," << rep.registration << '\n';
    if (rep.has_residual) {
      os << "residual_rows," << rep.residual_rows << '\n';
      os << "residual_first," << rep.residual_first << '\n';
      os << "residual_last," << rep.residual_last << '\n';
    }
    if (!os) throw IoError("write failed for " + rep.csv.string());
  }
  doc["inputs"] = inputs;
  doc["nrmse_full"] = rep.nrmse_full;
  doc["nrmse_low_frequency"] = rep.nrmse_low;
  doc["outputs"] = {file_entry(rep.csv)};
  write_provenance(ctx.resolve("metrics.provenance.json"), doc);
  return rep;
}

fs::path cmd_render(const RunConfig& cfg, const RunContext& ctx) {
  ensure_dir(ctx.out_dir);
  const fs::path in = ctx.resolve(cfg.render.input);
  fs::path out;
  if (cfg.render.output.empty()) {
    out = ctx.out_dir / in.filename();
    out.replace_extension(".png");
  } else {
    out = ctx.resolve(cfg.render.output);
  }
  write_png(out, read_pattern(in), cfg.render.options);

  json doc = base_provenance("render", cfg, ctx);
  doc["inputs"] = {file_entry(in)};
  doc["outputs"] = {file_entry(out)};
  fs::path side = out;
  side.replace_extension(".provenance.json");
  write_provenance(side, doc);
  return out;
}

}  // namespace bcdi
