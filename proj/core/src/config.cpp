#include "bcdi/config.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <fstream>
#include <iomanip>
#include <iterator>
#include <set>
#include <sstream>

namespace bcdi {

Spectrum SpectrumSpec::build() const {
  Spectrum s = [&] {
    switch (form) {
      case Form::harmonics:
        return harmonics_spectrum(orders, weights);
      case Form::continuous:
        return continuous_spectrum(center, bandwidth, points);
      case Form::table: {
        if (ratios.size() != weights.size()) {
          throw ConfigError("spectrum.ratios and spectrum.weights differ in length (" +
                            std::to_string(ratios.size()) + " vs " + std::to_string(weights.size()) +
                            ")");
        }
        std::vector<SpectralChannel> ch;
        for (std::size_t i = 0; i < ratios.size(); ++i) ch.push_back({ratios[i], weights[i]});
        return Spectrum(std::move(ch));
      }
    }
    throw ConfigError("unknown spectrum form");
  }();
  return unit_sum ? s.normalized_to_unit_sum() : s;
}

void RunConfig::validate() const {
  solver.validate();
  retrieval.validate();
  if (starts < 1) throw ConfigError("retrieval.starts must be >= 1");
  if (phantom.detector.width < 2 || phantom.detector.height < 2) {
    throw ConfigError("phantom.detector must be at least 2x2");
  }
  if (phantom.object.width < 1 || phantom.object.height < 1) {
    throw ConfigError("phantom.object must be non-empty");
  }
  if (noise.kind == NoiseModel::Kind::poisson && !(noise.photons > 0.0)) {
    throw ConfigError("noise.photons must be > 0");
  }
  if (noise.kind == NoiseModel::Kind::gaussian && !(noise.sigma >= 0.0)) {
    throw ConfigError("noise.sigma must be >= 0");
  }
  spectrum.build();
}

namespace {

// Map node reader that remembers which keys were consumed, so leftovers can
// be reported as typos.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_.IsDefined() && !node_.IsNull() && !node_.IsMap()) {
      throw ConfigError(where() + " must be a mapping");
    }
  }

  template <class T>
  void get(const char* key, T& out) {
    used_.insert(key);
    if (!present()) return;
    const YAML::Node v = node_[key];
    if (!v.IsDefined() || v.IsNull()) return;
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(qualified(key) + ": cannot parse value '" + YAML::Dump(v) + "'");
    }
  }

  void get_shape(const char* key, Shape& out) {
    std::vector<std::size_t> dims;
    get(key, dims);
    if (dims.empty()) return;
    if (dims.size() != 2) throw ConfigError(qualified(key) + " must be [width, height]");
    out = {dims[0], dims[1]};
  }

  template <class E>
  void get_enum(const char* key, E& out, std::initializer_list<std::pair<const char*, E>> names) {
    std::string s;
    get(key, s);
    if (s.empty()) return;
    std::string options;
    for (const auto& [name, value] : names) {
      if (s == name) {
        out = value;
        return;
      }
      options += options.empty() ? name : std::string(", ") + name;
    }
    throw ConfigError(qualified(key) + ": '" + s + "' is not one of " + options);
  }

  void mark(const char* key) { used_.insert(key); }

  bool has(const char* key) const { return present() && node_[key].IsDefined() && !node_[key].IsNull(); }

  Section child(const char* key) {
    used_.insert(key);
    return Section(present() ? node_[key] : YAML::Node(), qualified(key));
  }

  void finish() const {
    if (!present()) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (used_.count(key) == 0) throw ConfigError("unknown config key '" + qualified(key.c_str()) + "'");
    }
  }

 private:
  bool present() const { return node_.IsDefined() && node_.IsMap(); }
  std::string where() const { return path_.empty() ? "config document" : path_; }
  std::string qualified(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  YAML::Node node_;
  std::string path_;
  std::set<std::string> used_;
};

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  RunConfig cfg;
  cfg.source_text = text;
  Section top(root, "");
  top.get("seed", cfg.seed);
  top.get("threads", cfg.threads);

  Section ph = top.child("phantom");
  ph.get("source", cfg.phantom.source);
  ph.get_shape("object", cfg.phantom.object);
  ph.get_shape("detector", cfg.phantom.detector);
  ph.get("allow_undersampled", cfg.phantom.allow_undersampled);
  ph.finish();

  Section sp = top.child("spectrum");
  auto& s = cfg.spectrum;
  sp.get_enum("form", s.form,
              {{"harmonics", SpectrumSpec::Form::harmonics},
               {"continuous", SpectrumSpec::Form::continuous},
               {"table", SpectrumSpec::Form::table}});
  sp.get("orders", s.orders);
  sp.get("weights", s.weights);
  sp.get("ratios", s.ratios);
  sp.get("center", s.center);
  sp.get("bandwidth", s.bandwidth);
  sp.get("points", s.points);
  std::string norm = "none";
  sp.get("normalize", norm);
  if (norm == "unit_sum") {
    s.unit_sum = true;
  } else if (norm != "none") {
    throw ConfigError("spectrum.normalize: '" + norm + "' is not one of none, unit_sum");
  }
  sp.finish();

  Section nz = top.child("noise");
  nz.get_enum("model", cfg.noise.kind,
              {{"none", NoiseModel::Kind::none},
               {"poisson", NoiseModel::Kind::poisson},
               {"gaussian", NoiseModel::Kind::gaussian}});
  nz.get("photons", cfg.noise.photons);
  nz.get("sigma", cfg.noise.sigma);
  nz.finish();

  Section so = top.child("solver");
  so.get_enum("mode", cfg.solver.mode, {{"momentum", SolverMode::momentum}, {"plain", SolverMode::plain}});
  so.get("alpha", cfg.solver.alpha);
  so.get("dt", cfg.solver.dt);
  so.get("friction", cfg.solver.friction);
  so.get("max_iter", cfg.solver.max_iter);
  so.get("residual_tol", cfg.solver.residual_tol);
  so.get("projection", cfg.solver.projection);
  so.get("divergence_factor", cfg.solver.divergence_factor);
  so.finish();

  Section re = top.child("retrieval");
  auto& r = cfg.retrieval;
  re.get_enum("algorithm", r.algorithm, {{"hio", RetrievalAlgorithm::hio}, {"raar", RetrievalAlgorithm::raar}});
  re.get("beta", r.beta);
  re.get("iterations", r.iterations);
  re.get("starts", cfg.starts);
  re.get("autocorrelation_threshold", r.autocorrelation_threshold);
  re.get("complex_object", r.complex_object);
  Section sw = re.child("shrinkwrap");
  sw.get("interval", r.shrinkwrap.interval);
  sw.get("sigma", r.shrinkwrap.sigma);
  sw.get("sigma_decay", r.shrinkwrap.sigma_decay);
  sw.get("min_sigma", r.shrinkwrap.min_sigma);
  sw.get("threshold", r.shrinkwrap.threshold);
  sw.finish();
  re.finish();

  Section pa = top.child("paths");
  pa.get("phantom", cfg.paths.phantom);
  pa.get("mono", cfg.paths.mono);
  pa.get("poly", cfg.paths.poly);
  pa.get("recovered", cfg.paths.recovered);
  pa.get("residual", cfg.paths.residual);
  pa.get("object", cfg.paths.object);
  pa.get("metrics", cfg.paths.metrics);
  pa.finish();

  Section me = top.child("metrics");
  me.get("candidate", cfg.metrics.candidate);
  me.get("reference", cfg.metrics.reference);
  me.get("object", cfg.metrics.object);
  me.get("object_reference", cfg.metrics.object_reference);
  me.finish();

  Section rd = top.child("render");
  rd.get("input", cfg.render.input);
  rd.get("output", cfg.render.output);
  rd.get_enum("scale", cfg.render.options.scale, {{"log", RenderScale::log}, {"linear", RenderScale::linear}});
  rd.get("log_decades", cfg.render.options.log_decades);
  rd.get("gamma", cfg.render.options.gamma);
  if (rd.has("crop")) {
    Shape crop;
    rd.get_shape("crop", crop);
    cfg.render.options.crop = crop;
  } else {
    rd.mark("crop");
  }
  rd.finish();

  top.finish();
  cfg.retrieval.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config " + path.string());
  const std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  try {
    return parse_run_config(text);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string config_reference() {
  return R"(# bcdi run configuration. Every key is optional; values shown are defaults.
seed: 0                      # drives phantom blobs, noise and retrieval restarts
threads: 0                   # 0 = BCDI_THREADS or all cores
phantom:
  source: digit:3            # disk[:radius] | digit[:d] | blobs[:n] | testcard | path to .pgm
  object: [64, 64]           # object extent in pixels
  detector: [128, 128]       # W x L; at least twice the object per axis
  allow_undersampled: false
spectrum:
  form: table                # harmonics | continuous | table
  orders: []                 # harmonics: integer orders
  weights: [1.0]             # harmonics and table: one weight per channel
  ratios: [1.0]              # table: wavelength ratios
  center: 2.5                # continuous: center wavelength
  bandwidth: 0.8             # continuous: fractional bandwidth
  points: 384                # continuous: sample count
  normalize: none            # none | unit_sum
noise:
  model: none                # none | poisson | gaussian
  photons: 1.0e9             # poisson: photons per frame
  sigma: 0.0                 # gaussian: absolute standard deviation
solver:
  mode: momentum             # momentum | plain
  alpha: 1.0                 # plain step size
  dt: 1.0                    # momentum time step
  friction: 0.2              # momentum friction
  max_iter: 500
  residual_tol: 0.0          # stop at sqrt(eps)/|b| <= tol; 0 runs max_iter
  projection: true           # clamp x >= 0 after every step
  divergence_factor: 1.0e6   # abort when eps > factor * eps_0
retrieval:
  algorithm: raar            # hio | raar
  beta: 0.9
  iterations: 1000
  starts: 8                  # independent restarts, best kept
  autocorrelation_threshold: 0.04
  complex_object: false      # true drops realness and positivity
  shrinkwrap:
    interval: 20
    sigma: 3.0
    sigma_decay: 0.98
    min_sigma: 1.5
    threshold: 0.1
paths:                       # relative to --out
  phantom: phantom.bcdi
  mono: mono.bcdi
  poly: poly.bcdi
  recovered: mono_recovered.bcdi
  residual: residual.csv
  object: object.bcdi
  metrics: metrics.csv
metrics:
  candidate: mono_recovered.bcdi
  reference: mono.bcdi
  object: object.bcdi        # empty string skips registration
  object_reference: phantom.bcdi
render:
  input: poly.bcdi
  output: ""                 # empty: input name with .png
  scale: log                 # log | linear
  log_decades: 4.0
  gamma: 1.0
  crop: ~                    # [width, height] central window
)";
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  }
  return os.str();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return sha256_hex(bytes);
}

}  // namespace bcdi
