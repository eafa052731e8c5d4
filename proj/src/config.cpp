#include "helmsweep/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace helmsweep {

namespace {

struct KeyValues {
  std::map<std::string, std::string> kv;

  bool has(const std::string& k) const { return kv.count(k) > 0; }
  std::string str(const std::string& k, const std::string& dflt = "") const {
    auto it = kv.find(k);
    return it == kv.end() ? dflt : it->second;
  }
  double num(const std::string& k, double dflt) const {
    auto it = kv.find(k);
    if (it == kv.end()) return dflt;
    try {
      return std::stod(it->second);
    } catch (...) {
      throw ConfigError("config: bad number for key '" + k + "': " + it->second);
    }
  }
  std::vector<double> nums(const std::string& k) const {
    std::vector<double> out;
    auto it = kv.find(k);
    if (it == kv.end()) return out;
    std::stringstream ss(it->second);
    double v;
    while (ss >> v) out.push_back(v);
    if (!ss.eof()) throw ConfigError("config: bad numeric list for key '" + k + "'");
    return out;
  }
};

KeyValues parse_kv(const std::string& text) {
  KeyValues out;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
      if (!blank)
        throw ConfigError("config: line " + std::to_string(lineno) + " is not 'key = value'");
      continue;
    }
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config: empty key on line " + std::to_string(lineno));
    out.kv[key] = val;
  }
  return out;
}

Vec3d to_vec3d(const std::vector<double>& v, int dim, const std::string& key) {
  if (static_cast<int>(v.size()) != dim)
    throw ConfigError("config: key '" + key + "' needs " + std::to_string(dim) + " values");
  Vec3d out{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) out[a] = v[a];
  return out;
}

Vec3i to_vec3i(const std::vector<double>& v, int dim, const std::string& key) {
  if (static_cast<int>(v.size()) != dim)
    throw ConfigError("config: key '" + key + "' needs " + std::to_string(dim) + " values");
  Vec3i out{1, 1, 1};
  for (int a = 0; a < dim; ++a) {
    out[a] = static_cast<int>(v[a]);
    if (out[a] != v[a]) throw ConfigError("config: key '" + key + "' needs integers");
  }
  return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  KeyValues kv = parse_kv(text);
  RunConfig cfg;

  const std::string mode = kv.str("mode", "direct");
  if (mode == "direct")
    cfg.mode = RunMode::Direct;
  else if (mode == "precond")
    cfg.mode = RunMode::Precond;
  else if (mode == "converge")
    cfg.mode = RunMode::Converge;
  else if (mode == "pipeline")
    cfg.mode = RunMode::Pipeline;
  else
    throw ConfigError("config: unknown mode '" + mode + "'");

  cfg.dim = static_cast<int>(kv.num("dim", 2));
  if (cfg.dim != 2 && cfg.dim != 3) throw ConfigError("config: dim must be 2 or 3");

  cfg.interior.dim = cfg.dim;
  if (kv.has("interior.lo")) cfg.interior.lo = to_vec3d(kv.nums("interior.lo"), cfg.dim, "interior.lo");
  if (kv.has("interior.hi")) cfg.interior.hi = to_vec3d(kv.nums("interior.hi"), cfg.dim, "interior.hi");
  cfg.interior.validate();

  cfg.intervals = to_vec3i(kv.nums("grid.n"), cfg.dim, "grid.n");
  if (kv.has("partition")) cfg.counts = to_vec3i(kv.nums("partition"), cfg.dim, "partition");

  cfg.pml.width = static_cast<int>(kv.num("pml.width", 30));
  cfg.pml.strength = kv.num("pml.strength", 2.0);
  cfg.pml.exponent = static_cast<int>(kv.num("pml.exponent", 2));
  cfg.pml.validate();

  // The padded domain box is pinned by interior + pml; an explicit domain
  // box must agree with it.
  cfg.domain = cfg.interior;
  for (int a = 0; a < cfg.dim; ++a) {
    double h = cfg.interior.extent(a) / cfg.intervals[a];
    cfg.domain.lo[a] -= cfg.pml.width * h;
    cfg.domain.hi[a] += cfg.pml.width * h;
  }
  if (kv.has("domain.lo") || kv.has("domain.hi")) {
    Vec3d lo = to_vec3d(kv.nums("domain.lo"), cfg.dim, "domain.lo");
    Vec3d hi = to_vec3d(kv.nums("domain.hi"), cfg.dim, "domain.hi");
    for (int a = 0; a < cfg.dim; ++a) {
      double h = cfg.interior.extent(a) / cfg.intervals[a];
      if (std::abs(lo[a] - cfg.domain.lo[a]) > 1e-9 * h ||
          std::abs(hi[a] - cfg.domain.hi[a]) > 1e-9 * h)
        throw ConfigError(
            "config: domain box must equal the interior box padded by pml.width layers");
    }
  }

  const std::string media = kv.str("media.kind", "constant");
  if (media == "constant") {
    cfg.medium = WaveNumberModel::constant(kv.num("media.kappa", 0.0));
  } else if (media == "two_layered") {
    cfg.medium = WaveNumberModel::two_layered(
        kv.num("media.kappa_down", 0.0), kv.num("media.kappa_up", 0.0),
        static_cast<int>(kv.num("media.axis", 1)), kv.num("media.eta_L", 0.0),
        kv.num("media.epsilon", 0.0));
  } else if (media == "gridded") {
    const std::string file = kv.str("media.velocity_file");
    if (file.empty()) throw ConfigError("config: gridded media needs media.velocity_file");
    VelocityGrid vg = file.size() > 4 && file.substr(file.size() - 4) == ".csv"
                          ? read_velocity_csv(file)
                          : read_velocity_grid(file);
    cfg.medium = WaveNumberModel::gridded(std::move(vg), kv.num("media.omega", 0.0));
  } else {
    throw ConfigError("config: unknown media.kind '" + media + "'");
  }

  const std::string src = kv.str("source.kind", "gaussian");
  if (src == "gaussian")
    cfg.source.kind = SourceSpec::Kind::Gaussian;
  else if (src == "delta")
    cfg.source.kind = SourceSpec::Kind::GridDelta;
  else if (src == "shots")
    cfg.source.kind = SourceSpec::Kind::Shots;
  else
    throw ConfigError("config: unknown source.kind '" + src + "'");
  if (kv.has("source.center"))
    cfg.source.center = to_vec3d(kv.nums("source.center"), cfg.dim, "source.center");
  else
    for (int a = 0; a < cfg.dim; ++a)
      cfg.source.center[a] = 0.5 * (cfg.interior.lo[a] + cfg.interior.hi[a]);
  cfg.source.count = static_cast<int>(kv.num("source.count", 1));
  cfg.source.depth_fraction = kv.num("source.depth", 0.25);
  cfg.source.seed = static_cast<std::uint64_t>(kv.num("source.seed", 1));

  cfg.rounds = static_cast<int>(kv.num("sweep.rounds", 1));
  cfg.workers = static_cast<int>(kv.num("sweep.workers", 1));
  cfg.gmres.tol = kv.num("gmres.tol", 1e-6);
  cfg.gmres.max_iterations = static_cast<int>(kv.num("gmres.maxit", 60));
  cfg.density_floor = kv.num("density.floor", 4.0);
  cfg.compare_global = kv.num("compare.global", 0.0) != 0.0;
  cfg.out_prefix = kv.str("out.prefix", "");

  for (double v : kv.nums("converge.levels")) cfg.levels.push_back(static_cast<int>(v));
  cfg.reference_intervals = static_cast<int>(kv.num("converge.ref_n", 0));

  cfg.pipeline_n_rhs = static_cast<int>(kv.num("pipeline.n_rhs", 0));
  cfg.pipeline_n_iter = static_cast<int>(kv.num("pipeline.n_iter", 0));
  cfg.pipeline_t0 = kv.num("pipeline.t0", 0.0);

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  std::string text = ss.str();
  for (const std::string& ov : overrides) {
    if (ov.find('=') == std::string::npos)
      throw ConfigError("config: override must be key=value, got '" + ov + "'");
    text += "\n" + ov + "\n";
  }
  return parse_config_text(text);
}

ProblemSetup RunConfig::setup() const {
  ProblemSetup s;
  s.interior = interior;
  s.intervals = intervals;
  s.counts = counts;
  s.medium = medium;
  s.pml = pml;
  s.workers = workers;
  return s;
}

double RunConfig::mesh_density() const {
  double kmax = medium.max_kappa(interior);
  double hmax = 0.0;
  for (int a = 0; a < dim; ++a) hmax = std::max(hmax, interior.extent(a) / intervals[a]);
  return 2.0 * M_PI / (kmax * hmax);
}

void RunConfig::validate() const {
  interior.validate();
  for (int a = 0; a < dim; ++a) {
    if (intervals[a] < 1) throw ConfigError("config: grid.n must be positive");
    if (counts[a] < 1) throw ConfigError("config: partition counts must be >= 1");
  }
  if (rounds < 1) throw ConfigError("config: sweep.rounds must be >= 1");
  if (workers < 1) throw ConfigError("config: sweep.workers must be >= 1");
  gmres.validate();
  if (mode != RunMode::Pipeline && mesh_density() < density_floor)
    throw ConfigError("config: mesh density " + std::to_string(mesh_density()) +
                      " is below the floor " + std::to_string(density_floor));
  if (mode == RunMode::Converge) {
    if (levels.size() < 2) throw ConfigError("config: converge mode needs >= 2 levels");
    if (reference_intervals <= 0) throw ConfigError("config: converge mode needs converge.ref_n");
    for (int n : levels) {
      if (n <= 0 || reference_intervals % n != 0)
        throw ConfigError("config: converge.ref_n must be a multiple of every level");
      if (reference_intervals == n)
        throw ConfigError("config: reference must be finer than every level");
    }
  }
}

}  // namespace helmsweep
