#include "helmsweep/media.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace helmsweep {

namespace {
constexpr char kMagic[4] = {'H', 'S', 'V', 'G'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void VelocityGrid::validate() const {
  if (dim != 2 && dim != 3) throw DataError("VelocityGrid: dim must be 2 or 3");
  std::int64_t count = 1;
  for (int a = 0; a < dim; ++a) {
    if (n[a] < 2) throw DataError("VelocityGrid: need at least 2 samples per axis");
    if (spacing[a] <= 0.0) throw DataError("VelocityGrid: spacing must be positive");
    count *= n[a];
  }
  if (static_cast<std::int64_t>(c.size()) != count)
    throw DataError("VelocityGrid: sample count does not match dims");
  for (float v : c)
    if (!(v > 0.0f)) throw DataError("VelocityGrid: non-positive velocity sample");
}

double VelocityGrid::sample(const Vec3d& x) const {
  // Clamped multilinear interpolation.
  Vec3i i0{0, 0, 0};
  Vec3d w{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) {
    double t = (x[a] - origin[a]) / spacing[a];
    t = std::clamp(t, 0.0, static_cast<double>(n[a] - 1));
    i0[a] = std::min(static_cast<int>(t), n[a] - 2);
    w[a] = t - i0[a];
  }
  auto at = [&](int di, int dj, int dk) {
    std::int64_t id = i0[0] + di;
    id += static_cast<std::int64_t>(n[0]) * (i0[1] + dj);
    if (dim == 3) id += static_cast<std::int64_t>(n[0]) * n[1] * (i0[2] + dk);
    return static_cast<double>(c[id]);
  };
  double v = 0.0;
  const int kmax = (dim == 3) ? 1 : 0;
  for (int dk = 0; dk <= kmax; ++dk)
    for (int dj = 0; dj <= 1; ++dj)
      for (int di = 0; di <= 1; ++di) {
        double ww = (di ? w[0] : 1 - w[0]) * (dj ? w[1] : 1 - w[1]);
        if (dim == 3) ww *= (dk ? w[2] : 1 - w[2]);
        v += ww * at(di, dj, dk);
      }
  return v;
}

VelocityGrid read_velocity_grid(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("read_velocity_grid: cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("read_velocity_grid: bad magic in " + path);
  std::uint32_t version = 0, dim = 0, n[3] = {0, 0, 0};
  f.read(reinterpret_cast<char*>(&version), 4);
  f.read(reinterpret_cast<char*>(&dim), 4);
  f.read(reinterpret_cast<char*>(n), 12);
  if (version != kVersion) throw DataError("read_velocity_grid: unsupported version");
  VelocityGrid g;
  g.dim = static_cast<int>(dim);
  for (int a = 0; a < 3; ++a) g.n[a] = static_cast<int>(n[a]);
  f.read(reinterpret_cast<char*>(g.origin.data()), 24);
  f.read(reinterpret_cast<char*>(g.spacing.data()), 24);
  if (g.dim != 2 && g.dim != 3) throw DataError("read_velocity_grid: bad dim");
  std::int64_t count = 1;
  for (int a = 0; a < g.dim; ++a) count *= g.n[a];
  if (count <= 0) throw DataError("read_velocity_grid: bad dims");
  g.c.resize(count);
  f.read(reinterpret_cast<char*>(g.c.data()), count * 4);
  if (!f) throw DataError("read_velocity_grid: truncated payload in " + path);
  g.validate();
  return g;
}

void write_velocity_grid(const std::string& path, const VelocityGrid& g) {
  g.validate();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("write_velocity_grid: cannot open " + path);
  f.write(kMagic, 4);
  std::uint32_t version = kVersion, dim = g.dim, n[3];
  for (int a = 0; a < 3; ++a) n[a] = static_cast<std::uint32_t>(g.n[a]);
  f.write(reinterpret_cast<const char*>(&version), 4);
  f.write(reinterpret_cast<const char*>(&dim), 4);
  f.write(reinterpret_cast<const char*>(n), 12);
  f.write(reinterpret_cast<const char*>(g.origin.data()), 24);
  f.write(reinterpret_cast<const char*>(g.spacing.data()), 24);
  f.write(reinterpret_cast<const char*>(g.c.data()), static_cast<std::streamsize>(g.c.size() * 4));
  if (!f) throw DataError("write_velocity_grid: write failed for " + path);
}

VelocityGrid read_velocity_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("read_velocity_csv: cannot open " + path);
  std::string header;
  if (!std::getline(f, header)) throw DataError("read_velocity_csv: empty file");
  std::vector<double> fields;
  std::stringstream ss(header);
  std::string tok;
  while (std::getline(ss, tok, ',')) fields.push_back(std::stod(tok));
  if (fields.empty()) throw DataError("read_velocity_csv: bad header");
  VelocityGrid g;
  g.dim = static_cast<int>(fields[0]);
  if (g.dim != 2 && g.dim != 3) throw DataError("read_velocity_csv: dim must be 2 or 3");
  if (static_cast<int>(fields.size()) != 1 + 3 * g.dim)
    throw DataError("read_velocity_csv: header needs dim, n, origin, spacing");
  std::int64_t count = 1;
  for (int a = 0; a < g.dim; ++a) {
    g.n[a] = static_cast<int>(fields[1 + a]);
    g.origin[a] = fields[1 + g.dim + a];
    g.spacing[a] = fields[1 + 2 * g.dim + a];
    count *= g.n[a];
  }
  g.c.reserve(count);
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    g.c.push_back(std::stof(line));
  }
  g.validate();
  return g;
}

WaveNumberModel WaveNumberModel::constant(double kappa) {
  if (kappa <= 0.0) throw ConfigError("WaveNumberModel: kappa must be positive");
  WaveNumberModel m;
  m.kind = Kind::Constant;
  m.kappa = kappa;
  return m;
}

WaveNumberModel WaveNumberModel::two_layered(double kappa_down, double kappa_up, int axis,
                                             double eta, double eps) {
  if (kappa_down <= 0.0 || kappa_up <= 0.0)
    throw ConfigError("WaveNumberModel: kappa must be positive");
  if (eps < 0.0) throw ConfigError("WaveNumberModel: blend width must be >= 0");
  WaveNumberModel m;
  m.kind = Kind::TwoLayered;
  m.kappa_down = kappa_down;
  m.kappa_up = kappa_up;
  m.interface_axis = axis;
  m.eta = eta;
  m.eps = eps;
  return m;
}

WaveNumberModel WaveNumberModel::gridded(VelocityGrid v, double omega) {
  v.validate();
  if (omega <= 0.0) throw ConfigError("WaveNumberModel: omega must be positive");
  WaveNumberModel m;
  m.kind = Kind::Gridded;
  m.velocity = std::move(v);
  m.omega = omega;
  return m;
}

double eval_kappa(const WaveNumberModel& m, const Vec3d& x) {
  switch (m.kind) {
    case WaveNumberModel::Kind::Constant:
      return m.kappa;
    case WaveNumberModel::Kind::TwoLayered: {
      double t = x[m.interface_axis];
      if (t < m.eta) return m.kappa_down;
      if (t > m.eta + m.eps || m.eps == 0.0) return (t == m.eta) ? m.kappa_down : m.kappa_up;
      double w = (t - m.eta) / m.eps;
      return m.kappa_down * (1.0 - w) + m.kappa_up * w;
    }
    case WaveNumberModel::Kind::Gridded: {
      double c = m.velocity.sample(x);
      if (!(c > 0.0)) throw DataError("eval_kappa: non-positive velocity sample");
      return m.omega / c;
    }
  }
  return 0.0;
}

double WaveNumberModel::max_kappa(const Box& domain) const {
  switch (kind) {
    case Kind::Constant:
      return kappa;
    case Kind::TwoLayered:
      return std::max(kappa_up, kappa_down);
    case Kind::Gridded: {
      float cmin = velocity.c[0];
      for (float v : velocity.c) cmin = std::min(cmin, v);
      (void)domain;
      return omega / cmin;
    }
  }
  return 0.0;
}

SubdomainMedium extend_to_subdomain(const WaveNumberModel& m, const Box& cell,
                                    const LocalGrid& grid, const Vec3i& sub) {
  SubdomainMedium med;
  med.sub = sub;
  med.kappa.resize(grid.node_count());
  const std::int64_t count = grid.node_count();
  for (std::int64_t id = 0; id < count; ++id) {
    Vec3i p = grid.range.unlinear(id);
    Vec3d x{0.0, 0.0, 0.0};
    for (int a = 0; a < grid.dim; ++a)
      x[a] = std::clamp(grid.coord(a, p[a]), cell.lo[a], cell.hi[a]);
    med.kappa[id] = eval_kappa(m, x);
  }
  return med;
}

std::vector<std::string> interface_alignment_warnings(const WaveNumberModel& m,
                                                      const Partition& p) {
  std::vector<std::string> warnings;
  if (m.kind != WaveNumberModel::Kind::TwoLayered) return warnings;
  int a = m.interface_axis;
  if (a >= p.dim) return warnings;
  for (int c = 0; c <= p.counts[a]; ++c) {
    double cut = p.grid.box.lo[a] + p.cuts[a][c] * p.grid.h[a];
    if (std::abs(cut - m.eta) < 0.5 * p.grid.h[a])
      warnings.push_back("media interface at " + std::to_string(m.eta) +
                         " coincides with subdomain cut at " + std::to_string(cut) +
                         " on axis " + std::to_string(a));
  }
  return warnings;
}

}  // namespace helmsweep
