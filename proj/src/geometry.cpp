#include "helmsweep/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace helmsweep {

void Box::validate() const {
  if (dim != 2 && dim != 3) throw ConfigError("Box: dim must be 2 or 3");
  for (int a = 0; a < dim; ++a)
    if (!(lo[a] < hi[a])) throw ConfigError("Box: lo must be strictly below hi on every axis");
}

UniformGrid UniformGrid::over(const Box& box, const Vec3i& intervals) {
  box.validate();
  UniformGrid g;
  g.box = box;
  for (int a = 0; a < 3; ++a) {
    if (a < box.dim) {
      if (intervals[a] < 1) throw ConfigError("UniformGrid: need at least one interval per axis");
      g.n[a] = intervals[a] + 1;
      g.h[a] = box.extent(a) / intervals[a];
    } else {
      g.n[a] = 1;
      g.h[a] = 0.0;
    }
  }
  return g;
}

std::int64_t GridRange::node_count() const {
  std::int64_t c = 1;
  for (int a = 0; a < dim; ++a) c *= size(a);
  return c;
}

bool GridRange::contains(const Vec3i& p) const {
  for (int a = 0; a < dim; ++a)
    if (p[a] < lo[a] || p[a] > hi[a]) return false;
  return true;
}

std::int64_t GridRange::linear(const Vec3i& p) const {
  std::int64_t id = 0;
  for (int a = dim - 1; a >= 0; --a) id = id * size(a) + (p[a] - lo[a]);
  return id;
}

Vec3i GridRange::unlinear(std::int64_t id) const {
  Vec3i p{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    p[a] = lo[a] + static_cast<int>(id % size(a));
    id /= size(a);
  }
  return p;
}

bool LocalGrid::on_shell(const Vec3i& p) const {
  for (int a = 0; a < dim; ++a)
    if (p[a] == range.lo[a] || p[a] == range.hi[a]) return true;
  return false;
}

int Partition::flatten(const Vec3i& sub) const {
  int id = 0;
  for (int a = dim - 1; a >= 0; --a) id = id * counts[a] + sub[a];
  return id;
}

Vec3i Partition::unflatten(int id) const {
  Vec3i s{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    s[a] = id % counts[a];
    id /= counts[a];
  }
  return s;
}

GridRange Partition::owned_range(const Vec3i& sub) const {
  GridRange r;
  r.dim = dim;
  for (int a = 0; a < dim; ++a) {
    r.lo[a] = cuts[a][sub[a]];
    r.hi[a] = cuts[a][sub[a] + 1];
  }
  return r;
}

Box Partition::cell_box(const Vec3i& sub) const {
  Box b;
  b.dim = dim;
  for (int a = 0; a < dim; ++a) {
    b.lo[a] = grid.box.lo[a] + cuts[a][sub[a]] * grid.h[a];
    b.hi[a] = grid.box.lo[a] + cuts[a][sub[a] + 1] * grid.h[a];
  }
  return b;
}

bool Partition::has_neighbor(const Vec3i& sub, int axis, int sign) const {
  if (axis >= dim) return false;
  int t = sub[axis] + sign;
  return t >= 0 && t < counts[axis];
}

Partition partition_domain(const UniformGrid& grid, const Vec3i& counts) {
  Partition p;
  p.dim = grid.box.dim;
  p.grid = grid;
  for (int a = 0; a < 3; ++a) p.counts[a] = (a < p.dim) ? counts[a] : 1;
  for (int a = 0; a < p.dim; ++a) {
    if (p.counts[a] < 1) throw ConfigError("partition_domain: counts must be >= 1");
    int m = grid.intervals(a);
    if (m % p.counts[a] != 0)
      throw ConfigError("partition_domain: grid intervals (" + std::to_string(m) +
                        ") not divisible by partition count (" + std::to_string(p.counts[a]) +
                        ") on axis " + std::to_string(a));
    int w = m / p.counts[a];
    p.cuts[a].resize(p.counts[a] + 1);
    for (int c = 0; c <= p.counts[a]; ++c) p.cuts[a][c] = c * w;
  }
  return p;
}

AssemblyWeights::AssemblyWeights(const Partition& p, int pad) : part_(&p), pad_(pad) {}

int AssemblyWeights::weight2(int axis, int cell, int index) const {
  const auto& cuts = part_->cuts[axis];
  int lo = cuts[cell], hi = cuts[cell + 1];
  // Pad extension: end cells own the pad layers beyond the interior grid.
  int lo_ext = (cell == 0) ? lo - pad_ : lo;
  int hi_ext = (cell == part_->counts[axis] - 1) ? hi + pad_ : hi;
  if (index < lo_ext || index > hi_ext) return 0;
  if (index == lo && cell > 0) return 1;
  if (index == hi && cell < part_->counts[axis] - 1) return 1;
  return 2;
}

double AssemblyWeights::weight(const Vec3i& sub, const Vec3i& node) const {
  int num = 1;
  for (int a = 0; a < part_->dim; ++a) {
    num *= weight2(a, sub[a], node[a]);
    if (num == 0) return 0.0;
  }
  return num / static_cast<double>(1 << part_->dim);
}

GridRange AssemblyWeights::support(const Vec3i& sub) const {
  GridRange r = part_->owned_range(sub);
  for (int a = 0; a < part_->dim; ++a) {
    if (sub[a] == 0) r.lo[a] -= pad_;
    if (sub[a] == part_->counts[a] - 1) r.hi[a] += pad_;
  }
  return r;
}

int sweep_step_count(const Vec3i& counts, int dim) {
  int s = 1;
  for (int a = 0; a < dim; ++a) s += counts[a] - 1;
  return s;
}

int step_of(const Vec3i& counts, int dim, const SweepDir& dir, const Vec3i& sub) {
  int s = 1;
  for (int a = 0; a < dim; ++a) s += (dir.d[a] == 1) ? sub[a] : counts[a] - 1 - sub[a];
  return s;
}

std::vector<Vec3i> step_group(const Partition& p, const SweepDir& dir, int s) {
  if (s < 1 || s > sweep_step_count(p.counts, p.dim))
    throw ConfigError("step_group: step index out of range");
  std::vector<Vec3i> group;
  for (int id = 0; id < p.cell_count(); ++id) {
    Vec3i sub = p.unflatten(id);
    if (step_of(p.counts, p.dim, dir, sub) == s) group.push_back(sub);
  }
  return group;
}

}  // namespace helmsweep
