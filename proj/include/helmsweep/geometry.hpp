#pragma once

#include <cstdint>

#include "helmsweep/common.hpp"

namespace helmsweep {

// Axis-aligned box, 2D or 3D. Unused axes carry [0,1).
struct Box {
  int dim = 2;
  Vec3d lo{0.0, 0.0, 0.0};
  Vec3d hi{1.0, 1.0, 1.0};

  double extent(int axis) const { return hi[axis] - lo[axis]; }
  void validate() const;
};

// Uniform node-centered grid over a box; n[a] nodes per axis, nodes lie
// exactly on the box faces, h[a] = extent / (n[a]-1).
struct UniformGrid {
  Box box;
  Vec3i n{2, 2, 1};
  Vec3d h{0.0, 0.0, 0.0};

  static UniformGrid over(const Box& box, const Vec3i& intervals);
  int intervals(int axis) const { return n[axis] - 1; }
};

// Inclusive node-index box in global index coordinates. Indices may be
// negative (PML pad layers extend beyond the interior grid).
struct GridRange {
  int dim = 2;
  Vec3i lo{0, 0, 0};
  Vec3i hi{0, 0, 0};

  int size(int axis) const { return hi[axis] - lo[axis] + 1; }
  std::int64_t node_count() const;
  bool contains(const Vec3i& p) const;
  // Row-major linear index, axis 0 fastest.
  std::int64_t linear(const Vec3i& p) const;
  Vec3i unlinear(std::int64_t id) const;
};

// A local computation grid: an index window (subdomain or global box plus
// pad layers) with the physical embedding of the global grid.
struct LocalGrid {
  int dim = 2;
  GridRange range;
  Vec3d h{0.0, 0.0, 0.0};
  Vec3d origin{0.0, 0.0, 0.0};  // physical coordinate of global index 0

  double coord(int axis, int index) const { return origin[axis] + index * h[axis]; }
  std::int64_t node_count() const { return range.node_count(); }
  // Nodes on the outermost layer carry the homogeneous Dirichlet closure.
  bool on_shell(const Vec3i& p) const;
};

// Checkerboard partition of the interior grid into counts[a] cells per axis.
// Cuts are node indices of the interior grid; every cut lies on a grid line.
struct Partition {
  int dim = 2;
  Vec3i counts{1, 1, 1};
  std::array<std::vector<int>, 3> cuts;  // size counts[a]+1, cuts[a][0]=0
  UniformGrid grid;                      // the interior (PML-free) grid

  int cell_count() const { return counts[0] * counts[1] * (dim == 3 ? counts[2] : 1); }
  int flatten(const Vec3i& sub) const;
  Vec3i unflatten(int id) const;
  // Node-index range owned by a subdomain (shared faces included).
  GridRange owned_range(const Vec3i& sub) const;
  Box cell_box(const Vec3i& sub) const;
  bool has_neighbor(const Vec3i& sub, int axis, int sign) const;
};

Partition partition_domain(const UniformGrid& grid, const Vec3i& counts);

// Partition-of-unity weights: 1 strictly inside a cell, 1/2 on a shared
// face, 1/4 on a shared edge, 1/8 at 3D triple corners. Ownership extends
// over the outer pad so that the weights tile the whole padded grid.
class AssemblyWeights {
 public:
  AssemblyWeights() = default;
  AssemblyWeights(const Partition& p, int pad);

  // Per-axis weight doubled (0, 1 or 2); product over axes / 2^dim gives w.
  int weight2(int axis, int cell, int index) const;
  double weight(const Vec3i& sub, const Vec3i& node) const;
  // Index range with nonzero weight for a subdomain (owned box plus pad
  // extension on sides without neighbors).
  GridRange support(const Vec3i& sub) const;
  int pad() const { return pad_; }

 private:
  const Partition* part_ = nullptr;
  int pad_ = 0;
};

// Diagonal sweep direction; components are +1/-1 (unused axes +1).
struct SweepDir {
  Vec3i d{1, 1, 1};
};

// Cardinal trace direction: exactly one nonzero component.
struct Cardinal {
  int axis = 0;
  int sign = 1;
  Vec3i vec(int dim) const {
    Vec3i v{0, 0, 0};
    (void)dim;
    v[axis] = sign;
    return v;
  }
};

// Number of steps in one sweep: N1+N2-1 in 2D, N1+N2+N3-2 in 3D.
int sweep_step_count(const Vec3i& counts, int dim);

// Anti-diagonal position of a subdomain for a sweep direction, 1-based.
int step_of(const Vec3i& counts, int dim, const SweepDir& dir, const Vec3i& sub);

// All subdomains solved at step s (1-based) of a sweep.
std::vector<Vec3i> step_group(const Partition& p, const SweepDir& dir, int s);

}  // namespace helmsweep
