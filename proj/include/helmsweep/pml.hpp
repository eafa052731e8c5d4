#pragma once

#include "helmsweep/geometry.hpp"

namespace helmsweep {

// PML controls: pad depth in grid layers, ramp strength and exponent.
struct PmlSpec {
  int width = 30;
  double strength = 2.0;
  int exponent = 2;

  void validate() const {
    if (width < 1) throw ConfigError("PmlSpec: width must be >= 1 layer");
    if (strength <= 0.0) throw ConfigError("PmlSpec: strength must be positive");
    if (exponent < 1) throw ConfigError("PmlSpec: exponent must be >= 1");
  }
};

// sigma_j(x): zero inside the box, sigma0 * (t / (width*h))^p at distance t
// beyond a face. Continuous at the faces.
double sigma_profile(const PmlSpec& spec, const Box& box, double h, int axis, double x);

// Complex stretching factors alpha_j = 1 + i sigma_j sampled on a local
// grid, at nodes and at half points (half points feed the flux couplings
// analytically, not by averaging).
struct PmlCoefficients {
  int dim = 2;
  GridRange range;
  Vec3d h{0.0, 0.0, 0.0};
  std::array<CVector, 3> alpha_node;  // size range.size(a)
  std::array<CVector, 3> alpha_half;  // size range.size(a)-1, between i and i+1

  Complex alpha(int axis, int gi) const { return alpha_node[axis][gi - range.lo[axis]]; }
  Complex alpha_at_half(int axis, int gi) const {  // between gi and gi+1
    return alpha_half[axis][gi - range.lo[axis]];
  }
  Complex jacobian(const Vec3i& p) const {
    Complex j = 1.0;
    for (int a = 0; a < dim; ++a) j *= alpha(a, p[a]);
    return j;
  }
  // Diagonal entry A_aa at a node: prod_{b != a} alpha_b / alpha_a.
  Complex a_diag(int axis, const Vec3i& p) const {
    Complex v = 1.0;
    for (int b = 0; b < dim; ++b)
      if (b != axis) v *= alpha(b, p[b]);
    return v / alpha(axis, p[axis]);
  }
  // Stencil coupling across the edge (p, p+e_axis), divided by h^2:
  // prod_{b != a} alpha_b(p_b) / alpha_a(half) / h_a^2.
  Complex coupling(int axis, const Vec3i& p) const {
    Complex v = 1.0;
    for (int b = 0; b < dim; ++b)
      if (b != axis) v *= alpha(b, p[b]);
    return v / alpha_at_half(axis, p[axis]) / (h[axis] * h[axis]);
  }
};

// Builds the stretching for a problem whose physical box is `box` on the
// padded grid `grid`. The ramp onset sits one grid layer outside the box
// faces, so stencil couplings on a box face and its first exterior layer
// stay identical to the physical ones.
PmlCoefficients build_coefficients(const PmlSpec& spec, const Box& box, const LocalGrid& grid);

}  // namespace helmsweep
