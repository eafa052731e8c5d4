#include "helmsweep/pml.hpp"

#include <cmath>

namespace helmsweep {

double sigma_profile(const PmlSpec& spec, const Box& box, double h, int axis, double x) {
  const double scale = spec.width * h;
  double t = 0.0;
  if (x >= box.hi[axis])
    t = x - box.hi[axis];
  else if (x <= box.lo[axis])
    t = box.lo[axis] - x;
  else
    return 0.0;
  return spec.strength * std::pow(t / scale, spec.exponent);
}

PmlCoefficients build_coefficients(const PmlSpec& spec, const Box& box, const LocalGrid& grid) {
  spec.validate();
  PmlCoefficients c;
  c.dim = grid.dim;
  c.range = grid.range;
  c.h = grid.h;

  // One-layer onset offset: ramps start a full grid layer outside the box.
  Box onset = box;
  for (int a = 0; a < grid.dim; ++a) {
    onset.lo[a] -= grid.h[a];
    onset.hi[a] += grid.h[a];
  }

  for (int a = 0; a < grid.dim; ++a) {
    const int n = grid.range.size(a);
    const double tol = 1e-9 * grid.h[a];
    if (grid.coord(a, grid.range.lo[a]) > box.lo[a] - spec.width * grid.h[a] + tol ||
        grid.coord(a, grid.range.hi[a]) < box.hi[a] + spec.width * grid.h[a] - tol)
      throw ConfigError("build_coefficients: grid does not cover the box plus " +
                        std::to_string(spec.width) + " pad layers on axis " + std::to_string(a));
    c.alpha_node[a].resize(n);
    c.alpha_half[a].resize(n - 1);
    for (int i = 0; i < n; ++i) {
      double x = grid.coord(a, grid.range.lo[a] + i);
      c.alpha_node[a][i] = Complex(1.0, sigma_profile(spec, onset, grid.h[a], a, x));
    }
    for (int i = 0; i + 1 < n; ++i) {
      double x = grid.coord(a, grid.range.lo[a] + i) + 0.5 * grid.h[a];
      c.alpha_half[a][i] = Complex(1.0, sigma_profile(spec, onset, grid.h[a], a, x));
    }
  }
  return c;
}

}  // namespace helmsweep
