#include "helmsweep/pml.hpp"

#include <cmath>

#include "doctest.h"
#include "helmsweep/direct.hpp"
#include "helmsweep/media.hpp"

using namespace helmsweep;

namespace {

LocalGrid padded_grid(const Box& box, const Vec3i& intervals, int pad) {
  LocalGrid g;
  g.dim = box.dim;
  g.range.dim = box.dim;
  for (int a = 0; a < box.dim; ++a) {
    g.h[a] = box.extent(a) / intervals[a];
    g.origin[a] = box.lo[a];
    g.range.lo[a] = -pad;
    g.range.hi[a] = intervals[a] + pad;
  }
  return g;
}

}  // namespace

TEST_CASE("sigma profile: zero inside, zero on the face, sigma0 at the pad end") {
  PmlSpec spec;
  spec.width = 10;
  spec.strength = 3.0;
  spec.exponent = 2;
  Box box;
  box.dim = 2;
  box.lo = {0.0, 0.0, 0.0};
  box.hi = {1.0, 1.0, 0.0};
  const double h = 0.01;
  CHECK(sigma_profile(spec, box, h, 0, 0.5) == 0.0);
  CHECK(sigma_profile(spec, box, h, 0, 1.0) == 0.0);
  CHECK(sigma_profile(spec, box, h, 0, 1.0 + spec.width * h) == doctest::Approx(spec.strength));
  CHECK(sigma_profile(spec, box, h, 0, -spec.width * h) == doctest::Approx(spec.strength));
  // Halfway through the quadratic ramp.
  CHECK(sigma_profile(spec, box, h, 0, 1.0 + 0.5 * spec.width * h) ==
        doctest::Approx(0.25 * spec.strength));
}

TEST_CASE("coefficients: identity inside, one-layer onset offset, Im >= 0") {
  PmlSpec spec;
  spec.width = 4;
  Box box;
  box.dim = 2;
  box.lo = {0.0, 0.0, 0.0};
  box.hi = {1.0, 1.0, 0.0};
  LocalGrid g = padded_grid(box, {10, 10, 1}, spec.width);
  PmlCoefficients c = build_coefficients(spec, box, g);

  for (int a = 0; a < 2; ++a) {
    for (int i = g.range.lo[a]; i <= g.range.hi[a]; ++i) CHECK(c.alpha(a, i).imag() >= 0.0);
    // alpha = 1 on the box, its faces, and one layer outside.
    for (int i = -1; i <= 11; ++i) CHECK(c.alpha(a, i) == Complex(1.0, 0.0));
    // The half point between the face and the first pad layer stays physical.
    CHECK(c.alpha_at_half(a, -1) == Complex(1.0, 0.0));
    CHECK(c.alpha_at_half(a, 10) == Complex(1.0, 0.0));
    // Deeper pad layers are stretched.
    CHECK(c.alpha(a, -spec.width).imag() > 0.0);
    CHECK(c.alpha(a, 10 + spec.width).imag() > 0.0);
  }
  // Interior nodes carry A = identity and J = 1.
  Vec3i p{5, 5, 0};
  CHECK(c.jacobian(p) == Complex(1.0, 0.0));
  CHECK(c.a_diag(0, p) == Complex(1.0, 0.0));
  CHECK(c.a_diag(1, p) == Complex(1.0, 0.0));
}

TEST_CASE("coefficients: right-pad node has A11 = alpha2/alpha1 with alpha2 = 1") {
  PmlSpec spec;
  spec.width = 5;
  Box box;
  box.dim = 2;
  box.lo = {0.0, 0.0, 0.0};
  box.hi = {1.0, 1.0, 0.0};
  LocalGrid g = padded_grid(box, {10, 10, 1}, spec.width);
  PmlCoefficients c = build_coefficients(spec, box, g);
  Vec3i p{13, 5, 0};  // right pad only
  Complex a1 = c.alpha(0, 13), a2 = c.alpha(1, 5);
  CHECK(a2 == Complex(1.0, 0.0));
  CHECK(a1.imag() > 0.0);
  CHECK(c.a_diag(0, p) == a2 / a1);
  CHECK(c.a_diag(1, p) == a1 / a2);
  CHECK(c.jacobian(p) == a1 * a2);
}

TEST_CASE("coefficients: 3D corner pad J is the triple product") {
  PmlSpec spec;
  spec.width = 3;
  Box box;
  box.dim = 3;
  box.lo = {0.0, 0.0, 0.0};
  box.hi = {1.0, 1.0, 1.0};
  LocalGrid g = padded_grid(box, {6, 6, 6}, spec.width);
  PmlCoefficients c = build_coefficients(spec, box, g);
  Vec3i p{-3, 9, 9};
  Complex a0 = c.alpha(0, -3), a1 = c.alpha(1, 9), a2 = c.alpha(2, 9);
  CHECK(a0.imag() > 0.0);
  CHECK(a1.imag() > 0.0);
  CHECK(a2.imag() > 0.0);
  CHECK(c.jacobian(p) == a0 * a1 * a2);
  CHECK(c.a_diag(0, p) == a1 * a2 / a0);
  CHECK(c.a_diag(2, p) == a0 * a1 / a2);
}

TEST_CASE("coefficients: axis swap of a symmetric configuration permutes fields") {
  PmlSpec spec;
  spec.width = 4;
  Box box;
  box.dim = 2;
  box.lo = {0.0, 0.0, 0.0};
  box.hi = {1.0, 1.0, 0.0};
  LocalGrid g = padded_grid(box, {8, 8, 1}, spec.width);
  PmlCoefficients c = build_coefficients(spec, box, g);
  for (int i = g.range.lo[0]; i <= g.range.hi[0]; ++i)
    for (int j = g.range.lo[1]; j <= g.range.hi[1]; ++j) {
      CHECK(c.a_diag(0, {i, j, 0}) == c.a_diag(1, {j, i, 0}));
      CHECK(c.jacobian({i, j, 0}) == c.jacobian({j, i, 0}));
    }
}

TEST_CASE("coefficients: grid smaller than box plus pad is rejected") {
  PmlSpec spec;
  spec.width = 6;
  Box box;
  box.dim = 2;
  box.lo = {0.0, 0.0, 0.0};
  box.hi = {1.0, 1.0, 0.0};
  LocalGrid g = padded_grid(box, {10, 10, 1}, 4);  // only 4 pad layers
  CHECK_THROWS_AS(build_coefficients(spec, box, g), ConfigError);
}

TEST_CASE("pml decay: boundary amplitude shrinks monotonically with pad depth") {
  // Point source centered in a constant-medium problem; the field on the
  // outermost layer must drop relative to its peak as the pad deepens.
  const double kappa = 10.0 * M_PI;
  Box box;
  box.dim = 2;
  box.lo = {0.0, 0.0, 0.0};
  box.hi = {1.0, 1.0, 0.0};
  const int n = 50;  // mesh density 10
  double prev = 1e300;
  for (int width : {10, 20, 30}) {
    PmlSpec spec;
    spec.width = width;
    LocalGrid g = padded_grid(box, {n, n, 1}, width);
    PmlCoefficients c = build_coefficients(spec, box, g);
    std::vector<double> kap(g.node_count(), kappa);
    SparseOperator op = assemble(g, c, kap, true);
    Factorization f = factorize(op);
    CVector b(g.node_count(), Complex(0.0));
    b[g.range.linear({n / 2, n / 2, 0})] = 1.0;
    CVector u = f.solve(b);
    double peak = 0.0, rim = 0.0;
    for (std::int64_t i = 0; i < g.node_count(); ++i) {
      Vec3i p = g.range.unlinear(i);
      double mag = std::abs(u[i]);
      peak = std::max(peak, mag);
      // One layer inside the Dirichlet shell.
      bool near_rim = false;
      for (int a = 0; a < 2; ++a)
        if (p[a] == g.range.lo[a] + 1 || p[a] == g.range.hi[a] - 1) near_rim = true;
      if (near_rim) rim = std::max(rim, mag);
    }
    const double ratio = rim / peak;
    CHECK(ratio < prev);
    prev = ratio;
  }
  CHECK(prev < 1e-4);
}
