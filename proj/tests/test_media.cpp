#include "helmsweep/media.hpp"

#include <cmath>
#include <cstdio>

#include "doctest.h"

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

TEST_CASE("eval_kappa: constant, layer boundary, blend midpoint") {
  auto c = WaveNumberModel::constant(50.0 * M_PI);
  CHECK(eval_kappa(c, {0.3, 0.9, 0.0}) == 50.0 * M_PI);

  auto two = WaveNumberModel::two_layered(50.0 * M_PI, 62.5 * M_PI, 1, 0.65, 0.01);
  CHECK(eval_kappa(two, {0.5, 0.65, 0.0}) == 50.0 * M_PI);
  CHECK(eval_kappa(two, {0.5, 0.655, 0.0}) == doctest::Approx(56.25 * M_PI));
  CHECK(eval_kappa(two, {0.5, 0.9, 0.0}) == 62.5 * M_PI);
  CHECK(eval_kappa(two, {0.5, 0.1, 0.0}) == 50.0 * M_PI);
}

TEST_CASE("gridded model: kappa = omega / c with clamped sampling") {
  VelocityGrid v;
  v.dim = 2;
  v.n = {3, 2, 1};
  v.origin = {0.0, 0.0, 0.0};
  v.spacing = {0.5, 1.0, 0.0};
  v.c = {1.0f, 2.0f, 4.0f, 1.0f, 2.0f, 4.0f};
  auto m = WaveNumberModel::gridded(v, 8.0);
  CHECK(eval_kappa(m, {0.0, 0.5, 0.0}) == doctest::Approx(8.0));
  CHECK(eval_kappa(m, {0.25, 0.5, 0.0}) == doctest::Approx(8.0 / 1.5));
  // Clamped outside the velocity hull.
  CHECK(eval_kappa(m, {9.0, 0.5, 0.0}) == doctest::Approx(2.0));

  VelocityGrid bad = v;
  bad.c[2] = 0.0f;
  CHECK_THROWS_AS(WaveNumberModel::gridded(bad, 8.0), DataError);
}

TEST_CASE("extension: constant model stays constant") {
  Box cell;
  cell.dim = 2;
  cell.lo = {0.0, 0.0, 0.0};
  cell.hi = {0.5, 0.5, 0.0};
  LocalGrid g = padded_grid(cell, {4, 4, 1}, 3);
  auto m = WaveNumberModel::constant(7.0);
  SubdomainMedium med = extend_to_subdomain(m, cell, g, {0, 0, 0});
  for (double k : med.kappa) CHECK(k == 7.0);
}

TEST_CASE("extension: interface above the cell gives constant kappa_down") {
  auto two = WaveNumberModel::two_layered(5.0, 9.0, 1, 0.65, 0.0);
  Box cell;
  cell.dim = 2;
  cell.lo = {0.0, 0.0, 0.0};
  cell.hi = {0.5, 0.5, 0.0};
  LocalGrid g = padded_grid(cell, {4, 4, 1}, 4);
  SubdomainMedium med = extend_to_subdomain(two, cell, g, {0, 0, 0});
  // The padded grid reaches x2 = 1.0 > eta, but the nearest box point stays
  // below the interface.
  for (double k : med.kappa) CHECK(k == 5.0);
}

TEST_CASE("extension: diagonal pad corner clamps to the box corner") {
  VelocityGrid v;
  v.dim = 2;
  v.n = {11, 11, 1};
  v.origin = {-1.0, -1.0, 0.0};
  v.spacing = {0.3, 0.3, 0.0};
  v.c.resize(121);
  for (int j = 0; j < 11; ++j)
    for (int i = 0; i < 11; ++i)
      v.c[j * 11 + i] = static_cast<float>(1.0 + 0.1 * i + 0.05 * j);
  auto m = WaveNumberModel::gridded(v, 3.0);
  Box cell;
  cell.dim = 2;
  cell.lo = {0.0, 0.0, 0.0};
  cell.hi = {0.5, 0.5, 0.0};
  LocalGrid g = padded_grid(cell, {4, 4, 1}, 2);
  SubdomainMedium med = extend_to_subdomain(m, cell, g, {0, 0, 0});
  const double at_corner = eval_kappa(m, {0.5, 0.5, 0.0});
  CHECK(med.kappa[g.range.linear({6, 6, 0})] == doctest::Approx(at_corner));
  CHECK(med.kappa[g.range.linear({-2, -2, 0})] == doctest::Approx(eval_kappa(m, {0.0, 0.0, 0.0})));
}

TEST_CASE("extension: matches the model on the closed box and is idempotent") {
  auto two = WaveNumberModel::two_layered(5.0, 9.0, 1, 0.3, 0.02);
  Box cell;
  cell.dim = 2;
  cell.lo = {0.0, 0.0, 0.0};
  cell.hi = {1.0, 1.0, 0.0};
  LocalGrid g = padded_grid(cell, {10, 10, 1}, 3);
  SubdomainMedium med = extend_to_subdomain(two, cell, g, {0, 0, 0});
  for (std::int64_t i = 0; i < g.node_count(); ++i) {
    Vec3i p = g.range.unlinear(i);
    bool inside = true;
    Vec3d x{0.0, 0.0, 0.0};
    for (int a = 0; a < 2; ++a) {
      x[a] = g.coord(a, p[a]);
      if (x[a] < cell.lo[a] || x[a] > cell.hi[a]) inside = false;
    }
    if (inside) CHECK(med.kappa[i] == eval_kappa(two, x));
  }
  SubdomainMedium again = extend_to_subdomain(two, cell, g, {0, 0, 0});
  CHECK(med.kappa == again.kappa);
}

TEST_CASE("velocity grid files round-trip (binary and csv)") {
  VelocityGrid v;
  v.dim = 2;
  v.n = {4, 3, 1};
  v.origin = {0.25, -1.5, 0.0};
  v.spacing = {0.1, 0.2, 0.0};
  for (int i = 0; i < 12; ++i) v.c.push_back(1.0f + 0.25f * i);

  const std::string bin = "/tmp/helmsweep_test_vel.hsvg";
  write_velocity_grid(bin, v);
  VelocityGrid r = read_velocity_grid(bin);
  CHECK(r.n == v.n);
  CHECK(r.c == v.c);
  CHECK(r.origin == v.origin);
  std::remove(bin.c_str());

  const std::string csv = "/tmp/helmsweep_test_vel.csv";
  {
    std::FILE* f = std::fopen(csv.c_str(), "w");
    std::fprintf(f, "2,4,3,0.25,-1.5,0.1,0.2\n");
    for (float c : v.c) std::fprintf(f, "%g\n", c);
    std::fclose(f);
  }
  VelocityGrid rc = read_velocity_csv(csv);
  CHECK(rc.n == v.n);
  CHECK(rc.c == v.c);
  std::remove(csv.c_str());
}

TEST_CASE("loader warns when the interface coincides with a cut") {
  Box box;
  box.dim = 2;
  box.lo = {0.0, 0.0, 0.0};
  box.hi = {1.0, 1.0, 0.0};
  UniformGrid g = UniformGrid::over(box, {8, 8, 1});
  Partition p = partition_domain(g, {2, 2, 1});
  auto aligned = WaveNumberModel::two_layered(5.0, 9.0, 1, 0.5, 0.0);
  CHECK(!interface_alignment_warnings(aligned, p).empty());
  auto off = WaveNumberModel::two_layered(5.0, 9.0, 1, 0.3, 0.0);
  CHECK(interface_alignment_warnings(off, p).empty());
}
