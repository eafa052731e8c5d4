#include "helmsweep/geometry.hpp"

#include <set>

#include "doctest.h"

using namespace helmsweep;

namespace {

Box square(double lo, double hi) {
  Box b;
  b.dim = 2;
  b.lo = {lo, lo, 0.0};
  b.hi = {hi, hi, 1.0};
  return b;
}

}  // namespace

TEST_CASE("partition: identity partition covers the box") {
  UniformGrid g = UniformGrid::over(square(0.0, 1.0), {8, 8, 1});
  Partition p = partition_domain(g, {1, 1, 1});
  CHECK(p.cell_count() == 1);
  Box cell = p.cell_box({0, 0, 0});
  CHECK(cell.lo[0] == doctest::Approx(0.0));
  CHECK(cell.hi[0] == doctest::Approx(1.0));
  CHECK(cell.lo[1] == doctest::Approx(0.0));
  CHECK(cell.hi[1] == doctest::Approx(1.0));
}

TEST_CASE("partition: 4x4 cuts at quarter points of [-1/2,1/2]^2") {
  UniformGrid g = UniformGrid::over(square(-0.5, 0.5), {16, 16, 1});
  Partition p = partition_domain(g, {4, 4, 1});
  for (int i = 0; i <= 4; ++i) {
    double xi = g.box.lo[0] + p.cuts[0][i] * g.h[0];
    CHECK(xi == doctest::Approx(-0.5 + i / 4.0));
  }
}

TEST_CASE("partition: 240-interval grid in 4x4 gives 60-interval cells") {
  UniformGrid g = UniformGrid::over(square(0.0, 1.0), {240, 240, 1});
  Partition p = partition_domain(g, {4, 4, 1});
  for (int c = 0; c < 4; ++c) CHECK(p.cuts[0][c + 1] - p.cuts[0][c] == 60);
  GridRange r = p.owned_range({2, 1, 0});
  CHECK(r.lo[0] == 120);
  CHECK(r.hi[0] == 180);
  CHECK(r.lo[1] == 60);
  CHECK(r.hi[1] == 120);
}

TEST_CASE("partition: divisibility violation is a configuration error") {
  UniformGrid g = UniformGrid::over(square(0.0, 1.0), {50, 50, 1});
  CHECK_THROWS_AS(partition_domain(g, {4, 4, 1}), ConfigError);
}

TEST_CASE("assembly weights: interior, face and cross-point values") {
  UniformGrid g = UniformGrid::over(square(0.0, 1.0), {8, 8, 1});
  Partition p = partition_domain(g, {2, 2, 1});
  AssemblyWeights w(p, 2);
  // Interior node of cell (0,0).
  CHECK(w.weight({0, 0, 0}, {1, 1, 0}) == 1.0);
  // On the vertical cut (index 4), away from the cross point.
  CHECK(w.weight({0, 0, 0}, {4, 1, 0}) == 0.5);
  CHECK(w.weight({1, 0, 0}, {4, 1, 0}) == 0.5);
  // Cross point of the two cuts: 1/4 for each of the four cells.
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(w.weight({i, j, 0}, {4, 4, 0}) == 0.25);
}

TEST_CASE("assembly weights: partition of unity over the padded grid") {
  for (int dim : {2, 3}) {
    Box box;
    box.dim = dim;
    box.lo = {0.0, 0.0, 0.0};
    box.hi = {1.0, 1.0, 1.0};
    Vec3i intervals{6, 6, dim == 3 ? 6 : 1};
    UniformGrid g = UniformGrid::over(box, intervals);
    Partition p = partition_domain(g, {3, 2, dim == 3 ? 2 : 1});
    const int pad = 2;
    AssemblyWeights w(p, pad);
    GridRange all;
    all.dim = dim;
    for (int a = 0; a < dim; ++a) {
      all.lo[a] = -pad;
      all.hi[a] = intervals[a] + pad;
    }
    // Sums are dyadic rationals; accumulate in units of 1/2^dim for exactness.
    for (std::int64_t i = 0; i < all.node_count(); ++i) {
      Vec3i node = all.unlinear(i);
      int total = 0;
      for (int id = 0; id < p.cell_count(); ++id) {
        Vec3i sub = p.unflatten(id);
        int num = 1;
        for (int a = 0; a < dim; ++a) num *= w.weight2(a, sub[a], node[a]);
        total += num;
      }
      CHECK(total == (1 << dim));
    }
  }
}

TEST_CASE("3D triple corner weight is 1/8") {
  Box box;
  box.dim = 3;
  box.lo = {0.0, 0.0, 0.0};
  box.hi = {1.0, 1.0, 1.0};
  UniformGrid g = UniformGrid::over(box, {4, 4, 4});
  Partition p = partition_domain(g, {2, 2, 2});
  AssemblyWeights w(p, 1);
  for (int id = 0; id < 8; ++id) CHECK(w.weight(p.unflatten(id), {2, 2, 2}) == 0.125);
}

TEST_CASE("step groups match the anti-diagonal narration") {
  UniformGrid g = UniformGrid::over(square(0.0, 1.0), {5, 5, 1});
  Partition p = partition_domain(g, {5, 5, 1});

  // 5x5, direction (+1,+1), step 5: the full main anti-diagonal.
  auto grp = step_group(p, SweepDir{{1, 1, 1}}, 5);
  std::set<std::pair<int, int>> got;
  for (const auto& s : grp) got.insert({s[0], s[1]});
  std::set<std::pair<int, int>> want{{0, 4}, {1, 3}, {2, 2}, {3, 1}, {4, 0}};
  CHECK(got == want);

  // direction (-1,+1), step 6 (1-based subdomains (1,2),(2,3),(3,4),(4,5)).
  grp = step_group(p, SweepDir{{-1, 1, 1}}, 6);
  got.clear();
  for (const auto& s : grp) got.insert({s[0], s[1]});
  want = {{0, 1}, {1, 2}, {2, 3}, {3, 4}};
  CHECK(got == want);
}

TEST_CASE("step group: 2x2 first step is the corner cell") {
  UniformGrid g = UniformGrid::over(square(0.0, 1.0), {4, 4, 1});
  Partition p = partition_domain(g, {2, 2, 1});
  auto grp = step_group(p, SweepDir{{1, 1, 1}}, 1);
  REQUIRE(grp.size() == 1);
  CHECK(grp[0] == Vec3i{0, 0, 0});
  CHECK_THROWS_AS(step_group(p, SweepDir{{1, 1, 1}}, 4), ConfigError);
  CHECK_THROWS_AS(step_group(p, SweepDir{{1, 1, 1}}, 0), ConfigError);
}

TEST_CASE("step groups enumerate every subdomain exactly once per sweep") {
  Box box;
  box.dim = 3;
  box.lo = {0.0, 0.0, 0.0};
  box.hi = {1.0, 1.0, 1.0};
  UniformGrid g = UniformGrid::over(box, {12, 8, 4});
  Partition p = partition_domain(g, {3, 4, 2});
  const int steps = sweep_step_count(p.counts, 3);
  CHECK(steps == 3 + 4 + 2 - 2);
  for (int dx : {-1, 1})
    for (int dy : {-1, 1})
      for (int dz : {-1, 1}) {
        SweepDir dir{{dx, dy, dz}};
        std::set<int> seen;
        for (int s = 1; s <= steps; ++s)
          for (const auto& sub : step_group(p, dir, s)) {
            CHECK(step_of(p.counts, 3, dir, sub) == s);
            seen.insert(p.flatten(sub));
          }
        CHECK(static_cast<int>(seen.size()) == p.cell_count());
      }
}
