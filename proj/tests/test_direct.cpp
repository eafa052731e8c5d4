#include "helmsweep/direct.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <random>

#include "doctest.h"

using namespace helmsweep;

namespace {

SparseOperator pml_operator(int dim, int n, int pad, double kappa, LocalGrid* grid_out = nullptr,
                            PmlCoefficients* coeffs_out = nullptr) {
  Box box;
  box.dim = dim;
  box.lo = {0.0, 0.0, 0.0};
  box.hi = {1.0, 1.0, 1.0};
  LocalGrid g;
  g.dim = dim;
  g.range.dim = dim;
  for (int a = 0; a < dim; ++a) {
    g.h[a] = 1.0 / n;
    g.origin[a] = 0.0;
    g.range.lo[a] = -pad;
    g.range.hi[a] = n + pad;
  }
  PmlSpec spec;
  spec.width = pad;
  PmlCoefficients c = build_coefficients(spec, box, g);
  std::vector<double> kap(g.node_count(), kappa);
  SparseOperator op = assemble(g, c, kap, true);
  if (grid_out) *grid_out = g;
  if (coeffs_out) *coeffs_out = c;
  return op;
}

SparseOperator tiny_diagonal(std::vector<Complex> diag) {
  SparseOperator op;
  const int n = static_cast<int>(diag.size());
  op.grid.dim = 2;
  op.grid.range.dim = 2;
  op.grid.range.lo = {0, 0, 0};
  op.grid.range.hi = {n - 1, 0, 0};
  op.grid.h = {1.0, 1.0, 0.0};
  op.n = n;
  op.row_ptr.resize(n + 1);
  for (int i = 0; i < n; ++i) {
    op.row_ptr[i + 1] = i + 1;
    op.col.push_back(i);
    op.val.push_back(diag[i]);
  }
  return op;
}

CVector random_vector(std::int64_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  CVector v(n);
  for (Complex& z : v) z = Complex(unif(rng), unif(rng));
  return v;
}

double rel_residual(const SparseOperator& op, const CVector& x, const CVector& b) {
  CVector ax = op.apply(x);
  double num = 0.0, den = 0.0;
  for (std::int64_t i = 0; i < op.n; ++i) {
    num += std::norm(ax[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("factorize: trivial 1x1 and identity systems") {
  Factorization f = factorize(tiny_diagonal({Complex(2.0, 0.0)}));
  CVector x = f.solve(CVector{Complex(3.0, 1.0)});
  CHECK(x[0] == Complex(1.5, 0.5));

  Factorization id = factorize(tiny_diagonal(CVector(5, Complex(1.0, 0.0))));
  CVector b = random_vector(5, 3);
  CVector y = id.solve(b);
  for (int i = 0; i < 5; ++i) CHECK(y[i] == b[i]);
}

TEST_CASE("factorize: zero rhs gives zero solution") {
  SparseOperator op = pml_operator(2, 12, 3, 8.0);
  Factorization f = factorize(op);
  CVector x = f.solve(CVector(op.n, Complex(0.0)));
  for (const Complex& z : x) CHECK(z == Complex(0.0));
}

TEST_CASE("factorize: residual oracle on 2D and 3D PML operators") {
  for (int dim : {2, 3}) {
    SparseOperator op = pml_operator(dim, dim == 2 ? 12 : 8, 3, 9.0);
    Factorization f = factorize(op);
    CVector b = random_vector(op.n, 11);
    CVector x = f.solve(b);
    CHECK(rel_residual(op, x, b) <= 1e-10);
    CHECK(f.stats().factor_nnz > op.n);
  }
}

TEST_CASE("factorize: forward-multiply oracle recovers a known solution") {
  SparseOperator op = pml_operator(2, 12, 3, 7.0);
  Factorization f = factorize(op);
  CVector x_true = random_vector(op.n, 21);
  // Make the known vector consistent with the Dirichlet shell.
  for (std::int64_t i = 0; i < op.n; ++i)
    if (op.grid.on_shell(op.grid.range.unlinear(i))) x_true[i] = Complex(0.0);
  CVector b = op.apply(x_true);
  CVector x = f.solve(b);
  double err = 0.0, ref = 0.0;
  for (std::int64_t i = 0; i < op.n; ++i) {
    err += std::norm(x[i] - x_true[i]);
    ref += std::norm(x_true[i]);
  }
  CHECK(std::sqrt(err / ref) <= 1e-10);
}

TEST_CASE("factorize: repeated solves are bitwise identical") {
  SparseOperator op = pml_operator(2, 10, 3, 6.0);
  Factorization f = factorize(op);
  CVector b = random_vector(op.n, 5);
  CVector x1 = f.solve(b);
  CVector x2 = f.solve(b);
  CHECK(x1 == x2);
  // A second factorization of the same matrix gives bitwise-identical solves.
  Factorization g = factorize(op);
  CVector x3 = g.solve(b);
  CHECK(x1 == x3);
}

TEST_CASE("factorize: near-zero pivot names the offending index") {
  CHECK_THROWS_AS(factorize(tiny_diagonal({Complex(1.0), Complex(0.0), Complex(1.0)})),
                  SingularMatrixError);
  try {
    factorize(tiny_diagonal({Complex(1.0), Complex(0.0), Complex(1.0)}));
  } catch (const SingularMatrixError& e) {
    CHECK(e.pivot_index == 1);
  }
}

TEST_CASE("factorize: agrees with an independent sparse LU") {
  LocalGrid grid;
  SparseOperator op = pml_operator(2, 16, 4, 11.0, &grid);
  Factorization f = factorize(op);
  CVector b = random_vector(op.n, 33);
  CVector x = f.solve(b);

  Eigen::SparseMatrix<Complex> A(op.n, op.n);
  std::vector<Eigen::Triplet<Complex>> trips;
  for (std::int64_t r = 0; r < op.n; ++r)
    for (std::int64_t k = op.row_ptr[r]; k < op.row_ptr[r + 1]; ++k)
      trips.emplace_back(static_cast<int>(r), static_cast<int>(op.col[k]), op.val[k]);
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu;
  lu.compute(A);
  REQUIRE(lu.info() == Eigen::Success);
  Eigen::VectorXcd be(op.n);
  for (std::int64_t i = 0; i < op.n; ++i) be[i] = b[i];
  Eigen::VectorXcd xe = lu.solve(be);
  double err = 0.0, ref = 0.0;
  for (std::int64_t i = 0; i < op.n; ++i) {
    err += std::norm(x[i] - xe[i]);
    ref += std::norm(xe[i]);
  }
  CHECK(std::sqrt(err / ref) <= 1e-9);
}
