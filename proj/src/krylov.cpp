#include "helmsweep/krylov.hpp"

#include <cmath>

namespace helmsweep {

namespace {

Complex dot(const CVector& a, const CVector& b) {
  Complex s(0.0);
  for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

}  // namespace

GmresResult gmres(const LinearMap& apply_op, const LinearMap& apply_precond,
                  std::span<const Complex> rhs, const GmresConfig& cfg) {
  cfg.validate();
  const std::int64_t n = static_cast<std::int64_t>(rhs.size());
  GmresResult res;
  res.x.assign(n, Complex(0.0));

  double bnorm = 0.0;
  for (const Complex& z : rhs) bnorm += std::norm(z);
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) {
    res.converged = true;
    if (cfg.record_history) res.history.push_back(0.0);
    return res;
  }

  const int m = cfg.max_iterations;
  std::vector<CVector> basis;  // Arnoldi vectors of the preconditioned operator
  basis.reserve(m + 1);
  std::vector<std::vector<Complex>> hess(m);  // hess[j]: column j, length j+2
  std::vector<Complex> cs(m), sn(m), g(m + 1, Complex(0.0));

  // x0 = 0, r0 = b.
  CVector v0(rhs.begin(), rhs.end());
  for (Complex& z : v0) z /= bnorm;
  basis.push_back(std::move(v0));
  g[0] = bnorm;
  if (cfg.record_history) res.history.push_back(1.0);

  int j = 0;
  bool breakdown = false;
  for (; j < m; ++j) {
    CVector z = apply_precond(basis[j]);
    CVector w = apply_op(z);
    hess[j].assign(j + 2, Complex(0.0));
    for (int i = 0; i <= j; ++i) {  // modified Gram-Schmidt
      Complex hij = dot(basis[i], w);
      hess[j][i] = hij;
      for (std::int64_t k = 0; k < n; ++k) w[k] -= hij * basis[i][k];
    }
    double wnorm = norm2(w);
    hess[j][j + 1] = wnorm;

    // Apply accumulated Givens rotations to the new column.
    for (int i = 0; i < j; ++i) {
      Complex t = cs[i] * hess[j][i] + sn[i] * hess[j][i + 1];
      hess[j][i + 1] = -std::conj(sn[i]) * hess[j][i] + std::conj(cs[i]) * hess[j][i + 1];
      hess[j][i] = t;
    }
    // New rotation eliminating the subdiagonal.
    {
      Complex a = hess[j][j], b = hess[j][j + 1];
      double r = std::sqrt(std::norm(a) + std::norm(b));
      if (r == 0.0) {
        cs[j] = 1.0;
        sn[j] = 0.0;
      } else {
        cs[j] = std::conj(a) / r;
        sn[j] = std::conj(b) / r;
      }
      hess[j][j] = cs[j] * a + sn[j] * b;
      hess[j][j + 1] = 0.0;
    }
    g[j + 1] = -std::conj(sn[j]) * g[j];
    g[j] = cs[j] * g[j];

    const double rel = std::abs(g[j + 1]) / bnorm;
    if (cfg.record_history) res.history.push_back(rel);

    if (wnorm <= 1e-14 * bnorm) {  // Arnoldi breakdown: solution lies in the subspace
      breakdown = true;
      ++j;
      break;
    }
    for (Complex& zz : w) zz /= wnorm;
    basis.push_back(std::move(w));

    if (rel <= cfg.tol) {
      ++j;
      break;
    }
  }
  res.iterations = j;

  // Back substitution for y, then x = M^{-1} (V y).
  std::vector<Complex> y(j, Complex(0.0));
  for (int i = j - 1; i >= 0; --i) {
    Complex s = g[i];
    for (int k = i + 1; k < j; ++k) s -= hess[k][i] * y[k];
    y[i] = s / hess[i][i];
  }
  if (j > 0) {
    CVector vy(n, Complex(0.0));
    for (int k = 0; k < j; ++k)
      for (std::int64_t i = 0; i < n; ++i) vy[i] += y[k] * basis[k][i];
    res.x = apply_precond(vy);
  }

  res.final_residual = (j > 0) ? std::abs(g[j]) / bnorm : 1.0;
  res.converged = breakdown || res.final_residual <= cfg.tol;

  CVector ax = apply_op(res.x);
  double tnorm = 0.0;
  for (std::int64_t i = 0; i < n; ++i) tnorm += std::norm(rhs[i] - ax[i]);
  res.true_residual = std::sqrt(tnorm) / bnorm;
  return res;
}

}  // namespace helmsweep
