#include "helmsweep/operator.hpp"

#include <algorithm>

namespace helmsweep {

CVector SparseOperator::apply(std::span<const Complex> v) const {
  if (static_cast<std::int64_t>(v.size()) != n)
    throw ConfigError("SparseOperator::apply: length mismatch");
  CVector w(n, Complex(0.0, 0.0));
  for (std::int64_t r = 0; r < n; ++r) {
    Complex s(0.0, 0.0);
    for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += val[k] * v[col[k]];
    w[r] = s;
  }
  return w;
}

Complex SparseOperator::entry(std::int64_t r, std::int64_t c) const {
  for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
    if (col[k] == c) return val[k];
  return Complex(0.0, 0.0);
}

SparseOperator assemble(const LocalGrid& grid, const PmlCoefficients& coeffs,
                        std::span<const double> kappa, bool scale_by_J) {
  if (static_cast<std::int64_t>(kappa.size()) != grid.node_count())
    throw ConfigError("assemble: kappa field size does not match grid");
  for (int a = 0; a < grid.dim; ++a)
    if (coeffs.range.lo[a] != grid.range.lo[a] || coeffs.range.hi[a] != grid.range.hi[a])
      throw ConfigError("assemble: coefficient range does not match grid");

  SparseOperator op;
  op.grid = grid;
  op.n = grid.node_count();
  op.row_ptr.assign(op.n + 1, 0);

  const int stencil = 2 * grid.dim + 1;
  op.col.reserve(op.n * stencil);
  op.val.reserve(op.n * stencil);

  for (std::int64_t r = 0; r < op.n; ++r) {
    Vec3i p = grid.range.unlinear(r);
    if (grid.on_shell(p)) {
      op.col.push_back(r);
      op.val.push_back(Complex(1.0, 0.0));
      op.row_ptr[r + 1] = static_cast<std::int64_t>(op.col.size());
      continue;
    }
    // Gather couplings; Dirichlet neighbors on the shell are eliminated
    // (their value is zero), so only their diagonal contribution remains.
    Complex diag = coeffs.jacobian(p) * kappa[r] * kappa[r];
    struct Link {
      std::int64_t c;
      Complex v;
    };
    std::array<Link, 6> links;
    int nlinks = 0;
    for (int a = 0; a < grid.dim; ++a) {
      for (int s = -1; s <= 1; s += 2) {
        Vec3i q = p;
        q[a] += s;
        Vec3i half = p;
        if (s == -1) half[a] -= 1;  // coupling sits between the lower node and its +1 neighbor
        Complex c = coeffs.coupling(a, half);
        diag -= c;
        if (!grid.on_shell(q)) links[nlinks++] = {grid.range.linear(q), c};
      }
    }
    std::sort(links.begin(), links.begin() + nlinks,
              [](const Link& x, const Link& y) { return x.c < y.c; });
    bool diag_done = false;
    for (int k = 0; k < nlinks; ++k) {
      if (!diag_done && links[k].c > r) {
        op.col.push_back(r);
        op.val.push_back(diag);
        diag_done = true;
      }
      op.col.push_back(links[k].c);
      op.val.push_back(links[k].v);
    }
    if (!diag_done) {
      op.col.push_back(r);
      op.val.push_back(diag);
    }
    op.row_ptr[r + 1] = static_cast<std::int64_t>(op.col.size());
  }

  if (!scale_by_J) {
    for (std::int64_t r = 0; r < op.n; ++r) {
      Vec3i p = grid.range.unlinear(r);
      if (grid.on_shell(p)) continue;
      Complex j = coeffs.jacobian(p);
      for (std::int64_t k = op.row_ptr[r]; k < op.row_ptr[r + 1]; ++k) op.val[k] /= j;
    }
  }
  return op;
}

}  // namespace helmsweep
