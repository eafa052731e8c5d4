#pragma once

#include <span>

#include "helmsweep/pml.hpp"

namespace helmsweep {

// Complex sparse matrix in CSR form over the nodes of a local grid.
// Assembled from the conservative second-order stencil of
//   div(A grad u) + J kappa^2 u   (the J-scaled PML operator),
// which is complex symmetric. Outermost grid layer carries identity rows
// (homogeneous Dirichlet closure).
struct SparseOperator {
  LocalGrid grid;
  std::int64_t n = 0;
  std::vector<std::int64_t> row_ptr;
  std::vector<std::int64_t> col;
  CVector val;

  CVector apply(std::span<const Complex> v) const;
  Complex entry(std::int64_t r, std::int64_t c) const;  // 0 if absent
};

// scale_by_J=true assembles the complex-symmetric J-scaled form; false
// divides each row by J afterwards (the raw PML equation, used only for
// residual diagnostics).
SparseOperator assemble(const LocalGrid& grid, const PmlCoefficients& coeffs,
                        std::span<const double> kappa, bool scale_by_J = true);

}  // namespace helmsweep
