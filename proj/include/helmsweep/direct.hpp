#pragma once

#include <memory>
#include <span>

#include "helmsweep/operator.hpp"

namespace helmsweep {

struct FactorStats {
  std::int64_t n = 0;
  std::int64_t matrix_nnz = 0;
  std::int64_t factor_nnz = 0;   // stored complex entries in L and D
  std::int64_t peak_bytes = 0;   // active fronts high-water mark
  double factor_seconds = 0.0;
  double fill_ratio() const { return matrix_nnz ? double(factor_nnz) / matrix_nnz : 0.0; }
};

// Multifrontal LDL^T of the complex-symmetric J-scaled operator, ordered by
// geometric nested dissection of the grid box. No pivoting; a pivot below
// 1e-14 of the matrix scale aborts with the offending index.
class Factorization {
 public:
  Factorization();
  ~Factorization();
  Factorization(Factorization&&) noexcept;
  Factorization& operator=(Factorization&&) noexcept;

  // Reentrant; safe for concurrent calls on one factorization.
  CVector solve(std::span<const Complex> rhs) const;
  void solve_inplace(std::span<Complex> x) const;

  const FactorStats& stats() const;

 private:
  friend Factorization factorize(const SparseOperator& op);
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Factorization factorize(const SparseOperator& op);

}  // namespace helmsweep
