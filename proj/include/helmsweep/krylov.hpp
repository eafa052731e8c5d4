#pragma once

#include <functional>
#include <span>

#include "helmsweep/common.hpp"

namespace helmsweep {

struct GmresConfig {
  double tol = 1e-6;  // relative residual target
  int max_iterations = 100;
  bool record_history = true;

  void validate() const {
    if (!(tol > 0.0)) throw ConfigError("GmresConfig: tol must be positive");
    if (max_iterations < 1) throw ConfigError("GmresConfig: max_iterations must be >= 1");
  }
};

struct GmresResult {
  CVector x;
  std::vector<double> history;  // relative residual per iteration, starting at iteration 0
  int iterations = 0;
  bool converged = false;
  double final_residual = 0.0;  // recursive estimate
  double true_residual = 0.0;   // recomputed from the operator at the end
};

using LinearMap = std::function<CVector(std::span<const Complex>)>;

// Full (non-restarted) right-preconditioned GMRES with modified
// Gram-Schmidt. The recorded residual is the true unpreconditioned one;
// pass an identity map as preconditioner for plain GMRES.
GmresResult gmres(const LinearMap& apply_op, const LinearMap& apply_precond,
                  std::span<const Complex> rhs, const GmresConfig& cfg);

inline LinearMap identity_preconditioner() {
  return [](std::span<const Complex> v) { return CVector(v.begin(), v.end()); };
}

}  // namespace helmsweep
