#pragma once

#include "helmsweep/direct.hpp"
#include "helmsweep/media.hpp"
#include "helmsweep/transfer.hpp"

namespace helmsweep {

// Ordered diagonal sweep directions over one or more rounds. One round is
// 4 sweeps in 2D (top-right, top-left, bottom-right, bottom-left) and the
// 8-direction list in 3D.
struct SweepPlan {
  int dim = 2;
  int rounds = 1;
  std::vector<SweepDir> sweeps;  // rounds * 2^dim entries

  static SweepPlan make(int dim, int rounds);
  int per_round() const { return 1 << dim; }
  int total() const { return static_cast<int>(sweeps.size()); }
};

// Smallest sweep l' >= l that may consume the trace: the trace direction
// must be similar to the sweep direction (Rule 1/3) and not excluded by the
// opposite-direction rule (Rule 2 in 2D, plane-projection Rule 4 in 3D).
// Returns 0 when no remaining sweep qualifies (discard).
int route_trace(const SweepPlan& plan, int gen_sweep, const Cardinal& dir);

bool similar_direction(int dim, const Vec3i& trace, const Vec3i& sweep);

struct SubdomainState {
  Vec3i sub{0, 0, 0};
  int id = 0;
  Box cell;
  LocalGrid grid;
  GridRange owned;
  PmlCoefficients coeffs;
  std::vector<double> kappa;
  SparseOperator op;
  Factorization fact;
  TraceMailbox mailbox;
  CVector split_rhs;  // this subdomain's share of the J-scaled source
};

struct SolveReport {
  double factor_seconds = 0.0;
  double sweep_seconds_total = 0.0;
  std::vector<double> sweep_seconds;
  std::vector<double> sweep_contrib_norm;  // norm of each sweep's weighted contribution
  std::int64_t traces_generated = 0;
  std::int64_t traces_routed = 0;
  std::int64_t traces_discarded = 0;
  std::int64_t local_solves = 0;
  std::int64_t skipped_zero_solves = 0;
  std::vector<double> round_residuals;  // filled when residuals are requested
  double median_subdomain_solve_seconds = 0.0;
};

struct ProblemSetup {
  Box interior;        // PML-free box
  Vec3i intervals{1, 1, 1};
  Vec3i counts{1, 1, 1};
  WaveNumberModel medium;
  PmlSpec pml;
  int workers = 1;
};

// Owns the padded global grid, the partition, and one factorized state per
// subdomain. Factorizations happen once and are reused across sweeps,
// rounds and GMRES iterations.
class DdmSolver {
 public:
  explicit DdmSolver(const ProblemSetup& setup);

  const LocalGrid& global_grid() const { return global_grid_; }
  const Partition& partition() const { return partition_; }
  const AssemblyWeights& weights() const { return weights_; }
  const PmlCoefficients& global_coeffs() const { return global_coeffs_; }
  const std::vector<double>& global_kappa() const { return global_kappa_; }
  const SparseOperator& global_op();  // assembled on first use
  std::vector<SubdomainState>& states() { return states_; }
  double factor_seconds() const { return factor_seconds_; }

  // One DDM application: rounds full sweep cycles driven by the J-scaled
  // right-hand side b on the padded global grid. Deterministic for any
  // worker count. When track_residuals is set, the global operator is
  // assembled and the relative residual is recorded after every round.
  CVector ddm_solve(std::span<const Complex> b, int rounds, SolveReport* report = nullptr,
                    bool track_residuals = false);

  // J-scaled RHS from a physical source field f sampled on the padded grid.
  CVector scale_source(std::span<const Complex> f) const;

 private:
  void build_states(const ProblemSetup& setup);

  int dim_ = 2;
  int workers_ = 1;
  PmlSpec pml_;
  Partition partition_;
  AssemblyWeights weights_;
  LocalGrid global_grid_;
  PmlCoefficients global_coeffs_;
  std::vector<double> global_kappa_;
  std::optional<SparseOperator> global_op_;
  std::vector<SubdomainState> states_;
  double factor_seconds_ = 0.0;
};

// Per-subdomain padded grids, extended media, assembled and factorized
// operators. Factorizations are independent and may run concurrently.
std::vector<SubdomainState> build_subdomain_states(const ProblemSetup& setup,
                                                   const Partition& partition,
                                                   const LocalGrid& global_grid, int workers,
                                                   double* factor_seconds);

}  // namespace helmsweep
