#pragma once

#include "helmsweep/common.hpp"

namespace helmsweep {

// Cost model for pipelined multi-RHS sweeping with one processor per
// subdomain: n_rhs right-hand sides stream through rounds of diagonal
// sweeps, each subdomain solve costing t0 seconds.
struct PipelineScenario {
  int dim = 3;
  Vec3i counts{1, 1, 1};
  int n_rhs = 1;
  int n_iter = 1;  // preconditioner applications per RHS
  double t0 = 1.0;

  void validate() const;
  int sweeps_per_iter() const { return 1 << dim; }
  int steps() const;
};

struct PipelineCost {
  double average_per_rhs = 0.0;  // seconds
  double idle_fraction = 0.0;
};

// Closed form: 2^dim * n_iter * t0 + steps/n_rhs * t0, with idle fraction
// steps / (2^dim * n_iter * n_rhs).
PipelineCost average_time_per_rhs(const PipelineScenario& s);

struct PipelineSimulation {
  std::vector<double> completion_times;  // per RHS, seconds
  double makespan = 0.0;
  double average_per_rhs = 0.0;  // makespan / n_rhs
};

// Discrete-event schedule of (rhs, sweep, step) tasks on one unit-capacity
// processor per subdomain with step precedence inside a sweep and sweep
// ordering per RHS. Matches the closed form exactly when n_rhs is a
// multiple of the step count.
PipelineSimulation simulate_pipeline(const PipelineScenario& s);

}  // namespace helmsweep
