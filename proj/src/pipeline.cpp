#include "helmsweep/pipeline.hpp"

#include <algorithm>
#include <queue>

#include "helmsweep/sweeper.hpp"

namespace helmsweep {

void PipelineScenario::validate() const {
  if (dim != 2 && dim != 3) throw ConfigError("PipelineScenario: dim must be 2 or 3");
  for (int a = 0; a < dim; ++a)
    if (counts[a] < 1) throw ConfigError("PipelineScenario: counts must be >= 1");
  if (n_rhs < 1 || n_iter < 1 || !(t0 > 0.0))
    throw ConfigError("PipelineScenario: n_rhs, n_iter and t0 must be positive");
}

int PipelineScenario::steps() const { return sweep_step_count(counts, dim); }

PipelineCost average_time_per_rhs(const PipelineScenario& s) {
  s.validate();
  PipelineCost c;
  const double sweeps = static_cast<double>(s.sweeps_per_iter()) * s.n_iter;
  c.average_per_rhs = sweeps * s.t0 + static_cast<double>(s.steps()) / s.n_rhs * s.t0;
  c.idle_fraction = static_cast<double>(s.steps()) / (sweeps * s.n_rhs);
  return c;
}

PipelineSimulation simulate_pipeline(const PipelineScenario& s) {
  s.validate();
  const int steps = s.steps();
  const int S = s.sweeps_per_iter() * s.n_iter;  // sweeps per RHS
  const SweepPlan plan = SweepPlan::make(s.dim, s.n_iter);

  // Subdomain bookkeeping.
  Vec3i counts = s.counts;
  for (int a = s.dim; a < 3; ++a) counts[a] = 1;
  const int nsub = counts[0] * counts[1] * counts[2];
  auto flatten = [&](const Vec3i& p) { return (p[2] * counts[1] + p[1]) * counts[0] + p[0]; };

  // Trace-dependency pattern, identical for every RHS: task (l,p) waits for
  // (l_gen,q) whenever q's sweep-l_gen trace toward p routes to sweep l.
  // Stored as forward lists: completing (l_gen,q) releases these (l,p).
  std::vector<std::vector<int>> forward(static_cast<size_t>(S) * nsub);
  std::vector<int> dep_count(static_cast<size_t>(S) * nsub, 0);
  for (int l_gen = 1; l_gen <= S; ++l_gen) {
    for (int a = 0; a < s.dim; ++a)
      for (int sign = -1; sign <= 1; sign += 2) {
        const int l_use = route_trace(plan, l_gen, Cardinal{a, sign});
        if (l_use == 0) continue;
        for (int q = 0; q < nsub; ++q) {
          Vec3i qp{q % counts[0], (q / counts[0]) % counts[1], q / (counts[0] * counts[1])};
          Vec3i pp = qp;
          pp[a] += sign;
          if (pp[a] < 0 || pp[a] >= counts[a]) continue;
          const int p = flatten(pp);
          forward[static_cast<size_t>(l_gen - 1) * nsub + q].push_back((l_use - 1) * nsub + p);
          ++dep_count[static_cast<size_t>(l_use - 1) * nsub + p];
        }
      }
  }

  const std::int64_t task_count = static_cast<std::int64_t>(s.n_rhs) * S * nsub;
  std::vector<int> remaining(task_count);
  for (int r = 0; r < s.n_rhs; ++r)
    std::copy(dep_count.begin(), dep_count.end(),
              remaining.begin() + static_cast<std::int64_t>(r) * S * nsub);

  // Per-processor ready queues, FIFO by (rhs, sweep).
  using Key = std::pair<int, int>;  // (rhs, sweep index), smaller first
  std::vector<std::priority_queue<Key, std::vector<Key>, std::greater<Key>>> ready(nsub);
  auto task_id = [&](int r, int l0, int p) {
    return (static_cast<std::int64_t>(r) * S + l0) * nsub + p;
  };
  for (int r = 0; r < s.n_rhs; ++r)
    for (int l0 = 0; l0 < S; ++l0)
      for (int p = 0; p < nsub; ++p)
        if (remaining[task_id(r, l0, p)] == 0) ready[p].push({r, l0});

  PipelineSimulation sim;
  sim.completion_times.assign(s.n_rhs, 0.0);
  std::int64_t done = 0;
  std::int64_t tick = 0;
  std::vector<Key> running(nsub);
  std::vector<char> busy(nsub, 0);
  while (done < task_count) {
    ++tick;
    // Start phase: every processor picks its best ready task.
    for (int p = 0; p < nsub; ++p) {
      if (ready[p].empty()) continue;
      running[p] = ready[p].top();
      ready[p].pop();
      busy[p] = 1;
    }
    // Completion phase at the tick boundary.
    for (int p = 0; p < nsub; ++p) {
      if (!busy[p]) continue;
      busy[p] = 0;
      const auto [r, l0] = running[p];
      ++done;
      sim.completion_times[r] = std::max(sim.completion_times[r], tick * s.t0);
      for (int dep : forward[static_cast<size_t>(l0) * nsub + p]) {
        std::int64_t t = static_cast<std::int64_t>(r) * S * nsub + dep;
        if (--remaining[t] == 0) ready[dep % nsub].push({r, dep / nsub});
      }
    }
  }
  sim.makespan = tick * s.t0;
  sim.average_per_rhs = sim.makespan / s.n_rhs;
  return sim;
}

}  // namespace helmsweep
