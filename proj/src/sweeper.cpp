#include "helmsweep/sweeper.hpp"

#include <algorithm>
#include <chrono>
#include <mutex>
#include <thread>

namespace helmsweep {

SweepPlan SweepPlan::make(int dim, int rounds) {
  if (dim != 2 && dim != 3) throw ConfigError("SweepPlan: dim must be 2 or 3");
  if (rounds < 1) throw ConfigError("SweepPlan: rounds must be >= 1");
  static const Vec3i order2[4] = {{1, 1, 1}, {-1, 1, 1}, {1, -1, 1}, {-1, -1, 1}};
  static const Vec3i order3[8] = {{1, 1, 1},  {-1, 1, 1},  {1, -1, 1},  {-1, -1, 1},
                                  {1, 1, -1}, {-1, 1, -1}, {1, -1, -1}, {-1, -1, -1}};
  SweepPlan plan;
  plan.dim = dim;
  plan.rounds = rounds;
  const int per = 1 << dim;
  plan.sweeps.reserve(static_cast<size_t>(rounds) * per);
  for (int r = 0; r < rounds; ++r)
    for (int l = 0; l < per; ++l) plan.sweeps.push_back(SweepDir{dim == 2 ? order2[l] : order3[l]});
  return plan;
}

bool similar_direction(int dim, const Vec3i& trace, const Vec3i& sweep) {
  int dot = 0;
  for (int a = 0; a < dim; ++a) {
    dot += trace[a] * sweep[a];
    if (dim == 3 && trace[a] * sweep[a] < 0) return false;
  }
  return dot > 0;
}

namespace {

bool opposite(const Vec3i& a, const Vec3i& b, int dim) {
  for (int k = 0; k < dim; ++k)
    if (a[k] != -b[k]) return false;
  return true;
}

// Rule 4: under a coordinate-plane projection in which the trace direction
// has exactly one zero component, the generating and consuming sweeps must
// not project to opposite directions.
bool rule4_excluded(const Vec3i& trace, const Vec3i& gen, const Vec3i& use) {
  for (int drop = 0; drop < 3; ++drop) {
    int p = (drop + 1) % 3, q = (drop + 2) % 3;
    int zeros = (trace[p] == 0) + (trace[q] == 0);
    if (zeros != 1) continue;
    if (gen[p] == -use[p] && gen[q] == -use[q]) return true;
  }
  return false;
}

}  // namespace

int route_trace(const SweepPlan& plan, int gen_sweep, const Cardinal& dir) {
  const Vec3i trace = dir.vec(plan.dim);
  const Vec3i gen = plan.sweeps[gen_sweep - 1].d;
  for (int l = gen_sweep; l <= plan.total(); ++l) {
    const Vec3i use = plan.sweeps[l - 1].d;
    if (!similar_direction(plan.dim, trace, use)) continue;
    if (l == gen_sweep) return l;  // the generating sweep itself may consume it downstream
    if (plan.dim == 2) {
      if (opposite(gen, use, 2)) continue;
    } else {
      if (rule4_excluded(trace, gen, use)) continue;
    }
    return l;
  }
  return 0;
}

std::vector<SubdomainState> build_subdomain_states(const ProblemSetup& setup,
                                                   const Partition& partition,
                                                   const LocalGrid& global_grid, int workers,
                                                   double* factor_seconds) {
  const int dim = partition.dim;
  const int pad = setup.pml.width;
  const int count = partition.cell_count();
  std::vector<SubdomainState> states(count);
  for (int id = 0; id < count; ++id) {
    SubdomainState& st = states[id];
    st.sub = partition.unflatten(id);
    st.id = id;
    st.cell = partition.cell_box(st.sub);
    st.owned = partition.owned_range(st.sub);
    st.grid.dim = dim;
    st.grid.h = global_grid.h;
    st.grid.origin = global_grid.origin;
    st.grid.range = st.owned;
    for (int a = 0; a < dim; ++a) {
      st.grid.range.lo[a] -= pad;
      st.grid.range.hi[a] += pad;
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  auto build_one = [&](int id) {
    SubdomainState& st = states[id];
    st.coeffs = build_coefficients(setup.pml, st.cell, st.grid);
    st.kappa = extend_to_subdomain(setup.medium, st.cell, st.grid, st.sub).kappa;
    st.op = assemble(st.grid, st.coeffs, st.kappa, true);
    st.fact = factorize(st.op);
  };
  const int nw = std::max(1, std::min(workers, count));
  if (nw == 1) {
    for (int id = 0; id < count; ++id) build_one(id);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < nw; ++w)
      pool.emplace_back([&, w]() {
        for (int id = w; id < count; id += nw) {
          try {
            build_one(id);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }
  if (factor_seconds)
    *factor_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return states;
}

DdmSolver::DdmSolver(const ProblemSetup& setup) {
  dim_ = setup.interior.dim;
  workers_ = std::max(1, setup.workers);
  pml_ = setup.pml;
  pml_.validate();
  if (pml_.width < 2)
    throw ConfigError("DdmSolver: pml.width must be >= 2 so trace lines stay off the shell");
  UniformGrid interior = UniformGrid::over(setup.interior, setup.intervals);
  partition_ = partition_domain(interior, setup.counts);
  weights_ = AssemblyWeights(partition_, pml_.width);

  global_grid_.dim = dim_;
  global_grid_.h = interior.h;
  for (int a = 0; a < dim_; ++a) {
    global_grid_.origin[a] = setup.interior.lo[a];
    global_grid_.range.lo[a] = -pml_.width;
    global_grid_.range.hi[a] = interior.intervals(a) + pml_.width;
  }
  global_grid_.range.dim = dim_;
  global_coeffs_ = build_coefficients(pml_, setup.interior, global_grid_);
  global_kappa_ =
      extend_to_subdomain(setup.medium, setup.interior, global_grid_, Vec3i{0, 0, 0}).kappa;

  states_ = build_subdomain_states(setup, partition_, global_grid_, workers_, &factor_seconds_);
}

const SparseOperator& DdmSolver::global_op() {
  if (!global_op_) global_op_ = assemble(global_grid_, global_coeffs_, global_kappa_, true);
  return *global_op_;
}

CVector DdmSolver::scale_source(std::span<const Complex> f) const {
  if (static_cast<std::int64_t>(f.size()) != global_grid_.node_count())
    throw ConfigError("scale_source: field size mismatch");
  CVector b(f.size());
  const std::int64_t n = global_grid_.node_count();
  for (std::int64_t i = 0; i < n; ++i) {
    Vec3i p = global_grid_.range.unlinear(i);
    b[i] = global_grid_.on_shell(p) ? Complex(0.0) : global_coeffs_.jacobian(p) * f[i];
  }
  return b;
}

CVector DdmSolver::ddm_solve(std::span<const Complex> b, int rounds, SolveReport* report,
                             bool track_residuals) {
  if (static_cast<std::int64_t>(b.size()) != global_grid_.node_count())
    throw ConfigError("ddm_solve: rhs size mismatch");
  const SweepPlan plan = SweepPlan::make(dim_, rounds);
  const int steps = sweep_step_count(partition_.counts, dim_);
  SolveReport local_report;
  SolveReport& rep = report ? *report : local_report;
  rep = SolveReport{};
  rep.factor_seconds = factor_seconds_;
  rep.sweep_seconds.assign(plan.total(), 0.0);
  rep.sweep_contrib_norm.assign(plan.total(), 0.0);

  // Split the J-scaled source with the assembly weights; shared nodes get
  // their fractional share so the pieces sum to b exactly.
  for (auto& st : states_) {
    st.mailbox.configure(dim_, plan.total());
    st.split_rhs.assign(st.grid.node_count(), Complex(0.0));
    GridRange sup = weights_.support(st.sub);
    const std::int64_t count = sup.node_count();
    for (std::int64_t i = 0; i < count; ++i) {
      Vec3i p = sup.unlinear(i);
      const double w = weights_.weight(st.sub, p);
      if (w == 0.0 || st.grid.on_shell(p)) continue;
      st.split_rhs[st.grid.range.linear(p)] = w * b[global_grid_.range.linear(p)];
    }
  }

  CVector u(global_grid_.node_count(), Complex(0.0));
  std::vector<double> solve_times;

  struct TaskResult {
    int state_id = -1;
    bool nonzero = false;
    CVector u_local;
    std::vector<TraceRecord> traces;
    double seconds = 0.0;
  };

  const auto t_total = std::chrono::steady_clock::now();
  for (int l = 1; l <= plan.total(); ++l) {
    const SweepDir dir = plan.sweeps[l - 1];
    const auto t_sweep = std::chrono::steady_clock::now();
    CVector sweep_contrib;
    sweep_contrib.assign(u.size(), Complex(0.0));
    for (int s = 1; s <= steps; ++s) {
      std::vector<Vec3i> group = step_group(partition_, dir, s);
      std::vector<TaskResult> results(group.size());

      auto run_task = [&](size_t gi) {
        const auto t0 = std::chrono::steady_clock::now();
        TaskResult& res = results[gi];
        res.state_id = partition_.flatten(group[gi]);
        SubdomainState& st = states_[res.state_id];
        CVector rhs = (l == 1) ? st.split_rhs : CVector(st.grid.node_count(), Complex(0.0));
        bool any = (l == 1);
        for (int a = 0; a < dim_; ++a)
          for (int sign = -1; sign <= 1; sign += 2) {
            const TraceRecord* t = st.mailbox.peek(l, Cardinal{a, sign});
            if (!t) continue;
            // Incoming trace travels opposite to the face it arrives on.
            trace_to_source(*t, st.grid, st.coeffs, rhs);
            any = true;
          }
        bool all_zero = true;
        if (any)
          for (const Complex& z : rhs)
            if (z != Complex(0.0)) {
              all_zero = false;
              break;
            }
        if (all_zero) {
          res.nonzero = false;
          res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          return;
        }
        res.nonzero = true;
        res.u_local = st.fact.solve(rhs);
        for (int a = 0; a < dim_; ++a)
          for (int sign = -1; sign <= 1; sign += 2) {
            if (!partition_.has_neighbor(st.sub, a, sign)) continue;
            res.traces.push_back(
                extract_trace(res.u_local, st.grid, st.owned, Cardinal{a, sign}, st.id));
          }
        res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      };

      const int nw = std::max(1, std::min<int>(workers_, static_cast<int>(group.size())));
      if (nw == 1) {
        for (size_t gi = 0; gi < group.size(); ++gi) run_task(gi);
      } else {
        std::vector<std::thread> pool;
        std::exception_ptr error;
        std::mutex error_mutex;
        for (int w = 0; w < nw; ++w)
          pool.emplace_back([&, w]() {
            for (size_t gi = w; gi < group.size(); gi += nw) {
              try {
                run_task(gi);
              } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
              }
            }
          });
        for (auto& th : pool) th.join();
        if (error) std::rethrow_exception(error);
      }

      // Canonical-order reduction at the step barrier.
      for (TaskResult& res : results) {
        if (res.nonzero) {
          ++rep.local_solves;
          solve_times.push_back(res.seconds);
        } else {
          ++rep.skipped_zero_solves;
          continue;
        }
        SubdomainState& st = states_[res.state_id];
        for (TraceRecord& t : res.traces) {
          ++rep.traces_generated;
          const int target_sweep = route_trace(plan, l, t.dir);
          if (target_sweep == 0) {
            ++rep.traces_discarded;
            continue;
          }
          ++rep.traces_routed;
          t.target_sweep = target_sweep;
          Vec3i nb = st.sub;
          nb[t.dir.axis] += t.dir.sign;
          states_[partition_.flatten(nb)].mailbox.deposit(t);
        }
        accumulate(sweep_contrib, global_grid_, res.u_local, st.grid, weights_, st.sub);
      }
    }
    for (size_t i = 0; i < u.size(); ++i) u[i] += sweep_contrib[i];
    rep.sweep_contrib_norm[l - 1] = norm2(sweep_contrib);
    rep.sweep_seconds[l - 1] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_sweep).count();

    if (track_residuals && l % plan.per_round() == 0) {
      const SparseOperator& A = global_op();
      CVector r = A.apply(u);
      double num = 0.0, den = 0.0;
      for (size_t i = 0; i < r.size(); ++i) {
        num += std::norm(b[i] - r[i]);
        den += std::norm(b[i]);
      }
      rep.round_residuals.push_back(den > 0 ? std::sqrt(num / den) : 0.0);
    }
  }
  rep.sweep_seconds_total =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_total).count();
  if (!solve_times.empty()) {
    std::sort(solve_times.begin(), solve_times.end());
    rep.median_subdomain_solve_seconds = solve_times[solve_times.size() / 2];
  }
  return u;
}

}  // namespace helmsweep
