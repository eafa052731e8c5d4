#include "helmsweep/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace helmsweep {

namespace {
constexpr char kFieldMagic[4] = {'H', 'S', 'F', 'D'};
constexpr std::uint32_t kFieldVersion = 1;

// Direct-solve memory guards (padded node counts).
constexpr std::int64_t kMaxDirectNodes2D = 4'500'000;
constexpr std::int64_t kMaxDirectNodes3D = 450'000;

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot open output file " + path);
  f << header << "\n";
  for (const auto& r : rows) f << r << "\n";
}

}  // namespace

void write_field(const std::string& path, const LocalGrid& grid, std::span<const Complex> u) {
  if (static_cast<std::int64_t>(u.size()) != grid.node_count())
    throw ConfigError("write_field: size mismatch");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("write_field: cannot open " + path);
  f.write(kFieldMagic, 4);
  std::uint32_t version = kFieldVersion, dim = grid.dim;
  f.write(reinterpret_cast<const char*>(&version), 4);
  f.write(reinterpret_cast<const char*>(&dim), 4);
  std::uint32_t n[3];
  std::int32_t lo[3];
  for (int a = 0; a < 3; ++a) {
    n[a] = a < grid.dim ? static_cast<std::uint32_t>(grid.range.size(a)) : 1;
    lo[a] = a < grid.dim ? grid.range.lo[a] : 0;
  }
  f.write(reinterpret_cast<const char*>(n), 12);
  f.write(reinterpret_cast<const char*>(lo), 12);
  f.write(reinterpret_cast<const char*>(grid.h.data()), 24);
  f.write(reinterpret_cast<const char*>(grid.origin.data()), 24);
  f.write(reinterpret_cast<const char*>(u.data()), static_cast<std::streamsize>(u.size() * 16));
  if (!f) throw DataError("write_field: write failed for " + path);
}

FieldDump read_field(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("read_field: cannot open " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::memcmp(magic, kFieldMagic, 4) != 0)
    throw DataError("read_field: bad magic in " + path);
  std::uint32_t version, dim, n[3];
  std::int32_t lo[3];
  f.read(reinterpret_cast<char*>(&version), 4);
  f.read(reinterpret_cast<char*>(&dim), 4);
  f.read(reinterpret_cast<char*>(n), 12);
  f.read(reinterpret_cast<char*>(lo), 12);
  if (version != kFieldVersion) throw DataError("read_field: unsupported version");
  FieldDump d;
  d.grid.dim = static_cast<int>(dim);
  d.grid.range.dim = d.grid.dim;
  for (int a = 0; a < d.grid.dim; ++a) {
    d.grid.range.lo[a] = lo[a];
    d.grid.range.hi[a] = lo[a] + static_cast<int>(n[a]) - 1;
  }
  f.read(reinterpret_cast<char*>(d.grid.h.data()), 24);
  f.read(reinterpret_cast<char*>(d.grid.origin.data()), 24);
  d.values.resize(d.grid.node_count());
  f.read(reinterpret_cast<char*>(d.values.data()),
         static_cast<std::streamsize>(d.values.size() * 16));
  if (!f) throw DataError("read_field: truncated payload in " + path);
  return d;
}

CVector sample_source(const SourceSpec& spec, const WaveNumberModel& medium,
                      const LocalGrid& grid, const Box& interior) {
  CVector f(grid.node_count(), Complex(0.0));
  const int dim = grid.dim;

  auto add_delta = [&](const Vec3d& pos) {
    Vec3i p{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
      double t = (pos[a] - grid.origin[a]) / grid.h[a];
      int i = static_cast<int>(std::lround(t));
      // Keep the node strictly inside the interior box.
      i = std::max(1, std::min(i, static_cast<int>(std::lround(
                                      (interior.hi[a] - grid.origin[a]) / grid.h[a])) -
                                      1));
      p[a] = i;
    }
    double amp = 1.0;
    for (int a = 0; a < dim; ++a) amp /= grid.h[a];
    f[grid.range.linear(p)] += amp;
  };

  switch (spec.kind) {
    case SourceSpec::Kind::Gaussian: {
      const double kappa = eval_kappa(medium, spec.center);
      const double beta = std::pow(4.0 * kappa / M_PI, 2.0);
      const double scale = dim == 2 ? 16.0 * kappa * kappa / std::pow(M_PI, 3.0)
                                    : 64.0 * std::pow(kappa, 3.0) / std::pow(M_PI, 4.5);
      const std::int64_t count = grid.node_count();
      for (std::int64_t i = 0; i < count; ++i) {
        Vec3i p = grid.range.unlinear(i);
        double r2 = 0.0;
        bool inside = true;
        for (int a = 0; a < dim; ++a) {
          double x = grid.coord(a, p[a]);
          if (x < interior.lo[a] || x > interior.hi[a]) inside = false;
          r2 += (x - spec.center[a]) * (x - spec.center[a]);
        }
        if (inside) f[i] = scale * std::exp(-beta * r2);
      }
      break;
    }
    case SourceSpec::Kind::GridDelta:
      add_delta(spec.center);
      break;
    case SourceSpec::Kind::Shots: {
      std::mt19937_64 rng(spec.seed);
      std::uniform_real_distribution<double> unif(0.12, 0.88);
      for (int s = 0; s < spec.count; ++s) {
        Vec3d pos{0.0, 0.0, 0.0};
        for (int a = 0; a < dim; ++a)
          pos[a] = interior.lo[a] + unif(rng) * interior.extent(a);
        // Shots sit at a fixed depth below the top interior face.
        pos[dim - 1] = interior.hi[dim - 1] - spec.depth_fraction * interior.extent(dim - 1);
        add_delta(pos);
      }
      break;
    }
  }
  return f;
}

ErrorPair compute_errors(std::span<const Complex> u, std::span<const Complex> u_ref,
                         const LocalGrid& grid, const Vec3i& interior_intervals) {
  if (u.size() != u_ref.size())
    throw ConfigError("compute_errors: fields live on different grids");
  const int dim = grid.dim;
  GridRange inner;
  inner.dim = dim;
  for (int a = 0; a < dim; ++a) {
    inner.lo[a] = 0;
    inner.hi[a] = interior_intervals[a];
  }
  double diff2 = 0.0, ref2 = 0.0, gdiff2 = 0.0, gref2 = 0.0;
  const std::int64_t count = inner.node_count();
  for (std::int64_t i = 0; i < count; ++i) {
    Vec3i p = inner.unlinear(i);
    const std::int64_t id = grid.range.linear(p);
    diff2 += std::norm(u[id] - u_ref[id]);
    ref2 += std::norm(u_ref[id]);
    for (int a = 0; a < dim; ++a) {
      if (p[a] + 1 > inner.hi[a]) continue;
      Vec3i q = p;
      q[a] += 1;
      const std::int64_t qid = grid.range.linear(q);
      const Complex du = (u[qid] - u[id]) / grid.h[a];
      const Complex dr = (u_ref[qid] - u_ref[id]) / grid.h[a];
      gdiff2 += std::norm(du - dr);
      gref2 += std::norm(dr);
    }
  }
  if (ref2 == 0.0) {
    if (diff2 == 0.0) return {0.0, 0.0};
    throw DataError("compute_errors: zero reference norm");
  }
  ErrorPair e;
  e.l2 = std::sqrt(diff2 / ref2);
  e.h1 = std::sqrt((diff2 + gdiff2) / (ref2 + gref2));
  return e;
}

CVector global_direct_solve(const RunConfig& cfg, std::span<const Complex> f,
                            LocalGrid* grid_out) {
  LocalGrid grid;
  grid.dim = cfg.dim;
  grid.range.dim = cfg.dim;
  for (int a = 0; a < cfg.dim; ++a) {
    grid.h[a] = cfg.interior.extent(a) / cfg.intervals[a];
    grid.origin[a] = cfg.interior.lo[a];
    grid.range.lo[a] = -cfg.pml.width;
    grid.range.hi[a] = cfg.intervals[a] + cfg.pml.width;
  }
  const std::int64_t nodes = grid.node_count();
  const std::int64_t guard = cfg.dim == 2 ? kMaxDirectNodes2D : kMaxDirectNodes3D;
  if (nodes > guard)
    throw ConfigError("global_direct_solve: " + std::to_string(nodes) +
                      " nodes exceed the direct-solve memory guard; reduce the scale");
  PmlCoefficients coeffs = build_coefficients(cfg.pml, cfg.interior, grid);
  std::vector<double> kappa =
      extend_to_subdomain(cfg.medium, cfg.interior, grid, Vec3i{0, 0, 0}).kappa;
  SparseOperator op = assemble(grid, coeffs, kappa, true);
  Factorization fact = factorize(op);
  CVector b(nodes, Complex(0.0));
  for (std::int64_t i = 0; i < nodes; ++i) {
    Vec3i p = grid.range.unlinear(i);
    if (!grid.on_shell(p)) b[i] = coeffs.jacobian(p) * f[i];
  }
  CVector u = fact.solve(b);
  if (grid_out) *grid_out = grid;
  return u;
}

ReferenceSolution make_reference(const RunConfig& cfg, int r) {
  if (r < 1) throw ConfigError("make_reference: refinement factor must be >= 1");
  RunConfig fine = cfg;
  for (int a = 0; a < cfg.dim; ++a) fine.intervals[a] = cfg.intervals[a] * r;
  fine.pml.width = cfg.pml.width * r;  // same physical pad width
  ReferenceSolution ref;
  CVector f = [&]() {
    LocalGrid g;
    g.dim = fine.dim;
    g.range.dim = fine.dim;
    for (int a = 0; a < fine.dim; ++a) {
      g.h[a] = fine.interior.extent(a) / fine.intervals[a];
      g.origin[a] = fine.interior.lo[a];
      g.range.lo[a] = -fine.pml.width;
      g.range.hi[a] = fine.intervals[a] + fine.pml.width;
    }
    return sample_source(fine.source, fine.medium, g, fine.interior);
  }();
  ref.u = global_direct_solve(fine, f, &ref.grid);
  return ref;
}

CVector ReferenceSolution::inject(const LocalGrid& coarse, int ratio) const {
  CVector out(coarse.node_count(), Complex(0.0));
  const std::int64_t count = coarse.node_count();
  for (std::int64_t i = 0; i < count; ++i) {
    Vec3i p = coarse.range.unlinear(i);
    Vec3i q{0, 0, 0};
    bool ok = true;
    for (int a = 0; a < coarse.dim; ++a) {
      q[a] = p[a] * ratio;
      if (q[a] < grid.range.lo[a] || q[a] > grid.range.hi[a]) ok = false;
    }
    if (ok) out[i] = u[grid.range.linear(q)];
  }
  return out;
}

double fit_rate(const std::vector<double>& h, const std::vector<double>& err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = static_cast<int>(h.size());
  for (int i = 0; i < n; ++i) {
    double x = std::log(h[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

RunResult run_direct(const RunConfig& cfg) {
  RunResult res;
  DdmSolver solver(cfg.setup());
  res.grid = solver.global_grid();
  CVector f = sample_source(cfg.source, cfg.medium, res.grid, cfg.interior);
  CVector b = solver.scale_source(f);
  res.field = solver.ddm_solve(b, cfg.rounds, &res.report, true);
  res.rel_residual = res.report.round_residuals.empty() ? -1.0 : res.report.round_residuals.back();
  if (cfg.compare_global) {
    CVector ug = global_direct_solve(cfg, f, nullptr);
    ErrorPair gap = compute_errors(res.field, ug, res.grid, cfg.intervals);
    res.global_gap_l2 = gap.l2;
  }
  return res;
}

RunResult run_precond(const RunConfig& cfg) {
  RunResult res;
  DdmSolver solver(cfg.setup());
  res.grid = solver.global_grid();
  CVector f = sample_source(cfg.source, cfg.medium, res.grid, cfg.interior);
  CVector b = solver.scale_source(f);
  const SparseOperator& A = solver.global_op();
  LinearMap apply_op = [&](std::span<const Complex> v) { return A.apply(v); };
  LinearMap apply_pc = [&](std::span<const Complex> v) {
    return solver.ddm_solve(v, cfg.rounds, nullptr, false);
  };
  const auto t0 = std::chrono::steady_clock::now();
  GmresResult g = gmres(apply_op, apply_pc, b, cfg.gmres);
  res.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.field = std::move(g.x);
  res.gmres_iterations = g.iterations;
  res.gmres_history = std::move(g.history);
  res.gmres_true_residual = g.true_residual;
  res.report.factor_seconds = solver.factor_seconds();
  return res;
}

RunResult run_converge(const RunConfig& cfg) {
  RunResult res;
  // One reference from the finest level serves every level.
  RunConfig finest = cfg;
  const int finest_n = *std::max_element(cfg.levels.begin(), cfg.levels.end());
  for (int a = 0; a < cfg.dim; ++a) finest.intervals[a] = finest_n;
  finest.pml.width = cfg.pml.width * finest_n / cfg.intervals[0];
  ReferenceSolution ref = make_reference(finest, cfg.reference_intervals / finest_n);

  std::vector<double> hs, e2, eh;
  for (int n : cfg.levels) {
    RunConfig level = cfg;
    for (int a = 0; a < cfg.dim; ++a) level.intervals[a] = n;
    level.pml.width = cfg.pml.width * n / cfg.intervals[0];  // fixed physical width
    DdmSolver solver(level.setup());
    CVector f = sample_source(level.source, level.medium, solver.global_grid(), level.interior);
    CVector b = solver.scale_source(f);
    SolveReport rep;
    CVector u = solver.ddm_solve(b, level.rounds, &rep, false);
    CVector uref = ref.inject(solver.global_grid(), cfg.reference_intervals / n);
    LevelResult lr;
    lr.n = n;
    lr.h = level.interior.extent(0) / n;
    lr.density = level.mesh_density();
    lr.err = compute_errors(u, uref, solver.global_grid(), level.intervals);
    res.levels.push_back(lr);
    hs.push_back(lr.h);
    e2.push_back(lr.err.l2);
    eh.push_back(lr.err.h1);
  }
  res.rate_l2 = fit_rate(hs, e2);
  res.rate_h1 = fit_rate(hs, eh);
  return res;
}

RunResult run_pipeline(const RunConfig& cfg) {
  RunResult res;
  PipelineScenario sc;
  sc.dim = cfg.dim;
  sc.counts = cfg.counts;
  sc.n_rhs = cfg.pipeline_n_rhs > 0 ? cfg.pipeline_n_rhs : 2 * sweep_step_count(cfg.counts, cfg.dim);
  sc.n_iter = cfg.pipeline_n_iter > 0 ? cfg.pipeline_n_iter : 1;
  if (cfg.pipeline_t0 > 0.0) {
    sc.t0 = cfg.pipeline_t0;
  } else {
    // Probe run: median subdomain solve time of one DDM application.
    DdmSolver solver(cfg.setup());
    CVector f = sample_source(cfg.source, cfg.medium, solver.global_grid(), cfg.interior);
    CVector b = solver.scale_source(f);
    SolveReport rep;
    solver.ddm_solve(b, 1, &rep, false);
    sc.t0 = std::max(rep.median_subdomain_solve_seconds, 1e-9);
    res.report = rep;
  }
  res.predicted = average_time_per_rhs(sc);
  res.simulated = simulate_pipeline(sc);
  return res;
}

void write_outputs(const RunConfig& cfg, const RunResult& res) {
  if (cfg.out_prefix.empty()) return;
  switch (cfg.mode) {
    case RunMode::Direct: {
      write_field(cfg.out_prefix + "_field.hsfd", res.grid, res.field);
      std::vector<std::string> rows;
      std::ostringstream row;
      row << res.rel_residual << "," << res.global_gap_l2 << ","
          << res.report.factor_seconds << "," << res.report.sweep_seconds_total << ","
          << res.report.traces_routed << "," << res.report.traces_discarded;
      rows.push_back(row.str());
      write_csv(cfg.out_prefix + "_direct.csv",
                "rel_residual,global_gap_l2,t_factor,t_sweeps,traces_routed,traces_discarded",
                rows);
      break;
    }
    case RunMode::Precond: {
      write_field(cfg.out_prefix + "_field.hsfd", res.grid, res.field);
      std::vector<std::string> rows;
      std::ostringstream row;
      row << cfg.intervals[0] << "," << cfg.counts[0] << ","
          << cfg.medium.max_kappa(cfg.interior) / (2.0 * M_PI) << "," << res.gmres_iterations
          << "," << res.solve_seconds << "," << res.gmres_true_residual;
      rows.push_back(row.str());
      write_csv(cfg.out_prefix + "_precond.csv", "mesh_n,partition,omega_over_2pi,n_iter,t_slv,true_residual",
                rows);
      break;
    }
    case RunMode::Converge: {
      std::vector<std::string> rows;
      for (const auto& lv : res.levels) {
        std::ostringstream row;
        row << lv.n << "," << lv.h << "," << lv.density << "," << lv.err.l2 << "," << lv.err.h1;
        rows.push_back(row.str());
      }
      std::ostringstream tail;
      tail << "# fitted rates," << res.rate_l2 << "," << res.rate_h1;
      rows.push_back(tail.str());
      write_csv(cfg.out_prefix + "_converge.csv", "n,h,density,l2_error,h1_error", rows);
      break;
    }
    case RunMode::Pipeline: {
      std::vector<std::string> rows;
      std::ostringstream row;
      row << cfg.counts[0] << "," << cfg.counts[1] << "," << (cfg.dim == 3 ? cfg.counts[2] : 1)
          << "," << (cfg.pipeline_n_rhs > 0 ? cfg.pipeline_n_rhs : 0) << ","
          << res.predicted.average_per_rhs << "," << res.simulated.average_per_rhs << ","
          << res.predicted.idle_fraction;
      rows.push_back(row.str());
      write_csv(cfg.out_prefix + "_pipeline.csv",
                "n1,n2,n3,n_rhs,predicted_avg,simulated_avg,idle_fraction", rows);
      break;
    }
  }
}

}  // namespace

RunResult run(const RunConfig& cfg) {
  RunResult res;
  switch (cfg.mode) {
    case RunMode::Direct:
      res = run_direct(cfg);
      break;
    case RunMode::Precond:
      res = run_precond(cfg);
      break;
    case RunMode::Converge:
      res = run_converge(cfg);
      break;
    case RunMode::Pipeline:
      res = run_pipeline(cfg);
      break;
  }
  for (const std::string& w : interface_alignment_warnings(cfg.medium, partition_domain(
                                    UniformGrid::over(cfg.interior, cfg.intervals), cfg.counts)))
    res.warnings.push_back(w);
  write_outputs(cfg, res);
  return res;
}

}  // namespace helmsweep
