#pragma once

#include "helmsweep/config.hpp"
#include "helmsweep/krylov.hpp"
#include "helmsweep/pipeline.hpp"

namespace helmsweep {

// Complex field dumps: magic, dims, index origin, spacing, physical origin,
// then interleaved re/im doubles. Round-trips bit-exactly.
void write_field(const std::string& path, const LocalGrid& grid, std::span<const Complex> u);
struct FieldDump {
  LocalGrid grid;
  CVector values;
};
FieldDump read_field(const std::string& path);

// One right-hand side sampled on the padded grid (physical source f).
CVector sample_source(const SourceSpec& spec, const WaveNumberModel& medium,
                      const LocalGrid& grid, const Box& interior);

struct ErrorPair {
  double l2 = 0.0;
  double h1 = 0.0;
};

// Relative discrete L2 and H1 errors over the interior (PML-free) nodes.
ErrorPair compute_errors(std::span<const Complex> u, std::span<const Complex> u_ref,
                         const LocalGrid& grid, const Vec3i& interior_intervals);

// Reference solution: a global direct solve of the r-times refined problem
// (same PML width in physical units), injectable at coincident nodes of any
// grid whose intervals divide the refined ones.
struct ReferenceSolution {
  LocalGrid grid;
  CVector u;
  CVector inject(const LocalGrid& coarse, int ratio) const;
};
ReferenceSolution make_reference(const RunConfig& cfg, int r = 2);

// Global direct solve of a config's padded problem (no domain decomposition).
CVector global_direct_solve(const RunConfig& cfg, std::span<const Complex> f, LocalGrid* grid_out);

struct LevelResult {
  int n = 0;
  double h = 0.0;
  double density = 0.0;
  ErrorPair err;
};

struct RunResult {
  SolveReport report;
  LocalGrid grid;
  CVector field;
  double rel_residual = -1.0;   // direct mode: residual of the DDM field
  double global_gap_l2 = -1.0;  // direct mode with compare.global
  std::vector<LevelResult> levels;
  double rate_l2 = 0.0, rate_h1 = 0.0;
  int gmres_iterations = 0;
  std::vector<double> gmres_history;
  double gmres_true_residual = -1.0;
  double solve_seconds = 0.0;
  PipelineCost predicted;
  PipelineSimulation simulated;
  std::vector<std::string> warnings;
};

RunResult run(const RunConfig& cfg);

// Least-squares slope of log(err) against log(h).
double fit_rate(const std::vector<double>& h, const std::vector<double>& err);

}  // namespace helmsweep
