#pragma once

#include <map>
#include <optional>

#include "helmsweep/krylov.hpp"
#include "helmsweep/sweeper.hpp"

namespace helmsweep {

struct SourceSpec {
  enum class Kind { Gaussian, GridDelta, Shots };
  Kind kind = Kind::Gaussian;
  Vec3d center{0.0, 0.0, 0.0};  // Gaussian center or delta position
  int count = 1;                // number of shots
  double depth_fraction = 0.25; // shot depth below the top interior face
  std::uint64_t seed = 1;
};

enum class RunMode { Direct, Precond, Converge, Pipeline };

struct RunConfig {
  RunMode mode = RunMode::Direct;
  int dim = 2;
  Box domain;    // padded box (derived from interior + pml when omitted)
  Box interior;  // PML-free box
  Vec3i intervals{1, 1, 1};
  Vec3i counts{1, 1, 1};
  WaveNumberModel medium;
  PmlSpec pml;
  SourceSpec source;
  int rounds = 1;
  int workers = 1;
  GmresConfig gmres;
  double density_floor = 4.0;
  bool compare_global = false;  // direct mode: also solve globally and report the gap
  std::string out_prefix;

  // converge mode
  std::vector<int> levels;
  int reference_intervals = 0;

  // pipeline mode
  int pipeline_n_rhs = 0;
  int pipeline_n_iter = 0;
  double pipeline_t0 = 0.0;  // 0 = measure from a probe solve

  ProblemSetup setup() const;
  double mesh_density() const;  // nodes per wavelength at max kappa
  void validate() const;
};

// Structured key=value text, '#' comments, later keys override earlier ones.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path,
                      const std::vector<std::string>& overrides = {});

}  // namespace helmsweep
