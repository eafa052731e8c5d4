#pragma once

#include <functional>
#include <iosfwd>

#include "helmsweep/geometry.hpp"

namespace helmsweep {

// Gridded wave-speed field c(x), sampled bi/trilinearly with clamping.
struct VelocityGrid {
  int dim = 2;
  Vec3i n{2, 2, 1};
  Vec3d origin{0.0, 0.0, 0.0};
  Vec3d spacing{1.0, 1.0, 0.0};
  std::vector<float> c;  // row-major, axis 0 fastest

  double sample(const Vec3d& x) const;
  void validate() const;
};

// Self-describing binary layout: magic "HSVG", u32 version, u32 dim,
// u32 n[3], f64 origin[3], f64 spacing[3], then f32 values row-major.
VelocityGrid read_velocity_grid(const std::string& path);
void write_velocity_grid(const std::string& path, const VelocityGrid& g);
// CSV fallback: header line "dim,n0,n1[,n2],o0,o1[,o2],s0,s1[,s2]" then one
// value per line.
VelocityGrid read_velocity_csv(const std::string& path);

struct WaveNumberModel {
  enum class Kind { Constant, TwoLayered, Gridded };
  Kind kind = Kind::Constant;

  double kappa = 0.0;  // Constant

  // TwoLayered: kappa_down for x[axis] < eta, kappa_up above, linear blend
  // over [eta, eta + eps].
  double kappa_up = 0.0;
  double kappa_down = 0.0;
  int interface_axis = 1;
  double eta = 0.0;
  double eps = 0.0;

  // Gridded: kappa = omega / c(x).
  VelocityGrid velocity;
  double omega = 0.0;

  static WaveNumberModel constant(double kappa);
  static WaveNumberModel two_layered(double kappa_down, double kappa_up, int axis, double eta,
                                     double eps);
  static WaveNumberModel gridded(VelocityGrid v, double omega);

  double max_kappa(const Box& domain) const;
};

double eval_kappa(const WaveNumberModel& m, const Vec3d& x);

// Nearest-point extension of the wave number from a cell box onto a padded
// local grid: kappa(clamp(x, box)).
struct SubdomainMedium {
  Vec3i sub{0, 0, 0};
  std::vector<double> kappa;  // over the local grid, row-major
};

SubdomainMedium extend_to_subdomain(const WaveNumberModel& m, const Box& cell,
                                    const LocalGrid& grid, const Vec3i& sub);

// Warns (returns messages) when a layered interface coincides with a cut.
std::vector<std::string> interface_alignment_warnings(const WaveNumberModel& m,
                                                      const Partition& p);

}  // namespace helmsweep
