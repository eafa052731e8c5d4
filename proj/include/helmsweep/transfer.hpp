#pragma once

#include <optional>

#include "helmsweep/operator.hpp"

namespace helmsweep {

// Two lines (planes in 3D) of solution values on a subdomain interface:
// u0 on the interface grid line itself, um1 on the adjacent line one step
// toward the generating subdomain. For a second-order stencil this pair
// carries the same information as the (value, flux) trace.
struct TraceRecord {
  int src = -1;          // flattened source subdomain id
  Cardinal dir;          // direction of travel, source -> target
  int target_sweep = 0;  // l' assigned by routing; 0 while unrouted
  GridRange line;        // interface line box (trace axis collapsed)
  CVector u0, um1;       // row-major over the line box

  bool is_zero(double tol = 0.0) const;
};

// Accumulated trace lines per (target sweep, direction) for one subdomain.
class TraceMailbox {
 public:
  void configure(int dim, int sweep_count);
  void deposit(const TraceRecord& t);
  const TraceRecord* peek(int sweep, const Cardinal& dir) const;
  void clear();
  static int dir_index(int dim, const Cardinal& dir);

 private:
  int dim_ = 2;
  int sweeps_ = 0;
  std::vector<std::optional<TraceRecord>> slots_;
};

// Copies the interface line and the first line on the source-interior side
// out of a local solution. The line spans the full padded extent of the
// local grid. `owned` is the subdomain's owned node range.
TraceRecord extract_trace(std::span<const Complex> u_local, const LocalGrid& grid,
                          const GridRange& owned, const Cardinal& dir, int src_id);

// Converts a trace into the equivalent sparse right-hand side on the target
// grid: at interface-line nodes, -c*um1; at the first source-side line of
// the target pad, +c*u0, with c the target stencil coupling across the
// interface. Solving the target system with this RHS continues the field
// onto the target side and vanishes on the source side.
void trace_to_source(const TraceRecord& t, const LocalGrid& target_grid,
                     const PmlCoefficients& target_coeffs, std::span<Complex> rhs);

// u_global += w * u_local over the nodes the subdomain owns.
void accumulate(std::span<Complex> u_global, const LocalGrid& global_grid,
                std::span<const Complex> u_local, const LocalGrid& local_grid,
                const AssemblyWeights& weights, const Vec3i& sub);

}  // namespace helmsweep
