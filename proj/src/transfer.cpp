#include "helmsweep/transfer.hpp"

namespace helmsweep {

bool TraceRecord::is_zero(double tol) const {
  for (const Complex& z : u0)
    if (std::abs(z.real()) > tol || std::abs(z.imag()) > tol) return false;
  for (const Complex& z : um1)
    if (std::abs(z.real()) > tol || std::abs(z.imag()) > tol) return false;
  return true;
}

int TraceMailbox::dir_index(int dim, const Cardinal& dir) {
  (void)dim;
  return 2 * dir.axis + (dir.sign > 0 ? 1 : 0);
}

void TraceMailbox::configure(int dim, int sweep_count) {
  dim_ = dim;
  sweeps_ = sweep_count;
  slots_.assign(static_cast<size_t>(sweep_count) * 2 * dim, std::nullopt);
}

void TraceMailbox::deposit(const TraceRecord& t) {
  if (t.target_sweep < 1 || t.target_sweep > sweeps_)
    throw ConfigError("TraceMailbox: target sweep out of range");
  auto& slot = slots_[static_cast<size_t>(t.target_sweep - 1) * 2 * dim_ + dir_index(dim_, t.dir)];
  if (!slot) {
    slot = t;
    return;
  }
  if (slot->u0.size() != t.u0.size())
    throw ConfigError("TraceMailbox: accumulating traces of mismatched extent");
  for (size_t i = 0; i < t.u0.size(); ++i) slot->u0[i] += t.u0[i];
  for (size_t i = 0; i < t.um1.size(); ++i) slot->um1[i] += t.um1[i];
}

const TraceRecord* TraceMailbox::peek(int sweep, const Cardinal& dir) const {
  const auto& slot = slots_[static_cast<size_t>(sweep - 1) * 2 * dim_ + dir_index(dim_, dir)];
  return slot ? &*slot : nullptr;
}

void TraceMailbox::clear() {
  for (auto& s : slots_) s.reset();
}

TraceRecord extract_trace(std::span<const Complex> u_local, const LocalGrid& grid,
                          const GridRange& owned, const Cardinal& dir, int src_id) {
  TraceRecord t;
  t.src = src_id;
  t.dir = dir;
  const int a = dir.axis;
  const int face = dir.sign > 0 ? owned.hi[a] : owned.lo[a];
  t.line = grid.range;
  t.line.lo[a] = t.line.hi[a] = face;
  const std::int64_t count = t.line.node_count();
  t.u0.resize(count);
  t.um1.resize(count);
  for (std::int64_t i = 0; i < count; ++i) {
    Vec3i p = t.line.unlinear(i);
    t.u0[i] = u_local[grid.range.linear(p)];
    p[a] = face - dir.sign;
    t.um1[i] = u_local[grid.range.linear(p)];
  }
  return t;
}

void trace_to_source(const TraceRecord& t, const LocalGrid& target_grid,
                     const PmlCoefficients& target_coeffs, std::span<Complex> rhs) {
  const int a = t.dir.axis;
  const int face = t.line.lo[a];
  GridRange target_line = target_grid.range;
  target_line.lo[a] = target_line.hi[a] = face;
  for (int b = 0; b < target_grid.dim; ++b) {
    if (t.line.lo[b] != target_line.lo[b] || t.line.hi[b] != target_line.hi[b])
      throw ConfigError("trace_to_source: trace line extent does not match target grid");
  }
  const std::int64_t count = t.line.node_count();
  for (std::int64_t i = 0; i < count; ++i) {
    Vec3i p0 = t.line.unlinear(i);   // on the interface line
    Vec3i pm = p0;
    pm[a] = face - t.dir.sign;       // first source-side line (target pad)
    // Coupling across the (pm, p0) edge, from the target operator.
    Vec3i edge = t.dir.sign > 0 ? pm : p0;
    const Complex c = target_coeffs.coupling(a, edge);
    if (!target_grid.on_shell(p0)) rhs[target_grid.range.linear(p0)] -= c * t.um1[i];
    if (!target_grid.on_shell(pm)) rhs[target_grid.range.linear(pm)] += c * t.u0[i];
  }
}

void accumulate(std::span<Complex> u_global, const LocalGrid& global_grid,
                std::span<const Complex> u_local, const LocalGrid& local_grid,
                const AssemblyWeights& weights, const Vec3i& sub) {
  GridRange sup = weights.support(sub);
  const std::int64_t count = sup.node_count();
  for (std::int64_t i = 0; i < count; ++i) {
    Vec3i p = sup.unlinear(i);
    const double w = weights.weight(sub, p);
    if (w == 0.0) continue;
    u_global[global_grid.range.linear(p)] += w * u_local[local_grid.range.linear(p)];
  }
}

}  // namespace helmsweep
