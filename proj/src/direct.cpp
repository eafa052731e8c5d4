#include "helmsweep/direct.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <numeric>

namespace helmsweep {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

constexpr std::int64_t kLeafNodes = 64;
constexpr int kPanel = 48;

struct TreeNode {
  Vec3i blo{0, 0, 0}, bhi{0, 0, 0};
  int child0 = -1, child1 = -1;
  std::vector<std::int64_t> sep;  // eliminated here, ordered by elimination
  std::vector<std::int64_t> bnd;  // halo nodes, eliminated by ancestors
};

struct Front {
  std::int64_t k = 0;       // eliminated count
  MatrixXcd cols;           // |S| x k: L11 (unit lower, D on diag) over L21
  std::vector<std::int64_t> sep, bnd;  // grid linear ids, elimination order
};

}  // namespace

struct Factorization::Impl {
  int dim = 2;
  GridRange range;
  std::int64_t n = 0;
  std::vector<TreeNode> tree;
  std::vector<int> postorder;
  std::vector<Front> fronts;  // indexed like tree
  CVector dinv;               // 1/d per grid node
  FactorStats stats;

  void build_tree(const GridRange& r);
  int build_rec(Vec3i blo, Vec3i bhi);
  void compute_bnd(TreeNode& nd) const;
  void factor_numeric(const SparseOperator& op);
};

namespace {

// Dense complex-symmetric LDL^T on the leading k columns of F (size m>=k).
// On return, strict lower of F(:,0:k) holds L (unit diagonal implicit), the
// diagonal of F(0:k,0:k) holds D, and F(k:,k:) lower triangle holds the
// Schur complement. Throws on a pivot below tol.
void eliminate_front(MatrixXcd& F, std::int64_t k, double tol,
                     const std::vector<std::int64_t>& sep) {
  const std::int64_t m = F.rows();
  MatrixXcd W;
  for (std::int64_t p0 = 0; p0 < k; p0 += kPanel) {
    const std::int64_t p1 = std::min<std::int64_t>(p0 + kPanel, k);
    // Unblocked right-looking factorization of the panel, full column height.
    for (std::int64_t j = p0; j < p1; ++j) {
      Complex d = F(j, j);
      if (std::abs(d) < tol)
        throw SingularMatrixError(
            "factorize: near-zero pivot at grid node " + std::to_string(sep[j]), sep[j]);
      if (j + 1 < m) {
        F.col(j).tail(m - j - 1) /= d;
        for (std::int64_t c = j + 1; c < p1; ++c) {
          Complex s = d * F(c, j);
          F.col(c).tail(m - c).noalias() -= F.col(j).tail(m - c) * s;
        }
      }
    }
    // Trailing update, lower triangle in column panels.
    const std::int64_t bw = p1 - p0, nt = m - p1;
    if (nt > 0 && bw > 0) {
      W.resize(nt, bw);
      for (std::int64_t j = 0; j < bw; ++j) W.col(j) = F.col(p0 + j).tail(nt) * F(p0 + j, p0 + j);
      for (std::int64_t c0 = p1; c0 < m; c0 += kPanel) {
        const std::int64_t c1 = std::min<std::int64_t>(c0 + kPanel, m);
        F.block(c0, c0, m - c0, c1 - c0).noalias() -=
            F.block(c0, p0, m - c0, bw) * W.middleRows(c0 - p1, c1 - c0).transpose();
      }
    }
  }
}

}  // namespace

int Factorization::Impl::build_rec(Vec3i blo, Vec3i bhi) {
  TreeNode nd;
  nd.blo = blo;
  nd.bhi = bhi;
  std::int64_t count = 1;
  int long_axis = 0;
  for (int a = 0; a < dim; ++a) {
    count *= bhi[a] - blo[a] + 1;
    if (bhi[a] - blo[a] > bhi[long_axis] - blo[long_axis]) long_axis = a;
  }
  const int id = static_cast<int>(tree.size());
  tree.push_back(nd);
  if (count <= kLeafNodes || bhi[long_axis] - blo[long_axis] < 2) {
    // Leaf: eliminate the whole box here.
    auto& leaf = tree[id];
    leaf.sep.reserve(count);
    Vec3i p;
    for (int k = blo[2]; k <= bhi[2]; ++k)
      for (int j = blo[1]; j <= bhi[1]; ++j)
        for (int i = blo[0]; i <= bhi[0]; ++i) {
          p = {i, j, k};
          leaf.sep.push_back(range.linear(p));
        }
    return id;
  }
  const int mid = (blo[long_axis] + bhi[long_axis]) / 2;
  Vec3i lhi = bhi, rlo = blo;
  lhi[long_axis] = mid - 1;
  rlo[long_axis] = mid + 1;
  int c0 = -1, c1 = -1;
  if (lhi[long_axis] >= blo[long_axis]) c0 = build_rec(blo, lhi);
  if (rlo[long_axis] <= bhi[long_axis]) c1 = build_rec(rlo, bhi);
  auto& parent = tree[id];
  parent.child0 = c0;
  parent.child1 = c1;
  Vec3i slo = blo, shi = bhi;
  slo[long_axis] = shi[long_axis] = mid;
  Vec3i p;
  for (int k = slo[2]; k <= shi[2]; ++k)
    for (int j = slo[1]; j <= shi[1]; ++j)
      for (int i = slo[0]; i <= shi[0]; ++i) {
        p = {i, j, k};
        parent.sep.push_back(range.linear(p));
      }
  return id;
}

void Factorization::Impl::compute_bnd(TreeNode& nd) const {
  // Face-adjacent halo planes of the box (5/7-point stencil couplings only).
  for (int a = 0; a < dim; ++a) {
    for (int s = 0; s < 2; ++s) {
      const int plane = s == 0 ? nd.blo[a] - 1 : nd.bhi[a] + 1;
      if (plane < range.lo[a] || plane > range.hi[a]) continue;
      Vec3i lo = nd.blo, hi = nd.bhi;
      lo[a] = hi[a] = plane;
      Vec3i p;
      for (int k = lo[2]; k <= hi[2]; ++k)
        for (int j = lo[1]; j <= hi[1]; ++j)
          for (int i = lo[0]; i <= hi[0]; ++i) {
            p = {i, j, k};
            nd.bnd.push_back(range.linear(p));
          }
    }
  }
}

void Factorization::Impl::build_tree(const GridRange& r) {
  range = r;
  Vec3i lo = r.lo, hi = r.hi;
  for (int a = dim; a < 3; ++a) lo[a] = hi[a] = 0;
  build_rec(lo, hi);
  for (auto& nd : tree) compute_bnd(nd);
  // Postorder over the recursion tree.
  postorder.clear();
  std::vector<std::pair<int, int>> stack{{0, 0}};
  while (!stack.empty()) {
    auto& [id, phase] = stack.back();
    if (phase == 0) {
      phase = 1;
      if (tree[id].child0 >= 0) stack.push_back({tree[id].child0, 0});
    } else if (phase == 1) {
      phase = 2;
      if (tree[id].child1 >= 0) stack.push_back({tree[id].child1, 0});
    } else {
      postorder.push_back(id);
      stack.pop_back();
    }
  }
}

void Factorization::Impl::factor_numeric(const SparseOperator& op) {
  // Elimination positions, assigned in postorder.
  std::vector<std::int64_t> elim_pos(n);
  {
    std::int64_t pos = 0;
    for (int id : postorder)
      for (std::int64_t g : tree[id].sep) elim_pos[g] = pos++;
  }
  auto by_elim = [&](std::int64_t a, std::int64_t b) { return elim_pos[a] < elim_pos[b]; };

  double scale = 0.0;
  for (const Complex& v : op.val) scale = std::max(scale, std::abs(v));
  const double tol = 1e-14 * scale;

  fronts.assign(tree.size(), Front{});
  dinv.assign(n, Complex(0.0, 0.0));
  std::vector<MatrixXcd> updates(tree.size());  // children Schur complements
  std::int64_t active_bytes = 0, peak = 0;

  for (int id : postorder) {
    TreeNode& nd = tree[id];
    Front& fr = fronts[id];
    fr.sep = nd.sep;
    std::sort(fr.sep.begin(), fr.sep.end(), by_elim);
    fr.bnd = nd.bnd;
    std::sort(fr.bnd.begin(), fr.bnd.end(), by_elim);
    fr.k = static_cast<std::int64_t>(fr.sep.size());
    const std::int64_t m = fr.k + static_cast<std::int64_t>(fr.bnd.size());

    // Position of each S member, keyed by elimination position.
    std::vector<std::int64_t> s_ids(m);
    std::copy(fr.sep.begin(), fr.sep.end(), s_ids.begin());
    std::copy(fr.bnd.begin(), fr.bnd.end(), s_ids.begin() + fr.k);

    MatrixXcd F = MatrixXcd::Zero(m, m);
    active_bytes += m * m * sizeof(Complex);
    peak = std::max(peak, active_bytes);

    // Original entries: row q in sep, columns eliminated at or after q.
    for (std::int64_t qi = 0; qi < fr.k; ++qi) {
      const std::int64_t q = fr.sep[qi];
      for (std::int64_t e = op.row_ptr[q]; e < op.row_ptr[q + 1]; ++e) {
        const std::int64_t c = op.col[e];
        if (elim_pos[c] < elim_pos[q]) continue;
        // Locate c in S: in sep or bnd (both sorted by elim position).
        std::int64_t ci;
        if (elim_pos[c] <= elim_pos[fr.sep[fr.k - 1]]) {
          auto it = std::lower_bound(fr.sep.begin(), fr.sep.end(), c, by_elim);
          ci = it - fr.sep.begin();
        } else {
          auto it = std::lower_bound(fr.bnd.begin(), fr.bnd.end(), c, by_elim);
          ci = fr.k + (it - fr.bnd.begin());
        }
        F(ci, qi) += op.val[e];
        if (ci != qi) F(qi, ci) += op.val[e];
      }
    }

    // Extend-add children updates (lower triangles).
    for (int ch : {nd.child0, nd.child1}) {
      if (ch < 0) continue;
      const Front& cf = fronts[ch];
      MatrixXcd& U = updates[ch];
      const std::int64_t cb = static_cast<std::int64_t>(cf.bnd.size());
      // Merge-map child bnd (sorted by elim) into S (sorted by elim).
      std::vector<std::int64_t> map(cb);
      {
        std::int64_t si = 0;
        for (std::int64_t i = 0; i < cb; ++i) {
          while (si < m && elim_pos[s_ids[si]] < elim_pos[cf.bnd[i]]) ++si;
          map[i] = si;  // s_ids[si] == cf.bnd[i] by construction
        }
      }
      for (std::int64_t j = 0; j < cb; ++j) {
        const std::int64_t pj = map[j];
        F(pj, pj) += U(j, j);
        for (std::int64_t i = j + 1; i < cb; ++i) {
          const std::int64_t pi = map[i];
          F(pi, pj) += U(i, j);
          F(pj, pi) += U(i, j);
        }
      }
      active_bytes -= U.rows() * U.cols() * static_cast<std::int64_t>(sizeof(Complex));
      U.resize(0, 0);
    }

    eliminate_front(F, fr.k, tol, fr.sep);

    for (std::int64_t j = 0; j < fr.k; ++j) dinv[fr.sep[j]] = 1.0 / F(j, j);
    fr.cols = F.leftCols(fr.k);
    stats.factor_nnz += m * fr.k;
    if (m > fr.k) {
      updates[id] = F.bottomRightCorner(m - fr.k, m - fr.k);
      active_bytes += (m - fr.k) * (m - fr.k) * static_cast<std::int64_t>(sizeof(Complex));
    }
    active_bytes -= m * m * static_cast<std::int64_t>(sizeof(Complex));
    active_bytes += m * fr.k * static_cast<std::int64_t>(sizeof(Complex));
    peak = std::max(peak, active_bytes);
  }
  stats.peak_bytes = peak;
}

Factorization::Factorization() : impl_(nullptr) {}
Factorization::~Factorization() = default;
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;

const FactorStats& Factorization::stats() const { return impl_->stats; }

void Factorization::solve_inplace(std::span<Complex> x) const {
  const Impl& im = *impl_;
  if (static_cast<std::int64_t>(x.size()) != im.n)
    throw ConfigError("Factorization::solve: length mismatch");
  VectorXcd t;
  // Forward: L z = b, postorder.
  for (int id : im.postorder) {
    const Front& fr = im.fronts[id];
    const std::int64_t m = fr.cols.rows();
    if (fr.k == 0) continue;
    t.resize(m);
    for (std::int64_t i = 0; i < fr.k; ++i) t[i] = x[fr.sep[i]];
    for (std::int64_t i = fr.k; i < m; ++i) t[i] = 0.0;
    fr.cols.topRows(fr.k).triangularView<Eigen::UnitLower>().solveInPlace(t.head(fr.k));
    if (m > fr.k) t.tail(m - fr.k).noalias() = fr.cols.bottomRows(m - fr.k) * t.head(fr.k);
    for (std::int64_t i = 0; i < fr.k; ++i) x[fr.sep[i]] = t[i];
    for (std::int64_t i = fr.k; i < m; ++i) x[fr.bnd[i - fr.k]] -= t[i];
  }
  // Diagonal.
  for (std::int64_t i = 0; i < im.n; ++i) x[i] *= im.dinv[i];
  // Backward: L^T x = w, preorder.
  for (auto it = im.postorder.rbegin(); it != im.postorder.rend(); ++it) {
    const Front& fr = im.fronts[*it];
    const std::int64_t m = fr.cols.rows();
    if (fr.k == 0) continue;
    t.resize(fr.k);
    for (std::int64_t i = 0; i < fr.k; ++i) t[i] = x[fr.sep[i]];
    if (m > fr.k) {
      VectorXcd xb(m - fr.k);
      for (std::int64_t i = fr.k; i < m; ++i) xb[i - fr.k] = x[fr.bnd[i - fr.k]];
      t.noalias() -= fr.cols.bottomRows(m - fr.k).transpose() * xb;
    }
    fr.cols.topRows(fr.k).triangularView<Eigen::UnitLower>().transpose().solveInPlace(t);
    for (std::int64_t i = 0; i < fr.k; ++i) x[fr.sep[i]] = t[i];
  }
}

CVector Factorization::solve(std::span<const Complex> rhs) const {
  CVector x(rhs.begin(), rhs.end());
  solve_inplace(x);
  return x;
}

Factorization factorize(const SparseOperator& op) {
  if (op.n <= 0) throw ConfigError("factorize: empty operator");
  Factorization f;
  f.impl_ = std::make_unique<Factorization::Impl>();
  auto& im = *f.impl_;
  im.dim = op.grid.dim;
  im.range = op.grid.range;
  im.n = op.n;
  im.stats.n = op.n;
  im.stats.matrix_nnz = static_cast<std::int64_t>(op.val.size());
  const auto t0 = std::chrono::steady_clock::now();
  im.build_tree(op.grid.range);
  im.factor_numeric(op);
  im.stats.factor_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return f;
}

}  // namespace helmsweep
