#pragma once

// Strong majorization, doubly stochastic witnesses, Birkhoff decompositions
// and convex-hull-of-orbit membership.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "adnorm/error.hpp"
#include "adnorm/gauge.hpp"
#include "adnorm/matrix_core.hpp"
#include "adnorm/random.hpp"

namespace adnorm {

struct MajorizationReport {
  RVector z_sorted;
  RVector w_sorted;
  /// sum_{i<=k} w_i - sum_{i<=k} z_i (decreasing rearrangements), k = 1..n.
  RVector partial_gaps;
  /// sum w - sum z.
  double trace_gap = 0.0;
  double tol = 0.0;
  bool holds = false;
};

inline double default_majorization_tol(const RVector& w) { return 1e-9 * (1.0 + w.cwiseAbs().sum()); }

/// Does w strongly majorize z (z < w)?
inline MajorizationReport majorizes(const RVector& w, const RVector& z, double tol = -1.0) {
  require_same_dim(w.size(), z.size(), "majorizes");
  MajorizationReport r;
  r.tol = tol > 0.0 ? tol : default_majorization_tol(w);
  r.w_sorted = detail::sorted_desc(w);
  r.z_sorted = detail::sorted_desc(z);
  const Eigen::Index n = w.size();
  r.partial_gaps.resize(n);
  double sw = 0.0;
  double sz = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    sw += r.w_sorted(k);
    sz += r.z_sorted(k);
    r.partial_gaps(k) = sw - sz;
  }
  r.trace_gap = n > 0 ? r.partial_gaps(n - 1) : 0.0;
  r.holds = std::abs(r.trace_gap) <= r.tol;
  for (Eigen::Index k = 0; k + 1 < n; ++k) r.holds = r.holds && r.partial_gaps(k) >= -r.tol;
  return r;
}

/// Random orbit weights c = sum_k t_k (1,..,1,0,..,0) (k ones, k = 1..n-1).
/// With probability 1/2 a single k is drawn (a Ky-Fan direction, the extreme
/// separators of non-majorized pairs); otherwise t ~ Dirichlet(alpha).
inline RVector random_orbit_weights(int n, Rng& rng, double alpha = 0.3) {
  if (n < 2) throw DomainError("random_orbit_weights: need n >= 2");
  RVector c = RVector::Zero(n);
  if (rng.uniform() < 0.5) {
    c.head(rng.uniform_int(1, n - 1)).setOnes();
    return c;
  }
  std::gamma_distribution<double> gamma(alpha, 1.0);
  double total = 0.0;
  for (int k = 1; k < n; ++k) {
    const double t = gamma(rng.engine()) + 1e-300;
    c.head(k).array() += t;
    total += t;
  }
  return c / total;
}

namespace detail {

/// Permutation matrix P with (P v)_i = v_{order[i]}.
inline RMatrix gather_matrix(const std::vector<int>& order) {
  const int n = static_cast<int>(order.size());
  RMatrix p = RMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) p(i, order[i]) = 1.0;
  return p;
}

/// Doubly stochastic A with z = A w for decreasingly sorted w, z with z < w,
/// as a product of T-transforms.
inline RMatrix sorted_ds_witness(const RVector& w, const RVector& z) {
  const int n = static_cast<int>(w.size());
  const double eps = 1e-14 * (1.0 + w.cwiseAbs().maxCoeff());
  RMatrix a = RMatrix::Identity(n, n);
  if ((w - z).cwiseAbs().maxCoeff() <= eps) return a;
  if ((z.array() - z.mean()).abs().maxCoeff() <= eps) return RMatrix::Constant(n, n, 1.0 / n);
  RVector x = w;
  for (int step = 0; step < n; ++step) {
    int j = -1;
    for (int i = 0; i < n; ++i)
      if (x(i) > z(i) + eps) j = i;
    if (j < 0) break;
    int k = -1;
    for (int i = j + 1; i < n; ++i) {
      if (x(i) < z(i) - eps) {
        k = i;
        break;
      }
    }
    if (k < 0) break;
    const double delta = std::min(x(j) - z(j), z(k) - x(k));
    const double mu = delta / (x(j) - x(k));  // 1 - lambda
    RMatrix t = RMatrix::Identity(n, n);
    t(j, j) = t(k, k) = 1.0 - mu;
    t(j, k) = t(k, j) = mu;
    a = t * a;
    x = a * w;
  }
  return a;
}

/// Perfect matching on the support {a_ij > thr} (Kuhn's algorithm, heavier
/// entries tried first). Returns row -> column, or empty when none exists.
inline std::vector<int> support_matching(const RMatrix& a, double thr) {
  const int n = static_cast<int>(a.rows());
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (a(i, j) > thr) adj[i].push_back(j);
    std::stable_sort(adj[i].begin(), adj[i].end(), [&](int p, int q) { return a(i, p) > a(i, q); });
  }
  std::vector<int> col_owner(static_cast<std::size_t>(n), -1);
  std::function<bool(int, std::vector<char>&)> augment = [&](int r, std::vector<char>& seen) {
    for (int c : adj[r]) {
      if (seen[c]) continue;
      seen[c] = 1;
      if (col_owner[c] < 0 || augment(col_owner[c], seen)) {
        col_owner[c] = r;
        return true;
      }
    }
    return false;
  };
  for (int r = 0; r < n; ++r) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    if (!augment(r, seen)) return {};
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) row_to_col[col_owner[c]] = c;
  return row_to_col;
}

}  // namespace detail

/// Doubly stochastic A with z = A w (original orderings). Requires z < w.
inline RMatrix ds_witness(const RVector& w, const RVector& z, double tol = -1.0) {
  const MajorizationReport rep = majorizes(w, z, tol);
  if (!rep.holds) throw DomainError("ds_witness: z is not majorized by w");
  const std::vector<int> ow = detail::order_desc(w);
  const std::vector<int> oz = detail::order_desc(z);
  const RMatrix inner = detail::sorted_ds_witness(rep.w_sorted, rep.z_sorted);
  return detail::gather_matrix(oz).transpose() * inner * detail::gather_matrix(ow);
}

/// Z in co{UWU^*} iff eig(Z) < eig(W).
inline bool in_orbit_hull(const SkewHermitian& z, const SkewHermitian& w, double tol = -1.0) {
  require_same_dim(z.dim(), w.dim(), "in_orbit_hull");
  return majorizes(eigenvalues(w), eigenvalues(z), tol).holds;
}

struct BirkhoffTerm {
  double weight = 0.0;
  /// row -> column of the permutation matrix.
  std::vector<int> permutation;
};

/// Convex combination of permutation matrices equal to the doubly stochastic a.
inline std::vector<BirkhoffTerm> birkhoff_decomposition(const RMatrix& a, double zero_tol = 1e-12) {
  const int n = static_cast<int>(a.rows());
  RMatrix r = a;
  std::vector<BirkhoffTerm> out;
  for (int it = 0; it < n * n + 1; ++it) {
    if (r.maxCoeff() <= zero_tol) break;
    const std::vector<int> m = detail::support_matching(r, zero_tol);
    if (m.empty()) break;
    double theta = kInf;
    for (int i = 0; i < n; ++i) theta = std::min(theta, r(i, m[i]));
    for (int i = 0; i < n; ++i) r(i, m[i]) -= theta;
    out.push_back({theta, m});
  }
  if (out.empty()) throw NumericalError("birkhoff decomposition: no matching on the support");
  return out;
}

struct HullDecomposition {
  std::vector<double> weights;
  std::vector<CMatrix> conjugators;
  /// Terms produced by the Birkhoff step, before Caratheodory pruning.
  int birkhoff_terms = 0;
  /// ||Z - sum lambda_i U_i W U_i^*||_F.
  double residual = 0.0;
};

inline SkewHermitian hull_combination(const HullDecomposition& h, const SkewHermitian& w) {
  CMatrix acc = CMatrix::Zero(w.dim(), w.dim());
  for (std::size_t i = 0; i < h.weights.size(); ++i)
    acc += h.weights[i] * h.conjugators[i] * w.matrix() * h.conjugators[i].adjoint();
  return SkewHermitian::project(acc);
}

/// Z = sum_i lambda_i U_i W U_i^* with at most n terms.
inline HullDecomposition hull_decomposition(const SkewHermitian& z, const SkewHermitian& w,
                                            double tol = -1.0) {
  require_same_dim(z.dim(), w.dim(), "hull_decomposition");
  const int n = z.dim();
  const auto [zv, uz] = detail::eigh_skew(z);
  const auto [wv, uw] = detail::eigh_skew(w);
  if (!majorizes(wv, zv, tol).holds) throw DomainError("hull_decomposition: Z is not in the orbit hull of W");

  HullDecomposition out;
  if ((z.matrix() - w.matrix()).norm() <= 1e-14 * (1.0 + w.frobenius())) {
    out.weights = {1.0};
    out.conjugators = {CMatrix::Identity(n, n)};
    out.birkhoff_terms = 1;
    out.residual = (z - w).frobenius();
    return out;
  }

  const RMatrix a = detail::sorted_ds_witness(wv, zv);
  const auto terms = birkhoff_decomposition(a);
  out.birkhoff_terms = static_cast<int>(terms.size());

  // Points p_m = P_m w in R^n; merge equal points.
  std::vector<RVector> pts;
  std::vector<double> lam;
  std::vector<std::vector<int>> perms;
  for (const auto& t : terms) {
    RVector p(n);
    for (int i = 0; i < n; ++i) p(i) = wv(t.permutation[i]);
    bool merged = false;
    for (std::size_t j = 0; j < pts.size() && !merged; ++j) {
      if ((pts[j] - p).cwiseAbs().maxCoeff() <= 1e-14 * (1.0 + wv.cwiseAbs().maxCoeff())) {
        lam[j] += t.weight;
        merged = true;
      }
    }
    if (!merged) {
      pts.push_back(p);
      lam.push_back(t.weight);
      perms.push_back(t.permutation);
    }
  }

  // Caratheodory: the points lie in an (n-1)-dimensional affine set, so n suffice.
  while (static_cast<int>(pts.size()) > n) {
    const int m = static_cast<int>(pts.size());
    RMatrix s(n + 1, m);
    for (int j = 0; j < m; ++j) {
      s.col(j).head(n) = pts[j];
      s(n, j) = 1.0;
    }
    Eigen::JacobiSVD<RMatrix> svd(s, Eigen::ComputeFullV);
    RVector alpha = svd.matrixV().col(m - 1);
    if (alpha.maxCoeff() <= 0.0) alpha = -alpha;
    double t = kInf;
    int drop = -1;
    for (int j = 0; j < m; ++j) {
      if (alpha(j) > 1e-14 && lam[j] / alpha(j) < t) {
        t = lam[j] / alpha(j);
        drop = j;
      }
    }
    if (drop < 0) break;
    for (int j = 0; j < m; ++j) lam[j] = std::max(0.0, lam[j] - t * alpha(j));
    lam[drop] = 0.0;
    for (int j = m - 1; j >= 0; --j) {
      if (lam[j] <= 1e-15) {
        pts.erase(pts.begin() + j);
        lam.erase(lam.begin() + j);
        perms.erase(perms.begin() + j);
      }
    }
  }

  const double total = std::accumulate(lam.begin(), lam.end(), 0.0);
  for (std::size_t j = 0; j < lam.size(); ++j) {
    out.weights.push_back(lam[j] / total);
    CMatrix pm = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) pm(i, perms[j][i]) = 1.0;
    out.conjugators.push_back(uz * pm * uw.adjoint());
  }
  out.residual = (z - hull_combination(out, w)).frobenius();
  return out;
}

/// sum_k P_k X P_k for an orthogonal resolution of the identity {P_k}.
inline SkewHermitian pinch(const SkewHermitian& x, const std::vector<CMatrix>& projections, double tol = 1e-9) {
  const int n = x.dim();
  if (projections.empty()) throw DomainError("pinch: empty projection system");
  CMatrix sum = CMatrix::Zero(n, n);
  for (std::size_t k = 0; k < projections.size(); ++k) {
    const CMatrix& p = projections[k];
    if (p.rows() != n || p.cols() != n) throw DimensionError("pinch: projection dimension mismatch");
    if ((p * p - p).norm() > tol || (p - p.adjoint()).norm() > tol)
      throw DomainError("pinch: not an orthogonal projection");
    for (std::size_t j = k + 1; j < projections.size(); ++j)
      if ((p * projections[j]).norm() > tol) throw DomainError("pinch: projections not mutually orthogonal");
    sum += p;
  }
  if ((sum - CMatrix::Identity(n, n)).norm() > tol) throw DomainError("pinch: projections do not sum to I");
  CMatrix acc = CMatrix::Zero(n, n);
  for (const auto& p : projections) acc += p * x.matrix() * p;
  return SkewHermitian::project(acc);
}

}  // namespace adnorm
