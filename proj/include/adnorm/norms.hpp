#pragma once

// Ad-invariant Finsler norms on u(n) induced by eigenvalue gauges, their
// duals, and certified norming functionals.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "adnorm/error.hpp"
#include "adnorm/gauge.hpp"
#include "adnorm/matrix_core.hpp"

namespace adnorm {

/// ||X|| = gauge(eigenvalues of -iX).
class MatrixNorm {
 public:
  explicit MatrixNorm(Gauge g) : gauge_(std::move(g)) {}

  const Gauge& gauge() const noexcept { return gauge_; }
  int dim() const noexcept { return gauge_.dim(); }
  std::string name() const { return gauge_.name(); }

 private:
  Gauge gauge_;
};

inline double matrix_norm(const MatrixNorm& m, const SkewHermitian& x) {
  require_same_dim(x.dim(), m.dim(), "matrix_norm");
  return gauge_eval(m.gauge(), eigenvalues(x));
}

/// sum_i c_i x_i (both decreasing) + |tr|, x = eigenvalues of -iX.
inline double orbit_norm(const OrbitSpec& c, const SkewHermitian& x) {
  require_same_dim(x.dim(), c.dim(), "orbit_norm");
  const RVector ev = eigenvalues(x);
  return c.c().dot(ev) + std::abs(ev.sum());
}

/// U iC U^* with U the eigenbasis of X in decreasing order: attains
/// max over the orbit of (UCU^*|X) on the traceless part.
inline SkewHermitian orbit_maximizer(const OrbitSpec& c, const SkewHermitian& x) {
  require_same_dim(x.dim(), c.dim(), "orbit_maximizer");
  const auto [vals, vecs] = detail::eigh_skew(x);
  return SkewHermitian::conjugated_diagonal(vecs, c.c());
}

/// max over U of |(UCU^*|X)| on su(n): the larger of the orbit norms of C and -C.
inline double c_radius(const OrbitSpec& c, const SkewHermitian& x) {
  const OrbitSpec neg = OrbitSpec::make(-c.c());
  const RVector ev = eigenvalues(x);
  const RVector x0 = ev.array() - ev.mean();
  return std::max(c.c().dot(x0), neg.c().dot(x0));
}

struct DualValue {
  double value = 0.0;
  bool lower_bound = false;
};

inline DualValue dual_norm_detail(const MatrixNorm& m, const SkewHermitian& v) {
  require_same_dim(v.dim(), m.dim(), "dual_norm");
  const SupportResult r = support_detail(m.gauge(), eigenvalues(v));
  return {r.value, r.lower_bound};
}

/// ||V||' = max{(V|X) : ||X|| <= 1}.
inline double dual_norm(const MatrixNorm& m, const SkewHermitian& v) {
  return dual_norm_detail(m, v).value;
}

// ---------------------------------------------------------------------------
// Norming functionals

struct NormingMatrix {
  SkewHermitian n;
  double certified_dual_norm = 0.0;
  /// (N|V).
  double value_at_target = 0.0;
  /// ||V||.
  double target_norm = 0.0;
  double residual_value = 0.0;       // |(N|V) - ||V|||
  double residual_dual = 0.0;        // |dual(N) - 1|
  double residual_commutator = 0.0;  // ||[N,V]||_F
  double tolerance = 0.0;
};

/// Certification tolerance for a norming matrix of V.
inline double norming_tolerance(const MatrixNorm& m, const SkewHermitian& v) {
  const double base = m.gauge().closed_form_support() ? 1e-9 : 1e-6;
  return base * (1.0 + v.frobenius());
}

/// Checks (N|V) = ||V||, ||N||' = 1 and [N,V] = 0; throws CertificationError.
inline NormingMatrix certify_norming(const MatrixNorm& m, const SkewHermitian& v, const SkewHermitian& n,
                                     double tol = -1.0) {
  require_same_dim(n.dim(), v.dim(), "certify_norming");
  NormingMatrix out;
  out.n = n;
  out.tolerance = tol > 0.0 ? tol : norming_tolerance(m, v);
  out.target_norm = matrix_norm(m, v);
  out.value_at_target = trace_inner(n, v);
  out.certified_dual_norm = dual_norm(m, n);
  out.residual_value = std::abs(out.value_at_target - out.target_norm);
  out.residual_dual = std::abs(out.certified_dual_norm - 1.0);
  out.residual_commutator = commutator(n, v).frobenius();
  if (out.residual_value > out.tolerance)
    throw CertificationError("norming matrix: (N|V) != ||V||", out.residual_value);
  if (out.residual_dual > out.tolerance)
    throw CertificationError("norming matrix: dual norm of N != 1", out.residual_dual);
  if (out.residual_commutator > out.tolerance)
    throw CertificationError("norming matrix: [N,V] != 0", out.residual_commutator);
  return out;
}

/// Vector u with <u,x> = gauge(x), ordered decreasingly within each level of
/// the spectral data (x = sd.eigenvalues).
inline RVector norming_vector(const Gauge& g, const SpectralData& sd) {
  RVector u = subgradient(g, sd.eigenvalues);
  for (const auto& lv : sd.levels)
    std::sort(u.data() + lv.first, u.data() + lv.first + lv.multiplicity, std::greater<>());
  return u;
}

/// N = U i diag(u) U^*, u a subgradient of the gauge at the eigenvalues of V.
inline NormingMatrix norming_matrix(const MatrixNorm& m, const SkewHermitian& v) {
  require_same_dim(v.dim(), m.dim(), "norming_matrix");
  if (v.frobenius() == 0.0) throw DomainError("norming_matrix: V must be nonzero");
  const SpectralData sd = spectral(v);
  const RVector u = norming_vector(m.gauge(), sd);
  return certify_norming(m, v, SkewHermitian::conjugated_diagonal(sd.basis, u));
}

/// Distinguished Ky-Fan functional N = U^*PU Omega for X = Omega|X|:
/// i times the signed spectral projection onto the k largest |x_j|.
inline NormingMatrix ky_fan_distinguished_functional(const MatrixNorm& m, const SkewHermitian& x) {
  const auto* kf = m.gauge().as<gauges::KyFan>();
  int k = 0;
  if (kf) k = kf->k;
  else if (m.gauge().as<gauges::Spectral>()) k = 1;
  else if (m.gauge().as<gauges::Trace>()) k = m.dim();
  else throw DomainError("ky_fan_distinguished_functional: gauge is not a Ky-Fan norm");
  if (x.frobenius() == 0.0) throw DomainError("ky_fan_distinguished_functional: X must be nonzero");
  const int n = x.dim();
  const auto [vals, vecs] = detail::eigh_skew(x);
  // Omega = i sum sg(x_j) p_j, |X| = sum |x_j| p_j; U orders |x_j| decreasingly.
  RVector sg(n);
  for (int j = 0; j < n; ++j) sg(j) = vals(j) >= 0.0 ? 1.0 : -1.0;
  const std::vector<int> ord = detail::order_desc(vals.cwiseAbs());
  CMatrix q = CMatrix::Zero(n, n);  // U^*PU: projection onto the top-k |x_j|
  for (int j = 0; j < k; ++j) q += vecs.col(ord[j]) * vecs.col(ord[j]).adjoint();
  const CMatrix omega = vecs * (kI * sg.cast<Complex>()).asDiagonal() * vecs.adjoint();
  return certify_norming(m, x, SkewHermitian::project(q * omega));
}

/// i (times) the eigenvalues of -i P_k N P_k, level by level (sd basis columns).
inline std::vector<RVector> block_eigenvalues(const SkewHermitian& n, const SpectralData& sd) {
  std::vector<RVector> out;
  for (const auto& lv : sd.levels) {
    const CMatrix cols = sd.basis.middleCols(lv.first, lv.multiplicity);
    const CMatrix b = cols.adjoint() * n.matrix() * cols;
    CMatrix h = Complex(0.0, -1.0) * b;
    h = 0.5 * (h + h.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    out.push_back(es.eigenvalues().reverse());
  }
  return out;
}

/// max over k < j of (max eig of block j) - (min eig of block k); <= 0 when
/// the blocks of N are ordered like the levels of V.
inline double block_order_violation(const SkewHermitian& n, const SpectralData& sd) {
  const auto blocks = block_eigenvalues(n, sd);
  double worst = -kInf;
  for (std::size_t k = 0; k < blocks.size(); ++k)
    for (std::size_t j = k + 1; j < blocks.size(); ++j)
      worst = std::max(worst, blocks[j].maxCoeff() - blocks[k].minCoeff());
  return blocks.size() < 2 ? 0.0 : worst;
}

/// N_0 = i sum_k lambda_k P_k with lambda_k the mean eigenvalue of the k-th
/// block of N; certified and checked for lambda_1 >= lambda_2 >= ...
inline NormingMatrix diagonal_averaged_functional(const MatrixNorm& m, const SkewHermitian& v,
                                                  const NormingMatrix& nm) {
  const SpectralData sd = spectral(v);
  CMatrix acc = CMatrix::Zero(sd.n, sd.n);
  RVector lambda(sd.level_count());
  for (int k = 0; k < sd.level_count(); ++k) {
    const auto& lv = sd.levels[k];
    const CMatrix blk = lv.projection * nm.n.matrix() * lv.projection;
    lambda(k) = (Complex(0.0, -1.0) * blk.trace()).real() / lv.multiplicity;
    acc += kI * lambda(k) * lv.projection;
  }
  NormingMatrix out = certify_norming(m, v, SkewHermitian::project(acc), nm.tolerance);
  for (int k = 0; k + 1 < lambda.size(); ++k)
    if (lambda(k + 1) > lambda(k) + out.tolerance)
      throw CertificationError("diagonal averaged functional: levels not ordered", lambda(k + 1) - lambda(k));
  return out;
}

// ---------------------------------------------------------------------------
// Taylor norm

struct TaylorResult {
  double value = 0.0;
  double t_star = 0.0;
  int grid_points = 0;
};

/// ||A + iB||_T = sup_t ||A cos t - B sin t||: uniform grid on [0, 2pi)
/// followed by golden-section refinement around the best grid point.
inline TaylorResult taylor_norm(const MatrixNorm& m, const SkewHermitian& a, const SkewHermitian& b,
                                int grid_points = 720, double t_tol = 1e-10) {
  require_same_dim(a.dim(), b.dim(), "taylor_norm");
  require_same_dim(a.dim(), m.dim(), "taylor_norm");
  if (grid_points < 3) throw DomainError("taylor_norm: grid needs >= 3 points");
  auto f = [&](double t) { return matrix_norm(m, std::cos(t) * a - std::sin(t) * b); };
  const double h = 2.0 * M_PI / grid_points;
  int best = 0;
  double bv = -kInf;
  for (int i = 0; i < grid_points; ++i) {
    const double v = f(i * h);
    if (v > bv) {
      bv = v;
      best = i;
    }
  }
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = (best - 1) * h;
  double hi = (best + 1) * h;
  double c1 = hi - gr * (hi - lo);
  double c2 = lo + gr * (hi - lo);
  double f1 = f(c1);
  double f2 = f(c2);
  while (hi - lo > t_tol) {
    if (f1 < f2) {
      lo = c1;
      c1 = c2;
      f1 = f2;
      c2 = lo + gr * (hi - lo);
      f2 = f(c2);
    } else {
      hi = c2;
      c2 = c1;
      f2 = f1;
      c1 = hi - gr * (hi - lo);
      f1 = f(c1);
    }
  }
  TaylorResult r;
  r.grid_points = grid_points;
  r.value = bv;
  r.t_star = best * h;
  const double tm = 0.5 * (lo + hi);
  const double fm = f(tm);
  if (fm > r.value) {
    r.value = fm;
    r.t_star = std::fmod(tm + 2.0 * M_PI, 2.0 * M_PI);
  }
  return r;
}

}  // namespace adnorm
