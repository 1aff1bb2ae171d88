#pragma once

// Skew-Hermitian linear algebra on u(n): trace pairing, commutators, spectral
// clustering, block diagonal/codiagonal splitting and the adjoint action.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "adnorm/error.hpp"
#include "adnorm/random.hpp"

namespace adnorm {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Default tolerance used when validating externally supplied matrices.
inline constexpr double kSkewLoadTol = 1e-9;

/// An element of u(n): a complex square matrix with A* = -A.
///
/// Instances are always exactly skew-Hermitian: every factory symmetrizes
/// with A <- (A - A*)/2 after validation.
class SkewHermitian {
 public:
  SkewHermitian() = default;

  static SkewHermitian zero(int n) { return SkewHermitian(CMatrix::Zero(n, n)); }

  /// Validates |A + A*| <= tol entrywise (relative to max(1, |A|_max)), then symmetrizes.
  static SkewHermitian from_matrix(const CMatrix& a, double tol = kSkewLoadTol) {
    if (a.rows() != a.cols()) throw DimensionError("SkewHermitian: matrix is not square");
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    const double defect = a.size() == 0 ? 0.0 : (a + a.adjoint()).cwiseAbs().maxCoeff();
    if (defect > tol * scale) {
      throw DomainError("SkewHermitian: matrix is not skew-Hermitian (defect " +
                        std::to_string(defect) + ")");
    }
    return project(a);
  }

  /// Skew-Hermitian part (A - A*)/2 with no validation.
  static SkewHermitian project(const CMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("SkewHermitian: matrix is not square");
    return SkewHermitian(0.5 * (a - a.adjoint()));
  }

  /// i * diag(x).
  static SkewHermitian diagonal(const RVector& x) {
    CMatrix d = CMatrix::Zero(x.size(), x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) d(k, k) = kI * x(k);
    return SkewHermitian(d);
  }

  /// U * i diag(x) * U^*.
  static SkewHermitian conjugated_diagonal(const CMatrix& u, const RVector& x) {
    require_same_dim(u.cols(), x.size(), "conjugated_diagonal");
    CMatrix m = u * (kI * x.cast<Complex>()).asDiagonal() * u.adjoint();
    return project(m);
  }

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const noexcept { return m_; }
  Complex operator()(int r, int c) const { return m_(r, c); }

  double frobenius() const { return m_.norm(); }
  /// -i tr X, the real number whose i-multiple is the trace.
  double trace_imag() const { return m_.trace().imag(); }

  SkewHermitian operator-() const { return SkewHermitian(-m_); }
  SkewHermitian& operator+=(const SkewHermitian& o) {
    require_same_dim(dim(), o.dim(), "SkewHermitian +=");
    m_ += o.m_;
    return *this;
  }
  SkewHermitian& operator-=(const SkewHermitian& o) {
    require_same_dim(dim(), o.dim(), "SkewHermitian -=");
    m_ -= o.m_;
    return *this;
  }
  SkewHermitian& operator*=(double s) {
    m_ *= s;
    return *this;
  }

  friend SkewHermitian operator+(SkewHermitian a, const SkewHermitian& b) { return a += b; }
  friend SkewHermitian operator-(SkewHermitian a, const SkewHermitian& b) { return a -= b; }
  friend SkewHermitian operator*(double s, SkewHermitian a) { return a *= s; }
  friend SkewHermitian operator*(SkewHermitian a, double s) { return a *= s; }

  /// U X U^* for unitary U.
  SkewHermitian conjugate_by(const CMatrix& u) const {
    require_same_dim(u.rows(), dim(), "conjugate_by");
    return project(u * m_ * u.adjoint());
  }

 private:
  explicit SkewHermitian(CMatrix m) : m_(std::move(m)) {}

  CMatrix m_;
};

/// (A|B) = -Re tr(AB) = Re tr(A B^*).
inline double trace_inner(const SkewHermitian& a, const SkewHermitian& b) {
  require_same_dim(a.dim(), b.dim(), "trace_inner");
  // Re tr(A B^*) = sum_jk Re(A_jk conj(B_jk)).
  const auto& am = a.matrix();
  const auto& bm = b.matrix();
  double acc = 0.0;
  for (Eigen::Index c = 0; c < am.cols(); ++c)
    for (Eigen::Index r = 0; r < am.rows(); ++r) acc += (am(r, c) * std::conj(bm(r, c))).real();
  return acc;
}

/// [X, Y] = XY - YX.
inline SkewHermitian commutator(const SkewHermitian& x, const SkewHermitian& y) {
  require_same_dim(x.dim(), y.dim(), "commutator");
  const auto& a = x.matrix();
  const auto& b = y.matrix();
  return SkewHermitian::project(a * b - b * a);
}

/// Frobenius norm of a raw complex matrix.
inline double frobenius(const CMatrix& m) { return m.norm(); }

// ---------------------------------------------------------------------------
// Spectral data

/// One distinct eigenvalue level v of -iX with its orthogonal projection.
struct Level {
  double value = 0.0;
  CMatrix projection;
  int multiplicity = 0;
  /// Column range [first, first + multiplicity) in SpectralData::basis.
  int first = 0;
};

/// Hermitian eigendecomposition of -iX with eigenvalues clustered into levels
/// v_1 > v_2 > ... > v_F.
struct SpectralData {
  int n = 0;
  double cluster_tol = 0.0;
  /// Eigenvalues of -iX in decreasing order (unclustered).
  RVector eigenvalues;
  /// Unitary whose columns are the matching eigenvectors.
  CMatrix basis;
  std::vector<Level> levels;

  int level_count() const noexcept { return static_cast<int>(levels.size()); }
  /// Level index of each basis column.
  std::vector<int> level_of_column() const {
    std::vector<int> out(static_cast<std::size_t>(n), 0);
    for (int k = 0; k < level_count(); ++k)
      for (int j = 0; j < levels[k].multiplicity; ++j) out[levels[k].first + j] = k;
    return out;
  }
};

inline double default_cluster_tol(const SkewHermitian& x) {
  return 1e-8 * std::max(1.0, x.frobenius());
}

namespace detail {

/// Eigenpairs of the Hermitian matrix -iX, eigenvalues decreasing.
inline std::pair<RVector, CMatrix> eigh_skew(const SkewHermitian& x) {
  const int n = x.dim();
  CMatrix h = Complex(0.0, -1.0) * x.matrix();
  h = 0.5 * (h + h.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw NumericalError("spectral: eigensolver did not converge");
  RVector vals(n);
  CMatrix vecs(n, n);
  for (int j = 0; j < n; ++j) {
    vals(j) = es.eigenvalues()(n - 1 - j);
    vecs.col(j) = es.eigenvectors().col(n - 1 - j);
  }
  return {vals, vecs};
}

}  // namespace detail

/// Eigenvalues of -iX, decreasing.
inline RVector eigenvalues(const SkewHermitian& x) {
  if (x.dim() == 0) return RVector();
  const int n = x.dim();
  CMatrix h = Complex(0.0, -1.0) * x.matrix();
  h = 0.5 * (h + h.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalues: eigensolver did not converge");
  RVector vals(n);
  for (int j = 0; j < n; ++j) vals(j) = es.eigenvalues()(n - 1 - j);
  return vals;
}

/// Spectral decomposition of -iX with eigenvalues whose consecutive gap is
/// <= cluster_tol merged into one level. A negative cluster_tol selects
/// default_cluster_tol(x).
inline SpectralData spectral(const SkewHermitian& x, double cluster_tol = -1.0) {
  SpectralData sd;
  sd.n = x.dim();
  sd.cluster_tol = cluster_tol < 0.0 ? default_cluster_tol(x) : cluster_tol;
  auto [vals, vecs] = detail::eigh_skew(x);
  sd.eigenvalues = vals;
  sd.basis = vecs;

  int start = 0;
  while (start < sd.n) {
    int end = start + 1;
    while (end < sd.n && vals(end - 1) - vals(end) <= sd.cluster_tol) ++end;
    Level lv;
    lv.first = start;
    lv.multiplicity = end - start;
    lv.value = vals.segment(start, end - start).mean();
    const CMatrix cols = vecs.middleCols(start, end - start);
    CMatrix p = cols * cols.adjoint();
    lv.projection = 0.5 * (p + p.adjoint());
    sd.levels.push_back(std::move(lv));
    start = end;
  }
  return sd;
}

/// i * sum_k v_k P_k from clustered data.
inline SkewHermitian reconstruct(const SpectralData& sd) {
  CMatrix m = CMatrix::Zero(sd.n, sd.n);
  for (const auto& lv : sd.levels) m += kI * lv.value * lv.projection;
  return SkewHermitian::project(m);
}

// ---------------------------------------------------------------------------
// Block diagonal / codiagonal split

struct BlockSplit {
  SkewHermitian diagonal;    // X_D = sum_k P_k X P_k
  SkewHermitian codiagonal;  // X_C = X - X_D
};

/// Pinching of X by the level projections of `sd`.
inline BlockSplit block_split(const SkewHermitian& x, const SpectralData& sd) {
  require_same_dim(x.dim(), sd.n, "block_split");
  CMatrix d = CMatrix::Zero(sd.n, sd.n);
  for (const auto& lv : sd.levels) d += lv.projection * x.matrix() * lv.projection;
  BlockSplit out;
  out.diagonal = SkewHermitian::project(d);
  out.codiagonal = x - out.diagonal;
  return out;
}

// ---------------------------------------------------------------------------
// Random generation

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases of
/// diag(R) absorbed into Q.
inline CMatrix haar_unitary(int n, Rng& rng) {
  if (n < 1) throw DomainError("haar_unitary: n must be >= 1");
  CMatrix z(n, n);
  const double s = 1.0 / std::sqrt(2.0);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) z(r, c) = Complex(s * rng.normal(), s * rng.normal());
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= a > 0.0 ? d / a : Complex(1.0, 0.0);
  }
  return q;
}

inline CMatrix haar_unitary(int n, std::uint64_t seed) {
  Rng rng(seed);
  return haar_unitary(n, rng);
}

/// Random element of u(n) with i.i.d. Gaussian entries (GUE-like), times `scale`.
inline SkewHermitian random_skew(int n, Rng& rng, double scale = 1.0) {
  CMatrix a(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) a(r, c) = Complex(rng.normal(), rng.normal());
  return scale * SkewHermitian::project(a);
}

/// Random traceless element of su(n).
inline SkewHermitian random_traceless(int n, Rng& rng, double scale = 1.0) {
  SkewHermitian x = random_skew(n, rng, scale);
  const double t = x.trace_imag() / n;
  return x - SkewHermitian::diagonal(RVector::Constant(n, t));
}

/// U i diag(x) U^* for a fresh Haar U.
inline SkewHermitian random_with_spectrum(const RVector& x, Rng& rng) {
  return SkewHermitian::conjugated_diagonal(haar_unitary(static_cast<int>(x.size()), rng), x);
}

// ---------------------------------------------------------------------------
// Adjoint action

/// e^{sX} V e^{-sX}, with the exponential of the skew-Hermitian sX taken
/// through its eigendecomposition.
inline SkewHermitian ad_exp(double s, const SkewHermitian& x, const SkewHermitian& v) {
  require_same_dim(x.dim(), v.dim(), "ad_exp");
  if (s == 0.0) return v;
  auto [vals, vecs] = detail::eigh_skew(x);
  Eigen::VectorXcd phases(vals.size());
  for (Eigen::Index k = 0; k < vals.size(); ++k) phases(k) = std::exp(kI * (s * vals(k)));
  const CMatrix e = vecs * phases.asDiagonal() * vecs.adjoint();
  return SkewHermitian::project(e * v.matrix() * e.adjoint());
}

}  // namespace adnorm
