#pragma once

// Orbit polytopes, polar duals, self-duality and norming sets of polytope
// gauges.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "adnorm/error.hpp"
#include "adnorm/gauge.hpp"
#include "adnorm/polytope.hpp"

namespace adnorm {

inline constexpr int kMaxOrbitPolytopeDim = 5;

/// co{sigma(c)}: vertices are the distinct permutations of c, inside sum(x) = 0.
inline Polytope orbit_polytope(const OrbitSpec& c) {
  const int n = c.dim();
  if (n > kMaxOrbitPolytopeDim)
    throw DomainError("orbit_polytope: n > " + std::to_string(kMaxOrbitPolytopeDim) + " not supported");
  std::vector<double> v(c.c().data(), c.c().data() + n);
  std::sort(v.begin(), v.end());
  Polytope p;
  p.ambient_dim = n;
  p.hyperplane = Hyperplane::sum_zero;
  do {
    p.vertices.push_back(Eigen::Map<const RVector>(v.data(), n));
  } while (std::next_permutation(v.begin(), v.end()));

  // Every facet normal is (1_S - |S|/n) for a proper subset S; keep the
  // subsets whose supporting vertices span a hyperplane of the slice.
  const RVector cs = c.c();
  const int d = n - 1;
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    const int k = __builtin_popcount(mask);
    RVector a = RVector::Constant(n, -static_cast<double>(k) / n);
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) a(i) += 1.0;
    const double b = cs.head(k).sum();
    const double len = a.norm();
    std::vector<RVector> on;
    for (const auto& x : p.vertices)
      if (std::abs(a.dot(x) - b) <= 1e-12 * (1.0 + std::abs(b))) on.push_back(x);
    if (static_cast<int>(on.size()) < d) continue;
    RMatrix diff(n, static_cast<Eigen::Index>(on.size()));
    for (std::size_t j = 0; j < on.size(); ++j) diff.col(static_cast<Eigen::Index>(j)) = on[j] - on[0];
    Eigen::FullPivLU<RMatrix> lu(diff);
    lu.setThreshold(1e-10);
    if (lu.rank() == d - 1) p.facets.push_back({a / len, b / len});
  }
  canonicalize(p);
  return p;
}

/// {y in span(P) : <y,x> <= 1 for all x in P}.
inline Polytope polar_dual(const Polytope& p) {
  if (p.facets.empty()) throw DomainError("polar_dual: polytope has no facets");
  std::vector<RVector> pts;
  for (const auto& f : p.facets) {
    if (f.offset <= 1e-12) throw DomainError("polar_dual: 0 is not in the relative interior");
    pts.push_back(f.normal / f.offset);
  }
  return make_polytope(pts, p.hyperplane);
}

/// Symmetric Hausdorff distance between the vertex sets.
inline double vertex_hausdorff(const Polytope& a, const Polytope& b) {
  auto one_way = [](const Polytope& x, const Polytope& y) {
    double worst = 0.0;
    for (const auto& v : x.vertices) {
      double best = kInf;
      for (const auto& w : y.vertices) best = std::min(best, (v - w).norm());
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_way(a, b), one_way(b, a));
}

struct SelfDuality {
  bool self_dual = false;
  /// s with R P = s P°.
  double scale = 0.0;
  /// Orthogonal map in slice coordinates.
  RMatrix transform;
  double determinant = 0.0;
};

namespace detail {

inline std::vector<double> distance_spectrum(const RMatrix& pts) {
  std::vector<double> d;
  for (Eigen::Index i = 0; i < pts.cols(); ++i)
    for (Eigen::Index j = i + 1; j < pts.cols(); ++j) d.push_back((pts.col(i) - pts.col(j)).norm());
  std::sort(d.begin(), d.end());
  return d;
}

/// True iff r maps the column set of a onto the column set of b (bijectively).
inline bool maps_onto(const RMatrix& r, const RMatrix& a, const RMatrix& b, double tol) {
  std::vector<char> used(static_cast<std::size_t>(b.cols()), 0);
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    const RVector img = r * a.col(i);
    bool hit = false;
    for (Eigen::Index j = 0; j < b.cols() && !hit; ++j) {
      if (!used[j] && (img - b.col(j)).norm() <= tol) {
        used[j] = 1;
        hit = true;
      }
    }
    if (!hit) return false;
  }
  return true;
}

/// Indices of d affinely spread, linearly independent columns (pivoted QR).
inline std::vector<int> independent_columns(const RMatrix& a) {
  Eigen::ColPivHouseholderQR<RMatrix> qr(a);
  std::vector<int> out;
  for (Eigen::Index k = 0; k < a.rows(); ++k) out.push_back(static_cast<int>(qr.colsPermutation().indices()(k)));
  return out;
}

}  // namespace detail

/// Is the polar dual of P a rotated (orthogonally transformed) rescaling of P?
inline SelfDuality is_self_dual(const Polytope& p, double tol = 1e-8) {
  SelfDuality out;
  const Polytope q = polar_dual(p);
  if (q.vertices.size() != p.vertices.size()) return out;
  const RMatrix basis = slice_basis(p.ambient_dim, p.hyperplane);
  const int d = static_cast<int>(basis.cols());
  const int m = static_cast<int>(p.vertices.size());
  RMatrix a(d, m), b(d, m);
  for (int j = 0; j < m; ++j) {
    a.col(j) = basis.transpose() * p.vertices[j];
    b.col(j) = basis.transpose() * q.vertices[j];
  }
  const double ra = std::sqrt(a.colwise().squaredNorm().mean());
  const double rb = std::sqrt(b.colwise().squaredNorm().mean());
  a /= ra;
  b /= rb;

  const auto da = detail::distance_spectrum(a);
  const auto db = detail::distance_spectrum(b);
  for (std::size_t i = 0; i < da.size(); ++i)
    if (std::abs(da[i] - db[i]) > tol) return out;

  const std::vector<int> anchors = detail::independent_columns(a);
  std::vector<int> assign(static_cast<std::size_t>(d), -1);
  RMatrix best_r;
  RMatrix reflection;
  std::function<bool(int)> search = [&](int level) -> bool {
    if (level == d) {
      RMatrix as(d, d), bs(d, d);
      for (int k = 0; k < d; ++k) {
        as.col(k) = a.col(anchors[k]);
        bs.col(k) = b.col(assign[k]);
      }
      const RMatrix r = bs * as.inverse();
      if ((r.transpose() * r - RMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > 10.0 * tol) return false;
      if (!detail::maps_onto(r, a, b, 10.0 * tol)) return false;
      // Prefer a proper rotation; keep a reflection as fallback.
      if (r.determinant() > 0.0) {
        best_r = r;
        return true;
      }
      if (reflection.size() == 0) reflection = r;
      return false;
    }
    const RVector av = a.col(anchors[level]);
    for (int j = 0; j < m; ++j) {
      if (std::abs(b.col(j).norm() - av.norm()) > tol) continue;
      bool ok = true;
      for (int k = 0; k < level && ok; ++k) {
        if (assign[k] == j) ok = false;
        else ok = std::abs((b.col(j) - b.col(assign[k])).norm() - (av - a.col(anchors[k])).norm()) <= tol;
      }
      if (!ok) continue;
      assign[level] = j;
      if (search(level + 1)) return true;
    }
    assign[level] = -1;
    return false;
  };
  if (!search(0)) {
    if (reflection.size() == 0) return out;
    best_r = reflection;
  }
  out.self_dual = true;
  out.scale = ra / rb;
  out.transform = best_r;
  out.determinant = best_r.determinant();
  return out;
}

/// Polytope gauge whose dual ball is `dual_ball` (e.g. an orbit polytope).
inline Gauge gauge_with_dual_ball(const Polytope& dual_ball) { return Gauge::polytope(polar_dual(dual_ball)); }

/// Vertices of the dual ball that are norming for x; the norming set in R^n
/// is their convex hull. Defined for polytope and orbit gauges.
inline std::vector<RVector> norming_set(const Gauge& g, const RVector& x) {
  if (!g.as<gauges::PolytopeBall>() && !g.as<gauges::Orbit>())
    throw DomainError("norming_set: only polytope and orbit gauges have an enumerable norming set");
  return active_set(g, x).vertices;
}

/// Plain CSV of slice coordinates (x,y[,z]) for plotting; 2D vertices are
/// listed counter-clockwise and the first row is repeated to close the polygon.
inline std::string slice_csv(const Polytope& p) {
  const RMatrix basis = slice_basis(p.ambient_dim, p.hyperplane);
  const int d = static_cast<int>(basis.cols());
  if (d > 3) throw DomainError("slice_csv: only 1-, 2- and 3-dimensional slices can be exported");
  std::vector<RVector> pts;
  for (const auto& v : p.vertices) pts.push_back(basis.transpose() * v);
  if (d == 2) {
    std::sort(pts.begin(), pts.end(),
              [](const RVector& u, const RVector& v) { return std::atan2(u(1), u(0)) < std::atan2(v(1), v(0)); });
    if (!pts.empty()) pts.push_back(pts.front());
  } else if (d == 1) {
    std::sort(pts.begin(), pts.end(), [](const RVector& u, const RVector& v) { return u(0) < v(0); });
  }
  std::ostringstream os;
  os.precision(17);
  os << (d == 3 ? "x,y,z\n" : "x,y\n");
  for (const auto& v : pts) {
    if (d == 1) os << v(0) << ",0\n";
    else if (d == 2) os << v(0) << "," << v(1) << "\n";
    else os << v(0) << "," << v(1) << "," << v(2) << "\n";
  }
  return os.str();
}

}  // namespace adnorm
