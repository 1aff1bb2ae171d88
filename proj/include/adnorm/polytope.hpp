#pragma once

// Vertex/facet polytopes in R^n, optionally confined to the hyperplane
// sum(x) = 0. Facets are found by brute force over vertex subsets, which is
// only meant for slice dimension <= 4.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "adnorm/error.hpp"
#include "adnorm/matrix_core.hpp"
#include "adnorm/simplex.hpp"

namespace adnorm {

enum class Hyperplane { none, sum_zero };

/// Half-space normal . x <= offset; normal has unit length and lies in the
/// polytope's linear hull.
struct Facet {
  RVector normal;
  double offset = 0.0;
};

struct Polytope {
  int ambient_dim = 0;
  Hyperplane hyperplane = Hyperplane::none;
  std::vector<RVector> vertices;
  std::vector<Facet> facets;

  int slice_dim() const noexcept {
    return hyperplane == Hyperplane::sum_zero ? ambient_dim - 1 : ambient_dim;
  }
};

/// Largest slice dimension accepted by the facet search.
inline constexpr int kMaxSliceDim = 4;

namespace detail {

inline bool lex_less(const RVector& a, const RVector& b, double tol = 1e-12) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i) - tol) return true;
    if (a(i) > b(i) + tol) return false;
  }
  return false;
}

inline bool near(const RVector& a, const RVector& b, double tol) {
  return a.size() == b.size() && (a - b).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace detail

/// Orthonormal basis (columns) of the polytope's linear hull: the identity,
/// or the Helmert basis of {sum x = 0}.
inline RMatrix slice_basis(int n, Hyperplane h) {
  if (h == Hyperplane::none) return RMatrix::Identity(n, n);
  RMatrix b = RMatrix::Zero(n, n - 1);
  for (int k = 1; k < n; ++k) {
    const double s = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
    for (int i = 0; i < k; ++i) b(i, k - 1) = s;
    b(k, k - 1) = -k * s;
  }
  return b;
}

/// Enumerates the facets of conv(points) given in slice coordinates (columns).
inline std::vector<Facet> enumerate_facets_slice(const RMatrix& pts, double tol = 1e-9) {
  const int d = static_cast<int>(pts.rows());
  const int m = static_cast<int>(pts.cols());
  if (d > kMaxSliceDim) {
    throw DomainError("facet enumeration limited to slice dimension " +
                      std::to_string(kMaxSliceDim));
  }
  const double scale = std::max(1.0, pts.cwiseAbs().maxCoeff());
  std::vector<Facet> out;
  if (m < d) return out;

  std::vector<int> idx(static_cast<std::size_t>(d));
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    RVector a;
    bool ok = true;
    if (d == 1) {
      a = RVector::Ones(1);
    } else {
      RMatrix diff(d - 1, d);
      for (int r = 1; r < d; ++r) diff.row(r - 1) = (pts.col(idx[r]) - pts.col(idx[0])).transpose();
      Eigen::JacobiSVD<RMatrix> svd(diff, Eigen::ComputeFullV);
      const auto& sv = svd.singularValues();
      if (sv(sv.size() - 1) <= 1e-10 * scale) ok = false;
      a = svd.matrixV().col(d - 1);
    }
    if (ok) {
      const double b = a.dot(pts.col(idx[0]));
      const RVector s = pts.transpose() * a - RVector::Constant(m, b);
      Facet f;
      if (s.maxCoeff() <= tol * scale) {
        f = {a, b};
      } else if (s.minCoeff() >= -tol * scale) {
        f = {-a, -b};
      } else {
        ok = false;
      }
      if (ok) {
        bool dup = false;
        for (const auto& g : out) {
          if (detail::near(g.normal, f.normal, 1e-8) && std::abs(g.offset - f.offset) <= 1e-8 * scale) {
            dup = true;
            break;
          }
        }
        if (!dup) out.push_back(std::move(f));
      }
    }
    // next combination
    int i = d - 1;
    while (i >= 0 && idx[i] == m - d + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

/// Canonical ordering: vertices and facet normals lexicographically ascending.
inline void canonicalize(Polytope& p) {
  std::sort(p.vertices.begin(), p.vertices.end(),
            [](const RVector& a, const RVector& b) { return detail::lex_less(a, b); });
  std::sort(p.facets.begin(), p.facets.end(),
            [](const Facet& a, const Facet& b) { return detail::lex_less(a.normal, b.normal); });
}

/// Builds a polytope from a point cloud: drops duplicates and non-extreme
/// points, computes facets. Points must lie in the hyperplane when one is given
/// and must span it.
inline Polytope make_polytope(const std::vector<RVector>& points, Hyperplane h, double tol = 1e-9) {
  if (points.empty()) throw DomainError("make_polytope: no points");
  const int n = static_cast<int>(points.front().size());
  Polytope p;
  p.ambient_dim = n;
  p.hyperplane = h;
  for (const auto& v : points) {
    require_same_dim(v.size(), n, "make_polytope");
    if (h == Hyperplane::sum_zero && std::abs(v.sum()) > tol * (1.0 + v.cwiseAbs().sum())) {
      throw DomainError("make_polytope: vertex not in the sum-zero hyperplane");
    }
    bool dup = false;
    for (const auto& w : p.vertices) dup = dup || detail::near(v, w, tol);
    if (!dup) p.vertices.push_back(h == Hyperplane::sum_zero ? RVector(v.array() - v.mean()) : v);
  }
  const RMatrix basis = slice_basis(n, h);
  const int d = static_cast<int>(basis.cols());

  // Drop points that are convex combinations of the others.
  std::vector<RVector> extreme;
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    RMatrix others(d, static_cast<Eigen::Index>(p.vertices.size() - 1));
    int c = 0;
    for (std::size_t j = 0; j < p.vertices.size(); ++j)
      if (j != i) others.col(c++) = basis.transpose() * p.vertices[j];
    if (p.vertices.size() == 1 || !lp::in_convex_hull(others, basis.transpose() * p.vertices[i], tol))
      extreme.push_back(p.vertices[i]);
  }
  p.vertices = std::move(extreme);

  RMatrix pts(d, static_cast<Eigen::Index>(p.vertices.size()));
  for (std::size_t j = 0; j < p.vertices.size(); ++j) pts.col(static_cast<Eigen::Index>(j)) = basis.transpose() * p.vertices[j];
  Eigen::FullPivLU<RMatrix> lu(pts);
  lu.setThreshold(1e-10);
  if (p.vertices.size() < 2 || lu.rank() < d) {
    // Rank of the point cloud itself; for a body around 0 this equals the affine rank.
    throw DomainError("make_polytope: points do not span the slice");
  }
  for (auto& f : enumerate_facets_slice(pts, tol)) p.facets.push_back({basis * f.normal, f.offset});
  canonicalize(p);
  return p;
}

/// Orthogonal coordinates of x in the polytope's slice.
inline RVector to_slice(const Polytope& p, const RVector& x) {
  return slice_basis(p.ambient_dim, p.hyperplane).transpose() * x;
}

/// True iff every vertex satisfies every facet inequality (within tol).
inline bool facets_consistent(const Polytope& p, double tol = 1e-10) {
  for (const auto& f : p.facets)
    for (const auto& v : p.vertices)
      if (f.normal.dot(v) > f.offset + tol * (1.0 + std::abs(f.offset))) return false;
  return true;
}

/// Number of vertices lying on facet f.
inline int vertices_on_facet(const Polytope& p, const Facet& f, double tol = 1e-9) {
  int c = 0;
  for (const auto& v : p.vertices)
    if (std::abs(f.normal.dot(v) - f.offset) <= tol * (1.0 + std::abs(f.offset))) ++c;
  return c;
}

/// True iff no vertex lies in the convex hull of the others (LP audit).
inline bool vertices_are_extreme(const Polytope& p, double tol = 1e-9) {
  const RMatrix basis = slice_basis(p.ambient_dim, p.hyperplane);
  const int d = static_cast<int>(basis.cols());
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    RMatrix others(d, static_cast<Eigen::Index>(p.vertices.size() - 1));
    int c = 0;
    for (std::size_t j = 0; j < p.vertices.size(); ++j)
      if (j != i) others.col(c++) = basis.transpose() * p.vertices[j];
    if (p.vertices.size() > 1 && lp::in_convex_hull(others, basis.transpose() * p.vertices[i], tol))
      return false;
  }
  return true;
}

}  // namespace adnorm
