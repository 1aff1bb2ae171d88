#pragma once

// Dense two-phase simplex with Bland's anti-cycling rule. Intended for the
// small feasibility problems of polytope audits (a few hundred variables).

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

namespace adnorm::lp {

enum class Status { optimal, infeasible, unbounded, iteration_limit };

struct Result {
  Status status = Status::infeasible;
  double objective = 0.0;
  Eigen::VectorXd x;
};

namespace detail {

// Tableau rows 0..m-1 are constraints, row m is the reduced-cost row.
// Last column is the right-hand side.
class Tableau {
 public:
  Tableau(Eigen::MatrixXd t, std::vector<int> basis, double eps)
      : t_(std::move(t)), basis_(std::move(basis)), eps_(eps) {}

  /// Runs Bland pivoting on columns [0, ncols). Returns false if unbounded.
  Status run(int ncols, int max_iter) {
    const int m = static_cast<int>(basis_.size());
    const int rhs = static_cast<int>(t_.cols()) - 1;
    for (int it = 0; it < max_iter; ++it) {
      int enter = -1;
      for (int j = 0; j < ncols; ++j) {
        if (t_(m, j) < -eps_) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return Status::optimal;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        if (t_(i, enter) > eps_) {
          const double ratio = t_(i, rhs) / t_(i, enter);
          if (ratio < best - eps_ || (std::abs(ratio - best) <= eps_ && basis_[i] < basis_[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return Status::unbounded;
      pivot(leave, enter);
    }
    return Status::iteration_limit;
  }

  void pivot(int row, int col) {
    t_.row(row) /= t_(row, col);
    for (int i = 0; i < t_.rows(); ++i) {
      if (i != row && t_(i, col) != 0.0) t_.row(i) -= t_(i, col) * t_.row(row);
    }
    basis_[row] = col;
  }

  Eigen::MatrixXd& table() { return t_; }
  std::vector<int>& basis() { return basis_; }

 private:
  Eigen::MatrixXd t_;
  std::vector<int> basis_;
  double eps_;
};

}  // namespace detail

/// minimize c.x subject to A x = b, x >= 0.
inline Result minimize(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                       double eps = 1e-11, int max_iter = 5000) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  Result res;

  // Phase I tableau: [A | I | b], objective sum of artificials.
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
  std::vector<int> basis(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double sgn = b(i) < 0.0 ? -1.0 : 1.0;
    t.row(i).head(n) = sgn * a.row(i);
    t(i, n + i) = 1.0;
    t(i, n + m) = sgn * b(i);
    basis[i] = n + i;
  }
  for (int i = 0; i < m; ++i) t.row(m) -= t.row(i);
  for (int i = 0; i < m; ++i) t(m, n + i) = 0.0;

  detail::Tableau tab(std::move(t), std::move(basis), eps);
  Status st = tab.run(n + m, max_iter);
  if (st == Status::iteration_limit) {
    res.status = st;
    return res;
  }
  auto& tt = tab.table();
  const double scale = 1.0 + b.cwiseAbs().sum();
  if (-tt(m, n + m) > eps * scale) {
    res.status = Status::infeasible;
    return res;
  }
  // Drive artificials out of the basis where possible.
  for (int i = 0; i < m; ++i) {
    if (tab.basis()[i] >= n) {
      for (int j = 0; j < n; ++j) {
        if (std::abs(tt(i, j)) > eps) {
          tab.pivot(i, j);
          break;
        }
      }
    }
  }

  // Phase II: replace objective row, zero artificial columns.
  Eigen::MatrixXd t2 = Eigen::MatrixXd::Zero(m + 1, n + 1);
  t2.topLeftCorner(m, n) = tt.topLeftCorner(m, n);
  t2.col(n).head(m) = tt.col(n + m).head(m);
  t2.row(m).head(n) = c.transpose();
  std::vector<int> basis2 = tab.basis();
  for (int i = 0; i < m; ++i) {
    if (basis2[i] < n) t2.row(m) -= c(basis2[i]) * t2.row(i);
  }
  // Redundant rows that kept an artificial basic are inert (all-zero in A part).
  for (int i = 0; i < m; ++i)
    if (basis2[i] >= n) basis2[i] = -1;

  // Bland's rule with possibly inert rows: temporarily map -1 to a large index.
  for (auto& bi : basis2)
    if (bi < 0) bi = n + 1000000;
  detail::Tableau tab2(std::move(t2), std::move(basis2), eps);
  st = tab2.run(n, max_iter);
  res.status = st;
  if (st != Status::optimal) return res;

  res.x = Eigen::VectorXd::Zero(n);
  auto& t3 = tab2.table();
  for (int i = 0; i < m; ++i) {
    const int bi = tab2.basis()[i];
    if (bi >= 0 && bi < n) res.x(bi) = t3(i, n);
  }
  res.objective = c.dot(res.x);
  return res;
}

/// True iff p lies in the convex hull of the columns of `points` (to `tol`).
inline bool in_convex_hull(const Eigen::MatrixXd& points, const Eigen::VectorXd& p,
                           double tol = 1e-9) {
  const int d = static_cast<int>(points.rows());
  const int k = static_cast<int>(points.cols());
  if (k == 0) return false;
  Eigen::MatrixXd a(d + 1, k);
  a.topRows(d) = points;
  a.row(d).setOnes();
  Eigen::VectorXd b(d + 1);
  b.head(d) = p;
  b(d) = 1.0;
  const Result r = minimize(a, b, Eigen::VectorXd::Zero(k));
  if (r.status != Status::optimal) return false;
  return r.x.minCoeff() >= -tol && (points * r.x - p).norm() <= tol * (1.0 + p.norm());
}

}  // namespace adnorm::lp
