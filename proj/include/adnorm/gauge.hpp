#pragma once

// Permutation-symmetric Finsler gauges on R^n. Each gauge is the Minkowski
// functional of a symmetric convex body around 0; its support function is the
// gauge of the polar body and gives the dual norm after lifting to u(n).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

#include "adnorm/error.hpp"
#include "adnorm/matrix_core.hpp"
#include "adnorm/polytope.hpp"

namespace adnorm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Eigenvalue vector of an orbit norm: traceless, non-constant, sorted
/// decreasingly.
class OrbitSpec {
 public:
  /// Projects c onto sum(c) = 0, sorts it, optionally rescales to unit
  /// Euclidean norm. Rejects c proportional to (1,...,1).
  static OrbitSpec make(const RVector& c, bool normalize = false) {
    if (c.size() < 2) throw DomainError("orbit spec: need n >= 2");
    RVector v = c.array() - c.mean();
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    if (v.cwiseAbs().maxCoeff() <= 1e-12 * scale) {
      throw DomainError("orbit spec: c is a multiple of the identity; the orbit norm degenerates");
    }
    std::sort(v.data(), v.data() + v.size(), std::greater<>());
    if (normalize) v /= v.norm();
    return OrbitSpec(std::move(v));
  }

  const RVector& c() const noexcept { return c_; }
  int dim() const noexcept { return static_cast<int>(c_.size()); }
  bool frobenius_normalized() const { return std::abs(c_.norm() - 1.0) <= 1e-12; }
  /// sigma(C) = -sigma(C).
  bool balanced() const {
    const int n = dim();
    for (int i = 0; i < n; ++i)
      if (std::abs(c_(i) + c_(n - 1 - i)) > 1e-12 * std::max(1.0, c_.cwiseAbs().maxCoeff()))
        return false;
    return true;
  }

 private:
  explicit OrbitSpec(RVector c) : c_(std::move(c)) {}
  RVector c_;
};

namespace gauges {

struct PNorm {
  double p = 2.0;  // in [1, inf]
};
struct KyFan {
  int k = 1;
};
struct Spectral {};
struct Trace {};
struct Orbit {
  OrbitSpec spec;
};
/// Primal unit ball given by its vertices.
struct PolytopeBall {
  Polytope ball;
};
/// Twisted ellipse (x+y)^2/a^2 + (x-y)^2/b^2 <= 1, n = 2.
struct Ellipse {
  double a = 1.0;
  double b = 1.0;
};
/// l1 ball closed in the first quadrant by the circle through (1,0), (0,1), (1,1).
struct Toast {};
/// Body given by a membership predicate with B(0, inner) subset body subset B(0, outer).
struct Oracle {
  std::function<bool(const RVector&)> contains;
  double inner_radius = 1.0;
  double outer_radius = 1.0;
};

}  // namespace gauges

class Gauge {
 public:
  using Kind = std::variant<gauges::PNorm, gauges::KyFan, gauges::Spectral, gauges::Trace,
                            gauges::Orbit, gauges::PolytopeBall, gauges::Ellipse, gauges::Toast,
                            gauges::Oracle>;

  static Gauge p_norm(int n, double p) {
    if (!(p >= 1.0)) throw DomainError("p-gauge requires p >= 1");
    return Gauge(n, gauges::PNorm{p});
  }
  static Gauge ky_fan(int n, int k) {
    if (k < 1 || k > n) throw DomainError("ky_fan gauge requires 1 <= k <= n");
    return Gauge(n, gauges::KyFan{k});
  }
  static Gauge spectral(int n) { return Gauge(n, gauges::Spectral{}); }
  static Gauge trace(int n) { return Gauge(n, gauges::Trace{}); }
  static Gauge orbit(const OrbitSpec& spec) { return Gauge(spec.dim(), gauges::Orbit{spec}); }
  static Gauge polytope(Polytope ball) {
    const int n = ball.ambient_dim;
    for (const auto& f : ball.facets)
      if (f.offset <= 0.0) throw DomainError("polytope gauge: 0 is not interior to the ball");
    return Gauge(n, gauges::PolytopeBall{std::move(ball)});
  }
  static Gauge ellipse(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("ellipse gauge: radii must be positive");
    return Gauge(2, gauges::Ellipse{a, b});
  }
  static Gauge toast() { return Gauge(2, gauges::Toast{}); }
  static Gauge oracle(int n, std::function<bool(const RVector&)> contains, double inner,
                      double outer) {
    if (!(inner > 0.0) || !(outer >= inner)) throw DomainError("oracle gauge: bad radii");
    return Gauge(n, gauges::Oracle{std::move(contains), inner, outer});
  }

  int dim() const noexcept { return n_; }
  const Kind& kind() const noexcept { return kind_; }

  template <class T>
  const T* as() const noexcept {
    return std::get_if<T>(&kind_);
  }

  std::string name() const {
    return std::visit(
        [&](const auto& k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, gauges::PNorm>) {
            return std::isinf(k.p) ? "p(inf)" : "p(" + fmt_num(k.p) + ")";
          } else if constexpr (std::is_same_v<T, gauges::KyFan>) {
            return "ky_fan(" + std::to_string(k.k) + ")";
          } else if constexpr (std::is_same_v<T, gauges::Spectral>) {
            return "spectral";
          } else if constexpr (std::is_same_v<T, gauges::Trace>) {
            return "trace";
          } else if constexpr (std::is_same_v<T, gauges::Orbit>) {
            std::string s = "orbit(";
            for (Eigen::Index i = 0; i < k.spec.c().size(); ++i)
              s += (i ? "," : "") + fmt_num(k.spec.c()(i));
            return s + ")";
          } else if constexpr (std::is_same_v<T, gauges::PolytopeBall>) {
            return "polytope(" + std::to_string(k.ball.vertices.size()) + " vertices)";
          } else if constexpr (std::is_same_v<T, gauges::Ellipse>) {
            return "ellipse(" + fmt_num(k.a) + "," + fmt_num(k.b) + ")";
          } else if constexpr (std::is_same_v<T, gauges::Toast>) {
            return "toast";
          } else {
            return "oracle";
          }
        },
        kind_);
  }

  /// Closed-form support function available (no numeric maximization).
  bool closed_form_support() const noexcept { return !std::holds_alternative<gauges::Oracle>(kind_); }

 private:
  Gauge(int n, Kind k) : n_(n), kind_(std::move(k)) {
    if (n < 1) throw DomainError("gauge dimension must be >= 1");
  }
  static std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
  }

  int n_;
  Kind kind_;
};

namespace detail {

inline RVector sorted_desc(RVector x) {
  std::sort(x.data(), x.data() + x.size(), std::greater<>());
  return x;
}

inline double lp_norm(const RVector& x, double p) {
  const double m = x.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  if (std::isinf(p)) return m;
  if (p == 1.0) return x.cwiseAbs().sum();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) acc += std::pow(std::abs(x(i)) / m, p);
  return m * std::pow(acc, 1.0 / p);
}

inline double conjugate_exponent(double p) {
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

inline double sum_k_largest_abs(const RVector& x, int k) {
  RVector a = sorted_desc(x.cwiseAbs());
  return a.head(k).sum();
}

/// Indices of x ordered by decreasing value; ties by lowest index.
inline std::vector<int> order_desc(const RVector& x) {
  std::vector<int> idx(static_cast<std::size_t>(x.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return x(a) > x(b); });
  return idx;
}

inline double sgn_pos(double v) { return v >= 0.0 ? 1.0 : -1.0; }

/// Gauge of co(permutations of c) in the sum-zero slice: the smallest t with
/// y0 majorized by t c.
inline double orbit_hull_gauge(const RVector& c_desc, const RVector& y) {
  const RVector y0 = y.array() - y.mean();
  const RVector ys = sorted_desc(y0);
  double best = 0.0;
  double sy = 0.0;
  double sc = 0.0;
  for (Eigen::Index k = 0; k + 1 < ys.size(); ++k) {
    sy += ys(k);
    sc += c_desc(k);
    best = std::max(best, sy / sc);
  }
  return best;
}

inline double trace_tol(const RVector& x) { return 1e-12 * (1.0 + x.cwiseAbs().sum()); }

inline double oracle_eval(const gauges::Oracle& o, const RVector& x) {
  const double r = x.norm();
  if (r == 0.0) return 0.0;
  double lo = r / o.outer_radius;  // x/lo is outside or on the boundary
  double hi = r / o.inner_radius;  // x/hi is inside
  if (!o.contains(x / hi)) throw NumericalError("oracle gauge: inner radius bracket failed");
  if (lo > 0.0 && o.contains(x / (lo * (1.0 - 1e-12)))) {
    if (o.contains(x / (lo * 0.5)))
      throw NumericalError("oracle gauge: outer radius bracket failed (unbounded body?)");
  }
  while (hi - lo > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (o.contains(x / mid))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Minkowski functional of the gauge body at x.
inline double gauge_eval(const Gauge& g, const RVector& x) {
  require_same_dim(x.size(), g.dim(), "gauge_eval");
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, gauges::PNorm>) {
          return detail::lp_norm(x, k.p);
        } else if constexpr (std::is_same_v<T, gauges::KyFan>) {
          return detail::sum_k_largest_abs(x, k.k);
        } else if constexpr (std::is_same_v<T, gauges::Spectral>) {
          return x.cwiseAbs().maxCoeff();
        } else if constexpr (std::is_same_v<T, gauges::Trace>) {
          return x.cwiseAbs().sum();
        } else if constexpr (std::is_same_v<T, gauges::Orbit>) {
          return k.spec.c().dot(detail::sorted_desc(x)) + std::abs(x.sum());
        } else if constexpr (std::is_same_v<T, gauges::PolytopeBall>) {
          const Polytope& p = k.ball;
          RVector x0 = x;
          double extra = 0.0;
          if (p.hyperplane == Hyperplane::sum_zero) {
            extra = std::abs(x.sum());
            x0 = x.array() - x.mean();
          }
          double best = 0.0;
          for (const auto& f : p.facets) best = std::max(best, f.normal.dot(x0) / f.offset);
          return best + extra;
        } else if constexpr (std::is_same_v<T, gauges::Ellipse>) {
          const double s = (x(0) + x(1)) / k.a;
          const double d = (x(0) - x(1)) / k.b;
          return std::sqrt(s * s + d * d);
        } else if constexpr (std::is_same_v<T, gauges::Toast>) {
          if (x(0) >= 0.0 && x(1) >= 0.0) {
            const double s = x(0) + x(1);
            return s == 0.0 ? 0.0 : (x(0) * x(0) + x(1) * x(1)) / s;
          }
          return std::abs(x(0)) + std::abs(x(1));
        } else {
          return detail::oracle_eval(k, x);
        }
      },
      g.kind());
}

struct SupportResult {
  double value = 0.0;
  /// Set when the search did not certify convergence; value is then only a lower bound.
  bool lower_bound = false;
};

/// sup { <y, d> / gauge(d) } over directions from gauge evaluations only.
/// `starts` scales the direction sample used to bound the search region.
inline SupportResult numeric_support(const Gauge& g, const RVector& y, int starts = 32) {
  require_same_dim(y.size(), g.dim(), "numeric_support");
  const int n = g.dim();
  auto ratio = [&](const RVector& d) {
    const double e = gauge_eval(g, d);
    return e > 0.0 ? y.dot(d) / e : -kInf;
  };
  if (y.norm() == 0.0) return {0.0, false};
  if (n == 1) {
    RVector p = RVector::Ones(1);
    return {std::max(ratio(p), ratio(-p)), false};
  }
  if (n == 2) {
    auto at = [&](double t) {
      RVector d(2);
      d << std::cos(t), std::sin(t);
      return ratio(d);
    };
    const int grid = 3600;
    const double h = 2.0 * M_PI / grid;
    int best = 0;
    double bv = -kInf;
    for (int i = 0; i < grid; ++i) {
      const double v = at(i * h);
      if (v > bv) {
        bv = v;
        best = i;
      }
    }
    // Golden-section refinement on the bracketing cells.
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = (best - 1) * h;
    double b = (best + 1) * h;
    double c1 = b - gr * (b - a);
    double c2 = a + gr * (b - a);
    double f1 = at(c1);
    double f2 = at(c2);
    while (b - a > 1e-13) {
      if (f1 < f2) {
        a = c1;
        c1 = c2;
        f1 = f2;
        c2 = a + gr * (b - a);
        f2 = at(c2);
      } else {
        b = c2;
        c2 = c1;
        f2 = f1;
        c1 = b - gr * (b - a);
        f1 = at(c1);
      }
    }
    return {std::max({bv, f1, f2}), false};
  }

  // n > 2: support(y) = 1 / min { gauge(x) : <y, x> = 1 }, a convex problem on
  // an (n-1)-dimensional slice, solved by the central-cut ellipsoid method with
  // finite-difference subgradients. The cut width certifies the gap.
  const int m = n - 1;
  const RVector x0 = y / y.squaredNorm();
  RMatrix full(n, n);
  full.col(0) = y.normalized();
  full.rightCols(m).setZero();
  Eigen::HouseholderQR<RMatrix> qr(full.leftCols(1));
  const RMatrix basis = RMatrix(qr.householderQ()).rightCols(m);
  auto slice = [&](const RVector& z) { return gauge_eval(g, x0 + basis * z); };

  // Any slice point has |x| <= gauge(x) * rho, rho the circumradius of the unit
  // ball; estimate rho from sampled directions with a safety factor.
  Rng rng(0x51ed5u);
  double gmin = kInf;
  for (int i = 0; i < std::max(starts, 1) * 16; ++i) {
    RVector d(n);
    for (int k = 0; k < n; ++k) d(k) = rng.normal();
    gmin = std::min(gmin, gauge_eval(g, d.normalized()));
  }
  for (int k = 0; k < n; ++k) gmin = std::min({gmin, gauge_eval(g, RVector::Unit(n, k)), gauge_eval(g, -RVector::Unit(n, k))});
  if (!(gmin > 0.0)) return {ratio(y.normalized()), true};
  double best = slice(RVector::Zero(m));
  const double radius = 4.0 * best / gmin;

  RVector c = RVector::Zero(m);
  RMatrix p = RMatrix::Identity(m, m) * radius * radius;
  const double md = m;
  bool certified = false;
  for (int it = 0; it < 4000 * m; ++it) {
    const double gc = slice(c);
    best = std::min(best, gc);
    const double h = std::max(1e-4 * std::sqrt(p.trace() / md), 1e-11 * (1.0 + x0.norm()));
    RVector sg(m);
    for (int k = 0; k < m; ++k) {
      RVector e = RVector::Zero(m);
      e(k) = h;
      sg(k) = (slice(c + e) - slice(c - e)) / (2.0 * h);
    }
    const RVector ps = p * sg;
    const double width = std::sqrt(std::max(sg.dot(ps), 0.0));
    if (width <= 1e-12 * best) {
      certified = true;
      break;
    }
    const RVector bv = ps / width;
    c -= bv / (md + 1.0);
    p = (md * md / (md * md - 1.0)) * (p - (2.0 / (md + 1.0)) * bv * bv.transpose());
    p = 0.5 * (p + p.transpose());
  }
  return {std::max(1.0 / best, ratio(y.normalized())), !certified};
}

/// Support function sup{ <y,x> : gauge(x) <= 1 } with a closed form for every
/// kind except oracle bodies.
inline SupportResult support_detail(const Gauge& g, const RVector& y) {
  require_same_dim(y.size(), g.dim(), "support");
  return std::visit(
      [&](const auto& k) -> SupportResult {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, gauges::PNorm>) {
          return {detail::lp_norm(y, detail::conjugate_exponent(k.p)), false};
        } else if constexpr (std::is_same_v<T, gauges::KyFan>) {
          return {std::max(y.cwiseAbs().sum() / k.k, y.cwiseAbs().maxCoeff()), false};
        } else if constexpr (std::is_same_v<T, gauges::Spectral>) {
          return {y.cwiseAbs().sum(), false};
        } else if constexpr (std::is_same_v<T, gauges::Trace>) {
          return {y.cwiseAbs().maxCoeff(), false};
        } else if constexpr (std::is_same_v<T, gauges::Orbit>) {
          const double n = static_cast<double>(y.size());
          return {std::max(detail::orbit_hull_gauge(k.spec.c(), y), std::abs(y.sum()) / n), false};
        } else if constexpr (std::is_same_v<T, gauges::PolytopeBall>) {
          double best = -kInf;
          for (const auto& v : k.ball.vertices) best = std::max(best, v.dot(y));
          if (k.ball.hyperplane == Hyperplane::sum_zero)
            best = std::max(best, std::abs(y.sum()) / static_cast<double>(y.size()));
          return {best, false};
        } else if constexpr (std::is_same_v<T, gauges::Ellipse>) {
          const double s = 0.5 * k.a * (y(0) + y(1));
          const double d = 0.5 * k.b * (y(0) - y(1));
          return {std::sqrt(s * s + d * d), false};
        } else if constexpr (std::is_same_v<T, gauges::Toast>) {
          // Ball = conv(l1 ball, disk centred (1/2,1/2) of radius 1/sqrt 2).
          const double disk = 0.5 * (y(0) + y(1)) + y.norm() / std::sqrt(2.0);
          return {std::max(y.cwiseAbs().maxCoeff(), disk), false};
        } else {
          return numeric_support(g, y);
        }
      },
      g.kind());
}

inline double support(const Gauge& g, const RVector& y) { return support_detail(g, y).value; }

/// Generators of the subdifferential of the gauge at x != 0: the norming set
/// in R^n is their convex hull. `exhaustive` is false when only one element
/// could be produced for a body without closed-form faces.
struct ActiveSet {
  std::vector<RVector> vertices;
  bool exhaustive = true;
};

namespace detail {

inline void push_unique(std::vector<RVector>& out, const RVector& v) {
  for (const auto& w : out)
    if ((w - v).cwiseAbs().maxCoeff() <= 1e-12) return;
  out.push_back(v);
}

/// Tie tolerance used to decide coordinate equalities for face enumeration.
inline double tie_tol(const RVector& x) { return 1e-9 * (1.0 + x.cwiseAbs().maxCoeff()); }

/// All vectors that assign sign(x_i) on forced indices and pick `need`
/// entries among `free_idx` with value free_sign (or both signs when zero).
inline void ky_fan_faces(const RVector& x, int k, std::vector<RVector>& out) {
  const int n = static_cast<int>(x.size());
  const RVector a = x.cwiseAbs();
  const RVector as = sorted_desc(a);
  const double t = as(k - 1);
  const double tol = tie_tol(x);
  RVector base = RVector::Zero(n);
  std::vector<int> ties;
  int forced = 0;
  for (int i = 0; i < n; ++i) {
    if (a(i) > t + tol) {
      base(i) = sgn_pos(x(i));
      ++forced;
    } else if (a(i) >= t - tol) {
      ties.push_back(i);
    }
  }
  const int need = k - forced;
  const bool zero_level = t <= tol;
  const int m = static_cast<int>(ties.size());
  // Enumerate subsets of size `need` (and size < need when the level is 0:
  // entries on the zero level may take any value in [-1,1] subject to the l1 budget).
  for (int mask = 0; mask < (1 << m); ++mask) {
    const int pc = __builtin_popcount(static_cast<unsigned>(mask));
    if (pc != need) continue;
    std::vector<int> chosen;
    for (int j = 0; j < m; ++j)
      if (mask & (1 << j)) chosen.push_back(ties[j]);
    if (!zero_level) {
      RVector u = base;
      for (int i : chosen) u(i) = sgn_pos(x(i));
      push_unique(out, u);
    } else {
      for (int s = 0; s < (1 << pc); ++s) {
        RVector u = base;
        for (int j = 0; j < pc; ++j) u(chosen[j]) = (s & (1 << j)) ? -1.0 : 1.0;
        push_unique(out, u);
      }
    }
  }
}

/// Distinct vectors sigma(c) with <sigma(c), x> maximal (c sorted decreasingly).
inline void aligned_permutations(const RVector& c, const RVector& x, std::vector<RVector>& out) {
  const int n = static_cast<int>(x.size());
  const std::vector<int> ord = order_desc(x);
  const double tol = tie_tol(x);
  // Tie groups in sorted order.
  std::vector<std::pair<int, int>> groups;
  int s = 0;
  while (s < n) {
    int e = s + 1;
    while (e < n && x(ord[e - 1]) - x(ord[e]) <= tol) ++e;
    groups.emplace_back(s, e);
    s = e;
  }
  std::vector<std::vector<int>> perms(groups.size());
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    perms[gi].resize(static_cast<std::size_t>(groups[gi].second - groups[gi].first));
    std::iota(perms[gi].begin(), perms[gi].end(), groups[gi].first);
  }
  // Iterate the product of permutations of each group.
  std::function<void(std::size_t, RVector&)> rec = [&](std::size_t gi, RVector& u) {
    if (gi == groups.size()) {
      push_unique(out, u);
      return;
    }
    auto p = perms[gi];
    do {
      for (int j = groups[gi].first; j < groups[gi].second; ++j)
        u(ord[j]) = c(p[j - groups[gi].first]);
      rec(gi + 1, u);
    } while (std::next_permutation(p.begin(), p.end()));
  };
  RVector u = RVector::Zero(n);
  rec(0, u);
}

/// Adds the trace-part generators of a "slice gauge + |sum x|" functional.
inline std::vector<RVector> with_trace_part(const std::vector<RVector>& slice, const RVector& x) {
  std::vector<RVector> out;
  const RVector one = RVector::Ones(x.size());
  const double s = x.sum();
  for (const auto& u : slice) {
    if (std::abs(s) > trace_tol(x)) {
      push_unique(out, u + sgn_pos(s) * one);
    } else {
      push_unique(out, u + one);
      push_unique(out, u - one);
    }
  }
  return out;
}

inline RVector fd_gradient(const Gauge& g, const RVector& x) {
  const int n = static_cast<int>(x.size());
  RVector u(n);
  const double h = 1e-6 * std::max(1.0, x.norm());
  for (int i = 0; i < n; ++i) {
    RVector p = x, m = x;
    p(i) += h;
    m(i) -= h;
    u(i) = (gauge_eval(g, p) - gauge_eval(g, m)) / (2.0 * h);
  }
  return u;
}

}  // namespace detail

inline ActiveSet active_set(const Gauge& g, const RVector& x) {
  require_same_dim(x.size(), g.dim(), "active_set");
  if (x.cwiseAbs().maxCoeff() == 0.0) throw DomainError("active_set: x must be nonzero");
  const int n = g.dim();
  ActiveSet out;
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, gauges::PNorm>) {
          if (k.p == 1.0) {
            detail::ky_fan_faces(x, n, out.vertices);
          } else if (std::isinf(k.p)) {
            detail::ky_fan_faces(x, 1, out.vertices);
          } else {
            const double nrm = detail::lp_norm(x, k.p);
            RVector u(n);
            for (int i = 0; i < n; ++i)
              u(i) = (x(i) > 0 ? 1.0 : (x(i) < 0 ? -1.0 : 0.0)) * std::pow(std::abs(x(i)) / nrm, k.p - 1.0);
            out.vertices.push_back(u);
          }
        } else if constexpr (std::is_same_v<T, gauges::KyFan>) {
          detail::ky_fan_faces(x, k.k, out.vertices);
        } else if constexpr (std::is_same_v<T, gauges::Spectral>) {
          detail::ky_fan_faces(x, 1, out.vertices);
        } else if constexpr (std::is_same_v<T, gauges::Trace>) {
          detail::ky_fan_faces(x, n, out.vertices);
        } else if constexpr (std::is_same_v<T, gauges::Orbit>) {
          std::vector<RVector> slice;
          detail::aligned_permutations(k.spec.c(), x, slice);
          out.vertices = detail::with_trace_part(slice, x);
        } else if constexpr (std::is_same_v<T, gauges::PolytopeBall>) {
          const Polytope& p = k.ball;
          RVector x0 = x;
          if (p.hyperplane == Hyperplane::sum_zero) x0 = x.array() - x.mean();
          double best = -kInf;
          for (const auto& f : p.facets) best = std::max(best, f.normal.dot(x0) / f.offset);
          std::vector<RVector> slice;
          const double tol = 1e-9 * (1.0 + std::abs(best));
          for (const auto& f : p.facets)
            if (f.normal.dot(x0) / f.offset >= best - tol) detail::push_unique(slice, f.normal / f.offset);
          out.vertices = p.hyperplane == Hyperplane::sum_zero ? detail::with_trace_part(slice, x) : slice;
        } else if constexpr (std::is_same_v<T, gauges::Ellipse>) {
          const double f = gauge_eval(g, x);
          const double s = (x(0) + x(1)) / (k.a * k.a);
          const double d = (x(0) - x(1)) / (k.b * k.b);
          RVector u(2);
          u << (s + d) / f, (s - d) / f;
          out.vertices.push_back(u);
        } else if constexpr (std::is_same_v<T, gauges::Toast>) {
          RVector u(2);
          if (x(0) >= 0.0 && x(1) >= 0.0) {
            const double s = x(0) + x(1);
            u << (x(0) * x(0) + 2 * x(0) * x(1) - x(1) * x(1)) / (s * s),
                (x(1) * x(1) + 2 * x(0) * x(1) - x(0) * x(0)) / (s * s);
            out.vertices.push_back(u);
          } else if (x(0) < 0.0 && x(1) == 0.0) {
            out.vertices.push_back((RVector(2) << -1.0, -1.0).finished());
            out.vertices.push_back((RVector(2) << -1.0, 1.0).finished());
          } else if (x(0) == 0.0 && x(1) < 0.0) {
            out.vertices.push_back((RVector(2) << -1.0, -1.0).finished());
            out.vertices.push_back((RVector(2) << 1.0, -1.0).finished());
          } else {
            u << detail::sgn_pos(x(0)), detail::sgn_pos(x(1));
            out.vertices.push_back(u);
          }
        } else {
          out.vertices.push_back(detail::fd_gradient(g, x));
          out.exhaustive = false;
        }
      },
      g.kind());
  return out;
}

/// One subgradient u of the gauge at x != 0: <u,x> = gauge(x), support(u) = 1.
/// Smooth kinds return the gradient; faceted kinds a deterministic element.
inline RVector subgradient(const Gauge& g, const RVector& x) {
  require_same_dim(x.size(), g.dim(), "subgradient");
  if (x.cwiseAbs().maxCoeff() == 0.0) throw DomainError("subgradient: x must be nonzero");
  const int n = g.dim();
  return std::visit(
      [&](const auto& k) -> RVector {
        using T = std::decay_t<decltype(k)>;
        auto ky_fan_pick = [&](int kk) {
          // Top-kk entries by |x| (ties: lowest index), signed with sg(0) = +1.
          RVector u = RVector::Zero(n);
          const std::vector<int> ord = detail::order_desc(x.cwiseAbs());
          for (int j = 0; j < kk; ++j) u(ord[j]) = detail::sgn_pos(x(ord[j]));
          return u;
        };
        if constexpr (std::is_same_v<T, gauges::PNorm>) {
          if (k.p == 1.0) {
            RVector u(n);
            for (int i = 0; i < n; ++i) u(i) = detail::sgn_pos(x(i));
            return u;
          }
          if (std::isinf(k.p)) return ky_fan_pick(1);
          return active_set(g, x).vertices.front();
        } else if constexpr (std::is_same_v<T, gauges::KyFan>) {
          return ky_fan_pick(k.k);
        } else if constexpr (std::is_same_v<T, gauges::Spectral>) {
          return ky_fan_pick(1);
        } else if constexpr (std::is_same_v<T, gauges::Trace>) {
          return ky_fan_pick(n);
        } else if constexpr (std::is_same_v<T, gauges::Orbit>) {
          // c placed on the positions of x sorted decreasingly (rearrangement).
          RVector u(n);
          const std::vector<int> ord = detail::order_desc(x);
          for (int j = 0; j < n; ++j) u(ord[j]) = k.spec.c()(j);
          if (std::abs(x.sum()) > detail::trace_tol(x)) u.array() += detail::sgn_pos(x.sum());
          return u;
        } else if constexpr (std::is_same_v<T, gauges::PolytopeBall>) {
          const Polytope& p = k.ball;
          RVector x0 = x;
          if (p.hyperplane == Hyperplane::sum_zero) x0 = x.array() - x.mean();
          int best = 0;
          double bv = -kInf;
          for (std::size_t f = 0; f < p.facets.size(); ++f) {
            const double v = p.facets[f].normal.dot(x0) / p.facets[f].offset;
            if (f == 0 || v > bv + 1e-12 * (1.0 + std::abs(bv))) {
              bv = v;
              best = static_cast<int>(f);
            }
          }
          RVector u = p.facets[best].normal / p.facets[best].offset;
          if (p.hyperplane == Hyperplane::sum_zero && std::abs(x.sum()) > detail::trace_tol(x))
            u.array() += detail::sgn_pos(x.sum());
          return u;
        } else {
          return active_set(g, x).vertices.front();
        }
      },
      g.kind());
}

/// True iff gauge(-x) = gauge(x) for all x.
inline bool is_fully_homogeneous(const Gauge& g) {
  return std::visit(
      [&](const auto& k) -> bool {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, gauges::Orbit>) {
          return k.spec.balanced();
        } else if constexpr (std::is_same_v<T, gauges::Toast>) {
          return false;
        } else if constexpr (std::is_same_v<T, gauges::PolytopeBall>) {
          for (const auto& v : k.ball.vertices) {
            bool found = false;
            for (const auto& w : k.ball.vertices) found = found || (v + w).cwiseAbs().maxCoeff() <= 1e-9;
            if (!found) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, gauges::Oracle>) {
          const int n = g.dim();
          auto sym = [&](const RVector& x) {
            const double a = gauge_eval(g, x);
            const double b = gauge_eval(g, -x);
            return std::abs(a - b) <= 1e-8 * std::max(1.0, a);
          };
          for (int i = 0; i < n; ++i) {
            if (!sym(RVector::Unit(n, i))) return false;
            for (int j = i + 1; j < n; ++j) {
              if (!sym(RVector::Unit(n, i) + RVector::Unit(n, j))) return false;
              if (!sym(RVector::Unit(n, i) - RVector::Unit(n, j))) return false;
            }
          }
          Rng rng(0xf11bu);
          for (int t = 0; t < 64; ++t) {
            RVector x(n);
            for (int i = 0; i < n; ++i) x(i) = rng.normal();
            if (!sym(x)) return false;
          }
          return true;
        } else {
          return true;
        }
      },
      g.kind());
}

}  // namespace adnorm
