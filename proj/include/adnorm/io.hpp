#pragma once

// JSON encodings: matrices {"n","re","im"}, gauges {"kind","params"},
// polytopes {"dim","hyperplane","vertices","facets"}.

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "adnorm/error.hpp"
#include "adnorm/gauge.hpp"
#include "adnorm/geometry.hpp"
#include "adnorm/matrix_core.hpp"
#include "adnorm/polytope.hpp"

namespace adnorm::io {

using json = nlohmann::json;

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << text;
  if (!out) throw ParseError("write failed: " + path);
}

/// Parses inline JSON text, or reads it from a file when the text names one.
inline json json_arg(const std::string& text_or_path) {
  try {
    return json::parse(text_or_path);
  } catch (const json::exception&) {
    return read_json_file(text_or_path);
  }
}

// ---------------------------------------------------------------------------
// Vectors and matrices

inline double number(const json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "Infinity") return std::numeric_limits<double>::infinity();
  }
  throw ParseError(std::string(what) + ": expected a number");
}

inline RVector vector_from_json(const json& j, const char* what = "vector") {
  if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
  RVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], what);
  return v;
}

inline json vector_to_json(const RVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

inline json matrix_to_json(const CMatrix& m) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json rr = json::array();
    json ri = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return {{"n", m.rows()}, {"re", re}, {"im", im}};
}

inline json matrix_to_json(const SkewHermitian& x) { return matrix_to_json(x.matrix()); }

inline json real_matrix_to_json(const RMatrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
  return out;
}

inline CMatrix complex_matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("re")) throw ParseError("matrix: expected an object with \"re\" and \"im\"");
  const json& re = j.at("re");
  if (!re.is_array()) throw ParseError("matrix: \"re\" must be an array of rows");
  const int n = static_cast<int>(re.size());
  if (j.contains("n") && j.at("n").get<int>() != n) throw ParseError("matrix: \"n\" does not match row count");
  const json im = j.contains("im") ? j.at("im") : json();
  if (!im.is_null() && (!im.is_array() || static_cast<int>(im.size()) != n))
    throw ParseError("matrix: \"im\" must have n rows");
  CMatrix m(n, n);
  for (int r = 0; r < n; ++r) {
    if (!re[r].is_array() || static_cast<int>(re[r].size()) != n) throw ParseError("matrix: rows must have n entries");
    if (!im.is_null() && (!im[r].is_array() || static_cast<int>(im[r].size()) != n))
      throw ParseError("matrix: rows must have n entries");
    for (int c = 0; c < n; ++c)
      m(r, c) = Complex(number(re[r][c], "matrix"), im.is_null() ? 0.0 : number(im[r][c], "matrix"));
  }
  return m;
}

/// Loads a skew-Hermitian matrix; non skew-Hermitian input raises DomainError.
inline SkewHermitian skew_from_json(const json& j, double tol = kSkewLoadTol) {
  return SkewHermitian::from_matrix(complex_matrix_from_json(j), tol);
}

// ---------------------------------------------------------------------------
// Polytopes

inline json polytope_to_json(const Polytope& p) {
  json verts = json::array();
  for (const auto& v : p.vertices) verts.push_back(vector_to_json(v));
  json facets = json::array();
  for (const auto& f : p.facets) facets.push_back({{"normal", vector_to_json(f.normal)}, {"offset", f.offset}});
  return {{"dim", p.ambient_dim},
          {"hyperplane", p.hyperplane == Hyperplane::sum_zero ? json("sum-zero") : json(nullptr)},
          {"vertices", verts},
          {"facets", facets}};
}

inline Hyperplane hyperplane_from_json(const json& j) {
  if (!j.contains("hyperplane") || j.at("hyperplane").is_null()) return Hyperplane::none;
  const std::string h = j.at("hyperplane").get<std::string>();
  if (h == "sum-zero") return Hyperplane::sum_zero;
  throw ParseError("polytope: unknown hyperplane \"" + h + "\"");
}

/// Reads vertices (and facets when given, which are then validated instead of
/// recomputed).
inline Polytope polytope_from_json(const json& j) {
  if (!j.is_object() || !j.contains("vertices")) throw ParseError("polytope: expected an object with \"vertices\"");
  const Hyperplane h = hyperplane_from_json(j);
  std::vector<RVector> pts;
  for (const auto& v : j.at("vertices")) pts.push_back(vector_from_json(v, "polytope vertex"));
  if (pts.empty()) throw ParseError("polytope: no vertices");
  const int n = static_cast<int>(pts.front().size());
  if (j.contains("dim") && j.at("dim").get<int>() != n) throw ParseError("polytope: \"dim\" does not match vertices");
  for (const auto& v : pts)
    if (v.size() != n) throw ParseError("polytope: vertices of different lengths");
  if (!j.contains("facets") || j.at("facets").empty()) return make_polytope(pts, h);

  Polytope p;
  p.ambient_dim = n;
  p.hyperplane = h;
  p.vertices = pts;
  for (const auto& f : j.at("facets")) {
    if (!f.contains("normal") || !f.contains("offset")) throw ParseError("polytope: facet needs normal and offset");
    Facet fc{vector_from_json(f.at("normal"), "facet normal"), number(f.at("offset"), "facet offset")};
    if (fc.normal.size() != n) throw ParseError("polytope: facet normal has wrong length");
    p.facets.push_back(fc);
  }
  if (!facets_consistent(p, 1e-9)) throw DomainError("polytope: vertices violate the given facets");
  canonicalize(p);
  return p;
}

// ---------------------------------------------------------------------------
// Gauges

namespace detail {

inline const json& gauge_params(const json& j) {
  if (j.contains("params") && j.at("params").is_object()) return j.at("params");
  return j;
}

/// c for an orbit gauge in dimension n: explicit array or "linspace".
inline RVector orbit_vector(const json& c, int n) {
  if (c.is_string()) {
    if (c.get<std::string>() != "linspace") throw ParseError("orbit: c must be an array or \"linspace\"");
    RVector v(n);
    for (int i = 0; i < n; ++i) v(i) = n == 1 ? 0.0 : 1.0 - 2.0 * i / (n - 1);
    return v;
  }
  return vector_from_json(c, "orbit c");
}

}  // namespace detail

/// Builds the gauge in dimension n. Returns nullopt when the description does
/// not apply to n (explicit vector of another length, n-specific kinds, k > n).
inline std::optional<Gauge> gauge_for_dim(const json& j, int n) {
  if (!j.is_object() || !j.contains("kind")) throw ParseError("gauge: expected an object with \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  const json& p = detail::gauge_params(j);
  try {
    if (kind == "p" || kind == "p_gauge") {
      if (!p.contains("p")) throw ParseError("p gauge: missing \"p\"");
      return Gauge::p_norm(n, number(p.at("p"), "p"));
    }
    if (kind == "frobenius") return Gauge::p_norm(n, 2.0);
    if (kind == "ky_fan") {
      if (!p.contains("k")) throw ParseError("ky_fan gauge: missing \"k\"");
      const int k = p.at("k").get<int>();
      if (k > n) return std::nullopt;
      return Gauge::ky_fan(n, k);
    }
    if (kind == "spectral") return Gauge::spectral(n);
    if (kind == "trace") return Gauge::trace(n);
    if (kind == "orbit") {
      if (!p.contains("c")) throw ParseError("orbit gauge: missing \"c\"");
      const RVector c = detail::orbit_vector(p.at("c"), n);
      if (c.size() != n) return std::nullopt;
      const bool normalize = p.value("normalize", false);
      return Gauge::orbit(OrbitSpec::make(c, normalize));
    }
    if (kind == "polytope") {
      if (p.contains("dual_of_orbit")) {
        const RVector c = detail::orbit_vector(p.at("dual_of_orbit"), n);
        if (c.size() != n) return std::nullopt;
        return gauge_with_dual_ball(orbit_polytope(OrbitSpec::make(c, p.value("normalize", false))));
      }
      const Polytope ball = polytope_from_json(p);
      if (ball.ambient_dim != n) return std::nullopt;
      return Gauge::polytope(ball);
    }
    if (kind == "ellipse") {
      if (n != 2) return std::nullopt;
      return Gauge::ellipse(number(p.value("a", json(1.0)), "a"), number(p.value("b", json(1.0)), "b"));
    }
    if (kind == "toast") {
      if (n != 2) return std::nullopt;
      return Gauge::toast();
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("gauge: ") + e.what());
  }
  throw ParseError("gauge: unknown kind \"" + kind + "\"");
}

/// As gauge_for_dim, but a description that does not fit n is an error.
inline Gauge gauge_from_json(const json& j, int n) {
  auto g = gauge_for_dim(j, n);
  if (!g) throw DomainError("gauge " + j.dump() + " does not apply in dimension " + std::to_string(n));
  return *g;
}

inline json gauge_to_json(const Gauge& g) {
  return std::visit(
      [&](const auto& k) -> json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, gauges::PNorm>) {
          return {{"kind", "p"}, {"params", {{"p", std::isinf(k.p) ? json("inf") : json(k.p)}}}};
        } else if constexpr (std::is_same_v<T, gauges::KyFan>) {
          return {{"kind", "ky_fan"}, {"params", {{"k", k.k}}}};
        } else if constexpr (std::is_same_v<T, gauges::Spectral>) {
          return {{"kind", "spectral"}, {"params", json::object()}};
        } else if constexpr (std::is_same_v<T, gauges::Trace>) {
          return {{"kind", "trace"}, {"params", json::object()}};
        } else if constexpr (std::is_same_v<T, gauges::Orbit>) {
          return {{"kind", "orbit"}, {"params", {{"c", vector_to_json(k.spec.c())}}}};
        } else if constexpr (std::is_same_v<T, gauges::PolytopeBall>) {
          return {{"kind", "polytope"}, {"params", polytope_to_json(k.ball)}};
        } else if constexpr (std::is_same_v<T, gauges::Ellipse>) {
          return {{"kind", "ellipse"}, {"params", {{"a", k.a}, {"b", k.b}}}};
        } else if constexpr (std::is_same_v<T, gauges::Toast>) {
          return {{"kind", "toast"}, {"params", json::object()}};
        } else {
          throw DomainError("oracle gauges are not serializable");
        }
      },
      g.kind());
}

}  // namespace adnorm::io
