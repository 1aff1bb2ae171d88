#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "adnorm/io.hpp"

using namespace adnorm;
using io::json;

namespace {

RVector vec(std::initializer_list<double> v) {
  RVector x(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double d : v) x(i++) = d;
  return x;
}

std::string temp_path(const char* name) { return ::testing::TempDir() + name; }

}  // namespace

TEST(Io, MatrixRoundTrip) {
  Rng rng(1);
  for (int n = 1; n <= 5; ++n) {
    const SkewHermitian x = random_skew(n, rng);
    const json j = json::parse(io::matrix_to_json(x).dump());
    EXPECT_EQ(j.at("n"), n);
    EXPECT_LE((io::skew_from_json(j) - x).frobenius(), 1e-12);
  }
  // Real-only input: "im" may be omitted.
  const json r = json::parse(R"({"re": [[0, 1], [-1, 0]]})");
  EXPECT_NEAR(io::skew_from_json(r)(0, 1).real(), 1.0, 0.0);
}

TEST(Io, MatrixParseErrors) {
  EXPECT_THROW(io::skew_from_json(json::parse("[1,2]")), ParseError);
  EXPECT_THROW(io::skew_from_json(json::parse(R"({"re": [[0, 1]]})")), ParseError);
  EXPECT_THROW(io::skew_from_json(json::parse(R"({"n": 3, "re": [[0]], "im": [[1]]})")), ParseError);
  EXPECT_THROW(io::skew_from_json(json::parse(R"({"re": [["a"]], "im": [[0]]})")), ParseError);
  EXPECT_THROW(io::skew_from_json(json::parse(R"({"re": [[0]], "im": [[1], [2]]})")), ParseError);
  // Well-formed but not skew-Hermitian.
  EXPECT_THROW(io::skew_from_json(json::parse(R"({"re": [[1, 0], [0, 0]], "im": [[0, 0], [0, 0]]})")), DomainError);
}

TEST(Io, VectorAndNumbers) {
  EXPECT_LE((io::vector_from_json(io::vector_to_json(vec({1.5, -2, 1e-300}))) - vec({1.5, -2, 1e-300})).norm(), 0.0);
  EXPECT_TRUE(std::isinf(io::number(json("inf"), "p")));
  EXPECT_THROW(io::number(json("x"), "p"), ParseError);
  EXPECT_THROW(io::vector_from_json(json(3)), ParseError);
}

TEST(Io, PolytopeRoundTrip) {
  for (const RVector& c : {vec({1, 0, -1}), vec({1, 1, -2}), vec({3, 1, -1, -3})}) {
    const Polytope p = orbit_polytope(OrbitSpec::make(c));
    const json j = json::parse(io::polytope_to_json(p).dump());
    EXPECT_EQ(j.at("hyperplane"), "sum-zero");
    EXPECT_EQ(j.at("dim"), c.size());
    const Polytope q = io::polytope_from_json(j);
    ASSERT_EQ(q.vertices.size(), p.vertices.size());
    ASSERT_EQ(q.facets.size(), p.facets.size());
    for (std::size_t i = 0; i < p.vertices.size(); ++i) EXPECT_LE((q.vertices[i] - p.vertices[i]).norm(), 1e-12);
    for (std::size_t i = 0; i < p.facets.size(); ++i) {
      EXPECT_LE((q.facets[i].normal - p.facets[i].normal).norm(), 1e-12);
      EXPECT_NEAR(q.facets[i].offset, p.facets[i].offset, 1e-12);
    }
  }
  // Vertices only: facets are computed.
  const Polytope sq = io::polytope_from_json(json::parse(R"({"vertices": [[1,1],[1,-1],[-1,1],[-1,-1],[0,0]]})"));
  EXPECT_EQ(sq.vertices.size(), 4u);
  EXPECT_EQ(sq.facets.size(), 4u);
  EXPECT_EQ(sq.hyperplane, Hyperplane::none);
}

TEST(Io, PolytopeParseErrors) {
  EXPECT_THROW(io::polytope_from_json(json::parse(R"({"dim": 2})")), ParseError);
  EXPECT_THROW(io::polytope_from_json(json::parse(R"({"vertices": []})")), ParseError);
  EXPECT_THROW(io::polytope_from_json(json::parse(R"({"vertices": [[1,0],[0,1,2]]})")), ParseError);
  EXPECT_THROW(io::polytope_from_json(json::parse(R"({"dim": 3, "vertices": [[1,0],[0,1]]})")), ParseError);
  EXPECT_THROW(io::polytope_from_json(json::parse(R"({"hyperplane": "plane", "vertices": [[1,-1],[-1,1]]})")),
               ParseError);
  EXPECT_THROW(io::polytope_from_json(json::parse(
                   R"({"vertices": [[1,1],[-1,-1]], "facets": [{"normal": [1,0], "offset": 0.5}]})")),
               DomainError);
}

TEST(Io, GaugeRoundTrip) {
  Rng rng(2);
  std::vector<std::pair<Gauge, int>> gs{
      {Gauge::p_norm(3, 1.5), 3}, {Gauge::p_norm(3, kInf), 3},  {Gauge::ky_fan(4, 2), 4},
      {Gauge::spectral(3), 3},    {Gauge::trace(2), 2},          {Gauge::orbit(OrbitSpec::make(vec({2, 1, -3}))), 3},
      {Gauge::ellipse(1, 2), 2},  {Gauge::toast(), 2},
      {gauge_with_dual_ball(orbit_polytope(OrbitSpec::make(vec({1, 0, -1})))), 3}};
  for (const auto& [g, n] : gs) {
    const json j = json::parse(io::gauge_to_json(g).dump());
    const Gauge h = io::gauge_from_json(j, n);
    EXPECT_EQ(h.name(), g.name());
    for (int t = 0; t < 20; ++t) {
      RVector x(n);
      for (int i = 0; i < n; ++i) x(i) = rng.normal();
      EXPECT_NEAR(gauge_eval(h, x), gauge_eval(g, x), 1e-12) << j.dump();
    }
  }
}

TEST(Io, GaugeDescriptions) {
  const json lin = json::parse(R"({"kind": "orbit", "c": "linspace"})");
  EXPECT_LE((io::gauge_from_json(lin, 3).as<gauges::Orbit>()->spec.c() - vec({1, 0, -1})).norm(), 1e-15);
  EXPECT_FALSE(io::gauge_for_dim(json::parse(R"({"kind": "ky_fan", "k": 3})"), 2).has_value());
  EXPECT_FALSE(io::gauge_for_dim(json::parse(R"({"kind": "toast"})"), 3).has_value());
  EXPECT_FALSE(io::gauge_for_dim(json::parse(R"({"kind": "orbit", "c": [1, 1, -2]})"), 4).has_value());
  EXPECT_TRUE(io::gauge_for_dim(json::parse(R"({"kind": "p", "params": {"p": "inf"}})"), 3).has_value());
  EXPECT_NEAR(gauge_eval(io::gauge_from_json(json::parse(R"({"kind": "frobenius"})"), 2), vec({3, 4})), 5.0, 1e-15);
  EXPECT_THROW(io::gauge_from_json(json::parse(R"({"kind": "toast"})"), 3), DomainError);
  EXPECT_THROW(io::gauge_for_dim(json::parse(R"({"kind": "bogus"})"), 3), ParseError);
  EXPECT_THROW(io::gauge_for_dim(json::parse(R"({"kind": "p"})"), 3), ParseError);
  EXPECT_THROW(io::gauge_for_dim(json::parse(R"({"kind": "orbit", "c": "log"})"), 3), ParseError);
  EXPECT_THROW(io::gauge_for_dim(json::parse(R"({"p": 2})"), 3), ParseError);
  EXPECT_THROW(io::gauge_for_dim(json::parse(R"({"kind": "p", "p": 0.5})"), 3), DomainError);
}

TEST(Io, FilesAndInlineArguments) {
  const std::string path = temp_path("adnorm_io_test.json");
  io::write_text_file(path, R"({"a": [1, 2]})");
  EXPECT_EQ(io::read_json_file(path).at("a").size(), 2u);
  EXPECT_EQ(io::json_arg(path).at("a")[1], 2);
  EXPECT_EQ(io::json_arg(R"({"b": 1})").at("b"), 1);
  std::remove(path.c_str());
  EXPECT_THROW(io::read_json_file(path), ParseError);
  const std::string bad = temp_path("adnorm_io_bad.json");
  io::write_text_file(bad, "{not json");
  EXPECT_THROW(io::read_json_file(bad), ParseError);
  std::remove(bad.c_str());
}
