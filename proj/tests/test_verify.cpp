#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "adnorm/verify.hpp"

using namespace adnorm;

namespace {

RVector vec(std::initializer_list<double> v) {
  RVector x(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double d : v) x(i++) = d;
  return x;
}

SkewHermitian idiag(std::initializer_list<double> v) { return SkewHermitian::diagonal(vec(v)); }

SkewHermitian real_generator(int n, int a, int b) {
  CMatrix m = CMatrix::Zero(n, n);
  m(a, b) = 1.0;
  m(b, a) = -1.0;
  return SkewHermitian::from_matrix(m);
}

std::vector<double> grid(double smax = 2.0, double step = 0.1) {
  std::vector<double> g;
  for (int i = 0; i * step <= smax + 1e-12; ++i) g.push_back(i * step);
  return g;
}

const MatrixNorm kFrob(Gauge::p_norm(3, 2.0));

}  // namespace

TEST(Verdict, HysteresisBand) {
  EXPECT_EQ(equivalence_verdict(0.0, 1e-9, 0.0, 1e-9), Verdict::zero);
  EXPECT_EQ(equivalence_verdict(1.0, 1e-9, 2.0, 1e-9), Verdict::nonzero);
  EXPECT_EQ(equivalence_verdict(0.0, 1e-9, 5e-9, 1e-9), Verdict::inconclusive);
  EXPECT_EQ(equivalence_verdict(0.0, 1e-9, 2e-8, 1e-9), Verdict::flag);
  EXPECT_EQ(equivalence_verdict(2e-8, 1e-9, 0.0, 1e-9), Verdict::flag);
  EXPECT_STREQ(to_string(Verdict::flag), "FLAG");
}

TEST(TeoN, CommutingXGivesZero) {
  Rng rng(1);
  const SkewHermitian v = random_with_spectrum(vec({1, 1, -2}), rng);
  for (int t = 0; t < 50; ++t) {
    const SkewHermitian x = block_diagonal_sample(v, rng);
    const TeoNResult r = check_teoN(MatrixNorm(Gauge::orbit(OrbitSpec::make(vec({2, 0, -1})))), v, x);
    EXPECT_EQ(r.verdict, Verdict::zero);
    EXPECT_LE(std::abs(r.lhs), r.tol_lhs);
  }
}

TEST(TeoN, FrobeniusClosedForm) {
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    const SkewHermitian v = random_skew(3, rng);
    const SkewHermitian x = random_skew(3, rng);
    const TeoNResult r = check_teoN(kFrob, v, x);
    const double c = commutator(x, v).frobenius();
    EXPECT_NEAR(r.lhs, -c * c / v.frobenius(), 1e-10 * (1 + c * c));
    EXPECT_LT(r.lhs, 0.0);
    EXPECT_EQ(r.verdict, Verdict::nonzero);
    EXPECT_LE(r.nuc_gap, r.tol_nuc);
  }
}

TEST(TeoN, OrbitNormVerdictConsistency) {
  // N for this V is proportional to V, so [X_C, N] = 0 iff X_C = 0.
  const SkewHermitian v = idiag({1, 1, -2}) * (1.0 / std::sqrt(6.0));
  const MatrixNorm m(Gauge::orbit(OrbitSpec::make(vec({1, 1, -2}) / std::sqrt(6.0))));
  const NormingMatrix nm = norming_matrix(m, v);
  EXPECT_LE((nm.n - v).frobenius(), 1e-12);
  Rng rng(3);
  EXPECT_FALSE(teoN_witness(v, nm.n, rng).has_value());
  for (int t = 0; t < 50; ++t) {
    const SkewHermitian x = random_skew(3, rng);
    EXPECT_EQ(check_teoN(m, v, x).verdict, Verdict::nonzero);
    EXPECT_EQ(check_teoN(m, v, block_diagonal_sample(v, rng)).verdict, Verdict::zero);
  }
}

TEST(TeoN, WitnessGivesEqualityWithNonzeroCommutator) {
  // Spectral norm at V with a unique top eigenvalue: N = i e1 e1^*, which ties
  // on the two lower levels of V, so X coupling them has X_C != 0 and [X_C,N] = 0.
  const MatrixNorm m(Gauge::spectral(3));
  Rng rng(4);
  const SkewHermitian v = random_with_spectrum(vec({1, 0.5, -0.2}), rng);
  const NormingMatrix nm = norming_matrix(m, v);
  for (int t = 0; t < 50; ++t) {
    const auto x = teoN_witness(v, nm.n, rng);
    ASSERT_TRUE(x.has_value());
    EXPECT_GT(commutator(*x, v).frobenius(), 1e-3);
    EXPECT_GT(block_split(*x, spectral(v)).codiagonal.frobenius(), 1e-3);
    const TeoNResult r = check_teoN(v, *x, nm.n);
    EXPECT_EQ(r.verdict, Verdict::zero);
  }
}

TEST(Lateral, FrobeniusGradient) {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const SkewHermitian x = random_skew(3, rng), y = random_skew(3, rng);
    const LateralResult r = check_lateral_derivative(kFrob, x, y);
    EXPECT_NEAR(r.analytic, trace_inner(x, y) / x.frobenius(), 1e-12);
    EXPECT_NEAR(r.fd, r.analytic, 1e-6);
    EXPECT_LE(r.monotone_violation, r.tol_monotone);
    EXPECT_LE(r.one_sided_violation, r.tol_monotone);
  }
}

TEST(Lateral, SpectralUniqueTop) {
  const MatrixNorm m(Gauge::spectral(3));
  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    const SkewHermitian x = random_with_spectrum(vec({2, 0.5, -1}), rng);
    const SkewHermitian y = random_skew(3, rng);
    const LateralResult r = check_lateral_derivative(m, x, y);
    ASSERT_TRUE(r.exhaustive);
    // Single active vertex: derivative of the top eigenvalue, <u1, -iY u1>.
    const SpectralData sd = spectral(x);
    const Complex d = (sd.basis.col(0).adjoint() * (-kI * y.matrix()) * sd.basis.col(0))(0, 0);
    EXPECT_NEAR(r.analytic, d.real(), 1e-12);
    EXPECT_NEAR(r.fd, r.analytic, 1e-5);
  }
}

TEST(Lateral, MonotoneQuotientsAtKinks) {
  // Trace norm at a singular X: the quotient is still monotone and right >= left.
  const MatrixNorm m(Gauge::trace(3));
  Rng rng(7);
  for (int t = 0; t < 100; ++t) {
    const SkewHermitian x = random_with_spectrum(vec({1, 0, -1}), rng);
    const LateralResult r = check_lateral_derivative(m, x, random_skew(3, rng));
    EXPECT_LE(r.monotone_violation, r.tol_monotone);
    EXPECT_LE(r.one_sided_violation, r.tol_monotone);
    EXPECT_LE(r.upper_bound_violation, r.tol_monotone);
    EXPECT_LT(r.regularity, kLateralRegularity);
  }
  EXPECT_THROW(check_lateral_derivative(m, SkewHermitian::zero(3), random_skew(3, rng)), DomainError);
}

TEST(Profile, CommutingXIsConstant) {
  const SkewHermitian v = idiag({1, 0.5, -1.5});
  const SkewHermitian x = idiag({0.3, -2, 4});
  const ProfileResult r = check_vmasxv(kFrob, v, x, grid());
  EXPECT_EQ(r.max_violation, 0.0);
  EXPECT_EQ(r.evaluations, 3 * 21);
}

TEST(Profile, FrobeniusStrictlyIncreasing) {
  Rng rng(8);
  const SkewHermitian v = random_skew(3, rng), x = random_skew(3, rng);
  const SkewHermitian a = commutator(x, commutator(x, v));
  double prev = matrix_norm(kFrob, v);
  for (double s : grid()) {
    if (s == 0.0) continue;
    const double cur = matrix_norm(kFrob, v - s * a);
    EXPECT_GT(cur, prev);
    prev = cur;
  }
}

TEST(Profile, RandomPairsAllGauges) {
  Rng rng(9);
  const std::vector<MatrixNorm> ms{MatrixNorm(Gauge::p_norm(3, 1.0)), MatrixNorm(Gauge::p_norm(3, 3.0)),
                                   MatrixNorm(Gauge::ky_fan(3, 2)), MatrixNorm(Gauge::spectral(3)),
                                   MatrixNorm(Gauge::orbit(OrbitSpec::make(vec({3, 1, -4}))))};
  for (const auto& m : ms) {
    for (int t = 0; t < 100; ++t) {
      const SkewHermitian v = random_target(3, rng, t % 2 == 1);
      const SkewHermitian x = random_skew(3, rng);
      EXPECT_LE(check_vmasxv(m, v, x, grid()).max_violation, 1e-9) << m.name();
      EXPECT_LE(check_profile_majorization(v, x, grid()), 1e-9);
    }
  }
  EXPECT_THROW(check_vmasxv(kFrob, random_skew(3, rng), random_skew(3, rng), {0.2, 0.1}), DomainError);
  EXPECT_THROW(check_vmasxv(kFrob, random_skew(3, rng), random_skew(3, rng), {-0.1, 0.1}), DomainError);
}

TEST(Birkhoff, Examples) {
  const SkewHermitian v = idiag({1, 0.5, -1.5});
  const BirkhoffResult c = birkhoff_distance(kFrob, v, idiag({1, 2, 3}));
  EXPECT_DOUBLE_EQ(c.min_value, c.norm_v);
  Rng rng(10);
  for (int t = 0; t < 50; ++t) {
    const SkewHermitian w = random_skew(3, rng), x = random_skew(3, rng);
    const BirkhoffResult r = birkhoff_distance(kFrob, w, x);
    EXPECT_LE(std::abs(r.min_value - r.norm_v), 1e-8);
    EXPECT_LE(std::abs(r.argmin_s), 1e-4);
    // Frobenius orthogonality: (V|[X,V]) = 0.
    EXPECT_NEAR(trace_inner(w, commutator(x, w)), 0.0, 1e-12);
  }
  const MatrixNorm ky(Gauge::ky_fan(4, 2));
  for (int t = 0; t < 50; ++t) {
    const BirkhoffResult r = birkhoff_distance(ky, random_target(4, rng, t % 2), random_skew(4, rng));
    EXPECT_LE(std::abs(r.min_value - r.norm_v), 1e-8);
  }
}

TEST(SameFace, Examples) {
  const SkewHermitian v = idiag({1, 0.5, -1.5});
  const ConotangResult c = check_conotang(kFrob, v, idiag({2, 0, 1}));
  EXPECT_TRUE(c.a_holds);
  EXPECT_TRUE(c.b_established);
  EXPECT_TRUE(c.c_established);
  EXPECT_NE(c.verdict, Verdict::flag);

  Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    const SkewHermitian w = random_skew(3, rng), x = random_skew(3, rng);
    const ConotangResult r = check_conotang(kFrob, w, x);
    EXPECT_TRUE(r.strict_required);
    EXPECT_GT(r.norm_gap, 0.0);
    EXPECT_FALSE(r.a_holds);
    EXPECT_EQ(r.verdict, Verdict::nonzero);
    EXPECT_NE(check_conotang(kFrob, w, x, true).verdict, Verdict::flag);
  }

  const MatrixNorm sp(Gauge::spectral(4));
  for (int t = 0; t < 100; ++t) {
    const SkewHermitian w = random_with_spectrum(vec({1.3, -1.3, 1.3, -1.3}), rng);
    const ConotangResult r = check_conotang(sp, w, random_skew(4, rng));
    EXPECT_GT(r.norm_gap, 1e-9);
    EXPECT_NE(r.verdict, Verdict::flag);
  }
  EXPECT_THROW(check_conotang(kFrob, SkewHermitian::zero(3), v), DomainError);
}

TEST(Corollary, HandExamples) {
  // Trace norm at a rank-one V, X mixing coordinates 1 and 2.
  const MatrixNorm tr(Gauge::trace(3));
  const SkewHermitian v = idiag({1, 0, 0});
  const SkewHermitian x = real_generator(3, 0, 1);
  EXPECT_GT(matrix_norm(tr, v + commutator(x, v)), matrix_norm(tr, v) + 1e-3);
  EXPECT_GT(matrix_norm(tr, v - commutator(x, commutator(x, v))), matrix_norm(tr, v) + 1e-3);

  // Spectral norm, V = i diag(1,-1), rotation generator: ||V + t[X,V]|| = sqrt(1 + 4t^2).
  const MatrixNorm sp(Gauge::spectral(2));
  const SkewHermitian v2 = idiag({1, -1});
  const SkewHermitian x2 = real_generator(2, 0, 1);
  for (double t : {0.1, 0.5, 1.0})
    EXPECT_NEAR(matrix_norm(sp, v2 + t * commutator(x2, v2)), std::sqrt(1 + 4 * t * t), 1e-12);

  // Commuting X: equality.
  EXPECT_NEAR(matrix_norm(tr, v + commutator(idiag({1, 2, 3}), v)), matrix_norm(tr, v), 1e-15);
}

TEST(Corollary, RandomFamiliesStrict) {
  for (int n : {2, 3, 4}) {
    const TrialReport s = check_extreme_corollary(CorollaryKind::spectral, n, 100, 1);
    const TrialReport t = check_extreme_corollary(CorollaryKind::trace, n, 100, 1);
    EXPECT_TRUE(s.passed()) << s.to_json().dump();
    EXPECT_TRUE(t.passed()) << t.to_json().dump();
    EXPECT_GT(s.trials, 90);
    if (n >= 3) EXPECT_TRUE(check_extreme_corollary(CorollaryKind::ky_fan, n, 100, 1, 2).passed());
  }
  EXPECT_THROW(check_extreme_corollary(CorollaryKind::ky_fan, 3, 10, 1, 3), DomainError);
}

TEST(Expansive, Examples) {
  Rng rng(12);
  const SkewHermitian v = random_skew(3, rng), x = random_skew(3, rng);
  EXPECT_EQ(check_expansive(kFrob, v, x, {0.0}).max_violation, 0.0);
  // First-order margin s * (V | -ad_X^2 V) / ||V||_F = s ||[X,V]||^2 / ||V||_F.
  const double s = 1e-6;
  const double c = commutator(x, v).frobenius();
  const double gain = matrix_norm(kFrob, v - s * commutator(x, commutator(x, v))) - v.frobenius();
  EXPECT_NEAR(gain / s, c * c / v.frobenius(), 1e-4 * (1 + c * c));
  EXPECT_NEAR(trace_inner(v, -1.0 * commutator(x, commutator(x, v))), c * c, 1e-10 * (1 + c * c));

  const std::vector<MatrixNorm> ms{MatrixNorm(Gauge::p_norm(3, 1.5)), MatrixNorm(Gauge::trace(3)),
                                   MatrixNorm(gauge_with_dual_ball(orbit_polytope(OrbitSpec::make(vec({1, 0, -1})))))};
  for (const auto& m : ms)
    for (int t = 0; t < 200; ++t)
      EXPECT_LE(check_expansive(m, random_target(3, rng, t % 2), random_skew(3, rng), grid()).max_violation, 1e-9)
          << m.name();
}

TEST(Suite, EmptyGaugeListIsEmptySuccess) {
  SuiteConfig cfg = SuiteConfig::from_json(json{{"gauges", json::array()}});
  const auto reports = run_suite(cfg);
  EXPECT_TRUE(reports.empty());
  EXPECT_TRUE(all_passed(reports));
  EXPECT_FALSE(any_flag(reports));
  EXPECT_EQ(suite_report_json(cfg, reports)["summary"]["reports"], 0);
}

TEST(Suite, SmallRunPassesAndIsDeterministic) {
  const json j = {{"seed", 5}, {"n", {2, 3}}, {"trials", 20}};
  const SuiteConfig cfg = SuiteConfig::from_json(j);
  const auto a = run_suite(cfg);
  const auto b = run_suite(cfg);
  for (const auto& r : a) EXPECT_TRUE(r.passed()) << r.to_json().dump();
  EXPECT_FALSE(any_flag(a));
  EXPECT_EQ(suite_report_json(cfg, a).dump(), suite_report_json(cfg, b).dump());
  const auto c = run_suite(SuiteConfig::from_json(json{{"seed", 6}, {"n", {2, 3}}, {"trials", 20}}));
  EXPECT_NE(suite_report_json(cfg, a)["reports"].dump(), suite_report_json(cfg, c)["reports"].dump());
}

TEST(Suite, WorstCaseReplays) {
  const SuiteConfig cfg =
      SuiteConfig::from_json(json{{"n", {3}}, {"trials", 30}, {"checks", {"expansive", "vmasxv", "birkhoff"}},
                                  {"gauges", json::parse(R"([{"kind":"ky_fan","k":2},{"kind":"p","p":1}])")}});
  const auto reports = run_suite(cfg);
  ASSERT_EQ(reports.size(), 7u);
  for (const auto& r : reports) {
    if (r.gauge == "any") continue;
    const SkewHermitian v = io::skew_from_json(r.worst_case.at("V"));
    const SkewHermitian x = io::skew_from_json(r.worst_case.at("X"));
    const MatrixNorm m(*io::gauge_for_dim(cfg.gauges[r.gauge.rfind("ky", 0) == 0 ? 0 : 1], 3));
    double replay = 0.0;
    if (r.property_id == "expansive") replay = check_expansive(m, v, x, cfg.grid()).max_violation;
    else if (r.property_id == "monotone_profile") replay = check_vmasxv(m, v, x, cfg.grid()).max_violation;
    else {
      const BirkhoffResult b = birkhoff_distance(m, v, x);
      replay = std::abs(b.min_value - b.norm_v);
    }
    EXPECT_NEAR(replay, r.worst_case.at("violation").get<double>(), 1e-12) << r.property_id;
  }
}

TEST(Suite, ConfigValidation) {
  EXPECT_THROW(SuiteConfig::from_json(json{{"checks", {"nope"}}}), DomainError);
  EXPECT_THROW(SuiteConfig::from_json(json{{"trials", -1}}), DomainError);
  EXPECT_THROW(SuiteConfig::from_json(json{{"n", {0}}}), DomainError);
  EXPECT_THROW(SuiteConfig::from_json(json{{"tolerances", {{"zero", 0}}}}), DomainError);
  EXPECT_THROW(SuiteConfig::from_json(json{{"grid", {{"s_step", -0.1}}}}), DomainError);
  EXPECT_THROW(SuiteConfig::from_json(json{{"gauges", 3}}), DomainError);
  EXPECT_THROW(SuiteConfig::from_json(json::array()), DomainError);
  const SuiteConfig d = SuiteConfig::from_json(json::object());
  EXPECT_EQ(d.trials, 500);
  EXPECT_EQ(d.grid().size(), 21u);
  EXPECT_EQ(d.gauges.size(), SuiteConfig::default_gauges().size());
  const SuiteConfig r = SuiteConfig::from_json(d.to_json());
  EXPECT_EQ(r.to_json().dump(), d.to_json().dump());
}
