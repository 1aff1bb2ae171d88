// adnorm: command-line front end. Machine JSON goes to stdout, human
// summaries to stderr.
//
// Exit codes: 0 ok, 1 I/O or parse error, 2 FLAG verdict (verify),
// 3 invalid configuration, 4 numerical or certification failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "adnorm/adnorm.hpp"

namespace {

using adnorm::json;
namespace io = adnorm::io;

enum Exit { kOk = 0, kIo = 1, kFlag = 2, kConfig = 3, kNumerical = 4 };

struct Options {
  std::string gauge;
  std::string matrix;
  std::string a, b, v, x;
  std::string z, w;
  std::string polytope;
  std::string c;
  std::string config;
  std::string out;
  std::string emit_csv;
  std::string emit_decomposition;
  bool normalize = false;
  bool distinguished = false;
  bool witness = false;
  double tol = -1.0;
  int grid = 720;
  double t_tol = 1e-10;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
};

void emit(const json& j, const Options& o) {
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!o.out.empty()) io::write_text_file(o.out, text);
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw adnorm::DomainError(std::string(name) + " must be > 0");
}

/// Optional tolerance flag: unset means the library default.
double tol_or_default(const Options& o) {
  if (o.tol == -1.0) return -1.0;
  require_positive(o.tol, "--tol");
  return o.tol;
}

adnorm::SkewHermitian load_skew(const std::string& arg) { return io::skew_from_json(io::json_arg(arg)); }

/// A vector given as a JSON array, or an object holding it under "x"/"values",
/// or a skew-Hermitian matrix (its eigenvalues).
adnorm::RVector load_vector(const std::string& arg) {
  const json j = io::json_arg(arg);
  if (j.is_array()) return io::vector_from_json(j);
  if (j.is_object()) {
    for (const char* k : {"x", "values", "vector"})
      if (j.contains(k)) return io::vector_from_json(j.at(k));
    if (j.contains("re")) return adnorm::eigenvalues(io::skew_from_json(j));
  }
  throw adnorm::ParseError(arg + ": expected a vector");
}

adnorm::Polytope load_polytope(const Options& o) {
  if (!o.polytope.empty()) return io::polytope_from_json(io::json_arg(o.polytope));
  if (!o.c.empty()) return adnorm::orbit_polytope(adnorm::OrbitSpec::make(load_vector(o.c), o.normalize));
  throw adnorm::DomainError("either --polytope or --c is required");
}

adnorm::MatrixNorm load_norm(const Options& o, int n) {
  if (o.gauge.empty()) throw adnorm::DomainError("--gauge is required");
  return adnorm::MatrixNorm(io::gauge_from_json(io::json_arg(o.gauge), n));
}

int cmd_norm(const Options& o, bool dual) {
  const auto x = load_skew(o.matrix);
  const auto m = load_norm(o, x.dim());
  json out = {{"gauge", m.name()}, {"n", x.dim()}};
  if (dual) {
    const auto d = adnorm::dual_norm_detail(m, x);
    out["value"] = d.value;
    out["lower_bound"] = d.lower_bound;
  } else {
    out["value"] = adnorm::matrix_norm(m, x);
  }
  out["eigenvalues"] = io::vector_to_json(adnorm::eigenvalues(x));
  std::cerr << (dual ? "dual norm " : "norm ") << m.name() << " = " << out["value"].get<double>() << "\n";
  emit(out, o);
  return kOk;
}

int cmd_norming(const Options& o) {
  const auto v = load_skew(o.matrix);
  const auto m = load_norm(o, v.dim());
  const auto nm = o.distinguished ? adnorm::ky_fan_distinguished_functional(m, v) : adnorm::norming_matrix(m, v);
  if (o.tol != -1.0) adnorm::certify_norming(m, v, nm.n, tol_or_default(o));
  json out = {{"gauge", m.name()},
              {"N", io::matrix_to_json(nm.n)},
              {"value_at_target", nm.value_at_target},
              {"target_norm", nm.target_norm},
              {"certified_dual_norm", nm.certified_dual_norm},
              {"residuals",
               {{"value", nm.residual_value}, {"dual", nm.residual_dual}, {"commutator", nm.residual_commutator}}},
              {"tolerance", nm.tolerance}};
  std::cerr << "norming functional certified (dual norm " << nm.certified_dual_norm << ")\n";
  emit(out, o);
  return kOk;
}

int cmd_majorize(const Options& o) {
  if (o.z.empty() || o.w.empty()) throw adnorm::DomainError("--z and --w are required");
  const auto z = load_vector(o.z);
  const auto w = load_vector(o.w);
  const auto r = adnorm::majorizes(w, z, tol_or_default(o));
  json out = {{"holds", r.holds},
              {"z_sorted", io::vector_to_json(r.z_sorted)},
              {"w_sorted", io::vector_to_json(r.w_sorted)},
              {"partial_gaps", io::vector_to_json(r.partial_gaps)},
              {"trace_gap", r.trace_gap},
              {"tol", r.tol}};
  if (o.witness && r.holds) out["witness"] = io::real_matrix_to_json(adnorm::ds_witness(w, z, tol_or_default(o)));
  std::cerr << "z " << (r.holds ? "is" : "is not") << " majorized by w\n";
  emit(out, o);
  return kOk;
}

int cmd_hull(const Options& o) {
  if (o.z.empty() || o.w.empty()) throw adnorm::DomainError("--z and --w are required");
  const auto z = load_skew(o.z);
  const auto w = load_skew(o.w);
  const bool in = adnorm::in_orbit_hull(z, w, tol_or_default(o));
  json out = {{"in_hull", in}};
  if (in && !o.emit_decomposition.empty()) {
    const auto h = adnorm::hull_decomposition(z, w, tol_or_default(o));
    json conj = json::array();
    for (const auto& u : h.conjugators) conj.push_back(io::matrix_to_json(u));
    const json dec = {{"weights", h.weights}, {"conjugators", conj}, {"residual", h.residual}};
    io::write_text_file(o.emit_decomposition, dec.dump(2) + "\n");
    out["terms"] = h.weights.size();
    out["residual"] = h.residual;
    std::cerr << "decomposition with " << h.weights.size() << " terms written to " << o.emit_decomposition << "\n";
  }
  std::cerr << "Z " << (in ? "is" : "is not") << " in the orbit hull of W\n";
  emit(out, o);
  return kOk;
}

void maybe_csv(const adnorm::Polytope& p, const Options& o) {
  if (o.emit_csv.empty()) return;
  io::write_text_file(o.emit_csv, adnorm::slice_csv(p));
  std::cerr << "slice coordinates written to " << o.emit_csv << "\n";
}

int cmd_polytope(const Options& o) {
  if (o.c.empty()) throw adnorm::DomainError("--c is required");
  const auto p = adnorm::orbit_polytope(adnorm::OrbitSpec::make(load_vector(o.c), o.normalize));
  std::cerr << "orbit polytope: " << p.vertices.size() << " vertices, " << p.facets.size() << " facets\n";
  maybe_csv(p, o);
  emit(io::polytope_to_json(p), o);
  return kOk;
}

int cmd_polar(const Options& o) {
  const auto q = adnorm::polar_dual(load_polytope(o));
  std::cerr << "polar dual: " << q.vertices.size() << " vertices, " << q.facets.size() << " facets\n";
  maybe_csv(q, o);
  emit(io::polytope_to_json(q), o);
  return kOk;
}

int cmd_selfdual(const Options& o) {
  const double tol = o.tol == -1.0 ? 1e-8 : tol_or_default(o);
  const auto r = adnorm::is_self_dual(load_polytope(o), tol);
  json out = {{"self_dual", r.self_dual}};
  if (r.self_dual) {
    out["scale"] = r.scale;
    out["determinant"] = r.determinant;
    out["transform"] = io::real_matrix_to_json(r.transform);
  }
  std::cerr << (r.self_dual ? "self-dual" : "not self-dual") << "\n";
  emit(out, o);
  return kOk;
}

int cmd_taylor(const Options& o) {
  const auto a = load_skew(o.a);
  const auto b = load_skew(o.b);
  const auto m = load_norm(o, a.dim());
  require_positive(o.t_tol, "--t-tol");
  const auto r = adnorm::taylor_norm(m, a, b, o.grid, o.t_tol);
  std::cerr << "Taylor norm " << r.value << " at t = " << r.t_star << "\n";
  emit({{"value", r.value}, {"t_star", r.t_star}, {"grid_points", r.grid_points}}, o);
  return kOk;
}

int cmd_birkhoff(const Options& o) {
  const auto v = load_skew(o.v);
  const auto x = load_skew(o.x);
  const auto m = load_norm(o, v.dim());
  const auto r = adnorm::birkhoff_distance(m, v, x);
  std::cerr << "min_s ||V - s[X,V]|| = " << r.min_value << " (||V|| = " << r.norm_v << ")\n";
  emit({{"min_value", r.min_value}, {"argmin_s", r.argmin_s}, {"norm_v", r.norm_v}, {"bracket", r.bracket}}, o);
  return kOk;
}

int cmd_verify(const Options& o) {
  json cfg_json = o.config.empty() ? json::object() : io::json_arg(o.config);
  adnorm::SuiteConfig cfg = adnorm::SuiteConfig::from_json(cfg_json);
  if (const char* env = std::getenv("ADNORM_SEED")) {
    try {
      cfg.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw adnorm::DomainError("ADNORM_SEED must be a non-negative integer");
    }
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.trials) {
    if (*o.trials < 0) throw adnorm::DomainError("--trials must be >= 0");
    cfg.trials = *o.trials;
  }
  const auto reports = adnorm::run_suite(cfg);
  int failed = 0, flags = 0;
  for (const auto& r : reports) {
    if (!r.passed()) {
      ++failed;
      std::cerr << "FAIL " << r.property_id << " [" << r.gauge << ", n=" << r.n << "] max_violation "
                << r.max_violation << " tol " << r.tolerance << " flags " << r.flags << "\n";
    }
    flags += r.flags;
  }
  std::cerr << reports.size() << " reports, " << failed << " failed, " << flags << " FLAG verdicts\n";
  emit(adnorm::suite_report_json(cfg, reports), o);
  return adnorm::any_flag(reports) ? kFlag : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ad-invariant norms on skew-Hermitian matrices"};
  app.require_subcommand(1, 1);
  Options o;

  auto add_out = [&](CLI::App* s) { s->add_option("--out", o.out, "Also write the JSON output to this file"); };
  auto add_gauge = [&](CLI::App* s) {
    s->add_option("--gauge", o.gauge, "Gauge JSON (inline or file)")->required();
  };
  auto add_tol = [&](CLI::App* s, const std::string& what) { s->add_option("--tol", o.tol, what); };

  auto* norm = app.add_subcommand("norm", "Norm of a skew-Hermitian matrix");
  add_gauge(norm);
  norm->add_option("--matrix", o.matrix, "Matrix JSON {n, re, im}")->required();
  add_out(norm);

  auto* dual = app.add_subcommand("dual", "Dual norm of a skew-Hermitian matrix");
  add_gauge(dual);
  dual->add_option("--matrix", o.matrix, "Matrix JSON {n, re, im}")->required();
  add_out(dual);

  auto* norming = app.add_subcommand("norming", "Certified norming functional N of V");
  add_gauge(norming);
  norming->add_option("--matrix", o.matrix, "V as matrix JSON")->required();
  norming->add_flag("--distinguished", o.distinguished, "Ky-Fan distinguished functional");
  add_tol(norming, "Certification tolerance (default (1e-9 or 1e-6)*(1+||V||_F))");
  add_out(norming);

  auto* majorize = app.add_subcommand("majorize", "Strong majorization z < w");
  majorize->add_option("--z,z", o.z, "z vector (JSON array, inline or file)");
  majorize->add_option("--w,w", o.w, "w vector (JSON array, inline or file)");
  majorize->add_flag("--witness", o.witness, "Include a doubly stochastic witness");
  add_tol(majorize, "Partial-sum tolerance (default 1e-9*(1+||w||_1))");
  add_out(majorize);

  auto* hull = app.add_subcommand("hull", "Orbit-hull membership of Z in co{UWU*}");
  hull->add_option("--z,Z", o.z, "Z matrix JSON");
  hull->add_option("--w,W", o.w, "W matrix JSON");
  hull->add_option("--emit-decomposition", o.emit_decomposition, "Write Z = sum l_i U_i W U_i^* here");
  add_tol(hull, "Majorization tolerance (default 1e-9*(1+||w||_1))");
  add_out(hull);

  auto* polytope = app.add_subcommand("polytope", "Orbit polytope co{sigma(c)}");
  polytope->add_option("--c", o.c, "c vector")->required();
  polytope->add_flag("--normalize", o.normalize, "Scale c to unit Frobenius norm");
  polytope->add_option("--emit-csv", o.emit_csv, "Write slice coordinates as CSV");
  add_out(polytope);

  auto* polar = app.add_subcommand("polar", "Polar dual of a polytope");
  polar->add_option("--polytope", o.polytope, "Polytope JSON");
  polar->add_option("--c", o.c, "Use the orbit polytope of c instead");
  polar->add_flag("--normalize", o.normalize, "Scale c to unit Frobenius norm");
  polar->add_option("--emit-csv", o.emit_csv, "Write slice coordinates as CSV");
  add_out(polar);

  auto* selfdual = app.add_subcommand("selfdual", "Is the polar dual a rotated rescaling?");
  selfdual->add_option("--polytope", o.polytope, "Polytope JSON");
  selfdual->add_option("--c", o.c, "Use the orbit polytope of c instead");
  selfdual->add_flag("--normalize", o.normalize, "Scale c to unit Frobenius norm");
  add_tol(selfdual, "Congruence tolerance (default 1e-8)");
  add_out(selfdual);

  auto* taylor = app.add_subcommand("taylor", "Taylor norm ||A + iB||_T");
  add_gauge(taylor);
  taylor->add_option("--a", o.a, "A matrix JSON")->required();
  taylor->add_option("--b", o.b, "B matrix JSON")->required();
  taylor->add_option("--grid", o.grid, "Grid points on [0, 2pi) (default 720)");
  taylor->add_option("--t-tol", o.t_tol, "Golden-section tolerance in t (default 1e-10)");
  add_out(taylor);

  auto* birkhoff = app.add_subcommand("birkhoff", "min over s of ||V - s[X,V]||");
  add_gauge(birkhoff);
  birkhoff->add_option("--v", o.v, "V matrix JSON")->required();
  birkhoff->add_option("--x", o.x, "X matrix JSON")->required();
  add_out(birkhoff);

  auto* verify = app.add_subcommand("verify", "Run the randomized property suite");
  verify->add_option("--config", o.config, "Suite config JSON (inline or file)");
  verify->add_option("--seed", o.seed, "Seed (overrides ADNORM_SEED and the config)");
  verify->add_option("--trials", o.trials, "Default trials per check");
  add_out(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*norm) return cmd_norm(o, false);
    if (*dual) return cmd_norm(o, true);
    if (*norming) return cmd_norming(o);
    if (*majorize) return cmd_majorize(o);
    if (*hull) return cmd_hull(o);
    if (*polytope) return cmd_polytope(o);
    if (*polar) return cmd_polar(o);
    if (*selfdual) return cmd_selfdual(o);
    if (*taylor) return cmd_taylor(o);
    if (*birkhoff) return cmd_birkhoff(o);
    if (*verify) return cmd_verify(o);
  } catch (const adnorm::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const adnorm::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const adnorm::DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const adnorm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kConfig;
}
