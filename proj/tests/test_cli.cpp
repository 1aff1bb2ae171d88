#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "adnorm/adnorm.hpp"

using namespace adnorm;
using json = nlohmann::json;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

/// Runs the CLI with the given arguments; stderr is discarded.
RunResult run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(ADNORM_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string sample(const char* name) { return std::string(ADNORM_SAMPLES_DIR) + "/" + name; }

std::string tmp(const char* name) { return ::testing::TempDir() + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, NormOfOrbitGenerator) {
  const RunResult r = run("norm --gauge '{\"kind\":\"orbit\",\"c\":[0.7071,0,-0.7071]}' --matrix " + sample("C.json"));
  ASSERT_EQ(r.code, 0);
  // -tr(C^2) = 2 * 0.7071^2.
  EXPECT_NEAR(json::parse(r.out).at("value").get<double>(), 2 * 0.7071 * 0.7071, 1e-12);
  EXPECT_NEAR(json::parse(r.out).at("value").get<double>(), 1.0, 1e-4);
}

TEST(Cli, DualNorm) {
  const RunResult r = run("dual --gauge '{\"kind\":\"ky_fan\",\"k\":2}' --matrix " + sample("W.json"));
  ASSERT_EQ(r.code, 0);
  // Ky-Fan(2) dual at eigenvalues (1,0,-1): max(||y||_1 / 2, ||y||_inf) = 1.
  EXPECT_NEAR(json::parse(r.out).at("value").get<double>(), 1.0, 1e-12);
}

TEST(Cli, MajorizeAndWitness) {
  RunResult r = run("majorize --z " + sample("z.json") + " --w " + sample("w.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(json::parse(r.out).at("holds").get<bool>());
  r = run("majorize --z '[1,0,-1]' --w '[2,-1,-1]' --witness");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_TRUE(j.at("holds").get<bool>());
  EXPECT_EQ(j.at("witness").size(), 3u);
  r = run("majorize --z '[2,0,-2]' --w '[1,0,-1]'");
  ASSERT_EQ(r.code, 0);
  EXPECT_FALSE(json::parse(r.out).at("holds").get<bool>());
}

TEST(Cli, HullDecompositionFile) {
  const std::string dec = tmp("adnorm_cli_dec.json");
  const RunResult r = run("hull --z " + sample("Z.json") + " --w " + sample("W.json") + " --emit-decomposition " + dec);
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(json::parse(r.out).at("in_hull").get<bool>());
  const json d = json::parse(slurp(dec));
  HullDecomposition h;
  h.weights = d.at("weights").get<std::vector<double>>();
  for (const auto& u : d.at("conjugators")) h.conjugators.push_back(io::complex_matrix_from_json(u));
  const SkewHermitian z = io::skew_from_json(io::read_json_file(sample("Z.json")));
  const SkewHermitian w = io::skew_from_json(io::read_json_file(sample("W.json")));
  EXPECT_LE((hull_combination(h, w) - z).frobenius(), 1e-9);
}

TEST(Cli, PolarOfHexagon) {
  const RunResult r = run("polar --polytope " + sample("hex.json"));
  ASSERT_EQ(r.code, 0);
  const Polytope q = io::polytope_from_json(json::parse(r.out));
  ASSERT_EQ(q.vertices.size(), 6u);
  for (const auto& v : q.vertices) {
    RVector s = v / v.norm();
    std::sort(s.data(), s.data() + 3, std::greater<>());
    const RVector a = (RVector(3) << 1, 1, -2).finished() / std::sqrt(6.0);
    const RVector b = (RVector(3) << 2, -1, -1).finished() / std::sqrt(6.0);
    EXPECT_TRUE((s - a).norm() < 1e-9 || (s - b).norm() < 1e-9);
  }
}

TEST(Cli, PolytopeRoundTripAndCsv) {
  const std::string out = tmp("adnorm_cli_poly.json");
  const std::string csv = tmp("adnorm_cli_poly.csv");
  const RunResult r = run("polytope --c '[1,0,-1]' --normalize --out " + out + " --emit-csv " + csv);
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(slurp(out), r.out);
  const Polytope p = io::polytope_from_json(io::read_json_file(out));
  const Polytope ref = orbit_polytope(OrbitSpec::make((RVector(3) << 1, 0, -1).finished(), true));
  EXPECT_LE(vertex_hausdorff(p, ref), 1e-12);
  const std::string text = slurp(csv);
  EXPECT_EQ(text.rfind("x,y\n", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 8);
}

TEST(Cli, SelfDual) {
  RunResult r = run("selfdual --polytope " + sample("hex.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(json::parse(r.out).at("self_dual").get<bool>());
  r = run("selfdual --c '[3,-1,-2]' --normalize");
  ASSERT_EQ(r.code, 0);
  EXPECT_FALSE(json::parse(r.out).at("self_dual").get<bool>());
}

TEST(Cli, NormingTaylorBirkhoff) {
  RunResult r = run("norming --gauge '{\"kind\":\"frobenius\"}' --matrix " + sample("V.json"));
  ASSERT_EQ(r.code, 0);
  const SkewHermitian v = io::skew_from_json(io::read_json_file(sample("V.json")));
  const SkewHermitian n = io::skew_from_json(json::parse(r.out).at("N"));
  EXPECT_LE((n - v * (1.0 / v.frobenius())).frobenius(), 1e-12);

  r = run("taylor --gauge '{\"kind\":\"spectral\"}' --a " + sample("V.json") + " --b " + sample("B.json"));
  ASSERT_EQ(r.code, 0);
  EXPECT_GE(json::parse(r.out).at("value").get<double>(), 2.0 - 1e-12);

  r = run("birkhoff --gauge '{\"kind\":\"trace\"}' --v " + sample("V.json") + " --x " + sample("X.json"));
  ASSERT_EQ(r.code, 0);
  const json b = json::parse(r.out);
  EXPECT_NEAR(b.at("min_value").get<double>(), b.at("norm_v").get<double>(), 1e-8);
}

TEST(Cli, VerifyDeterministicAndSeedPrecedence) {
  const std::string cfg = sample("verify_config.json");
  const RunResult a = run("verify --config " + cfg + " --trials 5");
  const RunResult b = run("verify --config " + cfg + " --trials 5");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(json::parse(a.out).at("summary").at("failed"), 0);
  EXPECT_EQ(json::parse(a.out).at("config").at("seed"), 1);
  const RunResult e = run("verify --config " + cfg + " --trials 5", "ADNORM_SEED=7");
  EXPECT_EQ(json::parse(e.out).at("config").at("seed"), 7);
  const RunResult s = run("verify --config " + cfg + " --trials 5 --seed 9", "ADNORM_SEED=7");
  EXPECT_EQ(json::parse(s.out).at("config").at("seed"), 9);
  EXPECT_NE(json::parse(a.out).at("reports").dump(), json::parse(e.out).at("reports").dump());
}

TEST(Cli, ExitCodes) {
  // 1: unreadable or malformed input.
  EXPECT_EQ(run("norm --gauge '{\"kind\":\"spectral\"}' --matrix /nonexistent/m.json").code, 1);
  EXPECT_EQ(run("norm --gauge '{\"kind\":\"spectral\"}' --matrix '{\"re\": 3}'").code, 1);
  // 2: a FLAG verdict. An absurd zero tolerance makes every strictly convex
  // increase look like equality.
  const std::string flag_cfg =
      R"('{"n":[3],"trials":5,"checks":["conotang"],"gauges":[{"kind":"p","p":2}],"tolerances":{"zero":1000}}')";
  EXPECT_EQ(run("verify --config " + flag_cfg).code, 2);
  // 3: invalid configuration.
  EXPECT_EQ(run("norm --bogus").code, 3);
  EXPECT_EQ(run("verify --config '{\"checks\":[\"nope\"]}'").code, 3);
  EXPECT_EQ(run("norm --gauge '{\"kind\":\"p\",\"p\":0.5}' --matrix " + sample("C.json")).code, 3);
  EXPECT_EQ(run("majorize --z '[1,0]' --w '[1,0,-1]'").code, 3);
  EXPECT_EQ(run("selfdual --c '[1,0,-1]' --tol -1e-3").code, 3);
  // 4: certification failure at an unattainable tolerance.
  EXPECT_EQ(run("norming --gauge '{\"kind\":\"p\",\"p\":1.5}' --matrix " + sample("X.json") + " --tol 1e-300").code, 4);
}
