#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "vbpg/cli.hpp"

using namespace vbpg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("vbpg_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

fs::path write(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliOptions opts(const fs::path& config, const fs::path& out) {
  CliOptions o;
  o.config = config;
  o.out = out;
  return o;
}

struct Shell {
  int code;
  std::string output;
};

Shell shell(const std::string& args) {
  std::string cmd = std::string(VBPG_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST_CASE("missing config file is a config error", "[cli]") {
  auto d = scratch("missing");
  CHECK(cmd_run(opts(d / "nope.json", d)) == kExitConfig);
  CHECK(cmd_certify(opts(d / "nope.json", d)) == kExitConfig);
}

TEST_CASE("malformed JSON reports line and column", "[cli]") {
  auto d = scratch("malformed");
  auto cfg = write(d / "c.json", "{\n  \"problem\": \"QUAD_SC(2,10)\",\n  \"eps\": 0.09,,\n}\n");
  try {
    load_config(cfg);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3, column") != std::string::npos);
  }
  CHECK(cmd_run(opts(cfg, d)) == kExitConfig);
}

TEST_CASE("steps outside the descent regime are config errors", "[cli]") {
  auto d = scratch("regime");
  auto cfg = write(d / "c.json", R"j({"problem": {"corpus": "QUAD_SC(2,10)"}, "eps": 0.2})j");
  try {
    solver_config(load_config(cfg));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string what = e.what();
    CHECK(what.find("m/L") != std::string::npos);
    CHECK(what.find("sufficient descent") != std::string::npos);
  }
  CHECK(cmd_run(opts(cfg, d)) == kExitConfig);
}

TEST_CASE("config validation", "[cli]") {
  auto bad = [](const std::string& text) {
    CHECK_THROWS_AS(parse_config(json::parse(text)), ConfigError);
  };
  bad(R"j({"problem": {"corpus": "NOPE"}})j");
  bad(R"j({"problem": "QUAD_SC(2,10)", "eps": {"values": [0.05], "lo": 0.06}})j");
  bad(R"j({"problem": "QUAD_SC(2,10)", "regions": [{"x_bar": [0], "eta": 1, "nu": 1}]})j");
  bad(R"j({"problem": "QUAD_SC(2,10)", "regions": [{"x_bar": [0, 0], "eta": -1, "nu": 1}]})j");
  bad(R"j({"problem": "QUAD_SC(2,10)", "diagnostics": [{"condition": "nope"}]})j");
  bad(R"j({"problem": "QUAD_SC(2,10)", "diagnostics": [{"condition": "luo_tseng"}]})j");
  bad(R"j({"problem": "EX_5_2", "diagnostics": [{"condition": "kl", "witness_sequence": "x"}]})j");
  bad(R"j({"problem": "QUAD_SC(2,10)", "x0": [1, 2, 3]})j");
  bad(R"j({"problem": "QUAD_SC(2,10)", "kernel": {"kind": "diagonal", "weights": [1, -1]}})j");
  bad(R"j({"problem": {"f": {"kind": "quadratic", "Q": [[1, 2], [0, 1]]}}})j");
  auto ok = parse_config(json::parse(
      R"j({"problem": {"f": {"kind": "quadratic", "Q": [[2, 0], [0, 1]], "b": [1, 0]},
                      "g": {"kind": "l1", "lambda": 0.1}},
          "eps": {"values": [0.2, 0.3]}, "seed": 4})j"));
  CHECK(ok.problem_id == "inline");
  CHECK(ok.eps->lo == 0.2);
  CHECK(ok.eps->hi == 0.3);
  CHECK(solver_config(ok).eps.at(5) == 0.3);
}

TEST_CASE("run writes a trace and a summary", "[cli]") {
  auto d = scratch("run");
  auto cfg = write(d / "c.json",
                   R"j({"problem": {"corpus": "QUAD_SC(2,10)"}, "eps": 0.09, "max_iters": 60})j");
  REQUIRE(cmd_run(opts(cfg, d / "out")) == kExitOk);
  std::istringstream csv(slurp(d / "out" / "trace.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "k,F,step_norm,gap,envelope,residual_bound");
  double prev = std::numeric_limits<double>::infinity();
  int rows = 0;
  while (std::getline(csv, line)) {
    std::istringstream row(line);
    std::string k, F;
    std::getline(row, k, ',');
    std::getline(row, F, ',');
    CHECK(std::stod(F) <= prev);
    prev = std::stod(F);
    ++rows;
  }
  CHECK(rows > 0);
  json summary = json::parse(slurp(d / "out" / "summary.json"));
  CHECK(summary.at("schema_version") == 1);
  CHECK(summary.contains("timestamp"));
  CHECK(summary.at("problem") == "QUAD_SC(2,10)");
  for (const auto& entry : fs::directory_iterator(d / "out"))
    CHECK(entry.path().extension() != ".tmp");
}

TEST_CASE("seed override", "[cli]") {
  auto d = scratch("seed");
  auto cfg = write(d / "c.json", R"j({"problem": "LASSO(20,50,0.1,7)", "max_iters": 40, "seed": 1})j");
  auto o = opts(cfg, d / "a");
  REQUIRE(cmd_run(o) == kExitOk);
  o.out = d / "b";
  REQUIRE(cmd_run(o) == kExitOk);
  o.out = d / "c";
  o.seed = 2;
  REQUIRE(cmd_run(o) == kExitOk);
  CHECK(slurp(d / "a" / "trace.csv") == slurp(d / "b" / "trace.csv"));
  CHECK(slurp(d / "a" / "trace.csv") != slurp(d / "c" / "trace.csv"));
}

TEST_CASE("run refuses piecewise entries", "[cli]") {
  auto d = scratch("raw");
  auto cfg = write(d / "c.json", R"j({"problem": "EX_5_1"})j");
  CHECK(cmd_run(opts(cfg, d)) == kExitConfig);
}

TEST_CASE("inner solver failure exits with the solver code", "[cli]") {
  auto d = scratch("inner");
  auto cfg = write(d / "c.json", R"j({
    "problem": "QUAD_L1(2,0.5)",
    "kernel": {"kind": "spd", "matrix": [[2, 0.5], [0.5, 1]]},
    "inner_tol": 1e-14, "inner_max_iters": 2, "max_iters": 5})j");
  CHECK(cmd_run(opts(cfg, d)) == kExitSolver);
}

TEST_CASE("certify writes one certificate per request", "[cli]") {
  auto d = scratch("certify");
  auto cfg = write(d / "c.json", R"j({
    "problem": "EX_5_2",
    "diagnostics": [
      {"condition": "kl", "alpha": 0.5, "witness_sequence": "kl"},
      {"condition": "level_set_subdiff", "gamma": 1}
    ]})j");
  REQUIRE(cmd_certify(opts(cfg, d / "out")) == kExitOk);
  json kl = json::parse(slurp(d / "out" / "cert_0_kl.json"));
  CHECK(kl.at("verdict") == "REFUTED");
  CHECK(kl.contains("witness"));
  for (const char* key : {"condition", "params", "region", "n_samples", "constant_estimate",
                          "worst_ratio", "verdict"})
    CHECK(kl.contains(key));
  json eb = json::parse(slurp(d / "out" / "cert_1_level_set_subdiff.json"));
  CHECK(eb.at("verdict") == "CERTIFIED_ON_SAMPLES");
}

TEST_CASE("level-set EB on QUAD_SC is certified with gamma 1", "[cli]") {
  auto d = scratch("quad");
  auto cfg = write(d / "c.json", R"j({
    "problem": "QUAD_SC(2,10)",
    "diagnostics": [{"condition": "level_set_subdiff", "gamma": 1, "samples": 500}]})j");
  auto o = opts(cfg, d / "one");
  REQUIRE(cmd_certify(o) == kExitOk);
  json c = json::parse(slurp(d / "one" / "cert_0_level_set_subdiff.json"));
  CHECK(c.at("verdict") == "CERTIFIED_ON_SAMPLES");
  CHECK(c.at("params").at("gamma") == 1.0);
  CHECK(c.at("n_samples") == 500);
}

TEST_CASE("parallel certification matches the serial one", "[cli]") {
  auto d = scratch("jobs");
  auto cfg = write(d / "c.json", R"j({
    "problem": "QUAD_L1(5,0.5)", "seed": 3,
    "diagnostics": [{"condition": "kl"}, {"condition": "level_set_subdiff"},
                    {"condition": "bp_gap"}, {"condition": "bregman_prox_eb"}]})j");
  auto o = opts(cfg, d / "serial");
  REQUIRE(cmd_certify(o) == kExitOk);
  o.out = d / "parallel";
  o.jobs = 4;
  REQUIRE(cmd_certify(o) == kExitOk);
  for (const auto& entry : fs::directory_iterator(d / "serial"))
    CHECK(slurp(entry.path()) == slurp(d / "parallel" / entry.path().filename()));
}

TEST_CASE("missing oracles exit with the capability code", "[cli]") {
  auto d = scratch("capability");
  auto inline_cfg = write(d / "a.json", R"j({
    "problem": {"f": {"kind": "quadratic", "Q": [[1, 0], [0, 2]]}},
    "regions": [{"x_bar": [0, 0], "eta": 1, "nu": 1}],
    "diagnostics": [{"condition": "weak_metric_subregularity"}, {"condition": "prox_pl"}]})j");
  CHECK(cmd_certify(opts(inline_cfg, d / "a")) == kExitCapability);
  auto raw = write(d / "b.json", R"j({"problem": "EX_5_2", "diagnostics": [{"condition": "bp_gap"}]})j");
  CHECK(cmd_certify(opts(raw, d / "b")) == kExitCapability);
}

TEST_CASE("binary exit codes", "[cli]") {
  auto d = scratch("binary");
  CHECK(shell("run --config " + (d / "nope.json").string()).code == kExitConfig);
  CHECK(shell("run").code == kExitConfig);
  CHECK(shell("frobnicate").code == kExitConfig);
  write(d / "blocker", "");
  auto unwritable = shell("paper-checks --out " + (d / "blocker" / "sub").string());
  CHECK(unwritable.code == kExitConfig);
}

TEST_CASE("tampered Lipschitz constants fail validate_problem", "[cli]") {
  auto d = scratch("tamper");
  auto r = shell("paper-checks --jobs 4 --tamper-lipschitz 0.5 --out " + (d / "out").string());
  CHECK(r.code == kExitCheckFailed);
  CHECK(r.output.find("FAIL validate_problem") != std::string::npos);
  CHECK(r.output.find("failed checks: validate_problem") != std::string::npos);
  json manifest = json::parse(slurp(d / "out" / "manifest.json"));
  CHECK(manifest.at("schema_version") == 1);
  CHECK(manifest.at("all_passed") == false);
}
