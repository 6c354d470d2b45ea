// vbpg: run | certify | paper-checks
#include <CLI11.hpp>

#include <iostream>

#include "vbpg/cli.hpp"

int main(int argc, char** argv) {
  vbpg::init_logging();
  CLI::App app{"Variable Bregman proximal gradient runs and error-bound diagnostics"};
  app.require_subcommand(1);

  vbpg::CliOptions opts;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", opts.config, "experiment config (JSON)");
    if (needs_config) c->required();
    sub->add_option("--out", opts.out, "output directory")->capture_default_str();
    sub->add_option("--seed", opts.seed, "overrides the config seed");
    sub->add_option("--jobs", opts.jobs, "worker threads")->check(CLI::Range(1u, 1024u));
  };
  auto* run = app.add_subcommand("run", "run the solver and write a trace");
  add_common(run, true);
  auto* certify = app.add_subcommand("certify", "sample-check the diagnostics requests");
  add_common(certify, true);
  auto* checks = app.add_subcommand("paper-checks", "run the acceptance suite");
  add_common(checks, false);
  checks->add_option("--tamper-lipschitz", opts.tamper_lipschitz)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : vbpg::kExitConfig;
  }
  try {
    if (run->parsed()) return vbpg::cmd_run(opts);
    if (certify->parsed()) return vbpg::cmd_certify(opts);
    return vbpg::cmd_paper_checks(opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return vbpg::kExitSolver;
  }
}
