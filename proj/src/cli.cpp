#include "vbpg/cli.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "vbpg/acceptance.hpp"

namespace vbpg {

namespace fs = std::filesystem;

void init_logging() {
  static std::once_flag once;
  std::call_once(once, [] {
    auto logger = spdlog::stderr_color_mt("vbpg");
    logger->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
    spdlog::set_default_logger(logger);
  });
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("VBPG_LOG")) {
    std::string s(env);
    level = spdlog::level::from_str(s);
    // from_str maps unknown names to off; keep the default in that case.
    if (level == spdlog::level::off && s != "off") {
      level = spdlog::level::warn;
      spdlog::warn("VBPG_LOG={} is not a log level; using warn", s);
    }
  }
  spdlog::set_level(level);
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, jobs), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

namespace {

std::string utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

bool prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::is_directory(dir)) {
    spdlog::error("cannot create output directory {}: {}", dir.string(), ec.message());
    return false;
  }
  try {
    const fs::path probe = dir / ".vbpg_write_probe";
    atomic_write(probe, "");
    fs::remove(probe, ec);
  } catch (const std::exception& e) {
    spdlog::error("output directory {} is not writable: {}", dir.string(), e.what());
    return false;
  }
  return true;
}

// Loads the config and applies the --seed override. Logs and returns nullopt on
// config errors.
std::optional<ExperimentConfig> load(const CliOptions& opts) {
  if (opts.config.empty()) {
    spdlog::error("--config is required");
    return std::nullopt;
  }
  try {
    ExperimentConfig cfg = load_config(opts.config);
    if (opts.seed) cfg.seed = *opts.seed;
    return cfg;
  } catch (const Error& e) {
    spdlog::error("config error: {}", e.what());
    std::cerr << "config error: " << e.what() << "\n";
    return std::nullopt;
  }
}

std::uint64_t request_seed(std::uint64_t seed, std::size_t i) {
  return seed * 1000003ULL + static_cast<std::uint64_t>(i);
}

}  // namespace

int cmd_run(const CliOptions& opts) {
  auto loaded = load(opts);
  if (!loaded) return kExitConfig;
  const ExperimentConfig& cfg = *loaded;
  if (!cfg.entry->is_composite()) {
    std::cerr << "config error: " << cfg.problem_id
              << " has no smooth/nonsmooth split; it can be used with certify only\n";
    return kExitConfig;
  }
  VbpgConfig v;
  try {
    v = solver_config(cfg);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  const Point x0 = initial_point(cfg);
  SolverTrace trace;
  try {
    spdlog::info("run {} for up to {} iterations", cfg.problem_id, cfg.max_iters);
    trace = run_vbpg(cfg.entry->composite(), v, x0);
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
  if (!prepare_out_dir(opts.out)) return kExitConfig;
  json summary = trace_summary(trace);
  summary["schema_version"] = 1;
  summary["problem"] = cfg.problem_id;
  summary["seed"] = cfg.seed;
  summary["x0"] = to_json(x0);
  summary["trace_file"] = cfg.trace_file;
  summary["timestamp"] = utc_timestamp();
  try {
    atomic_write(opts.out / cfg.trace_file, trace_csv(trace));
    atomic_write(opts.out / cfg.summary_file, summary.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "cannot write outputs: " << e.what() << "\n";
    return kExitConfig;
  }
  if (!opts.quiet)
    std::cout << "run " << cfg.problem_id << ": " << trace.iters() << " iterations, stop "
              << to_string(trace.stop) << ", F = " << format_double(trace.F_limit) << "\n";
  return kExitOk;
}

EBCertificate run_request(const ExperimentConfig& cfg, const DiagnosticRequest& r,
                          std::uint64_t seed) {
  const CorpusEntry& e = *cfg.entry;
  const Landscape land = e.landscape();
  CertifyOptions co;
  co.candidate = r.candidate;
  if (r.witness_sequence) co.witness_sequence = e.witness_sequences.at(*r.witness_sequence);
  auto param = [&](const char* key, double dflt) {
    auto it = r.params.find(key);
    return it == r.params.end() ? dflt : it->second;
  };
  auto sublevel = [&]() -> DistanceFn { return SublevelDistance(land, r.region.F_bar, r.sublevel); };
  auto prox = [&]() -> ProxMap {
    if (e.prox && !r.eps) return *e.prox;
    return prox_map(e.composite(), diagnostic_step(cfg, r.eps));
  };
  auto samples = [&] { return sample_region(land, r.region, SamplerOptions{r.samples, seed, 0}); };

  switch (r.condition) {
    case Condition::LevelSetSubdiff: {
      DistanceFn d = sublevel();
      return certify_level_set_subdiff_eb(land, r.region, param("gamma", 1.0), samples(), d, co);
    }
    case Condition::StrongLevelSetSubdiff: {
      DistanceFn d = sublevel();
      return certify_strong_level_set_subdiff_eb(land, r.region, samples(), d, co);
    }
    case Condition::LevelSetBregman:
    case Condition::StrongLevelSetBregman: {
      DistanceFn d = sublevel();
      ProxMap T = prox();
      double p = r.condition == Condition::LevelSetBregman ? param("p", 1.0) : 1.0;
      EBCertificate c = certify_level_set_bregman_eb(land, T, r.region, p, samples(), d, co);
      c.condition = r.condition;
      return c;
    }
    case Condition::WeakMetricSubregularity:
      return certify_weak_metric_subregularity(land, r.region, samples(), co);
    case Condition::BregmanProxEb: {
      ProxMap T = prox();
      return certify_bregman_prox_eb(land, T, r.region, samples(), co);
    }
    case Condition::LuoTseng: {
      ProxMap T = prox();
      return certify_luo_tseng(land, T, r.region, r.params.at("xi"), r.params.at("sigma"),
                               samples(), co);
    }
    case Condition::Kl:
      return certify_kl(land, r.region, param("alpha", 0.5), samples(), co);
    case Condition::BpGap: {
      const CompositeProblem& p = e.composite();
      return certify_bp_gap(p, diagnostic_step(cfg, r.eps), r.region, param("q", 1.0), samples(),
                            co);
    }
    case Condition::ProxPl:
      return certify_prox_pl(e.composite(), r.region, r.candidate, samples());
  }
  throw ArgumentError("unhandled condition");
}

int cmd_certify(const CliOptions& opts) {
  auto loaded = load(opts);
  if (!loaded) return kExitConfig;
  const ExperimentConfig& cfg = *loaded;
  if (cfg.diagnostics.empty()) {
    std::cerr << "config error: no diagnostics requests in " << opts.config.string() << "\n";
    return kExitConfig;
  }
  if (!prepare_out_dir(opts.out)) return kExitConfig;

  const std::size_t n = cfg.diagnostics.size();
  std::vector<std::optional<EBCertificate>> certs(n);
  std::vector<std::pair<int, std::string>> failures(n, {kExitOk, ""});
  parallel_for(n, opts.jobs, [&](std::size_t i) {
    const DiagnosticRequest& r = cfg.diagnostics[i];
    try {
      certs[i] = run_request(cfg, r, request_seed(cfg.seed, i));
      std::ostringstream name;
      name << "cert_" << i << "_" << to_string(r.condition) << ".json";
      atomic_write(opts.out / name.str(), to_json(*certs[i]).dump(2) + "\n");
    } catch (const CapabilityError& e) {
      failures[i] = {kExitCapability, e.what()};
    } catch (const ConfigError& e) {
      failures[i] = {kExitConfig, e.what()};
    } catch (const ArgumentError& e) {
      failures[i] = {kExitConfig, e.what()};
    } catch (const HypothesisError& e) {
      failures[i] = {kExitConfig, e.what()};
    } catch (const RegimeError& e) {
      failures[i] = {kExitConfig, e.what()};
    } catch (const InsufficientSamplingError& e) {
      failures[i] = {kExitConfig, e.what()};
    } catch (const std::exception& e) {
      failures[i] = {kExitSolver, e.what()};
    }
  });

  int code = kExitOk;
  std::vector<std::string> unmet;
  for (std::size_t i = 0; i < n; ++i) {
    const char* cond = to_string(cfg.diagnostics[i].condition);
    if (certs[i]) {
      std::cout << "[" << i << "] " << cond << ": " << to_string(certs[i]->verdict)
                << " constant=" << format_double(certs[i]->constant_estimate)
                << " samples=" << certs[i]->n_samples << "\n";
      continue;
    }
    const auto& [c, msg] = failures[i];
    std::cerr << "[" << i << "] " << cond << ": " << msg << "\n";
    if (c == kExitCapability) unmet.push_back(std::string(cond) + ": " + msg);
    if (code != kExitCapability && c > code) code = c;
    if (c == kExitCapability) code = kExitCapability;
  }
  if (!unmet.empty()) {
    std::cerr << "unmet requirements:\n";
    for (const auto& u : unmet) std::cerr << "  " << u << "\n";
  }
  return code;
}

int cmd_paper_checks(const CliOptions& opts) {
  if (!prepare_out_dir(opts.out)) {
    std::cerr << "output directory " << opts.out.string() << " is not writable\n";
    return kExitConfig;
  }
  AcceptanceOptions ao;
  ao.out_dir = opts.out;
  ao.jobs = opts.jobs;
  ao.tamper_lipschitz = opts.tamper_lipschitz;
  std::vector<CheckResult> results = run_acceptance(ao);
  try {
    atomic_write(opts.out / "manifest.json", manifest_json(results).dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "cannot write manifest: " << e.what() << "\n";
    return kExitConfig;
  }
  std::vector<std::string> failed;
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.id << " (" << std::fixed
              << std::setprecision(2) << r.seconds << " s) " << r.detail << "\n";
    if (!r.passed) failed.push_back(r.id);
  }
  if (failed.empty()) return kExitOk;
  std::cerr << "failed checks:";
  for (const auto& f : failed) std::cerr << " " << f;
  std::cerr << "\n";
  return kExitCheckFailed;
}

}  // namespace vbpg
