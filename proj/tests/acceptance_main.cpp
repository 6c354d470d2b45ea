// Acceptance suite: one PASS/FAIL line per criterion.
#include <iostream>

#include "vbpg/acceptance.hpp"
#include "vbpg/cli.hpp"

int main(int argc, char** argv) {
  vbpg::init_logging();
  vbpg::AcceptanceOptions opts;
  opts.out_dir = argc > 1 ? argv[1] : "acceptance_out";
  opts.jobs = 4;
  std::filesystem::create_directories(opts.out_dir);
  auto results = vbpg::run_acceptance(opts);
  vbpg::atomic_write(opts.out_dir / "manifest.json", vbpg::manifest_json(results).dump(2) + "\n");
  bool ok = true;
  for (const auto& r : results) {
    ok = ok && r.passed;
    if (r.criterion == 0) {
      // precondition for every criterion, reported separately
      if (!r.passed) std::cout << "FAIL precondition " << r.id << ": " << r.detail << "\n";
      continue;
    }
    std::cout << (r.passed ? "PASS" : "FAIL") << " criterion " << r.criterion << " " << r.id
              << ": " << r.detail << "\n";
  }
  return ok ? 0 : 1;
}
