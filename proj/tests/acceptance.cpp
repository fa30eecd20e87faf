#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "kan3/config.hpp"
#include "kan3/report.hpp"
#include "kan3/run.hpp"

using namespace kan3;

namespace {

int failures = 0;

bool has_checks(const RunManifest& m, const std::vector<std::string>& names, std::string& missing) {
  bool ok = m.error.empty();
  if (!ok) missing += " error=" + m.error;
  for (const auto& n : names) {
    bool found = false;
    for (const auto& [name, pass] : m.checks)
      if (name == n) {
        found = true;
        if (!pass) {
          ok = false;
          missing += " " + n;
        }
      }
    if (!found) {
      ok = false;
      missing += " " + n + "(absent)";
    }
  }
  return ok;
}

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("criterion %2d %s  %s%s%s\n", id, ok ? "PASS" : "FAIL", what.c_str(), detail.empty() ? "" : "  failed:",
              detail.c_str());
  std::fflush(stdout);
}

RunResult go(ExperimentConfig c, const std::string& experiment, int threads = 1) {
  c.threads = threads;
  c.out = "acceptance_out/t" + std::to_string(threads);
  return run(c, experiment, true);
}

double timing(const RunManifest& m, const std::string& name) {
  for (const auto& [n, s] : m.timings)
    if (n == name) return s;
  return -1.0;
}

}  // namespace

int main() {
  const ExperimentConfig base;
  std::map<std::string, std::uint64_t> hash1;

  {
    std::string miss;
    bool ok = true;
    for (double t : {0.05, 0.1}) {
      ExperimentConfig c = base;
      c.t = t;
      RunResult r = go(c, "verify");
      ok = has_checks(r.manifest, {"K1", "K2", "K3", "K4", "runtime_under_60s"}, miss) && ok;
    }
    report(1, ok, "Kan conditions K1-K4 at t = 0.05 and t = 0.1", miss);
  }

  RunResult blender = go(base, "blender");
  hash1["blender"] = blender.manifest.payload_hash();
  {
    std::string miss;
    report(2, has_checks(blender.manifest, {"fixed_points", "geometry", "cones"}, miss),
           "blender fixed points, geometry, cones", miss);
  }
  {
    std::string miss;
    bool ok = has_checks(blender.manifest, {"dichotomy_hits", "dichotomy_ratio", "dichotomy_runtime_under_10s"}, miss);
    report(3, ok, "strip dichotomy on 10^4 intervals (" + format_number(timing(blender.manifest, "dichotomy")) + " s)",
           miss);
  }
  {
    std::string miss;
    report(4, has_checks(blender.manifest, {"consistency"}, miss), "chart consistency <= 1e-6", miss);
  }
  {
    std::string miss;
    RunResult r = go(base, "mixing");
    report(5, has_checks(r.manifest, {"flip_all", "odd_returns_empty"}, miss), "non-mixing flip certificate", miss);
  }

  RunResult basin = go(base, "basin");
  hash1["basin"] = basin.manifest.payload_hash();
  {
    std::string miss;
    bool ok = has_checks(basin.manifest, {"decided_99", "both_labels", "coarse_both_95"}, miss);
    report(6, ok, "intermingled basins (" + format_number(timing(basin.manifest, "classify")) + " s)", miss);
  }
  {
    std::string miss;
    ExperimentConfig c = base;
    RunResult r = go(c, "lyapunov");
    report(7, has_checks(r.manifest, {"torus0_matches_quadrature_5pct", "both_negative"}, miss),
           "center Lyapunov on the tori", miss);
  }
  {
    std::string miss;
    RunResult r = go(base, "gibbs");
    report(8, has_checks(r.manifest, {"tube_mass_90", "tv_defect_005", "tv_decreases"}, miss), "Gibbs u-state proxy",
           miss);
  }

  RunResult perturb = go(base, "perturb");
  hash1["perturb"] = perturb.manifest.payload_hash();
  {
    std::string miss;
    bool ok = has_checks(perturb.manifest,
                         {"broken_reports_broken", "kept_reports_continuation", "kept_share_99", "mixing_hits_16_64",
                          "eta0_continuation", "eta0_labels_identical"},
                         miss);
    report(9, ok, "perturbation dichotomy at eta = 0.02", miss);
  }
  {
    std::string miss;
    RunResult r = go(base, "coverage");
    report(10, has_checks(r.manifest, {"forward_fiber_p_full", "backward_fiber_q_full"}, miss),
           "manifold coverage of the 16x16x8 grid", miss);
  }
  {
    std::string miss;
    bool ok = true;
    for (const auto& [exp, h] : hash1) {
      for (int th : {4, 8}) {
        std::uint64_t other = go(base, exp, th).manifest.payload_hash();
        if (other != h) {
          ok = false;
          miss += " " + exp + "@" + std::to_string(th);
        }
      }
    }
    report(11, ok, "payload hashes equal across 1, 4, 8 threads", miss);
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
