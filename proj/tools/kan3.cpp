#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "kan3/config.hpp"
#include "kan3/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"kan3: skew-product experiments with two intermingled physical measures"};
  std::string experiment;
  std::string config_path;
  std::optional<double> t;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
  std::vector<std::string> sets;
  bool print_only = false;

  app.add_option("experiment", experiment, "verify | blender | basin | lyapunov | gibbs | coverage | mixing | perturb")
      ->required()
      ->check(CLI::IsMember({"verify", "blender", "basin", "lyapunov", "gibbs", "coverage", "mixing", "perturb"}));
  app.add_option("--config", config_path, "config file (key = value)");
  app.add_option("--t", t, "center strength t");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--threads", threads, "worker threads (falls back to KAN3_THREADS)");
  app.add_option("--out", out, "output directory");
  app.add_option("--set", sets, "override any key, e.g. --set basin.n=2000");
  app.add_flag("--print-config", print_only, "print the resolved config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  kan3::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = kan3::parse_config(config_path);
    cfg.experiment = experiment;
    for (const auto& kv : sets) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw kan3::Error(kan3::ErrorKind::ParseError, "--set expects key=value", 1, 1);
      kan3::set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (t) cfg.t = *t;
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    if (out) cfg.out = *out;
    kan3::validate(cfg);
  } catch (const kan3::Error& e) {
    std::fprintf(stderr, "kan3: %s\n", e.what());
    return 2;
  }

  if (print_only) {
    std::cout << kan3::print_config(cfg);
    return 0;
  }

  try {
    kan3::RunResult r = kan3::run(cfg, experiment);
    std::cout << r.report_json;
    for (const auto& [name, ok] : r.manifest.checks) std::printf("%-32s %s\n", name.c_str(), ok ? "PASS" : "FAIL");
    if (!r.manifest.error.empty()) std::fprintf(stderr, "kan3: %s\n", r.manifest.error.c_str());
    std::printf("payload_hash %s\n", kan3::hex64(r.manifest.payload_hash()).c_str());
    return r.manifest.passed() ? 0 : 1;
  } catch (const kan3::Error& e) {
    std::fprintf(stderr, "kan3: %s\n", e.what());
    return e.kind() == kan3::ErrorKind::IoError ? 1 : 2;
  }
}
