#pragma once

#include <string>

#include "kan3/config.hpp"
#include "kan3/kan_map.hpp"
#include "kan3/report.hpp"

namespace kan3 {

KanSetup setup_from_config(const ExperimentConfig& c);

struct RunResult {
  RunManifest manifest;
  std::string report_json;  // same bytes as report.json
};

/// Runs `experiment` (verify | blender | basin | lyapunov | gibbs | coverage | mixing | perturb)
/// and writes its files under `<out>/<experiment>/` when `write_files` is set.
/// Library errors are caught and recorded in the manifest.
RunResult run(const ExperimentConfig& c, const std::string& experiment, bool write_files = true);

}  // namespace kan3
