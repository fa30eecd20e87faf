#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "kan3/error.hpp"

namespace kan3 {

/// Fully resolved run configuration. Keys in the text form are the dotted names below.
struct ExperimentConfig {
  std::array<long, 4> matrix{5, 2, 2, 1};
  double t = 0.1;
  int n0 = 3;
  double epsilon = 0.05;
  double theta0 = 0.45;
  double center_scale = 1e-7;

  double layout_box_area_fraction = 0.8;
  double layout_plateau = 0.5;
  double layout_chart_half = 2.5;
  int layout_quadrature_n = 2048;

  std::string experiment = "verify";

  int verify_quadrature_n = 512;
  int verify_theta_n = 33;

  int blender_samples = 10000;
  int blender_max_iter = 200;
  int consistency_samples = 1000;

  int grid_nx = 64;
  int grid_ny = 64;
  int grid_nth = 17;
  int grid_samples = 1;
  long iterations = 5000;
  long tail = 1000;
  double delta = 0.05;
  int coarse_nx = 8;
  int coarse_ny = 8;
  int coarse_nth = 4;

  long lyapunov_n = 1000000;

  long gibbs_n = 2000;
  long gibbs_n_short = 200;
  int gibbs_samples = 500;
  double gibbs_u_length = 0.2;

  int coverage_depth = 12;
  int coverage_nx = 16;
  int coverage_ny = 16;
  int coverage_nth = 8;
  double coverage_L = 1e-8;
  long coverage_budget = 10000000;

  int mixing_N = 64;
  int mixing_samples = 100000;
  int mixing_flip_samples = 100000;

  double perturb_eta = 0.02;
  int perturb_torus = 0;
  int perturb_depth = 40;
  double perturb_tol = 1e-6;

  std::uint64_t seed = 0;
  int threads = 0;
  std::string out = "kan3_out";

  bool operator==(const ExperimentConfig&) const = default;
};

/// Throws ParseError, RangeError or UnknownKey.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::string& path);
/// Range checks; throws RangeError naming the first bad field.
void validate(const ExperimentConfig& c);
/// Canonical text form, one `key = value` per line.
std::string print_config(const ExperimentConfig& c);
/// Set one key from its textual value (used for CLI overrides too).
void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value);

}  // namespace kan3
