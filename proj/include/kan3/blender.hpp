#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "kan3/kan_map.hpp"

namespace kan3 {

using Vec3 = std::array<double, 3>;  // (x_s, x_u, x_c)

struct Box3 {
  Vec3 lo{}, hi{};

  bool contains(const Vec3& v) const {
    for (int i = 0; i < 3; ++i)
      if (v[i] < lo[i] || v[i] > hi[i]) return false;
    return true;
  }
  bool empty() const { return lo[0] > hi[0] || lo[1] > hi[1] || lo[2] > hi[2]; }
};

struct BlenderModel {
  double lambda_pow = 1.0;  // lambda^{2 n0}
  double mu = 1.0;
  double nu = 0.0;
  double eps0 = 0.1;
  Box3 cube{{-2, -2, -2}, {2, 2, 2}};
  Box3 gamma1, gamma2;
  Vec3 P{0, 0, 0};
  Vec3 O{};
  double lambda_prime = 1.0;
};

BlenderModel make_blender(double lambda_pow, double mu, double eps0 = 0.1);
/// Default affine model: lambda^{2 n0} of [[5,2],[2,1]] with n0 = 3 and mu = e^{0.6}.
BlenderModel default_blender();
/// Model with the multiplier realized by K.
BlenderModel blender_from_kan(const KanMap& K);

Vec3 model_map(const BlenderModel& m, const Vec3& v);
Box3 branch_image(const BlenderModel& m, int branch);

struct GeometryReport {
  bool two_components = false;
  bool avoids_u_boundary = false;
  bool avoids_ss_boundary = false;
  bool all() const { return two_components && avoids_u_boundary && avoids_ss_boundary; }
};

GeometryReport certify_geometry(const BlenderModel& m);

/// Cone invariance for D = diag(a_s, a_u, a_c) with required u-cone growth `growth`.
bool certify_cones_diag(double a_s, double a_u, double a_c, double eps0, double growth);
bool certify_cones(const BlenderModel& m, double eps0);

struct CenterInterval {
  double a = 0.0;
  double b = 0.0;
  double width() const { return b - a; }
};

enum class StripOutcome { Grown, HitsP, Lost };

struct StripResult {
  StripOutcome outcome = StripOutcome::Lost;
  CenterInterval interval;
};

StripResult strip_step(const BlenderModel& m, const CenterInterval& I);

struct DichotomyReport {
  int n_samples = 0;
  int failures = 0;  // no HitsP within min(bound, max_iter)
  int ratio_violations = 0;
  int max_steps = 0;
  double min_ratio = 0.0;
  std::vector<int> steps;  // per sample
  std::vector<int> bounds;
  std::vector<double> widths;
};

int hits_bound(const BlenderModel& m, double w0);
DichotomyReport verify_dichotomy(const BlenderModel& m, int n_samples, int max_iter, std::uint64_t seed,
                                 int threads = 1);

bool superposition_member(const BlenderModel& m, const std::vector<Vec3>& segment);

struct ConsistencyReport {
  int samples = 0;
  double sup_error = 0.0;
  double error_at_P = 0.0;
};

/// Chart coordinates (x_s, x_u, x_c) of a point of T^3 near P.
Vec3 kan_chart(const KanMap& K, const Point3& p);
Point3 kan_point(const KanMap& K, const Vec3& v);
double consistency_error_at(const KanMap& K, const BlenderModel& m, const Vec3& v);
ConsistencyReport consistency_with_kan(const KanMap& K, const BlenderModel& m, int n_samples, std::uint64_t seed);

/// Whether Q = (q, theta0) sits in the center window of the blender chart.
bool theta0_in_window(const KanMap& K);

}  // namespace kan3
