#include "kan3/kan_map.hpp"

#include <algorithm>
#include <cmath>

#include "kan3/bump.hpp"

namespace kan3 {

namespace {
constexpr double kPi = std::numbers::pi;
}

double CorrectionWindow::psi(double tau) const {
  if (tau < tau_lo) return smoothstep((tau - (tau_lo - ramp_lo)) / ramp_lo);
  if (tau <= tau_hi) return 1.0;
  return 1.0 - smoothstep((tau - tau_hi) / ramp_hi);
}

double CorrectionWindow::psi_derivative(double tau) const {
  if (tau < tau_lo) return smoothstep_derivative((tau - (tau_lo - ramp_lo)) / ramp_lo) / ramp_lo;
  if (tau <= tau_hi) return 0.0;
  return -smoothstep_derivative((tau - tau_hi) / ramp_hi) / ramp_hi;
}

KanParams make_params(const KanSetup& setup) {
  if (!(setup.t >= 0.0)) throw Error(ErrorKind::InvalidArgument, "t must be non-negative");
  KanParams p;
  p.t = setup.t;
  p.anosov = anosov_from_matrix(setup.matrix);
  p.chart = search_chart(p.anosov, setup.n0);
  p.n0 = p.chart.n0;
  DomainLayout layout = build_layout(p.anosov, p.chart, setup.epsilon, setup.layout);
  p.fields = std::make_shared<const FieldSpec>(std::move(layout), setup.fields);
  p.mu = std::exp(2.0 * p.n0 * p.fields->kappa() * setup.t);
  p.nu = p.mu - 1.0;
  p.correction = setup.correction;
  CorrectionWindow& w = p.window;
  w.h = setup.center_scale;
  w.delta = p.nu * w.h;
  w.tau_lo = w.h * (p.mu - 4.0);
  w.ramp_lo = std::max(16.0 * p.nu * w.h, 1e-300);
  w.tau_hi = 0.1;
  w.ramp_hi = 0.9;
  if (w.h * (p.mu + 4.0) >= w.tau_hi || w.tau_hi + w.ramp_hi > 1.0) {
    throw Error(ErrorKind::WindowMismatch, "center window leaves the linearizing chart");
  }
  return p;
}

KanMap::KanMap(KanParams params) : p_(std::move(params)) {}

KanMap make_K(const KanParams& params) { return KanMap(params); }

double KanMap::to_center(double theta) const { return std::tan(kPi * (theta - 0.5)) / p_.window.h; }

double KanMap::from_center(double xc) const { return 0.5 + std::atan(xc * p_.window.h) / kPi; }

bool KanMap::corrected(const Placement& pl) const {
  return p_.correction && p_.window.delta > 0.0 && pl.region == Region::C2Orbit &&
         pl.orbit_index == 2 * p_.n0 - 1 && pl.alpha1 > 0.0;
}

FlowResult KanMap::correction(const Placement& pl, double theta) const {
  if (!corrected(pl) || std::fabs(theta - 0.5) >= 0.25) return {theta, 1.0, 0};
  const CorrectionWindow& w = p_.window;
  const double tau = std::tan(kPi * (theta - 0.5));
  const double shift = w.delta * pl.alpha1 * w.psi(tau);
  if (shift == 0.0) return {theta, 1.0, 0};
  const double tau2 = tau - shift;
  FlowResult r;
  r.theta = 0.5 + std::atan(tau2) / kPi;
  r.derivative = (1.0 - w.delta * pl.alpha1 * w.psi_derivative(tau)) * (1.0 + tau * tau) / (1.0 + tau2 * tau2);
  return r;
}

double KanMap::correction_inverse(const Placement& pl, double theta) const {
  if (!corrected(pl) || std::fabs(theta - 0.5) >= 0.25) return theta;
  const CorrectionWindow& w = p_.window;
  const double target = std::tan(kPi * (theta - 0.5));
  const double amp = w.delta * pl.alpha1;
  auto g = [&](double tau) { return tau - amp * w.psi(tau) - target; };
  double lo = target, hi = target + amp;
  if (g(lo) > 0.0 || g(hi) < 0.0) throw Error(ErrorKind::BisectionFailure, "correction bracket invalid");
  int it = 0;
  for (; it < 200 && hi - lo > 1e-12 * std::max(amp, 1e-300); ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) > 0.0) hi = mid;
    else lo = mid;
  }
  if (it == 200) throw Error(ErrorKind::BisectionFailure, "correction inverse did not converge");
  double tau = 0.5 * (lo + hi);
  if (std::fabs(tau) >= 1.0) return theta;
  return 0.5 + std::atan(tau) / kPi;
}

FlowResult KanMap::fiber_f(TorusPoint2 x, double theta) const {
  Placement pl = layout().place(x);
  FlowResult r = flow(fields().field_X(pl), p_.t, theta);
  if (corrected(pl)) {
    FlowResult c = correction(pl, r.theta);
    r.theta = c.theta;
    r.derivative *= c.derivative;
  }
  return r;
}

FlowResult KanMap::fiber(TorusPoint2 x, double theta) const {
  Placement pl = layout().place(x);
  if (pl.region == Region::Q) return flow(fields().field_Y(x), p_.t, theta);
  FlowResult r = flow(fields().field_X(pl), p_.t, theta);
  if (corrected(pl)) {
    FlowResult c = correction(pl, r.theta);
    r.theta = c.theta;
    r.derivative *= c.derivative;
  }
  return r;
}

double KanMap::fiber_inverse(TorusPoint2 x, double theta) const {
  Placement pl = layout().place(x);
  if (pl.region == Region::Q) return flow(fields().field_Y(x), -p_.t, theta).theta;
  double th = correction_inverse(pl, theta);
  return flow(fields().field_X(pl), -p_.t, th).theta;
}

Point3 KanMap::f_t(const Point3& p) const {
  return {base().apply(p.base), fiber_f(p.base, p.theta).theta};
}

Point3 KanMap::f_tilde(const Point3& p) const { return {base().apply(p.base), fiber(p.base, p.theta).theta}; }

Point3 KanMap::f_hat(const Point3& p) const {
  TorusPoint2 y = base().apply(p.base);
  if (p.theta >= 0.0) return {y, wrap_theta(fiber(p.base, p.theta).theta)};
  double v = fiber(p.base, -p.theta).theta;
  return {y, v == 0.0 ? 0.0 : -v};
}

Point3 KanMap::apply(const Point3& p) const {
  TorusPoint2 y = base().apply(p.base);
  if (p.theta >= 0.0) {
    double v = fiber(p.base, p.theta).theta;
    return {y, v == 0.0 ? 0.0 : -v};
  }
  return {y, wrap_theta(fiber(p.base, -p.theta).theta)};
}

double KanMap::fiber_derivative(const Point3& p) const {
  return -fiber(p.base, std::fabs(p.theta)).derivative;
}

Point3 KanMap::apply_inverse(const Point3& p) const {
  TorusPoint2 x = base().apply_inverse(p.base);
  if (p.theta == 0.0) return {x, 0.0};
  if (p.theta < 0.0) return {x, wrap_theta(fiber_inverse(x, -p.theta))};
  double v = fiber_inverse(x, p.theta);
  return {x, v == 0.0 ? 0.0 : -v};
}

namespace {

int count_fixed(const KanMap& K, TorusPoint2 x, int n) {
  int count = 0;
  if (K.fiber(x, 0.0).theta == 0.0) ++count;
  if (K.fiber(x, 1.0).theta == 1.0) ++count;
  int prev_sign = 0;
  for (int i = 1; i < n; ++i) {
    double th = static_cast<double>(i) / n;
    double g = K.fiber(x, th).theta - th;
    int sg = g > 0.0 ? 1 : (g < 0.0 ? -1 : 0);
    if (sg == 0) {
      ++count;
    } else if (prev_sign != 0 && sg != prev_sign) {
      ++count;
    }
    if (sg != 0) prev_sign = sg;
  }
  return count;
}

}  // namespace

ConditionReport verify_kan_conditions(const KanMap& K, int quadrature_n, int theta_n) {
  if (quadrature_n < 1) throw Error(ErrorKind::InvalidArgument, "quadrature_n must be positive");
  ConditionReport rep;
  const double t = K.params().t;
  const AnosovMap& A = K.base();
  rep.t = t;
  rep.lambda = A.lambda();
  rep.lambda_inv = 1.0 / A.lambda();
  rep.k3_lower = std::exp(-2.0 * kPi * t);
  rep.k3_upper = std::exp(2.0 * kPi * t);
  rep.k4_bound = kPi * t * (K.layout().epsilon() - 1.0);

  std::vector<double> thetas;
  for (int k = 0; k <= theta_n - 1; ++k) thetas.push_back(static_cast<double>(k) / (theta_n - 1));
  thetas.push_back(0.5);

  double k1 = 0.0, dmin = 1e300, dmax = 0.0, s0 = 0.0, s1 = 0.0;
  const int n = quadrature_n;
  for (int i = 0; i < n; ++i) {
    double row0 = 0.0, row1 = 0.0;
    for (int j = 0; j < n; ++j) {
      TorusPoint2 x{(i + 0.5) / n, (j + 0.5) / n};
      FlowResult a = K.fiber(x, 0.0), b = K.fiber(x, 1.0);
      k1 = std::max({k1, std::fabs(a.theta), std::fabs(b.theta - 1.0)});
      row0 += std::log(a.derivative);
      row1 += std::log(b.derivative);
      for (double th : thetas) {
        double d = std::fabs(K.fiber(x, th).derivative);
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
      }
    }
    s0 += row0;
    s1 += row1;
  }
  rep.k1_max_defect = k1;
  rep.k1 = k1 <= 1e-12;
  rep.k3_min = dmin;
  rep.k3_max = dmax;
  rep.k3 = dmin >= rep.k3_lower * (1.0 - 1e-9) && dmax <= rep.k3_upper * (1.0 + 1e-9) && dmin > rep.lambda_inv &&
           dmax < rep.lambda;
  rep.k4_integral0 = s0 / (static_cast<double>(n) * n);
  rep.k4_integral1 = s1 / (static_cast<double>(n) * n);
  rep.k4 = rep.k4_integral0 < 0.0 && rep.k4_integral1 < 0.0 && rep.k4_integral0 <= rep.k4_bound + 1e-3 &&
           rep.k4_integral1 <= rep.k4_bound + 1e-3;

  rep.r_fixed_count = count_fixed(K, A.r(), 10000);
  rep.s_fixed_count = count_fixed(K, A.s(), 10000);
  rep.r_mult0 = K.fiber(A.r(), 0.0).derivative;
  rep.r_mult1 = K.fiber(A.r(), 1.0).derivative;
  rep.s_mult0 = K.fiber(A.s(), 0.0).derivative;
  rep.s_mult1 = K.fiber(A.s(), 1.0).derivative;
  const double sink = std::exp(-kPi * t), source = std::exp(kPi * t);
  rep.k2 = rep.r_fixed_count == 2 && rep.s_fixed_count == 2 && std::fabs(rep.r_mult0 - sink) <= 1e-6 &&
           std::fabs(rep.r_mult1 - source) <= 1e-6 && std::fabs(rep.s_mult0 - source) <= 1e-6 &&
           std::fabs(rep.s_mult1 - sink) <= 1e-6 && t > 0.0;
  return rep;
}

}  // namespace kan3
