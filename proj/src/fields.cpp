#include "kan3/fields.hpp"

#include <cmath>

#include "kan3/bump.hpp"

namespace kan3 {

namespace {
constexpr double kPi = std::numbers::pi;
}

FieldSpec::FieldSpec(DomainLayout layout, const FieldOptions& opt) : layout_(std::move(layout)), opt_(opt) {
  const double eps = layout_.epsilon();
  const double hw = opt_.beta2_half_width;
  double lo = eps + hw, hi = 1.0 - eps - hw;
  if (!(opt_.theta0 > 0.0 && opt_.theta0 < 1.0) || lo > hi) {
    throw Error(ErrorKind::InvalidArgument, "theta0 / beta2 window incompatible with epsilon");
  }
  auto g = [&](double c) {
    center_ = c;
    return opt_.theta0 - window(opt_.theta0);
  };
  if (g(lo) > 0.0 || g(hi) < 0.0) throw Error(ErrorKind::InvalidArgument, "theta0 not reachable by beta2 window");
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0) hi = mid;
    else lo = mid;
  }
  center_ = 0.5 * (lo + hi);
}

double FieldSpec::window(double theta) const {
  const double hw = opt_.beta2_half_width;
  return smoothstep((theta - center_ + hw) / (2.0 * hw));
}

double FieldSpec::window_derivative(double theta) const {
  const double hw = opt_.beta2_half_width;
  return smoothstep_derivative((theta - center_ + hw) / (2.0 * hw)) / (2.0 * hw);
}

double FieldSpec::beta1(double theta) const {
  const double eps = epsilon();
  double u = std::fabs(theta - 0.5);
  return 1.0 - smoothstep((u - eps) / (0.5 - 2.0 * eps));
}

double FieldSpec::beta1_derivative(double theta) const {
  const double eps = epsilon();
  double u = std::fabs(theta - 0.5);
  double d = -smoothstep_derivative((u - eps) / (0.5 - 2.0 * eps)) / (0.5 - 2.0 * eps);
  return theta >= 0.5 ? d : -d;
}

double FieldSpec::beta2(double theta) const { return theta - window(theta); }

double FieldSpec::beta2_derivative(double theta) const { return 1.0 - window_derivative(theta); }

double FieldSpec::alpha2(TorusPoint2 x) const {
  Vec2 l = layout_.box_q().local(x);
  double a = std::fabs(l.x), b = std::fabs(l.y);
  if (a >= opt_.alpha2_support || b >= opt_.alpha2_support) return 0.0;
  return plateau_bump(a, opt_.alpha2_plateau, opt_.alpha2_support) *
         plateau_bump(b, opt_.alpha2_plateau, opt_.alpha2_support);
}

VerticalField FieldSpec::field_X(const Placement& pl) const {
  switch (pl.region) {
    case Region::S: return {FiberKind::SinPi, pl.alpha1, this};
    case Region::R: return {FiberKind::SinPi, -pl.alpha1, this};
    case Region::C:
    case Region::U2: return {FiberKind::Sin2Pi, -pl.alpha1, this};
    case Region::C2Orbit: return {FiberKind::Beta1Sin2Pi, -pl.alpha1, this};
    case Region::Q:
    case Region::None: break;
  }
  return {FiberKind::Zero, 0.0, this};
}

VerticalField FieldSpec::field_X(TorusPoint2 x) const { return field_X(layout_.place(x)); }

VerticalField FieldSpec::field_Y(TorusPoint2 x) const {
  double a = alpha2(x);
  if (a == 0.0) return {FiberKind::Zero, 0.0, this};
  return {FiberKind::Beta2, a, this};
}

double field_value(const VerticalField& f, double theta) {
  if (theta == 0.0 || theta == 1.0) return 0.0;
  switch (f.kind) {
    case FiberKind::Zero: return 0.0;
    case FiberKind::SinPi: return f.coef * std::sin(kPi * theta);
    case FiberKind::Sin2Pi: return f.coef * std::sin(2.0 * kPi * theta);
    case FiberKind::Beta1Sin2Pi: return f.coef * f.spec->beta1(theta) * std::sin(2.0 * kPi * theta);
    case FiberKind::Beta2: return f.coef * f.spec->beta2(theta);
  }
  return 0.0;
}

double field_derivative(const VerticalField& f, double theta) {
  switch (f.kind) {
    case FiberKind::Zero: return 0.0;
    case FiberKind::SinPi: return f.coef * kPi * std::cos(kPi * theta);
    case FiberKind::Sin2Pi: return f.coef * 2.0 * kPi * std::cos(2.0 * kPi * theta);
    case FiberKind::Beta1Sin2Pi:
      return f.coef * (f.spec->beta1_derivative(theta) * std::sin(2.0 * kPi * theta) +
                       f.spec->beta1(theta) * 2.0 * kPi * std::cos(2.0 * kPi * theta));
    case FiberKind::Beta2: return f.coef * f.spec->beta2_derivative(theta);
  }
  return 0.0;
}

double eval_field_X(const FieldSpec& spec, const Point3& p) { return field_value(spec.field_X(p.base), p.theta); }

double eval_field_Y(const FieldSpec& spec, const Point3& p) { return field_value(spec.field_Y(p.base), p.theta); }

namespace {

// Orbit loops repeat the same few exponents.
double cached_exp(double k) {
  thread_local double keys[4] = {0.0, 0.0, 0.0, 0.0};
  thread_local double vals[4] = {1.0, 1.0, 1.0, 1.0};
  thread_local int next = 0;
  for (int i = 0; i < 4; ++i)
    if (keys[i] == k) return vals[i];
  double v = std::exp(k);
  keys[next] = k;
  vals[next] = v;
  next = (next + 1) & 3;
  return v;
}

// theta' = c sin(pi theta), theta in [0, 1/2].
FlowResult sinpi_lower(double c, double t, double theta) {
  const double k = 0.5 * c * kPi * t;
  const double b = 0.5 * kPi * theta;
  const double sb = std::sin(b), cb = std::cos(b);
  const double ek = cached_exp(k), emk = cached_exp(-k);
  FlowResult r;
  r.theta = (2.0 / kPi) * std::atan2(ek * sb, emk * cb);
  r.derivative = 1.0 / (ek * ek * sb * sb + emk * emk * cb * cb);
  return r;
}

// theta' = c sin(2 pi theta), theta in [0, 1/4].
FlowResult sin2pi_lower(double c, double t, double theta) {
  const double k = c * kPi * t;
  const double a = kPi * theta;
  const double sa = std::sin(a), ca = std::cos(a);
  const double ek = cached_exp(k), emk = cached_exp(-k);
  FlowResult r;
  r.theta = std::atan2(ek * sa, emk * ca) / kPi;
  r.derivative = 1.0 / (ek * ek * sa * sa + emk * emk * ca * ca);
  return r;
}

// theta' = c sin(2 pi theta), |theta - 1/2| <= 1/4, via tan(pi (theta - 1/2)).
FlowResult sin2pi_middle(double c, double t, double theta) {
  const double tau = std::tan(kPi * (theta - 0.5));
  const double e = cached_exp(-2.0 * kPi * c * t);
  const double tau_t = e * tau;
  FlowResult r;
  r.theta = 0.5 + std::atan(tau_t) / kPi;
  r.derivative = e * (1.0 + tau * tau) / (1.0 + tau_t * tau_t);
  return r;
}

FlowResult sinpi_flow(double c, double t, double theta) {
  if (theta == 0.0) return {0.0, std::exp(c * kPi * t), 0};
  if (theta == 1.0) return {1.0, std::exp(-c * kPi * t), 0};
  if (theta <= 0.5) return sinpi_lower(c, t, theta);
  FlowResult r = sinpi_lower(-c, t, 1.0 - theta);
  r.theta = 1.0 - r.theta;
  return r;
}

FlowResult sin2pi_flow(double c, double t, double theta) {
  const double e0 = cached_exp(2.0 * kPi * c * t);
  if (theta == 0.0) return {0.0, e0, 0};
  if (theta == 1.0) return {1.0, e0, 0};
  if (theta == 0.5) return {0.5, 1.0 / e0, 0};
  if (std::fabs(theta - 0.5) <= 0.25) return sin2pi_middle(c, t, theta);
  if (theta < 0.5) return sin2pi_lower(c, t, theta);
  FlowResult r = sin2pi_lower(c, t, 1.0 - theta);
  r.theta = 1.0 - r.theta;
  return r;
}

struct Rk4State {
  double theta;
  double log_j;
};

Rk4State rk4_integrate(const VerticalField& f, double t, double theta, int n) {
  const double h = t / n;
  double th = theta, lj = 0.0;
  for (int i = 0; i < n; ++i) {
    double k1 = field_value(f, th), l1 = field_derivative(f, th);
    double th2 = th + 0.5 * h * k1;
    double k2 = field_value(f, th2), l2 = field_derivative(f, th2);
    double th3 = th + 0.5 * h * k2;
    double k3 = field_value(f, th3), l3 = field_derivative(f, th3);
    double th4 = th + h * k3;
    double k4 = field_value(f, th4), l4 = field_derivative(f, th4);
    th += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    lj += h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
  }
  return {th, lj};
}

}  // namespace

FlowResult flow_rk4(const VerticalField& f, double t, double theta) {
  if (t == 0.0 || f.kind == FiberKind::Zero) return {theta, 1.0, 0};
  if (theta == 0.0 || theta == 1.0) return {theta, std::exp(t * field_derivative(f, theta)), 0};
  constexpr int kFloor = 1 << 14;
  int n = std::max(1, static_cast<int>(std::ceil(64.0 * std::fabs(t))));
  Rk4State prev = rk4_integrate(f, t, theta, n);
  while (true) {
    if (2 * n > kFloor) throw Error(ErrorKind::IntegratorDivergence, "RK4 step floor reached");
    n *= 2;
    Rk4State cur = rk4_integrate(f, t, theta, n);
    if (std::fabs(cur.theta - prev.theta) < 1e-10) {
      double th = std::clamp(cur.theta, 0.0, 1.0);
      return {th, std::exp(cur.log_j), n};
    }
    prev = cur;
  }
}

FlowResult flow(const VerticalField& f, double t, double theta) {
  if (t == 0.0 || f.kind == FiberKind::Zero || f.coef == 0.0) return {theta, 1.0, 0};
  switch (f.kind) {
    case FiberKind::SinPi: return sinpi_flow(f.coef, t, theta);
    case FiberKind::Sin2Pi: return sin2pi_flow(f.coef, t, theta);
    case FiberKind::Beta1Sin2Pi: {
      const double eps = f.spec->epsilon();
      if (theta <= eps || theta >= 1.0 - eps) return {theta, 1.0, 0};
      if (std::fabs(theta - 0.5) <= eps) {
        FlowResult r = sin2pi_flow(f.coef, t, theta);
        if (std::fabs(r.theta - 0.5) <= eps) return r;
      }
      return flow_rk4(f, t, theta);
    }
    case FiberKind::Beta2: return flow_rk4(f, t, theta);
    case FiberKind::Zero: break;
  }
  return {theta, 1.0, 0};
}

}  // namespace kan3
