#include <algorithm>
#include <cmath>

#include "kan3/bump.hpp"
#include "kan3/kan_map.hpp"

namespace kan3 {

const char* to_string(TorusStatus s) { return s == TorusStatus::Continuation ? "Continuation" : "Broken"; }

PerturbedMap::PerturbedMap(std::shared_ptr<const KanMap> base_map, double eta, TorusSelector which,
                           TorusPoint2 ball_center, double ball_radius)
    : k_(std::move(base_map)), eta_(eta), which_(which), center_(ball_center), radius_(ball_radius) {}

double PerturbedMap::rho(TorusPoint2 x) const {
  double d = torus_distance(center_, x) / radius_;
  if (d >= 1.0) return 0.0;
  return plateau_bump(d, 0.5, 1.0);
}

double PerturbedMap::sigma(double theta) const {
  double a = std::fabs(wrap_theta(theta));
  double d = which_ == TorusSelector::Zero ? a : 1.0 - a;
  return plateau_bump(d, 0.1, 0.3);
}

double PerturbedMap::sigma_derivative(double theta) const {
  double w = wrap_theta(theta);
  double a = std::fabs(w);
  double sg = w >= 0.0 ? 1.0 : -1.0;
  if (which_ == TorusSelector::Zero) return plateau_bump_derivative(a, 0.1, 0.3) * sg;
  return -plateau_bump_derivative(1.0 - a, 0.1, 0.3) * sg;
}

double PerturbedMap::translate_fiber(TorusPoint2 x, double theta) const {
  if (eta_ == 0.0) return theta;
  double r = rho(x);
  if (r == 0.0) return theta;
  return wrap_theta(theta + eta_ * r * sigma(theta));
}

Point3 PerturbedMap::apply(const Point3& p) const { return k_->apply({p.base, translate_fiber(p.base, p.theta)}); }

double PerturbedMap::fiber_derivative(const Point3& p) const {
  Point3 q{p.base, translate_fiber(p.base, p.theta)};
  double r = rho(p.base);
  return k_->fiber_derivative(q) * (1.0 + eta_ * r * sigma_derivative(p.theta));
}

Point3 PerturbedMap::apply_inverse(const Point3& p) const {
  Point3 q = k_->apply_inverse(p);
  if (eta_ == 0.0) return q;
  double amp = eta_ * rho(q.base);
  if (amp == 0.0) return q;
  auto F = [&](double th) { return th + amp * sigma(th) - q.theta; };
  double lo = q.theta - amp, hi = q.theta;
  int it = 0;
  for (; it < 200 && hi - lo > 1e-15; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (F(mid) > 0.0) hi = mid;
    else lo = mid;
  }
  if (it == 200) throw Error(ErrorKind::BisectionFailure, "translation inverse did not converge");
  return {q.base, wrap_theta(0.5 * (lo + hi))};
}

PerturbedMap break_torus(std::shared_ptr<const KanMap> K, double eta, TorusSelector which) {
  const DomainLayout& L = K->layout();
  const double eps = L.epsilon();
  if (!(eta >= 0.0 && eta < 0.5 * eps)) throw Error(ErrorKind::InvalidArgument, "eta must lie in [0, epsilon/2)");
  const double gap = L.options().u2_margin * eps;
  const double radius = 0.45 * gap;
  const AnosovMap& A = K->base();
  const ChartBox* boxes[] = {&L.box_r(), &L.box_s(), &L.box_q()};
  for (const ChartBox* b : boxes) {
    for (Vec2 dir : {A.e_s(), (-1.0) * A.e_s(), A.e_u(), (-1.0) * A.e_u()}) {
      double reach = std::max(norm(b->E1), norm(b->E2));
      TorusPoint2 c = translate(b->center, (reach + 0.5 * gap) * dir);
      double d = L.distance_to_excluded(c);
      if (d - radius > 0.0 && d + radius < gap) return PerturbedMap(K, eta, which, c, radius);
    }
  }
  throw Error(ErrorKind::SupportCollision, "no admissible base ball");
}

TorusStatus su_torus_status(const SkewMap& g, TorusSelector which, int depth, double tol, int samples,
                            double half_length) {
  if (depth < 1) throw Error(ErrorKind::InvalidArgument, "depth must be >= 1");
  if (samples < 2) throw Error(ErrorKind::InvalidArgument, "need at least two samples");
  const AnosovMap& A = g.base();
  const double level = which == TorusSelector::Zero ? 0.0 : -1.0;
  auto dist = [&](double th) {
    double a = std::fabs(th);
    return which == TorusSelector::Zero ? a : 1.0 - a;
  };
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    double s = -half_length + 2.0 * half_length * i / (samples - 1);
    Point3 x{translate(A.p(), s * A.e_u()), level};
    for (int k = 0; k < depth; ++k) {
      x = g.apply(x);
      worst = std::max(worst, dist(x.theta));
    }
  }
  if (worst <= tol) return TorusStatus::Continuation;
  if (worst > 2.0 * tol) return TorusStatus::Broken;
  throw Error(ErrorKind::Inconclusive, "tube escape within 2 tol");
}

}  // namespace kan3
