#include <cmath>
#include <memory>
#include <numbers>

#include "doctest.h"
#include "kan3/blender.hpp"
#include "kan3/kan_map.hpp"
#include "kan3/parallel.hpp"

using namespace kan3;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const KanMap> kan(double t) {
  static std::shared_ptr<const KanMap> k01, k005;
  auto& slot = t == 0.1 ? k01 : k005;
  if (!slot) {
    KanSetup s;
    s.t = t;
    slot = std::make_shared<const KanMap>(make_K(make_params(s)));
  }
  return slot;
}

Point3 random_point(std::uint64_t seed, std::uint64_t i) {
  return {{counter_uniform(seed, i, 0), counter_uniform(seed, i, 1)}, -1.0 + 2.0 * counter_uniform(seed, i, 2)};
}

}  // namespace

TEST_CASE("blender parameters") {
  const KanParams& p = kan(0.1)->params();
  CHECK(p.mu == doctest::Approx(std::exp(2.0 * 3 * 2.0 * kPi * 0.1)));
  CHECK(p.mu == doctest::Approx(43.376).epsilon(1e-4));
  CHECK(p.nu == doctest::Approx(p.mu - 1.0));
  CHECK(kan(0.05)->params().mu == doctest::Approx(6.586).epsilon(1e-3));
}

TEST_CASE("tori are fixed and the base is exactly A") {
  const KanMap& K = *kan(0.1);
  const AnosovMap& A = K.base();
  for (long i = 0; i < 2000; ++i) {
    Point3 x = random_point(1, i);
    Point3 y = K.apply(x);
    TorusPoint2 ax = A.apply(x.base);
    CHECK(y.base.x == ax.x);
    CHECK(y.base.y == ax.y);
    Point3 z0 = K.apply({x.base, 0.0});
    CHECK(z0.theta == 0.0);
    Point3 z1 = K.apply({x.base, -1.0});
    CHECK(z1.theta == -1.0);
    Point3 b0 = K.apply_inverse({ax, 0.0});
    CHECK(b0.theta == 0.0);
    CHECK(torus_distance(b0.base, x.base) < 1e-12);
  }
}

TEST_CASE("period-two orbit of P") {
  const KanMap& K = *kan(0.1);
  TorusPoint2 p = K.base().p();
  Point3 a = K.apply({p, 0.5});
  CHECK(a.theta == -0.5);
  Point3 b = K.apply({p, -0.5});
  CHECK(b.theta == 0.5);
}

TEST_CASE("f_t away from every support and on the r fiber") {
  const KanMap& K = *kan(0.1);
  const FieldSpec& F = K.fields();
  int outside = 0;
  for (long i = 0; i < 20000 && outside < 200; ++i) {
    Point3 x = random_point(2, i);
    if (F.field_X(x.base).kind != FiberKind::Zero || F.alpha2(x.base) != 0.0) continue;
    ++outside;
    double th = std::fabs(x.theta);
    CHECK(K.f_t({x.base, th}).theta == th);
  }
  CHECK(outside > 0);
  VerticalField vr{FiberKind::SinPi, -1.0, nullptr};
  for (double th : {0.1, 0.5, 0.9}) CHECK(K.f_t({K.base().r(), th}).theta == doctest::Approx(flow_theta(vr, 0.1, th)).epsilon(1e-14));
}

TEST_CASE("K is R composed with the odd extension") {
  const KanMap& K = *kan(0.1);
  for (long i = 0; i < 2000; ++i) {
    Point3 x = random_point(3, i);
    Point3 h = K.f_hat(x);
    Point3 k = K.apply(x);
    CHECK(theta_distance(k.theta, -h.theta) == 0.0);
    double phi = K.fiber(x.base, std::fabs(x.theta)).theta;
    double expect = x.theta >= 0.0 ? -phi : phi;
    CHECK(theta_distance(k.theta, expect) == 0.0);
  }
}

TEST_CASE("squares agree with the branch formula") {
  const KanMap& K = *kan(0.1);
  double worst = 0.0;
  for (long i = 0; i < 2000; ++i) {
    Point3 x = random_point(4, i);
    Point3 kk = K.apply(K.apply(x));
    TorusPoint2 ax = K.base().apply(x.base);
    double th = std::fabs(x.theta);
    double two = K.fiber(ax, K.fiber(x.base, th).theta).theta;
    double expect = x.theta >= 0.0 ? two : -two;
    worst = std::max(worst, theta_distance(kk.theta, expect));
    Point3 hh = K.f_hat(K.f_hat(x));
    worst = std::max(worst, theta_distance(hh.theta, kk.theta));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("region swap on 10^5 points") {
  const KanMap& K = *kan(0.1);
  long bad = 0;
  for (long i = 0; i < 100000; ++i) {
    Point3 x = random_point(5, i);
    if (x.theta == 0.0 || x.theta == -1.0) continue;
    Point3 y = K.apply(x);
    bool upper = x.theta > 0.0;
    if (upper ? !(y.theta > -1.0 && y.theta < 0.0) : !(y.theta > 0.0 && y.theta < 1.0)) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("fibers reverse orientation") {
  const KanMap& K = *kan(0.1);
  for (long i = 0; i < 200; ++i) {
    TorusPoint2 x = random_point(6, i).base;
    double prev = K.apply({x, 0.0}).theta;
    for (int k = 1; k < 400; ++k) {
      double th = k / 400.0;
      double y = K.apply({x, th}).theta;
      CHECK(y < prev);
      prev = y;
    }
  }
}

TEST_CASE("inverse round trip") {
  for (double t : {0.05, 0.1}) {
    const KanMap& K = *kan(t);
    double worst = 0.0;
    for (long i = 0; i < 1000; ++i) {
      Point3 x = random_point(7, i);
      Point3 back = K.apply_inverse(K.apply(x));
      worst = std::max({worst, torus_distance(back.base, x.base), theta_distance(back.theta, x.theta)});
      Point3 fwd = K.apply(K.apply_inverse(x));
      worst = std::max(worst, theta_distance(fwd.theta, x.theta));
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("fiber derivative matches finite differences") {
  const KanMap& K = *kan(0.1);
  for (long i = 0; i < 500; ++i) {
    Point3 x = random_point(8, i);
    if (std::fabs(x.theta) < 0.01 || std::fabs(x.theta) > 0.99) continue;
    const double h = 1e-7;
    double a = K.apply({x.base, x.theta + h}).theta, b = K.apply({x.base, x.theta - h}).theta;
    double fd = wrap_theta(a - b) / (2 * h);
    CHECK(K.fiber_derivative(x) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("composite over the C2 window is the blender affine map") {
  const KanMap& K = *kan(0.1);
  const double mu = K.params().mu, L = std::pow(K.base().lambda(), 6);
  const double w = 2.0 / L;
  double worst = 0.0;
  for (long i = 0; i < 500; ++i) {
    Vec3 v{-2.0 + 4.0 * counter_uniform(9, i, 0), 1.0 - w + 2.0 * w * counter_uniform(9, i, 1),
           1.0 - 3.0 / mu + 4.0 / mu * counter_uniform(9, i, 2)};
    Point3 x = kan_point(K, v);
    for (int k = 0; k < 6; ++k) x = K.f_t(x);
    Vec3 got = kan_chart(K, x);
    Vec3 want{v[0] / L + 1.0, L * (v[1] - 1.0), mu * (v[2] - 1.0) + 1.0};
    for (int k = 0; k < 3; ++k) worst = std::max(worst, std::fabs(got[k] - want[k]));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("Kan conditions at t = 0.1 and t = 0.05") {
  for (double t : {0.1, 0.05}) {
    ConditionReport r = verify_kan_conditions(*kan(t), 128);
    CHECK(r.k1);
    CHECK(r.k1_max_defect <= 1e-12);
    CHECK(r.k2);
    CHECK(r.r_fixed_count == 2);
    CHECK(r.s_fixed_count == 2);
    CHECK(r.r_mult0 == doctest::Approx(std::exp(-kPi * t)).epsilon(1e-6));
    CHECK(r.r_mult1 == doctest::Approx(std::exp(kPi * t)).epsilon(1e-6));
    CHECK(r.k3);
    CHECK(r.k3_min >= std::exp(-2 * kPi * t) - 1e-12);
    CHECK(r.k3_max <= std::exp(2 * kPi * t) + 1e-12);
    CHECK(r.k3_min > r.lambda_inv);
    CHECK(r.k3_max < r.lambda);
    CHECK(r.k4);
    CHECK(r.k4_bound == doctest::Approx(kPi * t * (0.05 - 1.0)));
    CHECK(r.k4_integral0 < r.k4_bound);
    CHECK(r.k4_integral1 < r.k4_bound);
  }
  CHECK(std::exp(-0.2 * kPi) == doctest::Approx(0.5335).epsilon(1e-4));
  CHECK(std::exp(0.2 * kPi) == doctest::Approx(1.8745).epsilon(1e-4));
}

TEST_CASE("t = 0 is not a Kan example") {
  KanSetup s;
  s.t = 0.0;
  ConditionReport r = verify_kan_conditions(make_K(make_params(s)), 64);
  CHECK(r.k4_integral0 == 0.0);
  CHECK(r.k4_integral1 == 0.0);
  CHECK_FALSE(r.k4);
}

TEST_CASE("torus breaking") {
  auto K = kan(0.1);
  PerturbedMap g0 = break_torus(K, 0.0, TorusSelector::Zero);
  for (long i = 0; i < 1000; ++i) {
    Point3 x = random_point(10, i);
    Point3 a = g0.apply(x), b = K->apply(x);
    CHECK(a.theta == b.theta);
    CHECK(a.base.x == b.base.x);
  }
  PerturbedMap g = break_torus(K, 0.02, TorusSelector::Zero);
  TorusPoint2 c = g.ball_center();
  CHECK(g.rho(c) == 1.0);
  CHECK(g.apply({c, 0.0}).theta == doctest::Approx(-0.02).epsilon(1e-14));
  CHECK(g.apply({c, 0.0}).base.x == K->base().apply(c).x);
  for (long i = 0; i < 2000; ++i) {
    Point3 x = random_point(11, i);
    CHECK(g.apply({x.base, -1.0}).theta == -1.0);
    Point3 back = g.apply_inverse(g.apply(x));
    CHECK(theta_distance(back.theta, x.theta) < 1e-9);
  }
  try {
    break_torus(K, 0.03, TorusSelector::Zero);
    FAIL("eta must be below epsilon / 2");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
}

TEST_CASE("su-torus status") {
  auto K = kan(0.1);
  CHECK(su_torus_status(*K, TorusSelector::Zero, 40, 1e-6) == TorusStatus::Continuation);
  CHECK(su_torus_status(*K, TorusSelector::One, 40, 1e-6) == TorusStatus::Continuation);
  PerturbedMap g = break_torus(K, 0.02, TorusSelector::Zero);
  CHECK(su_torus_status(g, TorusSelector::Zero, 40, 1e-6) == TorusStatus::Broken);
  CHECK(su_torus_status(g, TorusSelector::One, 40, 1e-6) == TorusStatus::Continuation);
}
