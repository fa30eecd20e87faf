#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "kan3/bump.hpp"
#include "kan3/fields.hpp"
#include "kan3/parallel.hpp"

using namespace kan3;

namespace {

constexpr double kPi = std::numbers::pi;

const AnosovMap& anosov() {
  static const AnosovMap A = anosov_from_matrix({{{5, 2}, {2, 1}}});
  return A;
}

const FieldSpec& spec() {
  static const FieldSpec s(build_layout(anosov(), homoclinic_chart(anosov(), {1, 0}, 3), 0.05));
  return s;
}

// Fields of every kind, drawn from the layout.
std::vector<VerticalField> sample_fields() {
  const FieldSpec& f = spec();
  std::vector<VerticalField> out = {
      {FiberKind::SinPi, 1.0, nullptr},  {FiberKind::SinPi, -1.0, nullptr},  {FiberKind::SinPi, 0.37, nullptr},
      {FiberKind::Sin2Pi, -1.0, nullptr}, {FiberKind::Sin2Pi, -0.6, nullptr}, f.field_Y(anosov().q()),
  };
  for (const auto& b : f.layout().c2_orbit()) out.push_back(f.field_X(b.center));
  return out;
}

}  // namespace

TEST_CASE("bump building blocks") {
  CHECK(glue(0.0) == 0.0);
  CHECK(glue(-1.0) == 0.0);
  CHECK(glue(1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(smoothstep(0.0) == 0.0);
  CHECK(smoothstep(1.0) == 1.0);
  CHECK(smoothstep(0.5) == doctest::Approx(0.5));
  double prev = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    double x = i / 1000.0;
    double v = smoothstep(x);
    CHECK(v >= prev);
    prev = v;
    CHECK(smoothstep(x) + smoothstep(1.0 - x) == doctest::Approx(1.0));
    if (i > 0 && i < 1000) {
      double fd = (smoothstep(x + 1e-6) - smoothstep(x - 1e-6)) / 2e-6;
      CHECK(smoothstep_derivative(x) == doctest::Approx(fd).epsilon(1e-5));
    }
  }
  CHECK(plateau_bump(0.2, 0.5, 1.0) == 1.0);
  CHECK(plateau_bump(-0.5, 0.5, 1.0) == 1.0);
  CHECK(plateau_bump(1.2, 0.5, 1.0) == 0.0);
  CHECK(plateau_bump(0.75, 0.5, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("beta1 plateau and support") {
  const FieldSpec& f = spec();
  const double eps = f.epsilon();
  for (int i = 0; i <= 10000; ++i) {
    double th = i / 10000.0;
    double b = f.beta1(th);
    CHECK(b >= 0.0);
    CHECK(b <= 1.0);
    if (std::fabs(th - 0.5) < eps) CHECK(b == 1.0);
    if (th < eps || th > 1.0 - eps) CHECK(b == 0.0);
    if (th > 0.0 && th < 0.5) CHECK(f.beta1(th) >= f.beta1(th - 1e-4) - 1e-15);
  }
}

TEST_CASE("beta2 sign pattern and pinned derivative on a 10^4 grid") {
  const FieldSpec& f = spec();
  const double eps = f.epsilon(), th0 = f.theta0();
  CHECK(f.beta2(0.0) == 0.0);
  CHECK(std::fabs(f.beta2(1.0)) < 1e-15);
  CHECK(std::fabs(f.beta2(th0)) < 1e-12);
  double max_slope = 0.0;
  for (int i = 1; i < 10000; ++i) {
    double th = i / 10000.0;
    double b = f.beta2(th);
    if (th < th0 - 1e-9) CHECK(b > 0.0);
    if (th > th0 + 1e-9) CHECK(b < 0.0);
    if (th < eps || th > 1.0 - eps) CHECK(f.beta2_derivative(th) == doctest::Approx(1.0).epsilon(1e-12));
    max_slope = std::max(max_slope, std::fabs(f.beta2_derivative(th)));
    double fd = (f.beta2(th + 1e-7) - f.beta2(th - 1e-7)) / 2e-7;
    CHECK(f.beta2_derivative(th) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
  }
  CHECK(max_slope <= 2.0);
}

TEST_CASE("field X branch values") {
  const FieldSpec& f = spec();
  const AnosovMap& A = anosov();
  CHECK(eval_field_X(f, {A.s(), 0.5}) == doctest::Approx(1.0));
  CHECK(eval_field_X(f, {A.r(), 0.5}) == doctest::Approx(-1.0));
  CHECK(eval_field_X(f, {A.p(), 0.25}) == doctest::Approx(-1.0));
  CHECK(eval_field_X(f, {A.p(), 0.0}) == 0.0);
  int zeros = 0, u1 = 0;
  for (long k = 0; k < 20000; ++k) {
    TorusPoint2 x{counter_uniform(21, k, 0), counter_uniform(21, k, 1)};
    VerticalField v = f.field_X(x);
    for (double th : {0.0, 1.0}) CHECK(field_value(v, th) == 0.0);
    if (v.kind == FiberKind::Zero) {
      ++zeros;
      for (double th : {0.1, 0.3, 0.5, 0.9}) CHECK(eval_field_X(f, {x, th}) == 0.0);
    }
    if (f.layout().in_u1(x)) {
      ++u1;
      CHECK(eval_field_X(f, {x, 0.25}) == doctest::Approx(-1.0));
      CHECK(eval_field_X(f, {x, 0.75}) == doctest::Approx(1.0));
    }
  }
  CHECK(zeros > 0);
  CHECK(u1 > 10000);
}

TEST_CASE("field Y vanishes away from U_q") {
  const FieldSpec& f = spec();
  CHECK(f.alpha2(anosov().q()) == 1.0);
  CHECK(f.alpha2(anosov().p()) == 0.0);
  CHECK(eval_field_Y(f, {anosov().q(), 0.2}) == doctest::Approx(f.beta2(0.2)));
  CHECK(eval_field_Y(f, {anosov().p(), 0.2}) == 0.0);
}

TEST_CASE("flow closed form for sin(pi theta)") {
  VerticalField v{FiberKind::SinPi, 1.0, nullptr};
  const double expect = 2.0 / kPi * std::atan(std::exp(0.1 * kPi));
  CHECK(expect == doctest::Approx(0.598395).epsilon(1e-6));
  FlowResult r = flow(v, 0.1, 0.5);
  CHECK(std::fabs(r.theta - expect) < 1e-14);
  CHECK(r.substeps == 0);
  CHECK(std::fabs(flow_rk4(v, 0.1, 0.5).theta - expect) < 1e-10);
}

TEST_CASE("time zero and endpoints") {
  for (const auto& v : sample_fields()) {
    for (double th : {0.0, 0.13, 0.5, 0.77, 1.0}) {
      FlowResult r = flow(v, 0.0, th);
      CHECK(r.theta == th);
      CHECK(r.derivative == 1.0);
    }
    for (double t : {-0.3, 0.1, 0.25}) {
      CHECK(flow_theta(v, t, 0.0) == 0.0);
      CHECK(flow_theta(v, t, 1.0) == 1.0);
    }
  }
}

TEST_CASE("sink multiplier on the r fiber") {
  VerticalField v = spec().field_X(anosov().r());
  CHECK(v.kind == FiberKind::SinPi);
  CHECK(v.coef == doctest::Approx(-1.0));
  for (double t : {0.05, 0.1}) {
    CHECK(fiber_derivative(v, t, 0.0) == doctest::Approx(std::exp(-kPi * t)).epsilon(1e-12));
    CHECK(fiber_derivative(v, t, 1.0) == doctest::Approx(std::exp(kPi * t)).epsilon(1e-12));
  }
}

TEST_CASE("closed forms agree with RK4") {
  double worst = 0.0, worst_d = 0.0;
  for (const auto& v : sample_fields()) {
    if (v.kind != FiberKind::SinPi && v.kind != FiberKind::Sin2Pi) continue;
    for (int i = 0; i <= 200; ++i) {
      double th = i / 200.0;
      for (double t : {-0.2, 0.05, 0.1, 0.3}) {
        FlowResult a = flow(v, t, th), b = flow_rk4(v, t, th);
        worst = std::max(worst, std::fabs(a.theta - b.theta));
        worst_d = std::max(worst_d, std::fabs(a.derivative - b.derivative) / b.derivative);
      }
    }
  }
  CHECK(worst <= 1e-10);
  CHECK(worst_d <= 1e-8);
}

TEST_CASE("group law, monotonicity and finite differences") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> T(-0.3, 0.3), U(0.0, 1.0);
  for (const auto& v : sample_fields()) {
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      double t1 = T(rng), t2 = T(rng), th = U(rng);
      double a = flow_theta(v, t1 + t2, th);
      double b = flow_theta(v, t2, flow_theta(v, t1, th));
      worst = std::max(worst, std::fabs(a - b));
    }
    CHECK(worst <= 1e-9);

    double prev = -1.0;
    for (int i = 0; i <= 2000; ++i) {
      double th = flow_theta(v, 0.1, i / 2000.0);
      CHECK(th > prev);
      prev = th;
    }

    for (int k = 0; k < 200; ++k) {
      double th = 0.01 + 0.98 * U(rng);
      const double h = 1e-6;
      double fd = (flow_theta(v, 0.1, th + h) - flow_theta(v, 0.1, th - h)) / (2 * h);
      CHECK(fiber_derivative(v, 0.1, th) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}
