#include <algorithm>
#include <cmath>
#include <string>
#include <memory>

#include "doctest.h"
#include "kan3/ergodic.hpp"
#include "kan3/parallel.hpp"

using namespace kan3;

namespace {

std::shared_ptr<const KanMap> kan() {
  static std::shared_ptr<const KanMap> k;
  if (!k) k = std::make_shared<const KanMap>(make_K(make_params(KanSetup{})));
  return k;
}

Point3 random_point(std::uint64_t seed, std::uint64_t i) {
  return {{counter_uniform(seed, i, 0), counter_uniform(seed, i, 1)}, -1.0 + 2.0 * counter_uniform(seed, i, 2)};
}

}  // namespace

TEST_CASE("Birkhoff averages of a coboundary telescope") {
  const KanMap& K = *kan();
  Observable h = [](const Point3& p) { return std::sin(3.0 * p.theta) + p.base.x; };
  for (long n : {10L, 100L, 1000L}) {
    for (long i = 0; i < 20; ++i) {
      Point3 x = random_point(31, i);
      Observable cob = [&](const Point3& p) { return h(K.apply(p)) - h(p); };
      CHECK(std::fabs(birkhoff(K, x, cob, n)) <= 2.0 * 2.0 / n + 1e-12);
    }
  }
}

TEST_CASE("center Lyapunov exponent is shift invariant") {
  const KanMap& K = *kan();
  const long n = 2000;
  for (long i = 0; i < 10; ++i) {
    Point3 x = random_point(32, i);
    double a = center_lyapunov(K, x, n);
    double b = center_lyapunov(K, K.apply(x), n);
    CHECK(std::fabs(a - b) <= 10.0 / n);
  }
  Point3 on0{{0.3, 0.7}, 0.0};
  CHECK(center_lyapunov(K, on0, 1000) < 0.0);
}

TEST_CASE("empirical measures") {
  const KanMap& K = *kan();
  EmpiricalMeasure m = push_u_disk(K, random_point(33, 0), 0.2, 50, 200);
  m.normalize();
  CHECK(std::fabs(m.total_weight() - 1.0) <= 1e-12);
  CHECK(m.tube_mass(TorusSelector::Zero, 2.0) == doctest::Approx(1.0));
  CHECK(tv_binned(m, m) == 0.0);
  EmpiricalMeasure pf = push_forward(K, m);
  CHECK(std::fabs(pf.total_weight() - 1.0) <= 1e-12);
  CHECK(tv_binned(m, pf) <= 1.0);

  EmpiricalMeasure torus;
  for (long i = 0; i < 500; ++i) torus.samples.push_back({{{counter_uniform(34, i), counter_uniform(34, i, 1)}, 0.0}, 1.0});
  torus.normalize();
  EmpiricalMeasure img = push_forward(K, torus);
  for (const auto& w : img.samples) CHECK(w.p.theta == 0.0);
  CHECK(torus.tube_mass(TorusSelector::Zero, 1e-9) == doctest::Approx(1.0));
  CHECK(torus.tube_mass(TorusSelector::One, 0.5) == 0.0);
}

TEST_CASE("strong unstable direction converges") {
  UDirection d = strong_unstable_direction(*kan(), random_point(35, 0));
  CHECK(d.change <= 1e-6);
  CHECK(std::isfinite(d.theta_slope));
}

TEST_CASE("basin classification is thread independent") {
  const KanMap& K = *kan();
  GridSpec g{8, 8, 5, 1};
  BasinGrid a = classify_basins(K, g, 400, 100, 0.05, 7, 1);
  CHECK(a.labels.size() == g.cells());
  for (int th : {4, 8}) CHECK(classify_basins(K, g, 400, 100, 0.05, 7, th).labels == a.labels);
  CHECK(a.count(BasinLabel::Torus0) + a.count(BasinLabel::Torus1) + a.count(BasinLabel::Undecided) == g.cells());
  CHECK(classify_orbit(K, {{0.3, 0.6}, 0.0}, 100, 20, 0.05) == BasinLabel::Torus0);
  CHECK(classify_orbit(K, {{0.3, 0.6}, -1.0}, 100, 20, 0.05) == BasinLabel::Torus1);
}

TEST_CASE("intermingled test on synthetic labels") {
  CoarseSpec c{2, 2, 2};
  std::vector<Point3> pts;
  std::vector<std::uint8_t> all0, mixed;
  for (long i = 0; i < 4000; ++i) {
    pts.push_back(random_point(36, i));
    all0.push_back(0);
    mixed.push_back(static_cast<std::uint8_t>(i % 2));
  }
  IntermingleReport r0 = intermingled_test(pts, all0, c);
  CHECK(r0.cells_total == 8);
  CHECK(r0.cells_both == 0);
  CHECK(r0.pass_fraction == 0.0);
  CHECK(r0.decided_fraction == 1.0);
  IntermingleReport r1 = intermingled_test(pts, mixed, c);
  CHECK(r1.cells_both == 8);
  CHECK(r1.pass_fraction == 1.0);
  CHECK(r1.torus0 + r1.torus1 == 4000);
}

TEST_CASE("manifold coverage") {
  const KanMap& K = *kan();
  CoverageSpec s;
  s.L = 0.0;
  CoverageReport bare = manifold_coverage(K, CoverageObject::ForwardFiberP, 0, s);
  CHECK(bare.depth_full == -1);
  CHECK(std::count(bare.hit.begin(), bare.hit.end(), 1) == 8);
  CHECK(coverage_cell(s, {{0.0, 0.0}, -1.0}) == 0);
  CHECK(coverage_cell(s, {{0.99, 0.99}, 0.99}) == s.nx * s.ny * s.nth - 1u);

  CoverageSpec full;
  CoverageReport fwd = manifold_coverage(K, CoverageObject::ForwardFiberP, 12, full);
  CHECK(fwd.fraction == 1.0);
  CHECK(fwd.depth_full >= 1);
  CoverageReport bwd = manifold_coverage(K, CoverageObject::BackwardFiberQ, 12, full);
  CHECK(bwd.fraction == 1.0);
  CHECK_FALSE(bwd.budget_exhausted);
  CHECK(std::string(to_string(CoverageObject::BackwardStableP)) == "backward_stable_p");
}

TEST_CASE("mixing parity") {
  const KanMap& K = *kan();
  const Region3 Ua{0, 1, 0, 1, 0.05, 0.95};
  const Region3 Ud{0, 1, 0, 1, -0.95, -0.05};
  MixingTable t = mixing_diagnostic(K, {{"Ua-Ua", Ua, Ua}, {"Ua-Ud", Ua, Ud}}, 12, 2000, 3, 1);
  for (int n = 1; n <= 12; n += 2) CHECK_FALSE(t.hit(0, n));
  for (int n = 2; n <= 12; n += 2) CHECK_FALSE(t.hit(1, n));
  CHECK(t.first_hit(1) == 1);
  CHECK(t.counts[1][1] > 1000);
  MixingTable t4 = mixing_diagnostic(K, {{"Ua-Ua", Ua, Ua}, {"Ua-Ud", Ua, Ud}}, 12, 2000, 3, 4);
  CHECK(t4.counts == t.counts);
  CHECK(standard_region_pairs().size() == 8);
  try {
    mixing_diagnostic(K, t.pairs, 0, 10, 0);
    FAIL("expected InvalidArgument");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
}
