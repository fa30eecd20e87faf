#include "kan3/blender.hpp"

#include <algorithm>
#include <cmath>

#include "kan3/parallel.hpp"

namespace kan3 {

namespace {

Box3 intersect(const Box3& a, const Box3& b) {
  Box3 r;
  for (int i = 0; i < 3; ++i) {
    r.lo[i] = std::max(a.lo[i], b.lo[i]);
    r.hi[i] = std::min(a.hi[i], b.hi[i]);
  }
  return r;
}

bool disjoint(const Box3& a, const Box3& b) {
  for (int i = 0; i < 3; ++i)
    if (a.hi[i] < b.lo[i] || b.hi[i] < a.lo[i]) return true;
  return false;
}

// Affine branch k in {1,2}: v -> D v + shift.
Vec3 branch_apply(const BlenderModel& m, int k, const Vec3& v) {
  if (k == 1) return {v[0] / m.lambda_pow, m.lambda_pow * v[1], m.mu * v[2]};
  if (!std::isfinite(m.O[0])) return {v[0] / m.lambda_pow + 1.0, m.lambda_pow * (v[1] - 1.0), m.mu * (v[2] - 1.0) + 1.0};
  // saddle-centered form
  const double o = m.O[0];
  return {(v[0] - o) / m.lambda_pow + o, m.lambda_pow * (v[1] - o) + o, m.mu * (v[2] - 1.0) + 1.0};
}

// Preimage under branch k of an axis box (all multipliers positive).
Box3 branch_preimage(const BlenderModel& m, int k, const Box3& b) {
  Box3 r;
  if (k == 1) {
    r.lo = {b.lo[0] * m.lambda_pow, b.lo[1] / m.lambda_pow, b.lo[2] / m.mu};
    r.hi = {b.hi[0] * m.lambda_pow, b.hi[1] / m.lambda_pow, b.hi[2] / m.mu};
  } else {
    r.lo = {(b.lo[0] - 1.0) * m.lambda_pow, b.lo[1] / m.lambda_pow + 1.0, (b.lo[2] - 1.0) / m.mu + 1.0};
    r.hi = {(b.hi[0] - 1.0) * m.lambda_pow, b.hi[1] / m.lambda_pow + 1.0, (b.hi[2] - 1.0) / m.mu + 1.0};
  }
  return r;
}

}  // namespace

BlenderModel make_blender(double lambda_pow, double mu, double eps0) {
  if (!(lambda_pow > 0.0 && mu > 0.0)) throw Error(ErrorKind::InvalidArgument, "multipliers must be positive");
  BlenderModel m;
  m.lambda_pow = lambda_pow;
  m.mu = mu;
  m.nu = mu - 1.0;
  m.eps0 = eps0;
  m.gamma1 = intersect(m.cube, branch_preimage(m, 1, m.cube));
  m.gamma2 = intersect(m.cube, branch_preimage(m, 2, m.cube));
  double o = lambda_pow != 1.0 ? 1.0 / (1.0 - 1.0 / lambda_pow) : INFINITY;
  m.O = {o, o, 1.0};
  m.lambda_prime = 0.5 * (mu + 1.0);
  return m;
}

BlenderModel default_blender() {
  double lambda = 3.0 + 2.0 * std::sqrt(2.0);
  return make_blender(std::pow(lambda, 6), std::exp(0.6));
}

BlenderModel blender_from_kan(const KanMap& K) {
  return make_blender(std::pow(K.base().lambda(), 2 * K.params().n0), K.params().mu);
}

Vec3 model_map(const BlenderModel& m, const Vec3& v) {
  if (!m.gamma1.empty() && m.gamma1.contains(v)) return branch_apply(m, 1, v);
  if (!m.gamma2.empty() && m.gamma2.contains(v)) return branch_apply(m, 2, v);
  throw Error(ErrorKind::OutsideBranches, "point outside Gamma1 and Gamma2");
}

Box3 branch_image(const BlenderModel& m, int branch) {
  const Box3& g = branch == 1 ? m.gamma1 : m.gamma2;
  return {branch_apply(m, branch, g.lo), branch_apply(m, branch, g.hi)};
}

GeometryReport certify_geometry(const BlenderModel& m) {
  GeometryReport rep;
  if (m.gamma1.empty() || m.gamma2.empty()) return rep;
  Box3 f1 = branch_image(m, 1), f2 = branch_image(m, 2);
  auto full_crossing = [&](const Box3& b) {
    constexpr double tol = 1e-9;
    return b.lo[1] <= -2.0 + tol && b.hi[1] >= 2.0 - tol && b.lo[2] <= -2.0 + tol && b.hi[2] >= 2.0 - tol;
  };
  rep.two_components = disjoint(f1, f2) && disjoint(m.gamma1, m.gamma2) && full_crossing(f1) && full_crossing(f2);
  auto off_u = [](const Box3& b) { return b.lo[1] > -2.0 && b.hi[1] < 2.0; };
  rep.avoids_u_boundary = off_u(m.gamma1) && off_u(m.gamma2);
  auto off_ss = [](const Box3& b) { return b.lo[0] > -2.0 && b.hi[0] < 2.0; };
  rep.avoids_ss_boundary = off_ss(f1) && off_ss(f2);
  return rep;
}

bool certify_cones_diag(double a_s, double a_u, double a_c, double eps0, double growth) {
  if (!(eps0 > 0.0)) return false;
  const double widen = std::sqrt(1.0 + eps0 * eps0);
  // C^uu: (s, c) against u.
  bool uu = std::max(a_s, a_c) < a_u && a_u / widen > 1.0;
  // C^u: s against (u, c), growth at least `growth`.
  const double cu = std::min(a_u, a_c);
  bool u = a_s < cu && cu / widen >= growth;
  // C^ss under the inverse: (u, c) against s.
  bool ss = a_s < cu && (1.0 / a_s) / widen > 1.0;
  return uu && u && ss;
}

bool certify_cones(const BlenderModel& m, double eps0) {
  return certify_cones_diag(1.0 / m.lambda_pow, m.lambda_pow, m.mu, eps0, m.lambda_prime);
}

StripResult strip_step(const BlenderModel& m, const CenterInterval& I) {
  if (!(I.a > 0.0 && I.b < 1.0 && I.a < I.b)) throw Error(ErrorKind::InvalidInterval, "interval not inside (0,1)");
  if (I.b <= 1.0 / m.mu) return {StripOutcome::Grown, {m.mu * I.a, m.mu * I.b}};
  double a2 = m.mu * (I.a - 1.0) + 1.0, b2 = m.mu * (I.b - 1.0) + 1.0;
  if (a2 >= 0.0) return {StripOutcome::Grown, {a2, b2}};
  if (b2 > 0.0) return {StripOutcome::HitsP, {a2, b2}};
  return {StripOutcome::Lost, {a2, b2}};
}

int hits_bound(const BlenderModel& m, double w0) {
  return static_cast<int>(std::ceil(std::log((1.0 - 1.0 / m.mu) / w0) / std::log(m.mu))) + 2;
}

DichotomyReport verify_dichotomy(const BlenderModel& m, int n_samples, int max_iter, std::uint64_t seed,
                                 int threads) {
  if (n_samples < 1) throw Error(ErrorKind::InvalidArgument, "n_samples must be >= 1");
  DichotomyReport rep;
  rep.n_samples = n_samples;
  rep.steps.assign(n_samples, 0);
  rep.bounds.assign(n_samples, 0);
  rep.widths.assign(n_samples, 0.0);
  std::vector<double> ratio(n_samples, INFINITY);
  std::vector<char> ratio_bad(n_samples, 0), failed(n_samples, 0);
  const double lw = std::log(1e-6), hw = std::log(0.3);
  parallel_for(static_cast<std::size_t>(n_samples), threads, [&](std::size_t i) {
    double w0 = std::exp(lw + (hw - lw) * counter_uniform(seed, i, 0));
    double a = (1.0 - w0) * counter_uniform(seed, i, 1);
    CenterInterval I{a, a + w0};
    int bound = std::min(hits_bound(m, w0), max_iter);
    rep.widths[i] = w0;
    rep.bounds[i] = bound;
    int steps = 0;
    bool hit = false;
    while (steps < bound) {
      StripResult r = strip_step(m, I);
      ++steps;
      if (r.outcome == StripOutcome::HitsP) {
        hit = true;
        break;
      }
      if (r.outcome == StripOutcome::Lost) break;
      double q = r.interval.width() / I.width();
      ratio[i] = std::min(ratio[i], q);
      if (q < m.lambda_prime - 1e-9) ratio_bad[i] = 1;
      I = r.interval;
      if (!(I.a > 0.0 && I.b < 1.0)) break;
    }
    rep.steps[i] = steps;
    failed[i] = hit ? 0 : 1;
  });
  rep.min_ratio = INFINITY;
  for (int i = 0; i < n_samples; ++i) {
    rep.failures += failed[i];
    rep.ratio_violations += ratio_bad[i];
    rep.max_steps = std::max(rep.max_steps, rep.steps[i]);
    rep.min_ratio = std::min(rep.min_ratio, ratio[i]);
  }
  return rep;
}

bool superposition_member(const BlenderModel& m, const std::vector<Vec3>& seg) {
  if (seg.size() < 2) throw Error(ErrorKind::TooFewSamples, "segment needs at least two samples");
  for (std::size_t i = 1; i < seg.size(); ++i) {
    double ds = seg[i][0] - seg[i - 1][0], du = seg[i][1] - seg[i - 1][1], dc = seg[i][2] - seg[i - 1][2];
    if (std::hypot(ds, dc) > m.eps0 * std::fabs(du)) return false;
  }
  const Vec3& first = seg.front();
  const Vec3& last = seg.back();
  bool spans = std::fabs(first[1]) >= 2.0 - 1e-12 && std::fabs(last[1]) >= 2.0 - 1e-12 && first[1] * last[1] < 0.0;
  if (!spans) return false;
  for (const Vec3& v : seg)
    if (!(v[2] > 0.0 && v[2] < 1.0)) return false;
  return true;
}

Vec3 kan_chart(const KanMap& K, const Point3& p) {
  Vec2 c = K.params().chart.to_chart(p.base);
  return {c.x, c.y, K.to_center(p.theta)};
}

Point3 kan_point(const KanMap& K, const Vec3& v) {
  return {K.params().chart.from_chart({v[0], v[1]}), K.from_center(v[2])};
}

double consistency_error_at(const KanMap& K, const BlenderModel& m, const Vec3& v) {
  if (!(m.gamma1.contains(v) || m.gamma2.contains(v))) throw Error(ErrorKind::OutOfWindow, "sample outside branches");
  Point3 x = kan_point(K, v);
  for (int i = 0; i < 2 * K.params().n0; ++i) x = K.apply(x);
  Vec3 got = kan_chart(K, x);
  Vec3 want = model_map(m, v);
  double e = 0.0;
  for (int i = 0; i < 3; ++i) e = std::max(e, std::fabs(got[i] - want[i]));
  return e;
}

ConsistencyReport consistency_with_kan(const KanMap& K, const BlenderModel& m, int n_samples, std::uint64_t seed) {
  ConsistencyReport rep;
  rep.samples = n_samples;
  rep.error_at_P = consistency_error_at(K, m, m.P);
  rep.sup_error = rep.error_at_P;
  for (int i = 0; i < n_samples; ++i) {
    const Box3& g = (i % 2 == 0) ? m.gamma1 : m.gamma2;
    Vec3 v;
    for (int k = 0; k < 3; ++k) v[k] = g.lo[k] + (g.hi[k] - g.lo[k]) * counter_uniform(seed, i, k);
    rep.sup_error = std::max(rep.sup_error, consistency_error_at(K, m, v));
  }
  return rep;
}

bool theta0_in_window(const KanMap& K) {
  return std::fabs(K.to_center(K.fields().theta0())) <= 2.0;
}

}  // namespace kan3
