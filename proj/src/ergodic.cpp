#include "kan3/ergodic.hpp"

#include <algorithm>
#include <cmath>

#include "kan3/parallel.hpp"

namespace kan3 {

double birkhoff(const SkewMap& f, Point3 x, const Observable& phi, long n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    v[i] = phi(x);
    if (i + 1 < n) x = f.apply(x);
  }
  return pairwise_sum(v) / static_cast<double>(n);
}

double center_lyapunov(const SkewMap& f, Point3 x, long n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    v[i] = std::log(std::fabs(f.fiber_derivative(x)));
    x = f.apply(x);
  }
  return pairwise_sum(v) / static_cast<double>(n);
}

double EmpiricalMeasure::total_weight() const {
  std::vector<double> w;
  w.reserve(samples.size());
  for (const auto& s : samples) w.push_back(s.w);
  return pairwise_sum(w);
}

void EmpiricalMeasure::normalize() {
  double t = total_weight();
  for (auto& s : samples) s.w /= t;
}

double EmpiricalMeasure::tube_mass(TorusSelector which, double radius) const {
  std::vector<double> w;
  w.reserve(samples.size());
  for (const auto& s : samples) w.push_back(dist_torus(s.p, which) < radius ? s.w : 0.0);
  return pairwise_sum(w);
}

UDirection strong_unstable_direction(const SkewMap& f, const Point3& seed, int iterations) {
  const AnosovMap& A = f.base();
  const Vec2 eu = A.e_u();
  const double lam = A.lambda();
  const double h = 1e-7;
  std::vector<Point3> orbit(static_cast<std::size_t>(iterations) + 1);
  orbit[iterations] = seed;
  for (int i = iterations; i > 0; --i) orbit[i - 1] = f.apply_inverse(orbit[i]);
  UDirection d;
  double w = 0.0;
  for (int i = 0; i < iterations; ++i) {
    const Point3& x = orbit[i];
    Point3 xp = f.apply({translate(x.base, h * eu), x.theta});
    Point3 xm = f.apply({translate(x.base, (-h) * eu), x.theta});
    double g = wrap_theta(xp.theta - xm.theta) / (2.0 * h);
    double next = (g + f.fiber_derivative(x) * w) / lam;
    d.change = std::fabs(next - w);
    w = next;
  }
  d.theta_slope = w;
  d.iterations = iterations;
  return d;
}

EmpiricalMeasure push_u_disk(const SkewMap& f, const Point3& seed, double u_length, long n, int n_samples,
                             int threads) {
  if (!(u_length > 0.0) || n < 1 || n_samples < 1) throw Error(ErrorKind::InvalidArgument, "bad u-disk parameters");
  const UDirection dir = strong_unstable_direction(f, seed);
  const Vec2 eu = f.base().e_u();
  // Midpoint rule on the segment; each cell has the same arc length.
  std::vector<Point3> start(n_samples);
  std::vector<double> arc(n_samples);
  const double step = u_length / n_samples;
  for (int j = 0; j < n_samples; ++j) {
    double s = -0.5 * u_length + (j + 0.5) * step;
    start[j] = {translate(seed.base, s * eu), wrap_theta(seed.theta + s * dir.theta_slope)};
    arc[j] = step * std::sqrt(1.0 + dir.theta_slope * dir.theta_slope);
  }
  const double total_arc = pairwise_sum(arc);
  EmpiricalMeasure m;
  m.seed = seed;
  m.n = n;
  m.samples.resize(static_cast<std::size_t>(n) * n_samples);
  parallel_for(static_cast<std::size_t>(n_samples), threads, [&](std::size_t j) {
    Point3 x = start[j];
    double w = arc[j] / total_arc / static_cast<double>(n);
    for (long i = 0; i < n; ++i) {
      m.samples[j * n + i] = {x, w};
      if (i + 1 < n) x = f.apply(x);
    }
  });
  return m;
}

EmpiricalMeasure push_forward(const SkewMap& f, const EmpiricalMeasure& in, int threads) {
  EmpiricalMeasure out = in;
  parallel_for(in.samples.size(), threads, [&](std::size_t i) { out.samples[i].p = f.apply(in.samples[i].p); });
  return out;
}

double tv_binned(const EmpiricalMeasure& a, const EmpiricalMeasure& b, int nx, int ny, int nth) {
  const std::size_t cells = static_cast<std::size_t>(nx) * ny * nth;
  auto bin = [&](const Point3& p) {
    std::size_t i = std::min(nx - 1, static_cast<int>(p.base.x * nx));
    std::size_t j = std::min(ny - 1, static_cast<int>(p.base.y * ny));
    std::size_t k = std::min(nth - 1, static_cast<int>((p.theta + 1.0) * 0.5 * nth));
    return (i * ny + j) * nth + k;
  };
  std::vector<double> ha(cells, 0.0), hb(cells, 0.0);
  for (const auto& s : a.samples) ha[bin(s.p)] += s.w;
  for (const auto& s : b.samples) hb[bin(s.p)] += s.w;
  std::vector<double> d(cells);
  for (std::size_t c = 0; c < cells; ++c) d[c] = std::fabs(ha[c] - hb[c]);
  return 0.5 * pairwise_sum(d);
}

Point3 grid_sample(const GridSpec& g, std::uint64_t seed, std::size_t cell, int s) {
  const std::size_t k = cell % g.nth;
  const std::size_t j = (cell / g.nth) % g.ny;
  const std::size_t i = cell / (static_cast<std::size_t>(g.nth) * g.ny);
  double x = (static_cast<double>(i) + counter_uniform(seed, cell, s, 0)) / g.nx;
  double y = (static_cast<double>(j) + counter_uniform(seed, cell, s, 1)) / g.ny;
  double th = -1.0 + 2.0 * (static_cast<double>(k) + counter_uniform(seed, cell, s, 2)) / g.nth;
  return {{x, y}, wrap_theta(th)};
}

Point3 BasinGrid::sample_point(std::size_t cell, int s) const { return grid_sample(grid, seed, cell, s); }

std::size_t BasinGrid::count(BasinLabel l) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), static_cast<std::uint8_t>(l)));
}

BasinLabel classify_orbit(const SkewMap& f, Point3 x, long n, long tail, double delta) {
  double s0 = 0.0, s1 = 0.0;
  const long start = n - tail;
  for (long i = 0; i < n; ++i) {
    x = f.apply(x);
    if (i >= start) {
      double a = std::fabs(x.theta);
      s0 += a;
      s1 += 1.0 - a;
    }
  }
  const bool near0 = s0 / tail < delta, near1 = s1 / tail < delta;
  if (near0 && !near1) return BasinLabel::Torus0;
  if (near1 && !near0) return BasinLabel::Torus1;
  return BasinLabel::Undecided;
}

BasinGrid classify_basins(const SkewMap& f, const GridSpec& grid, long n, long tail, double delta,
                          std::uint64_t seed, int threads) {
  if (!(delta < 0.25) || tail < 1 || tail > n) throw Error(ErrorKind::InvalidArgument, "need delta < 0.25, 1 <= tail <= n");
  BasinGrid b;
  b.grid = grid;
  b.n = n;
  b.tail = tail;
  b.delta = delta;
  b.seed = seed;
  const std::size_t total = grid.cells() * grid.samples_per_cell;
  b.labels.assign(total, 0);
  parallel_for(total, threads, [&](std::size_t idx) {
    std::size_t cell = idx / grid.samples_per_cell;
    int s = static_cast<int>(idx % grid.samples_per_cell);
    b.labels[idx] = static_cast<std::uint8_t>(classify_orbit(f, grid_sample(grid, seed, cell, s), n, tail, delta));
  });
  return b;
}

IntermingleReport intermingled_test(const std::vector<Point3>& points, const std::vector<std::uint8_t>& labels,
                                    const CoarseSpec& c, double min_fraction) {
  IntermingleReport rep;
  rep.coarse = c;
  rep.min_fraction = min_fraction;
  rep.cells_total = static_cast<std::size_t>(c.cx) * c.cy * c.cth;
  rep.cell_counts.assign(rep.cells_total, {0, 0, 0});
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point3& p = points[i];
    std::size_t ci = std::min(c.cx - 1, static_cast<int>(p.base.x * c.cx));
    std::size_t cj = std::min(c.cy - 1, static_cast<int>(p.base.y * c.cy));
    std::size_t ck = std::min(c.cth - 1, static_cast<int>((p.theta + 1.0) * 0.5 * c.cth));
    rep.cell_counts[(ci * c.cy + cj) * c.cth + ck][labels[i]]++;
  }
  for (const auto& cc : rep.cell_counts) {
    std::size_t tot = cc[0] + cc[1] + cc[2];
    rep.torus0 += cc[0];
    rep.torus1 += cc[1];
    rep.undecided += cc[2];
    if (tot > 0 && cc[0] >= min_fraction * tot && cc[1] >= min_fraction * tot && cc[0] > 0 && cc[1] > 0) {
      ++rep.cells_both;
    }
  }
  const double all = static_cast<double>(rep.torus0 + rep.torus1 + rep.undecided);
  rep.pass_fraction = static_cast<double>(rep.cells_both) / static_cast<double>(rep.cells_total);
  rep.decided_fraction = all > 0 ? static_cast<double>(rep.torus0 + rep.torus1) / all : 0.0;
  rep.undecided_rate = all > 0 ? static_cast<double>(rep.undecided) / all : 0.0;
  return rep;
}

IntermingleReport intermingled_test(const BasinGrid& b, const CoarseSpec& coarse, double min_fraction) {
  std::vector<Point3> pts(b.labels.size());
  for (std::size_t idx = 0; idx < b.labels.size(); ++idx) {
    pts[idx] = b.sample_point(idx / b.grid.samples_per_cell, static_cast<int>(idx % b.grid.samples_per_cell));
  }
  return intermingled_test(pts, b.labels, coarse, min_fraction);
}

std::vector<RegionPair> standard_region_pairs() {
  const Region3 Ua{0, 1, 0, 1, 0.05, 0.95};
  const Region3 Ub{0, 0.5, 0, 0.5, 0.2, 0.8};
  const Region3 Uc{0.5, 1, 0, 0.5, -0.8, -0.2};
  const Region3 Ud{0, 1, 0, 1, -0.95, -0.05};
  const Region3 V1{0, 1, 0, 1, 0.0, 0.25};
  const Region3 V2{0, 1, 0, 1, -0.25, 0.0};
  const Region3 V3{0.5, 1, 0.5, 1, 0.0, 0.25};
  const Region3 V4{0, 0.5, 0.5, 1, -0.25, 0.0};
  return {{"Ua-V1", Ua, V1}, {"Ua-V2", Ua, V2}, {"Ub-V3", Ub, V3}, {"Ub-V4", Ub, V4},
          {"Uc-V1", Uc, V1}, {"Uc-V4", Uc, V4}, {"Ud-V2", Ud, V2}, {"Ud-V3", Ud, V3}};
}

int MixingTable::first_hit(std::size_t pair) const {
  for (int n = 1; n <= N; ++n)
    if (counts[pair][n] > 0) return n;
  return -1;
}

MixingTable mixing_diagnostic(const SkewMap& f, const std::vector<RegionPair>& pairs, int N, int samples,
                              std::uint64_t seed, int threads) {
  if (N < 1 || samples < 1) throw Error(ErrorKind::InvalidArgument, "need N >= 1 and samples >= 1");
  MixingTable t;
  t.pairs = pairs;
  t.N = N;
  t.samples = samples;
  t.counts.assign(pairs.size(), std::vector<long>(N + 1, 0));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    std::vector<std::uint8_t> inside(static_cast<std::size_t>(samples) * (N + 1), 0);
    parallel_for(static_cast<std::size_t>(samples), threads, [&](std::size_t i) {
      Point3 x = pairs[p].U.sample(counter_uniform(seed, p, i, 0), counter_uniform(seed, p, i, 1),
                                   counter_uniform(seed, p, i, 2));
      x = Point3{TorusPoint2::reduce(x.base.x, x.base.y), wrap_theta(x.theta)};
      for (int n = 0; n <= N; ++n) {
        inside[i * (N + 1) + n] = pairs[p].V.contains(x) ? 1 : 0;
        if (n < N) x = f.apply(x);
      }
    });
    for (std::size_t i = 0; i < static_cast<std::size_t>(samples); ++i)
      for (int n = 0; n <= N; ++n) t.counts[p][n] += inside[i * (N + 1) + n];
  }
  return t;
}

}  // namespace kan3
