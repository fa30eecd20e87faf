#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kan3/kan_map.hpp"

namespace kan3 {

using Observable = std::function<double(const Point3&)>;

inline double dist_torus0(const Point3& p) { return std::fabs(p.theta); }
/// Distance to theta = 1 in R/2Z (both representatives +-1).
inline double dist_torus1(const Point3& p) { return 1.0 - std::fabs(p.theta); }
inline double dist_torus(const Point3& p, TorusSelector w) {
  return w == TorusSelector::Zero ? dist_torus0(p) : dist_torus1(p);
}

double birkhoff(const SkewMap& f, Point3 x0, const Observable& phi, long n);
double center_lyapunov(const SkewMap& f, Point3 x0, long n);

struct WeightedPoint {
  Point3 p;
  double w = 0.0;
};

struct EmpiricalMeasure {
  std::vector<WeightedPoint> samples;
  Point3 seed;
  long n = 0;

  double total_weight() const;
  void normalize();
  double tube_mass(TorusSelector which, double radius) const;
};

struct UDirection {
  double theta_slope = 0.0;  // tangent (e_u, theta_slope)
  double change = 0.0;       // last update size
  int iterations = 0;
};

/// E^uu at `seed` by forward power iteration from K^{-iterations}(seed).
UDirection strong_unstable_direction(const SkewMap& f, const Point3& seed, int iterations = 30);

EmpiricalMeasure push_u_disk(const SkewMap& f, const Point3& seed, double u_length, long n, int n_samples,
                             int threads = 1);
EmpiricalMeasure push_forward(const SkewMap& f, const EmpiricalMeasure& m, int threads = 1);
double tv_binned(const EmpiricalMeasure& a, const EmpiricalMeasure& b, int nx = 8, int ny = 8, int nth = 20);

struct GridSpec {
  int nx = 64;
  int ny = 64;
  int nth = 17;
  int samples_per_cell = 1;

  std::size_t cells() const { return static_cast<std::size_t>(nx) * ny * nth; }
};

enum class BasinLabel : std::uint8_t { Torus0 = 0, Torus1 = 1, Undecided = 2 };

struct BasinGrid {
  GridSpec grid;
  long n = 0;
  long tail = 0;
  double delta = 0.05;
  std::uint64_t seed = 0;
  std::vector<std::uint8_t> labels;  // index cell * samples_per_cell + s, cell = (i * ny + j) * nth + k

  Point3 sample_point(std::size_t cell, int s) const;
  std::size_t count(BasinLabel l) const;
};

Point3 grid_sample(const GridSpec& g, std::uint64_t seed, std::size_t cell, int s);
BasinLabel classify_orbit(const SkewMap& f, Point3 x, long n, long tail, double delta);
BasinGrid classify_basins(const SkewMap& f, const GridSpec& grid, long n, long tail, double delta,
                          std::uint64_t seed, int threads = 1);

struct CoarseSpec {
  int cx = 8;
  int cy = 8;
  int cth = 4;
};

struct IntermingleReport {
  CoarseSpec coarse;
  double min_fraction = 0.01;
  std::vector<std::array<std::size_t, 3>> cell_counts;  // per coarse cell: torus0, torus1, undecided
  std::size_t cells_both = 0;
  std::size_t cells_total = 0;
  double pass_fraction = 0.0;
  double decided_fraction = 0.0;
  double undecided_rate = 0.0;
  std::size_t torus0 = 0, torus1 = 0, undecided = 0;
};

IntermingleReport intermingled_test(const BasinGrid& b, const CoarseSpec& coarse, double min_fraction = 0.01);
/// Same test on an explicit list of (point, label).
IntermingleReport intermingled_test(const std::vector<Point3>& points, const std::vector<std::uint8_t>& labels,
                                    const CoarseSpec& coarse, double min_fraction = 0.01);

enum class CoverageObject { ForwardFiberP, ForwardUDiskP, BackwardFiberQ, BackwardStableP };

const char* to_string(CoverageObject o);

struct CoverageSpec {
  int nx = 16;
  int ny = 16;
  int nth = 8;
  double L = 1e-8;  // local manifold half-size (0: the bare fiber)
  long budget = 10'000'000;
};

struct CoverageReport {
  CoverageObject object = CoverageObject::ForwardFiberP;
  CoverageSpec spec;
  int depth = 0;
  int depth_full = -1;  // first depth reaching full coverage
  std::vector<std::uint8_t> hit;
  double fraction = 0.0;
  long points_used = 0;
  bool budget_exhausted = false;
};

std::size_t coverage_cell(const CoverageSpec& s, const Point3& p);
CoverageReport manifold_coverage(const SkewMap& f, CoverageObject object, int depth, const CoverageSpec& spec,
                                 int threads = 1);

struct Region3 {
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1, th0 = -1, th1 = 1;

  bool contains(const Point3& p) const {
    return p.base.x >= x0 && p.base.x < x1 && p.base.y >= y0 && p.base.y < y1 && p.theta > th0 && p.theta < th1;
  }
  Point3 sample(double u1, double u2, double u3) const {
    return {{x0 + (x1 - x0) * u1, y0 + (y1 - y0) * u2}, th0 + (th1 - th0) * u3};
  }
};

struct RegionPair {
  std::string name;
  Region3 U, V;
};

std::vector<RegionPair> standard_region_pairs();

struct MixingTable {
  std::vector<RegionPair> pairs;
  int N = 0;
  int samples = 0;
  std::vector<std::vector<long>> counts;  // [pair][n], n = 0..N: samples of U inside V after n steps

  bool hit(std::size_t pair, int n) const { return counts[pair][n] > 0; }
  int first_hit(std::size_t pair) const;
};

MixingTable mixing_diagnostic(const SkewMap& f, const std::vector<RegionPair>& pairs, int N, int samples,
                              std::uint64_t seed, int threads = 1);

}  // namespace kan3
