#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "kan3/error.hpp"

namespace kan3 {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }

/// Reduce to [0,1).
inline double wrap_unit(double v) {
  double r;
  if (std::fabs(v) < 4.0e15) {
    r = v - static_cast<double>(static_cast<long long>(v));
    if (r < 0.0) r += 1.0;
  } else {
    r = v - std::floor(v);
  }
  return r >= 1.0 ? 0.0 : r;
}
/// Reduce to [-1/2,1/2).
inline double wrap_signed(double v) { return wrap_unit(v + 0.5) - 0.5; }
/// Reduce to [-1,1), the canonical representative of R/2Z.
double wrap_theta(double v);
/// Quotient distance on R/2Z.
double theta_distance(double a, double b);

struct TorusPoint2 {
  double x = 0.0;
  double y = 0.0;

  static TorusPoint2 reduce(double x, double y) { return {wrap_unit(x), wrap_unit(y)}; }
};

/// Shortest displacement from `from` to `to`.
inline Vec2 torus_delta(TorusPoint2 from, TorusPoint2 to) {
  return {wrap_signed(to.x - from.x), wrap_signed(to.y - from.y)};
}
double torus_distance(TorusPoint2 a, TorusPoint2 b);
inline TorusPoint2 translate(TorusPoint2 p, Vec2 v) { return TorusPoint2::reduce(p.x + v.x, p.y + v.y); }

struct Point3 {
  TorusPoint2 base;
  double theta = 0.0;

  static Point3 make(double x, double y, double theta) {
    return {TorusPoint2::reduce(x, y), wrap_theta(theta)};
  }
};

/// Fixed point as exact rational numerators over a common denominator.
struct RationalPoint {
  std::int64_t nx = 0;
  std::int64_t ny = 0;
  std::int64_t den = 1;

  TorusPoint2 to_point() const {
    return {static_cast<double>(nx) / static_cast<double>(den), static_cast<double>(ny) / static_cast<double>(den)};
  }
};

using IntMatrix2 = std::array<std::array<std::int64_t, 2>, 2>;

struct LabeledFixedPoints {
  RationalPoint p, q, r, s;
};

class AnosovMap {
 public:
  const IntMatrix2& entries() const { return a_; }
  double lambda() const { return lambda_; }
  Vec2 e_u() const { return e_u_; }
  Vec2 e_s() const { return e_s_; }
  const std::vector<RationalPoint>& fixed_points() const { return fixed_; }
  const LabeledFixedPoints& labels() const { return labels_; }

  TorusPoint2 p() const { return labels_.p.to_point(); }
  TorusPoint2 q() const { return labels_.q.to_point(); }
  TorusPoint2 r() const { return labels_.r.to_point(); }
  TorusPoint2 s() const { return labels_.s.to_point(); }

  TorusPoint2 apply(TorusPoint2 x) const {
    return TorusPoint2::reduce(static_cast<double>(a_[0][0]) * x.x + static_cast<double>(a_[0][1]) * x.y,
                               static_cast<double>(a_[1][0]) * x.x + static_cast<double>(a_[1][1]) * x.y);
  }
  TorusPoint2 apply_inverse(TorusPoint2 x) const {
    return TorusPoint2::reduce(static_cast<double>(inv_[0][0]) * x.x + static_cast<double>(inv_[0][1]) * x.y,
                               static_cast<double>(inv_[1][0]) * x.x + static_cast<double>(inv_[1][1]) * x.y);
  }
  /// Linear action on tangent vectors.
  Vec2 linear(Vec2 v) const;
  Vec2 linear_inverse(Vec2 v) const;
  /// A^n x for any integer n, via repeated application.
  TorusPoint2 iterate(TorusPoint2 x, int n) const;
  RationalPoint apply_exact(const RationalPoint& p) const;

  friend AnosovMap anosov_from_matrix(const IntMatrix2& entries);
  friend AnosovMap anosov_from_matrix(const IntMatrix2& entries, const std::array<TorusPoint2, 4>& label_override);

 private:
  static AnosovMap build(const IntMatrix2& entries, const std::array<TorusPoint2, 4>* labels);

  IntMatrix2 a_{};
  IntMatrix2 inv_{};
  double lambda_ = 0.0;
  Vec2 e_u_, e_s_;
  std::vector<RationalPoint> fixed_;
  LabeledFixedPoints labels_;
};

AnosovMap anosov_from_matrix(const IntMatrix2& entries);
/// Labels p,q,r,s taken from `label_override` (each must be a fixed point).
AnosovMap anosov_from_matrix(const IntMatrix2& entries, const std::array<TorusPoint2, 4>& label_override);

/// All solutions of (A - I)v = 0 mod Z^2, without any hyperbolicity checks.
std::vector<RationalPoint> fixed_points(const IntMatrix2& entries);

/// Affine chart x = p + x_s * S + x_u * U (mod 1) linearizing A near p.
struct AdaptedChart {
  TorusPoint2 origin;
  TorusPoint2 homoclinic;  // the point a
  std::array<int, 2> m{};
  int n0 = 0;
  double lambda = 0.0;
  Vec2 S, U;
  double c_u = 0.0;
  double c_s = 0.0;

  /// Chart coordinates of the shortest lift of x - origin.
  Vec2 to_chart(TorusPoint2 x) const;
  TorusPoint2 from_chart(Vec2 c) const;
  /// Ratio of the larger to the smaller axis length.
  double distortion() const;
  double lambda_pow(int k) const;
};

/// Chart built from lattice vector m at a fixed n0; checks item (4) disjointness.
AdaptedChart homoclinic_chart(const AnosovMap& A, std::array<int, 2> m, int n0);
/// Search m by increasing norm and n0 in [n0_min, n_max].
AdaptedChart search_chart(const AnosovMap& A, int n0_min, int n_max = 6);

/// Parallelogram {center + a*E1 + b*E2 : |a|,|b| <= 1} on the torus.
struct ChartBox {
  std::string name;
  TorusPoint2 center;
  Vec2 E1, E2;

  double area() const { return 4.0 * std::abs(cross(E1, E2)); }
  double perimeter() const { return 4.0 * (norm(E1) + norm(E2)); }
  /// Local coordinates (a, b) of the shortest lift.
  Vec2 local(TorusPoint2 x) const;
  bool contains(TorusPoint2 x) const;
  /// Euclidean distance from x to the box (0 inside).
  double distance(TorusPoint2 x) const;
  std::array<Vec2, 4> corners_relative() const;
};

/// Area of the intersection of two small boxes on the torus.
double intersection_area(const ChartBox& a, const ChartBox& b);
/// Does box `outer` contain box `inner`?
bool box_contains(const ChartBox& outer, const ChartBox& inner);

}  // namespace kan3
