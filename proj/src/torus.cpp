#include "kan3/torus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace kan3 {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotUnimodular: return "NotUnimodular";
    case ErrorKind::NotHyperbolic: return "NotHyperbolic";
    case ErrorKind::EigenvalueTooSmall: return "EigenvalueTooSmall";
    case ErrorKind::WrongFixedPointCount: return "WrongFixedPointCount";
    case ErrorKind::DegenerateVector: return "DegenerateVector";
    case ErrorKind::NoValidN0: return "NoValidN0";
    case ErrorKind::InfeasibleLayout: return "InfeasibleLayout";
    case ErrorKind::IntegratorDivergence: return "IntegratorDivergence";
    case ErrorKind::WindowMismatch: return "WindowMismatch";
    case ErrorKind::BisectionFailure: return "BisectionFailure";
    case ErrorKind::SupportCollision: return "SupportCollision";
    case ErrorKind::Inconclusive: return "Inconclusive";
    case ErrorKind::OutsideBranches: return "OutsideBranches";
    case ErrorKind::InvalidInterval: return "InvalidInterval";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::OutOfWindow: return "OutOfWindow";
    case ErrorKind::BudgetExhausted: return "BudgetExhausted";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::RangeError: return "RangeError";
    case ErrorKind::UnknownKey: return "UnknownKey";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}


double wrap_theta(double v) {
  if (v >= -1.0 && v < 1.0) return v;
  double r = v - 2.0 * std::floor((v + 1.0) / 2.0);
  if (r >= 1.0) r = -1.0;
  if (r < -1.0) r = -1.0;
  return r;
}

double theta_distance(double a, double b) { return std::fabs(wrap_theta(a - b)); }


double torus_distance(TorusPoint2 a, TorusPoint2 b) { return norm(torus_delta(a, b)); }

namespace {

std::int64_t mod_pos(std::int64_t v, std::int64_t m) {
  std::int64_t r = v % m;
  return r < 0 ? r + m : r;
}

RationalPoint reduced(std::int64_t nx, std::int64_t ny, std::int64_t den) {
  nx = mod_pos(nx, den);
  ny = mod_pos(ny, den);
  std::int64_t g = std::gcd(std::gcd(nx, ny), den);
  if (g == 0) g = 1;
  return {nx / g, ny / g, den / g};
}

bool same_point(const RationalPoint& a, TorusPoint2 b) {
  TorusPoint2 pa = a.to_point();
  return pa.x == b.x && pa.y == b.y;
}

Vec2 eigenvector(const IntMatrix2& a, double ell) {
  Vec2 v;
  if (a[0][1] != 0) {
    v = {static_cast<double>(a[0][1]), ell - static_cast<double>(a[0][0])};
  } else {
    v = {ell - static_cast<double>(a[1][1]), static_cast<double>(a[1][0])};
  }
  double n = norm(v);
  v = (1.0 / n) * v;
  if (v.x < 0.0 || (v.x == 0.0 && v.y < 0.0)) v = (-1.0) * v;
  return v;
}

}  // namespace

std::vector<RationalPoint> fixed_points(const IntMatrix2& a) {
  const std::int64_t m00 = a[0][0] - 1, m01 = a[0][1], m10 = a[1][0], m11 = a[1][1] - 1;
  const std::int64_t d = std::llabs(m00 * m11 - m01 * m10);
  std::vector<RationalPoint> out;
  if (d == 0) return out;
  for (std::int64_t nx = 0; nx < d; ++nx) {
    for (std::int64_t ny = 0; ny < d; ++ny) {
      if (mod_pos(m00 * nx + m01 * ny, d) == 0 && mod_pos(m10 * nx + m11 * ny, d) == 0) {
        out.push_back(reduced(nx, ny, d));
      }
    }
  }
  return out;
}

AnosovMap AnosovMap::build(const IntMatrix2& a, const std::array<TorusPoint2, 4>* labels) {
  const std::int64_t det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
  const std::int64_t tr = a[0][0] + a[1][1];
  if (std::llabs(det) != 1) throw Error(ErrorKind::NotUnimodular, "det = " + std::to_string(det));
  if (std::llabs(tr) <= 2) throw Error(ErrorKind::NotHyperbolic, "trace = " + std::to_string(tr));
  const double disc = static_cast<double>(tr * tr - 4 * det);
  const double sgn = tr >= 0 ? 1.0 : -1.0;
  const double ell_u = 0.5 * (static_cast<double>(tr) + sgn * std::sqrt(disc));
  const double ell_s = static_cast<double>(det) / ell_u;
  const double lambda = std::fabs(ell_u);
  if (lambda <= 3.0) {
    std::ostringstream os;
    os << "lambda = " << lambda;
    throw Error(ErrorKind::EigenvalueTooSmall, os.str());
  }
  const std::int64_t dam = det - tr + 1;
  if (std::llabs(dam) != 4) {
    throw Error(ErrorKind::WrongFixedPointCount, "|det(A - I)| = " + std::to_string(std::llabs(dam)));
  }

  AnosovMap A;
  A.a_ = a;
  A.inv_ = {{{det * a[1][1], -det * a[0][1]}, {-det * a[1][0], det * a[0][0]}}};
  A.lambda_ = lambda;
  A.e_u_ = eigenvector(a, ell_u);
  A.e_s_ = eigenvector(a, ell_s);
  A.fixed_ = kan3::fixed_points(a);

  auto find = [&](TorusPoint2 target) -> const RationalPoint* {
    for (const auto& f : A.fixed_)
      if (same_point(f, target)) return &f;
    return nullptr;
  };
  if (labels != nullptr) {
    const RationalPoint* got[4];
    for (int i = 0; i < 4; ++i) {
      got[i] = find((*labels)[i]);
      if (got[i] == nullptr) throw Error(ErrorKind::InvalidArgument, "label is not a fixed point");
      for (int j = 0; j < i; ++j)
        if (got[j] == got[i]) throw Error(ErrorKind::InvalidArgument, "labels must be distinct");
    }
    A.labels_ = {*got[0], *got[1], *got[2], *got[3]};
    return A;
  }
  const RationalPoint* p = find({0.0, 0.0});
  const RationalPoint* q = find({0.5, 0.5});
  const RationalPoint* r = find({0.5, 0.0});
  const RationalPoint* s = find({0.0, 0.5});
  if (p && q && r && s) {
    A.labels_ = {*p, *q, *r, *s};
    return A;
  }
  std::vector<RationalPoint> rest;
  for (const auto& f : A.fixed_)
    if (&f != p) rest.push_back(f);
  std::sort(rest.begin(), rest.end(), [](const RationalPoint& u, const RationalPoint& v) {
    TorusPoint2 a1 = u.to_point(), b1 = v.to_point();
    return a1.x != b1.x ? a1.x < b1.x : a1.y < b1.y;
  });
  A.labels_ = {*p, rest[0], rest[1], rest[2]};
  return A;
}

AnosovMap anosov_from_matrix(const IntMatrix2& entries) { return AnosovMap::build(entries, nullptr); }

AnosovMap anosov_from_matrix(const IntMatrix2& entries, const std::array<TorusPoint2, 4>& label_override) {
  return AnosovMap::build(entries, &label_override);
}

Vec2 AnosovMap::linear(Vec2 v) const {
  return {static_cast<double>(a_[0][0]) * v.x + static_cast<double>(a_[0][1]) * v.y,
          static_cast<double>(a_[1][0]) * v.x + static_cast<double>(a_[1][1]) * v.y};
}

Vec2 AnosovMap::linear_inverse(Vec2 v) const {
  return {static_cast<double>(inv_[0][0]) * v.x + static_cast<double>(inv_[0][1]) * v.y,
          static_cast<double>(inv_[1][0]) * v.x + static_cast<double>(inv_[1][1]) * v.y};
}

TorusPoint2 AnosovMap::iterate(TorusPoint2 x, int n) const {
  for (int i = 0; i < n; ++i) x = apply(x);
  for (int i = 0; i < -n; ++i) x = apply_inverse(x);
  return x;
}

RationalPoint AnosovMap::apply_exact(const RationalPoint& p) const {
  return reduced(a_[0][0] * p.nx + a_[0][1] * p.ny, a_[1][0] * p.nx + a_[1][1] * p.ny, p.den);
}

}  // namespace kan3

namespace kan3 {

Vec2 AdaptedChart::to_chart(TorusPoint2 x) const {
  Vec2 d = torus_delta(origin, x);
  double det = cross(S, U);
  return {cross(d, U) / det, cross(S, d) / det};
}

TorusPoint2 AdaptedChart::from_chart(Vec2 c) const { return translate(origin, c.x * S + c.y * U); }

double AdaptedChart::distortion() const {
  double a = norm(S), b = norm(U);
  return std::max(a, b) / std::min(a, b);
}

double AdaptedChart::lambda_pow(int k) const { return std::pow(lambda, k); }

std::array<Vec2, 4> ChartBox::corners_relative() const {
  std::array<Vec2, 4> c = {(-1.0) * E1 - E2, E1 - E2, E1 + E2, E2 - E1};
  if (cross(E1, E2) < 0.0) std::reverse(c.begin(), c.end());
  return c;
}

Vec2 ChartBox::local(TorusPoint2 x) const {
  Vec2 d = torus_delta(center, x);
  double det = cross(E1, E2);
  return {cross(d, E2) / det, cross(E1, d) / det};
}

bool ChartBox::contains(TorusPoint2 x) const {
  Vec2 l = local(x);
  return std::fabs(l.x) <= 1.0 && std::fabs(l.y) <= 1.0;
}

namespace {

double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double len2 = dot(ab, ab);
  double s = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  return norm(p - (a + s * ab));
}

double polygon_area(const std::vector<Vec2>& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) s += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * s;
}

// Sutherland-Hodgman clip of `subject` by the convex CCW polygon `clip`.
std::vector<Vec2> clip_polygon(std::vector<Vec2> subject, const std::array<Vec2, 4>& clip) {
  for (std::size_t e = 0; e < clip.size() && !subject.empty(); ++e) {
    Vec2 a = clip[e], b = clip[(e + 1) % clip.size()];
    auto inside = [&](Vec2 p) { return cross(b - a, p - a) >= 0.0; };
    auto hit = [&](Vec2 p, Vec2 q) {
      double dp = cross(b - a, p - a), dq = cross(b - a, q - a);
      return p + (dp / (dp - dq)) * (q - p);
    };
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < subject.size(); ++i) {
      Vec2 cur = subject[i], prev = subject[(i + subject.size() - 1) % subject.size()];
      bool ci = inside(cur), pi = inside(prev);
      if (ci) {
        if (!pi) out.push_back(hit(prev, cur));
        out.push_back(cur);
      } else if (pi) {
        out.push_back(hit(prev, cur));
      }
    }
    subject = std::move(out);
  }
  return subject;
}

}  // namespace

double ChartBox::distance(TorusPoint2 x) const {
  Vec2 l = local(x);
  if (std::fabs(l.x) <= 1.0 && std::fabs(l.y) <= 1.0) return 0.0;
  Vec2 d = torus_delta(center, x);
  auto c = corners_relative();
  double best = segment_distance(d, c[0], c[1]);
  for (int i = 1; i < 4; ++i) best = std::min(best, segment_distance(d, c[i], c[(i + 1) % 4]));
  return best;
}

double intersection_area(const ChartBox& a, const ChartBox& b) {
  auto ca = a.corners_relative();
  auto cb = b.corners_relative();
  Vec2 off = torus_delta(a.center, b.center);
  double total = 0.0;
  for (int kx = -1; kx <= 1; ++kx) {
    for (int ky = -1; ky <= 1; ++ky) {
      std::vector<Vec2> subject;
      for (Vec2 v : cb) subject.push_back(v + off + Vec2{static_cast<double>(kx), static_cast<double>(ky)});
      auto clipped = clip_polygon(subject, ca);
      if (clipped.size() >= 3) total += std::fabs(polygon_area(clipped));
    }
  }
  return total;
}

bool box_contains(const ChartBox& outer, const ChartBox& inner) {
  Vec2 off = torus_delta(outer.center, inner.center);
  double det = cross(outer.E1, outer.E2);
  for (Vec2 v : inner.corners_relative()) {
    Vec2 d = off + v;
    double la = cross(d, outer.E2) / det, lb = cross(outer.E1, d) / det;
    if (std::fabs(la) > 1.0 + 1e-12 || std::fabs(lb) > 1.0 + 1e-12) return false;
  }
  return true;
}

namespace {

bool chart_item4_holds(const AdaptedChart& ch) {
  // Injectivity of the [-3,3]^2 patch.
  if (3.0 * (norm(ch.S) + norm(ch.U)) >= 0.5) return false;
  std::vector<ChartBox> boxes;
  boxes.push_back({"C", ch.origin, 2.0 * ch.S, 2.0 * ch.U});
  const int n2 = 2 * ch.n0;
  for (int i = 1; i < n2; ++i) {
    boxes.push_back({"A^i(C2)", ch.from_chart({0.0, ch.lambda_pow(i)}), 2.0 * ch.lambda_pow(-i) * ch.S,
                     2.0 * ch.lambda_pow(i - n2) * ch.U});
  }
  for (std::size_t i = 0; i < boxes.size(); ++i)
    for (std::size_t j = i + 1; j < boxes.size(); ++j)
      if (intersection_area(boxes[i], boxes[j]) > 0.0) return false;
  return true;
}

}  // namespace

AdaptedChart homoclinic_chart(const AnosovMap& A, std::array<int, 2> m, int n0) {
  if (m[0] == 0 && m[1] == 0) throw Error(ErrorKind::DegenerateVector, "m = (0,0)");
  if (n0 < 1) throw Error(ErrorKind::InvalidArgument, "n0 must be positive");
  const IntMatrix2& a = A.entries();
  if (a[0][0] * a[1][1] - a[0][1] * a[1][0] != 1 || a[0][0] + a[1][1] < 0) {
    throw Error(ErrorKind::InvalidArgument, "chart needs positive eigenvalues");
  }
  Vec2 eu = A.e_u(), es = A.e_s();
  Vec2 mv{static_cast<double>(m[0]), static_cast<double>(m[1])};
  double det = cross(eu, es);
  AdaptedChart ch;
  ch.c_u = cross(mv, es) / det;
  ch.c_s = cross(eu, mv) / det;
  ch.m = m;
  ch.n0 = n0;
  ch.lambda = A.lambda();
  ch.origin = A.p();
  ch.U = (std::pow(A.lambda(), -n0) * ch.c_u) * eu;
  ch.S = (-std::pow(A.lambda(), -n0) * ch.c_s) * es;
  ch.homoclinic = translate(ch.origin, ch.U);
  if (!chart_item4_holds(ch)) {
    throw Error(ErrorKind::NoValidN0, "item (4) fails at n0 = " + std::to_string(n0));
  }
  return ch;
}

AdaptedChart search_chart(const AnosovMap& A, int n0_min, int n_max) {
  std::vector<std::array<int, 2>> cand;
  for (int i = 0; i <= 3; ++i)
    for (int j = -3; j <= 3; ++j)
      if ((i > 0) || (i == 0 && j > 0)) cand.push_back({i, j});
  std::sort(cand.begin(), cand.end(), [](const auto& u, const auto& v) {
    int nu = u[0] * u[0] + u[1] * u[1], nv = v[0] * v[0] + v[1] * v[1];
    if (nu != nv) return nu < nv;
    if (u[0] != v[0]) return u[0] > v[0];
    return u[1] > v[1];
  });
  for (const auto& m : cand) {
    for (int n0 = n0_min; n0 <= n_max; ++n0) {
      try {
        return homoclinic_chart(A, m, n0);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoValidN0) throw;
      }
    }
  }
  throw Error(ErrorKind::NoValidN0, "no lattice vector admits n0 <= " + std::to_string(n_max));
}

}  // namespace kan3
