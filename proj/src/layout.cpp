#include "kan3/layout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kan3/bump.hpp"

namespace kan3 {

std::vector<const ChartBox*> DomainLayout::excluded() const {
  std::vector<const ChartBox*> out = {&r_, &s_, &q_, &c_};
  for (const auto& b : orbit_) out.push_back(&b);
  return out;
}

double DomainLayout::distance_to_excluded(TorusPoint2 x) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ex_.size(); ++i) {
    double dc = norm(torus_delta(ex_[i].center, x));
    if (dc - radius_[i] >= best) continue;
    best = std::min(best, ex_[i].distance(x));
  }
  return best;
}

double DomainLayout::box_alpha(const ChartBox&, Vec2 l, double pa, double pb) const {
  return plateau_bump(std::fabs(l.x), pa, 1.0) * plateau_bump(std::fabs(l.y), pb, 1.0);
}

Placement DomainLayout::place(TorusPoint2 x) const {
  Placement pl;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < fast_.size(); ++k) {
    const FastBox& b = fast_[k];
    Vec2 d = torus_delta(b.c, x);
    // Beyond reach the box neither contains x nor lowers alpha1 below 1.
    if (std::fabs(d.x) > b.reach || std::fabs(d.y) > b.reach) continue;
    double la = b.i00 * d.x + b.i01 * d.y, lb = b.i10 * d.x + b.i11 * d.y;
    double aa = std::fabs(la), ab = std::fabs(lb);
    if (aa < 1.0 && ab < 1.0) {
      pl.region = b.region;
      pl.orbit_index = b.orbit_index;
      pl.local = {la, lb};
      pl.alpha1 = b.region == Region::Q ? 0.0 : box_alpha(ex_[k], pl.local, b.pa, b.pb);
      return pl;
    }
    double dist;
    if (b.orthogonal) {
      double ea = std::max(aa - 1.0, 0.0) * b.n1, eb = std::max(ab - 1.0, 0.0) * b.n2;
      dist = std::sqrt(ea * ea + eb * eb);
    } else {
      dist = ex_[k].distance(x);
    }
    best = std::min(best, dist);
  }
  const double m2 = opt_.u2_margin * epsilon_, m1 = opt_.u1_margin * epsilon_;
  if (best > m2) {
    pl.region = Region::U2;
    pl.alpha1 = smoothstep((best - m2) / (m1 - m2));
  }
  return pl;
}

namespace {

ChartBox inflate(const ChartBox& b, double m) {
  double c = std::fabs(cross(b.E1, b.E2));
  double h1 = c / norm(b.E2), h2 = c / norm(b.E1);
  return {b.name, b.center, (1.0 + m / h1) * b.E1, (1.0 + m / h2) * b.E2};
}

std::pair<double, double> quadrature_sets(const DomainLayout& layout, int n) {
  const double m1 = layout.options().u1_margin * layout.epsilon();
  const double m2 = layout.options().u2_margin * layout.epsilon();
  long long c1 = 0, c2 = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double d = layout.distance_to_excluded({(i + 0.5) / n, (j + 0.5) / n});
      if (d > m1) ++c1;
      if (d > m2) ++c2;
    }
  }
  double cells = static_cast<double>(n) * static_cast<double>(n);
  return {static_cast<double>(c1) / cells, static_cast<double>(c2) / cells};
}

}  // namespace

double quadrature_u1(const DomainLayout& layout, int n) { return quadrature_sets(layout, n).first; }

DomainLayout build_layout(const AnosovMap& A, const AdaptedChart& chart, double epsilon, const LayoutOptions& opt) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::InfeasibleLayout, "epsilon must be positive");
  DomainLayout L;
  L.epsilon_ = epsilon;
  L.opt_ = opt;
  L.chart_ = chart;
  const double w = std::sqrt(opt.box_area_fraction * epsilon / 4.0);
  L.r_ = {"U_r", A.r(), w * A.e_s(), w * A.e_u()};
  L.s_ = {"U_s", A.s(), w * A.e_s(), w * A.e_u()};
  L.q_ = {"U_q", A.q(), w * A.e_s(), w * A.e_u()};
  const double h = opt.chart_half;
  const int n2 = 2 * chart.n0;
  L.c_ = {"U_C", chart.origin, h * chart.S, h * chart.U};
  L.c2_ = {"U_C2", chart.from_chart({0.0, 1.0}), h * chart.S, opt.c2_u_half * chart.lambda_pow(-n2) * chart.U};
  for (int i = 1; i < n2; ++i) {
    L.orbit_.push_back({"A^" + std::to_string(i) + "(U_C2)", chart.from_chart({0.0, chart.lambda_pow(i)}),
                        h * chart.lambda_pow(-i) * chart.S, opt.c2_u_half * chart.lambda_pow(i - n2) * chart.U});
  }
  L.c_plateau_ = 2.0 / h;
  L.c2_u_plateau_ = 2.0 / opt.c2_u_half;
  int index = 0;
  for (const ChartBox* b : L.excluded()) {
    L.ex_.push_back(*b);
    L.radius_.push_back(norm(b->E1) + norm(b->E2));
    DomainLayout::FastBox f;
    double det = cross(b->E1, b->E2);
    f.c = b->center;
    f.i00 = b->E2.y / det;
    f.i01 = -b->E2.x / det;
    f.i10 = -b->E1.y / det;
    f.i11 = b->E1.x / det;
    f.n1 = norm(b->E1);
    f.n2 = norm(b->E2);
    f.reach = f.n1 + f.n2 + opt.u1_margin * epsilon * (1.0 + 1e-9) + 1e-12;
    f.orthogonal = std::fabs(dot(b->E1, b->E2)) <= 1e-12 * f.n1 * f.n2;
    f.orbit_index = 0;
    f.pa = f.pb = opt.plateau;
    switch (index) {
      case 0: f.region = Region::R; break;
      case 1: f.region = Region::S; break;
      case 2: f.region = Region::Q; break;
      case 3:
        f.region = Region::C;
        f.pa = f.pb = L.c_plateau_;
        break;
      default:
        f.region = Region::C2Orbit;
        f.orbit_index = index - 3;
        f.pa = L.c_plateau_;
        f.pb = L.c2_u_plateau_;
    }
    L.fast_.push_back(f);
    ++index;
  }

  LayoutReport& rep = L.report_;
  rep.leb_r = L.r_.area();
  rep.leb_s = L.s_.area();
  rep.leb_q = L.q_.area();
  rep.item1 = rep.leb_r < epsilon && rep.leb_s < epsilon && rep.leb_q < epsilon && L.r_.contains(A.r()) &&
              L.s_.contains(A.s()) && L.q_.contains(A.q());

  ChartBox C{"C", chart.origin, 2.0 * chart.S, 2.0 * chart.U};
  ChartBox C1{"C1", chart.origin, 2.0 * chart.S, 2.0 * chart.lambda_pow(-n2) * chart.U};
  ChartBox C2{"C2", chart.from_chart({0.0, 1.0}), 2.0 * chart.S, 2.0 * chart.lambda_pow(-n2) * chart.U};
  rep.leb_center_union = L.c_.area();
  for (const auto& b : L.orbit_) rep.leb_center_union += b.area();
  rep.item2 = h > 2.0 && opt.c2_u_half > 2.0 && box_contains(L.c_, C) && box_contains(L.c2_, C2) &&
              box_contains(L.c_, L.c2_) && intersection_area(L.c2_, C1) == 0.0 && rep.leb_center_union < epsilon;

  auto boxes = L.excluded();
  rep.max_pair_overlap = 0.0;
  for (std::size_t i = 0; i < boxes.size(); ++i)
    for (std::size_t j = i + 1; j < boxes.size(); ++j)
      rep.max_pair_overlap = std::max(rep.max_pair_overlap, intersection_area(*boxes[i], *boxes[j]));
  rep.item4 = rep.max_pair_overlap == 0.0 && opt.u2_margin > 0.0;

  const double m1 = opt.u1_margin * epsilon, m2 = opt.u2_margin * epsilon;
  bool separated = true;
  for (std::size_t i = 0; i < boxes.size() && separated; ++i)
    for (std::size_t j = i + 1; j < boxes.size() && separated; ++j)
      if (intersection_area(inflate(*boxes[i], m1), inflate(*boxes[j], m1)) > 0.0) separated = false;
  if (separated && 2.0 * (m1 + norm(L.r_.E1) + norm(L.r_.E2)) < 0.5) {
    rep.exact_u1 = true;
    rep.leb_u1 = 1.0;
    rep.leb_u2 = 1.0;
    for (const ChartBox* b : boxes) {
      rep.leb_u1 -= b->area() + b->perimeter() * m1 + std::numbers::pi * m1 * m1;
      rep.leb_u2 -= b->area() + b->perimeter() * m2 + std::numbers::pi * m2 * m2;
    }
  } else if (rep.item1 && rep.item4) {
    auto [u1, u2] = quadrature_sets(L, opt.quadrature_n);
    rep.leb_u1 = u1;
    rep.leb_u2 = u2;
  }
  rep.item3 = opt.u1_margin > opt.u2_margin && rep.leb_u1 > 0.5;

  if (!rep.item1) rep.failure = "item (1): small domains too large or misplaced";
  else if (!rep.item2) rep.failure = "item (2): center domains";
  else if (!rep.item4) rep.failure = "item (4): domains overlap";
  else if (!rep.item3) rep.failure = "item (3): Leb(U1) = " + std::to_string(rep.leb_u1);
  if (!rep.failure.empty()) throw Error(ErrorKind::InfeasibleLayout, rep.failure);
  return L;
}

}  // namespace kan3
