#pragma once

#include <string>
#include <vector>

#include "kan3/torus.hpp"

namespace kan3 {

struct LayoutOptions {
  double box_area_fraction = 0.8;  // Leb(U_x) = fraction * epsilon for x = q, r, s
  double plateau = 0.5;            // alpha1 = 1 where max(|a|,|b|) <= plateau
  double chart_half = 2.5;         // U_C = [-h,h]^2 in chart units
  double c2_u_half = 3.0;          // U_C2 u-half-width in units of lambda^{-2 n0}
  double u2_margin = 0.5;          // U2 = {dist > u2_margin * epsilon}
  double u1_margin = 1.0;          // U1 = {dist > u1_margin * epsilon}
  int quadrature_n = 2048;
};

enum class Region { None, S, R, Q, C, C2Orbit, U2 };

/// Where a base point falls, with the alpha1 weight there.
struct Placement {
  Region region = Region::None;
  int orbit_index = 0;  // i for A^i(U_C2)
  double alpha1 = 0.0;
  Vec2 local;           // box coordinates when inside a box
};

struct LayoutReport {
  bool item1 = false;
  bool item2 = false;
  bool item3 = false;
  bool item4 = false;
  double leb_r = 0.0, leb_s = 0.0, leb_q = 0.0;
  double leb_center_union = 0.0;
  double leb_u1 = 0.0, leb_u2 = 0.0;
  double max_pair_overlap = 0.0;
  bool exact_u1 = false;
  std::string failure;
};

class DomainLayout {
 public:
  double epsilon() const { return epsilon_; }
  const LayoutOptions& options() const { return opt_; }
  const AdaptedChart& chart() const { return chart_; }
  const ChartBox& box_r() const { return r_; }
  const ChartBox& box_s() const { return s_; }
  const ChartBox& box_q() const { return q_; }
  const ChartBox& box_c() const { return c_; }
  const ChartBox& box_c2() const { return c2_; }
  /// A^i(U_C2) for i = 1 .. 2 n0 - 1 (index i - 1).
  const std::vector<ChartBox>& c2_orbit() const { return orbit_; }
  const LayoutReport& report() const { return report_; }

  /// Boxes whose neighbourhood is excluded from U2.
  std::vector<const ChartBox*> excluded() const;
  double distance_to_excluded(TorusPoint2 x) const;
  bool in_u1(TorusPoint2 x) const { return distance_to_excluded(x) > opt_.u1_margin * epsilon_; }
  bool in_u2(TorusPoint2 x) const { return distance_to_excluded(x) > opt_.u2_margin * epsilon_; }

  Placement place(TorusPoint2 x) const;

  friend DomainLayout build_layout(const AnosovMap&, const AdaptedChart&, double, const LayoutOptions&);

 private:
  double box_alpha(const ChartBox& b, Vec2 l, double pa, double pb) const;

  double epsilon_ = 0.0;
  LayoutOptions opt_;
  AdaptedChart chart_;
  ChartBox r_, s_, q_, c_, c2_;
  std::vector<ChartBox> orbit_;
  struct FastBox {
    TorusPoint2 c;
    double i00, i01, i10, i11;  // inverse of [E1 E2]
    double n1, n2;
    double reach;  // circumradius + u1 margin
    bool orthogonal;
    Region region;
    int orbit_index;
    double pa, pb;
  };
  std::vector<FastBox> fast_;
  std::vector<ChartBox> ex_;    // copies of the excluded boxes
  std::vector<double> radius_;  // circumradius per excluded box, same order as excluded()
  double c_plateau_ = 0.8;
  double c2_u_plateau_ = 2.0 / 3.0;
  LayoutReport report_;
};

/// Builds and verifies the perturbation domains; throws InfeasibleLayout.
DomainLayout build_layout(const AnosovMap& A, const AdaptedChart& chart, double epsilon,
                          const LayoutOptions& opt = {});

/// Grid quadrature of Leb(U1) at resolution n.
double quadrature_u1(const DomainLayout& layout, int n);

}  // namespace kan3
