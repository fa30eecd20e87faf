#pragma once

#include <numbers>

#include "kan3/layout.hpp"

namespace kan3 {

struct FieldOptions {
  double theta0 = 0.45;
  double beta2_half_width = 0.4;  // half-width of the beta2 transition window
  double alpha2_plateau = 0.3;    // in U_q box coordinates
  double alpha2_support = 0.8;
  double kappa = 2.0 * std::numbers::pi;
};

enum class FiberKind { Zero, SinPi, Sin2Pi, Beta1Sin2Pi, Beta2 };

class FieldSpec;

/// theta' = coef * shape(theta) with the base point frozen.
struct VerticalField {
  FiberKind kind = FiberKind::Zero;
  double coef = 0.0;
  const FieldSpec* spec = nullptr;  // needed for the beta-modulated shapes
};

class FieldSpec {
 public:
  FieldSpec(DomainLayout layout, const FieldOptions& opt = {});

  const DomainLayout& layout() const { return layout_; }
  const FieldOptions& options() const { return opt_; }
  double epsilon() const { return layout_.epsilon(); }
  double theta0() const { return opt_.theta0; }
  double kappa() const { return opt_.kappa; }
  double beta2_center() const { return center_; }

  double beta1(double theta) const;
  double beta1_derivative(double theta) const;
  double beta2(double theta) const;
  double beta2_derivative(double theta) const;
  double alpha2(TorusPoint2 x) const;

  /// Field 𝒳 above x (Zero when x is outside every support).
  VerticalField field_X(TorusPoint2 x) const;
  VerticalField field_X(const Placement& pl) const;
  VerticalField field_Y(TorusPoint2 x) const;

 private:
  double window(double theta) const;
  double window_derivative(double theta) const;

  DomainLayout layout_;
  FieldOptions opt_;
  double center_ = 0.5;
};

double field_value(const VerticalField& f, double theta);
double field_derivative(const VerticalField& f, double theta);

double eval_field_X(const FieldSpec& spec, const Point3& p);
double eval_field_Y(const FieldSpec& spec, const Point3& p);

struct FlowResult {
  double theta = 0.0;
  double derivative = 1.0;  // d theta(t) / d theta(0)
  int substeps = 0;         // 0 for closed forms
};

/// Time-t flow on [0,1] with its fiber derivative.
FlowResult flow(const VerticalField& f, double t, double theta);
/// RK4 with step doubling until successive results agree to 1e-10.
FlowResult flow_rk4(const VerticalField& f, double t, double theta);

inline double flow_theta(const VerticalField& f, double t, double theta) { return flow(f, t, theta).theta; }
inline double fiber_derivative(const VerticalField& f, double t, double theta) {
  return flow(f, t, theta).derivative;
}

}  // namespace kan3
