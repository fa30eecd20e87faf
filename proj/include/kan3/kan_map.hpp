#pragma once

#include <memory>
#include <string>
#include <vector>

#include "kan3/fields.hpp"

namespace kan3 {

/// Common interface of the skew products on T^3.
class SkewMap {
 public:
  virtual ~SkewMap() = default;
  virtual Point3 apply(const Point3& p) const = 0;
  virtual Point3 apply_inverse(const Point3& p) const = 0;
  /// Signed d(theta')/d(theta) of apply at p.
  virtual double fiber_derivative(const Point3& p) const = 0;
  virtual const AnosovMap& base() const = 0;
};

/// Everything needed to assemble K_t.
struct KanSetup {
  IntMatrix2 matrix{{{5, 2}, {2, 1}}};
  double t = 0.1;
  int n0 = 3;
  double epsilon = 0.05;
  LayoutOptions layout;
  FieldOptions fields;
  double center_scale = 1e-7;  // x_c = tan(pi (theta - 1/2)) / center_scale
  bool correction = true;      // false drops the nu-translation
};

/// Smooth translation by nu in the center coordinate, cut off in x_c.
struct CorrectionWindow {
  double h = 1e-7;
  double delta = 0.0;    // nu * h, the shift in tau = tan(pi (theta - 1/2))
  double tau_lo = 0.0;   // plateau starts at x_c = mu - 4
  double ramp_lo = 0.0;  // 16 nu in x_c units
  double tau_hi = 0.1;
  double ramp_hi = 0.9;

  double psi(double tau) const;
  double psi_derivative(double tau) const;
};

struct KanParams {
  double t = 0.1;
  int n0 = 3;
  double mu = 1.0;
  double nu = 0.0;
  AnosovMap anosov;
  AdaptedChart chart;
  std::shared_ptr<const FieldSpec> fields;
  CorrectionWindow window;
  bool correction = true;
};

KanParams make_params(const KanSetup& setup);

class KanMap : public SkewMap {
 public:
  explicit KanMap(KanParams params);

  const KanParams& params() const { return p_; }
  const FieldSpec& fields() const { return *p_.fields; }
  const DomainLayout& layout() const { return p_.fields->layout(); }
  const AnosovMap& base() const override { return p_.anosov; }

  /// phi_{x,t} on [0,1] with its derivative.
  FlowResult fiber(TorusPoint2 x, double theta) const;
  double fiber_inverse(TorusPoint2 x, double theta) const;
  /// Fiber of f_t alone (no 𝒴).
  FlowResult fiber_f(TorusPoint2 x, double theta) const;

  /// f_t, f~_t on T^2 x [0,1]; f^_t the odd extension; K_t = R o f^_t.
  Point3 f_t(const Point3& p) const;
  Point3 f_tilde(const Point3& p) const;
  Point3 f_hat(const Point3& p) const;
  Point3 apply(const Point3& p) const override;
  Point3 apply_inverse(const Point3& p) const override;
  double fiber_derivative(const Point3& p) const override;

  /// The nu-translation above x (identity off its support) and its inverse.
  FlowResult correction(const Placement& pl, double theta) const;
  double correction_inverse(const Placement& pl, double theta) const;

  double to_center(double theta) const;
  double from_center(double xc) const;

 private:
  bool corrected(const Placement& pl) const;

  KanParams p_;
};

KanMap make_K(const KanParams& params);

struct ConditionReport {
  double t = 0.0;
  // K1
  double k1_max_defect = 0.0;
  bool k1 = false;
  // K2
  int r_fixed_count = 0, s_fixed_count = 0;
  double r_mult0 = 0.0, r_mult1 = 0.0, s_mult0 = 0.0, s_mult1 = 0.0;
  bool k2 = false;
  // K3
  double k3_min = 0.0, k3_max = 0.0;
  double k3_lower = 0.0, k3_upper = 0.0;  // e^{-2 pi t}, e^{2 pi t}
  double lambda_inv = 0.0, lambda = 0.0;
  bool k3 = false;
  // K4
  double k4_integral0 = 0.0, k4_integral1 = 0.0;
  double k4_bound = 0.0;
  bool k4 = false;

  bool all() const { return k1 && k2 && k3 && k4; }
};

ConditionReport verify_kan_conditions(const KanMap& K, int quadrature_n, int theta_n = 33);

enum class TorusSelector { Zero, One };

/// g = K o Tr with Tr(x, theta) = (x, theta + eta rho(x) sigma(theta)).
class PerturbedMap : public SkewMap {
 public:
  PerturbedMap(std::shared_ptr<const KanMap> base_map, double eta, TorusSelector which, TorusPoint2 ball_center,
               double ball_radius);

  const KanMap& base_map() const { return *k_; }
  double eta() const { return eta_; }
  TorusSelector which() const { return which_; }
  TorusPoint2 ball_center() const { return center_; }
  double ball_radius() const { return radius_; }

  double rho(TorusPoint2 x) const;
  double sigma(double theta) const;
  double sigma_derivative(double theta) const;
  double translate_fiber(TorusPoint2 x, double theta) const;

  Point3 apply(const Point3& p) const override;
  Point3 apply_inverse(const Point3& p) const override;
  double fiber_derivative(const Point3& p) const override;
  const AnosovMap& base() const override { return k_->base(); }

 private:
  std::shared_ptr<const KanMap> k_;
  double eta_;
  TorusSelector which_;
  TorusPoint2 center_;
  double radius_;
};

PerturbedMap break_torus(std::shared_ptr<const KanMap> K, double eta, TorusSelector which);

enum class TorusStatus { Continuation, Broken };

TorusStatus su_torus_status(const SkewMap& g, TorusSelector which, int depth, double tol, int samples = 2000,
                            double half_length = 0.05);

const char* to_string(TorusStatus s);

}  // namespace kan3
