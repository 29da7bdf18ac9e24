#pragma once
// Background shear flow: preset construction, the monotone/convexity
// structure checks, and the exact-in-time heat evolution of U(t,y).

#include <string>
#include <vector>

#include "shearstab/cheb.hpp"

namespace shearstab {

enum class Convexity { Convex, Concave, Linear, Mixed };

struct ShearProfile {
  const ChebGrid* grid = nullptr;
  VectorXd u, du, d2u, d3u, d4u;
  double c0 = 0.0;  // certified lower bound of du
  double C0 = 0.0;  // certified upper bound of du
  Convexity convexity = Convexity::Linear;
  double h4norm = 0.0;
  std::string name;
};

// presets: couette | sinus-concave(p=eps) | sinus-convex(p=eps) |
//          poly-concave(p=a) | poly-convex(p=a) | tanh-monotone(p=a) |
//          quadratic
ShearProfile make_profile(const ChebGrid& g, const std::string& preset,
                          double param = -1.0);
ShearProfile make_profile_from_values(const ChebGrid& g, std::string name,
                                      VectorXd u);
std::vector<std::string> profile_presets();

struct MValidationReport {
  bool pass = false;
  bool h4_finite = false;
  bool monotone = false;
  bool single_signed = false;
  bool walls_flat = false;
  double c0 = 0.0, C0 = 0.0;
  Convexity convexity = Convexity::Linear;
  std::vector<std::string> violations;
};

MValidationReport validate_condition_M(const ShearProfile& p);

// Heat evolution of the profile: subtract the wall interpolant, expand the
// remainder in sine modes, decay mode m by exp(-nu m^2 pi^2 t).  Exact in
// time; built once, evaluated at any t.
class HeatFlow {
 public:
  explicit HeatFlow(const ShearProfile& initial, int modes = 512);

  ShearProfile at(double nu, double t) const;
  // cheap evaluation of U(t) and d2U(t) only (time-stepper hot path)
  void eval_u_d2u(double nu, double t, VectorXd& u, VectorXd& d2u) const;
  bool is_steady() const { return steady_; }
  const ShearProfile& initial() const { return init_; }

 private:
  ShearProfile init_;
  int modes_;
  bool steady_ = false;  // all sine coefficients negligible
  double wall0_ = 0.0, slope_ = 0.0;
  VectorXd b_;            // sine coefficients, m = 1..modes-1
  MatrixXd ssin_, scos_;  // n x (modes-1) evaluation tables
};

ShearProfile heat_evolve(const ShearProfile& p, double nu, double t);

struct RegularityReport {
  double diff_u_inf = 0.0;    // |U(t)-U(s)|_Linf
  double diff_d2u_l2 = 0.0;   // |d2U(t)-d2U(s)|_L2
  double reference = 0.0;     // nu * |t-s| * h4norm
  double ratio_u = 0.0;
  double ratio_d2u = 0.0;
};

RegularityReport regularity_check(const ShearProfile& p, double nu, double t,
                                  double s);

}  // namespace shearstab
