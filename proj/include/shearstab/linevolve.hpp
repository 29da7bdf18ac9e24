#pragma once
// Linearized evolution around the heat-evolved shear flow: CN/AB2 IMEX
// stepping with influence-matrix enforcement of the no-slip pair, the
// weighted space-time ledger, decay-rate fits and the inviscid-split
// diagnostic.

#include <functional>
#include <vector>

#include "shearstab/profile.hpp"
#include "shearstab/resolvent.hpp"

namespace shearstab {

struct SpaceTimeLedger {
  double eps_rate = 0.0;
  double T_L2L2_u = 0.0;   // int e^{2 eps nu^{1/3} t} |u|_{L2}^2 dt
  double T_L2L2_om = 0.0;  // same for omega
  double T_L2L2_f = 0.0;   // same for the forcing pair
  double sup_weighted_om = 0.0;
  double sup_uinf = 0.0;
  double E_in = 0.0;

  struct Sample {
    double t = 0.0;
    double om_l2 = 0.0;
    double u_inf = 0.0;
    double weighted_om = 0.0;
    double u_l2 = 0.0;
  };
  std::vector<Sample> samples;
};

// LHS of the four-term space-time bound over its data term
double ledger_lhs(const SpaceTimeLedger& led, double nu, int k);
double ledger_ratio_unforced(const SpaceTimeLedger& led, double nu, int k);
double ledger_ratio_forced(const SpaceTimeLedger& led, double nu, int k);

struct LinOptions {
  double dt = 0.0;  // 0: min(0.1 nu^{1/3}, 0.4/(|k| max|U|))
  int samples = 200;
  bool evolve_profile = true;  // false: frozen coefficients
  double eps_rate = 0.0;
};

class LinEvolver {
 public:
  LinEvolver(const ChebGrid& g, const ShearProfile& prof, double nu, int k,
             LinOptions opts = {});

  void set_state(const VectorXcd& omega_in);
  void step(const VectorXcd& f1, const VectorXcd& f2);
  void step_unforced();

  using Forcing = std::function<void(double, VectorXcd&, VectorXcd&)>;
  SpaceTimeLedger run(const VectorXcd& omega_in, double horizon,
                      const Forcing& forcing = nullptr);

  const VectorXcd& omega() const { return omega_; }
  const VectorXcd& psi() const { return psi_; }
  VectorXcd u1() const;
  const VectorXcd& u2() const { return u2_; }
  double time() const { return t_; }
  double dt() const { return dt_; }
  const VectorXd& wall_weight() const { return sqw_; }
  const ChebGrid& grid() const { return *grid_; }
  double initial_energy(const VectorXcd& omega_in) const;

 private:
  const ChebGrid* grid_;
  double nu_;
  int k_;
  LinOptions opts_;
  double dt_ = 0.0;
  double t_ = 0.0;

  HeatFlow flow_;
  VectorXd U_, d2U_;

  Eigen::PartialPivLU<MatrixXd> lu_A_;  // I - dt nu/2 (d2 - k^2)
  MatrixXd B_;                          // I + dt nu/2 (d2 - k^2)
  std::shared_ptr<const HelmholtzOp> hop_;
  VectorXcd om_h1_, om_h2_, psi_h1_, psi_h2_;  // influence basis
  Eigen::Matrix2d inf_;                        // influence matrix, inverted
  VectorXd sqw_;                               // sqrt(1-(2y-1)^2)

  VectorXcd omega_, psi_, u2_, nprev_;
  bool have_nprev_ = false;

  VectorXcd explicit_term(const VectorXcd& om, const VectorXcd& ps) const;
  void apply_noslip(VectorXcd& om, VectorXcd& ps) const;
  VectorXcd solve_A(const VectorXcd& rhs) const;
};

struct DecayFit {
  double rate = 0.0;  // of |omega(t)|_{L2} ~ e^{-rate t}
  bool decaying = false;
  double r2 = 0.0;
};

DecayFit decay_rate(const std::vector<SpaceTimeLedger::Sample>& samples,
                    double horizon);

// pointwise enhanced-dissipation factor e^{-nu k^2 ((V')^2 t^3/3 + t)}
double damping_factor(double nu, int k, double vprime, double t);

struct SplitDiag {
  std::vector<double> t;
  std::vector<double> discrepancy;  // |omega - omega_H1|_{L2} / |omega_in|_{L2}
};

// frozen-profile comparison of the viscous solution against the damped
// inviscid solution
SplitDiag homogeneous_split_diag(const ChebGrid& g, const ShearProfile& prof,
                                 double nu, int k, const VectorXcd& omega_in,
                                 double horizon, int nsamples = 16);

class ZeroModeStepper {
 public:
  ZeroModeStepper(const ChebGrid& g, double nu, double dt);
  // one CN step of (d_t - nu d_yy) u = -f, Dirichlet walls; f evaluated at
  // the half step
  VectorXd step(const VectorXd& u10, const VectorXd& f021) const;

 private:
  const ChebGrid* grid_;
  double dt_;
  Eigen::PartialPivLU<MatrixXd> lu_A_;
  MatrixXd B_;
};

VectorXd zero_mode_step(const ChebGrid& g, double nu, const VectorXd& u10,
                        double dt, const VectorXd& f021);

// largest eps in a log grid over [0.01, 0.2] whose unforced ledger ratio on
// Couette at nu=1e-4 stays within 10x of the eps=0 value
double calibrate_eps0(int n = 129);

}  // namespace shearstab
