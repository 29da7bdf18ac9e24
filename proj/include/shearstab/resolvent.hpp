#pragma once
// Orr-Sommerfeld resolvent solves: the no-slip problem (4th order in the
// stream function), the Navier-slip problem, the two wall correctors, the
// decomposition coefficients, and the weight/cutoff objects.

#include <utility>
#include <vector>

#include "shearstab/cheb.hpp"
#include "shearstab/errors.hpp"
#include "shearstab/profile.hpp"

namespace shearstab {

struct ProblemParams {
  double nu = 1e-4;
  int k = 1;
  double lambda = 0.5;
  cplx o_term = 0.0;
  double eps1 = 0.01;     // admissible |o_term| <= eps1 * (nu k^2)^(1/3)
  double eps_rate = 0.0;  // exponential weight rate used by evolution modules
};

void validate_params(const ProblemParams& p, bool need_k);

struct ResolventSolution {
  VectorXcd w, phi;        // no-slip pair
  VectorXcd w_na, phi_na;  // Navier-slip pair
  VectorXcd w1, phi1;      // corrector with d(phi1)(1)=1
  VectorXcd w2, phi2;      // corrector with d(phi2)(0)=1
  cplx c1 = 0.0, c2 = 0.0;
  double residual = 0.0;
};

struct WeightFn {
  double L = 0.0;
  VectorXd values;
};

struct CutoffFn {
  double delta = 0.0;
  VectorXd chi;       // 1 off E_delta, quartic polynomial inside
  VectorXd chi_c;     // 1 - chi
  VectorXd chi_over;  // chi/(V-lambda), evaluated in factored form on E_delta
  std::vector<char> e_mask;
};

// smallest grid with >= 8 collocation points inside the wall layer 1/L
int recommended_n(double nu, int k, int min_n = 129);

class OsSolver {
 public:
  OsSolver(const ChebGrid& g, const ShearProfile& prof,
           const ProblemParams& pp);

  void solve_noslip(const VectorXcd& F, VectorXcd& w, VectorXcd& phi,
                    double* residual = nullptr) const;
  void solve_navier(const VectorXcd& F, VectorXcd& w_na,
                    VectorXcd& phi_na) const;
  void solve_corrector(int which, VectorXcd& wj, VectorXcd& phij) const;
  ResolventSolution full_solve(const VectorXcd& F) const;

  const ChebGrid& grid() const { return *grid_; }
  const ProblemParams& params() const { return pp_; }

 private:
  const ChebGrid* grid_;
  const ShearProfile* prof_;
  ProblemParams pp_;
  MatrixXd helm_;  // d2 - k^2 I
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_noslip_;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_navier_;
  std::shared_ptr<const HelmholtzOp> hop_;

  VectorXcd rhs_for(const VectorXcd& F_interior, cplx bc_dphi0,
                    cplx bc_dphi1) const;
  double residual_of(const VectorXcd& phi, const VectorXcd& F) const;
};

// one-shot wrappers over OsSolver
ResolventSolution solve_noslip(const ProblemParams& pp, const ShearProfile& prof,
                               const ScalarField& F);
ResolventSolution solve_navier_slip(const ProblemParams& pp,
                                    const ShearProfile& prof,
                                    const ScalarField& F);
std::pair<ScalarField, ScalarField> solve_corrector(const ProblemParams& pp,
                                                    const ShearProfile& prof,
                                                    int which);

// overflow-safe boundary kernels
VectorXd sinh_kernel_bottom(const ChebGrid& g, int k);  // sinh(k(1-y))/sinh k
VectorXd sinh_kernel_top(const ChebGrid& g, int k);     // sinh(ky)/sinh k

// quadratures of w_na against (bottom, top) kernels
std::pair<cplx, cplx> sinh_pairings(const ChebGrid& g, const VectorXcd& w_na,
                                    int k);
// decomposition coefficients matching the Neumann wall data:
// w = w_na + c1 w1 + c2 w2
std::pair<cplx, cplx> coefficients(const ChebGrid& g, const VectorXcd& w_na,
                                   int k);

WeightFn make_weight(const ProblemParams& pp, const ChebGrid& g);
CutoffFn make_cutoff(const ProblemParams& pp, const ShearProfile& prof,
                     double delta);

// quadrature pairing <w_na, f> = integral of w_na * conj(f)
cplx weak_pairing(const ChebGrid& g, const VectorXcd& w_na, const VectorXcd& f);

}  // namespace shearstab
