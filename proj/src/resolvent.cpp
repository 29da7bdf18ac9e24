#include "shearstab/resolvent.hpp"

#include <cmath>
#include <stdexcept>

#include "shearstab/kernels.hpp"

namespace shearstab {

void validate_params(const ProblemParams& p, bool need_k) {
  if (!(p.nu > 0.0)) throw std::invalid_argument("params: nu must be positive");
  if (need_k && p.k == 0)
    throw std::invalid_argument("params: k must be nonzero");
  if (p.eps_rate < 0.0)
    throw std::invalid_argument("params: eps_rate must be >= 0");
  if (p.k != 0) {
    double cap = p.eps1 * std::cbrt(p.nu * double(p.k) * double(p.k));
    if (std::abs(p.o_term) > cap + 1e-15)
      throw std::invalid_argument("params: |o_term| exceeds eps1*(nu k^2)^(1/3)");
  }
}

int recommended_n(double nu, int k, int min_n) {
  double L = std::cbrt(std::abs(double(k)) / nu);
  if (L <= 2.0) return min_n;
  // >= 16 collocation points inside the wall layer of width 1/L; the
  // quadratic node clustering makes this an O(sqrt(L)) count
  double arg = std::clamp(1.0 - 2.0 / L, -1.0, 1.0);
  double N = 16.0 * M_PI / std::acos(arg);
  int n = std::max(min_n, int(std::ceil(N)) + 1);
  if (n % 2 == 0) ++n;
  return n;
}

OsSolver::OsSolver(const ChebGrid& g, const ShearProfile& prof,
                   const ProblemParams& pp)
    : grid_(&g), prof_(&prof), pp_(pp) {
  validate_params(pp, /*need_k=*/true);
  if (prof.grid != &g)
    throw std::invalid_argument("OsSolver: profile grid mismatch");
  const int n = g.n;
  const double k = pp.k;
  const cplx ik(0.0, k);

  helm_ = g.d2 - k * k * MatrixXd::Identity(n, n);

  // no-slip operator, 4th order in phi:
  //   -nu (d2-k^2)^2 phi + (ik(V-lambda)+o)(d2-k^2) phi - ik V'' phi
  Eigen::MatrixXcd M = (-pp.nu * (helm_ * helm_)).cast<cplx>();
  for (int i = 0; i < n; ++i) {
    cplx ci = ik * (prof.u[i] - pp.lambda) + pp.o_term;
    M.row(i) += ci * helm_.row(i).cast<cplx>();
    M(i, i) -= ik * prof.d2u[i];
  }
  M.row(0).setZero();
  M(0, 0) = 1.0;
  M.row(n - 1).setZero();
  M(n - 1, n - 1) = 1.0;
  M.row(1) = g.d1.row(0).cast<cplx>();
  M.row(n - 2) = g.d1.row(n - 1).cast<cplx>();
  lu_noslip_.compute(M);

  // Navier-slip operator, 2nd order in w with the nonlocal V'' term
  Eigen::MatrixXcd Mna = (-pp.nu * helm_).cast<cplx>();
  for (int i = 0; i < n; ++i)
    Mna(i, i) += ik * (prof.u[i] - pp.lambda) + pp.o_term;
  double vpp_scale = prof.d2u.cwiseAbs().maxCoeff();
  if (vpp_scale > 0.0) {
    auto hinv = g.helmholtz_inverse(k);
    for (int i = 0; i < n; ++i)
      Mna.row(i) -= (ik * prof.d2u[i]) * hinv->row(i).cast<cplx>();
  }
  Mna.row(0).setZero();
  Mna(0, 0) = 1.0;
  Mna.row(n - 1).setZero();
  Mna(n - 1, n - 1) = 1.0;
  lu_navier_.compute(Mna);

  hop_ = g.helmholtz(k);
}

VectorXcd OsSolver::rhs_for(const VectorXcd& F, cplx bc_dphi0,
                            cplx bc_dphi1) const {
  const int n = grid_->n;
  VectorXcd b = F;
  b[0] = 0.0;
  b[n - 1] = 0.0;
  b[1] = bc_dphi0;
  b[n - 2] = bc_dphi1;
  return b;
}

double OsSolver::residual_of(const VectorXcd& phi, const VectorXcd& F) const {
  const int n = grid_->n;
  const cplx ik(0.0, pp_.k);
  VectorXcd hphi = helm_ * phi;          // w
  VectorXcd t1 = pp_.nu * (helm_ * hphi);
  VectorXcd t2(n), t3(n);
  for (int i = 0; i < n; ++i) {
    t2[i] = (ik * (prof_->u[i] - pp_.lambda) + pp_.o_term) * hphi[i];
    t3[i] = ik * prof_->d2u[i] * phi[i];
  }
  double num = 0.0;
  for (int i = 2; i + 2 < n; ++i) {
    cplx r = -t1[i] + t2[i] - t3[i] - F[i];
    num += std::norm(r);
  }
  double scale = t1.norm() + t2.norm() + t3.norm() + F.norm() + 1e-300;
  return std::sqrt(num) / scale;
}

void OsSolver::solve_noslip(const VectorXcd& F, VectorXcd& w, VectorXcd& phi,
                            double* residual) const {
  phi = lu_noslip_.solve(rhs_for(F, 0.0, 0.0));
  if (!phi.allFinite())
    throw SolverFailure("no-slip OS solve not finite", pp_.nu, pp_.k,
                        pp_.lambda);
  w = helm_ * phi;
  if (residual) *residual = residual_of(phi, F);
}

void OsSolver::solve_corrector(int which, VectorXcd& wj, VectorXcd& phij) const {
  if (which != 1 && which != 2)
    throw std::invalid_argument("solve_corrector: which must be 1 or 2");
  VectorXcd zero = VectorXcd::Zero(grid_->n);
  cplx b0 = (which == 2) ? 1.0 : 0.0;
  cplx b1 = (which == 1) ? 1.0 : 0.0;
  phij = lu_noslip_.solve(rhs_for(zero, b0, b1));
  if (!phij.allFinite())
    throw SolverFailure("corrector OS solve not finite", pp_.nu, pp_.k,
                        pp_.lambda);
  wj = helm_ * phij;
}

void OsSolver::solve_navier(const VectorXcd& F, VectorXcd& w_na,
                            VectorXcd& phi_na) const {
  const int n = grid_->n;
  VectorXcd b = F;
  b[0] = 0.0;
  b[n - 1] = 0.0;
  w_na = lu_navier_.solve(b);
  if (!w_na.allFinite())
    throw SolverFailure("Navier-slip OS solve not finite", pp_.nu, pp_.k,
                        pp_.lambda);
  phi_na = hop_->solve(w_na);
}

ResolventSolution OsSolver::full_solve(const VectorXcd& F) const {
  ResolventSolution s;
  solve_noslip(F, s.w, s.phi, &s.residual);
  solve_navier(F, s.w_na, s.phi_na);
  solve_corrector(1, s.w1, s.phi1);
  solve_corrector(2, s.w2, s.phi2);
  auto [c1, c2] = coefficients(*grid_, s.w_na, pp_.k);
  s.c1 = c1;
  s.c2 = c2;
  return s;
}

ResolventSolution solve_noslip(const ProblemParams& pp, const ShearProfile& prof,
                               const ScalarField& F) {
  OsSolver solver(*F.grid, prof, pp);
  ResolventSolution s;
  solver.solve_noslip(F.v, s.w, s.phi, &s.residual);
  return s;
}

ResolventSolution solve_navier_slip(const ProblemParams& pp,
                                    const ShearProfile& prof,
                                    const ScalarField& F) {
  OsSolver solver(*F.grid, prof, pp);
  ResolventSolution s;
  solver.solve_navier(F.v, s.w_na, s.phi_na);
  return s;
}

std::pair<ScalarField, ScalarField> solve_corrector(const ProblemParams& pp,
                                                    const ShearProfile& prof,
                                                    int which) {
  const ChebGrid& g = *prof.grid;
  OsSolver solver(g, prof, pp);
  ScalarField w = ScalarField::zero(g), phi = ScalarField::zero(g);
  solver.solve_corrector(which, w.v, phi.v);
  return {std::move(w), std::move(phi)};
}

namespace {
// sinh(kappa a)/sinh(kappa) = e^{-kappa(1-a)} (1-e^{-2 kappa a})/(1-e^{-2 kappa})
double sinh_ratio(double kappa, double a) {
  double num = -std::expm1(-2.0 * kappa * a);
  double den = -std::expm1(-2.0 * kappa);
  return std::exp(-kappa * (1.0 - a)) * num / den;
}
}  // namespace

VectorXd sinh_kernel_bottom(const ChebGrid& g, int k) {
  double kappa = std::abs(double(k));
  VectorXd v(g.n);
  for (int i = 0; i < g.n; ++i) v[i] = sinh_ratio(kappa, 1.0 - g.nodes[i]);
  return v;
}

VectorXd sinh_kernel_top(const ChebGrid& g, int k) {
  double kappa = std::abs(double(k));
  VectorXd v(g.n);
  for (int i = 0; i < g.n; ++i) v[i] = sinh_ratio(kappa, g.nodes[i]);
  return v;
}

std::pair<cplx, cplx> sinh_pairings(const ChebGrid& g, const VectorXcd& w_na,
                                    int k) {
  if (k == 0) throw std::invalid_argument("sinh_pairings: k must be nonzero");
  VectorXd kb = sinh_kernel_bottom(g, k);
  VectorXd kt = sinh_kernel_top(g, k);
  cplx qb = 0.0, qt = 0.0;
  for (int i = 0; i < g.n; ++i) {
    qb += g.quad[i] * kb[i] * w_na[i];
    qt += g.quad[i] * kt[i] * w_na[i];
  }
  return {qb, qt};
}

std::pair<cplx, cplx> coefficients(const ChebGrid& g, const VectorXcd& w_na,
                                   int k) {
  auto [qb, qt] = sinh_pairings(g, w_na, k);
  // pairing the decomposition with the harmonic kernels pins the
  // coefficients: c1 (top corrector) = -<w_na, top>, c2 = +<w_na, bottom>
  return {-qt, qb};
}

WeightFn make_weight(const ProblemParams& pp, const ChebGrid& g) {
  validate_params(pp, true);
  WeightFn w;
  w.L = std::cbrt(std::abs(double(pp.k)) / pp.nu);
  w.values.resize(g.n);
  for (int i = 0; i < g.n; ++i) {
    double y = g.nodes[i];
    w.values[i] = std::min(1.0, w.L * std::min(y, 1.0 - y));
  }
  return w;
}

CutoffFn make_cutoff(const ProblemParams& pp, const ShearProfile& prof,
                     double delta) {
  if (!(delta > 0.0))
    throw std::invalid_argument("make_cutoff: delta must be positive");
  const ChebGrid& g = *prof.grid;
  CutoffFn c;
  c.delta = delta;
  c.chi.resize(g.n);
  c.chi_c.resize(g.n);
  c.chi_over.resize(g.n);
  c.e_mask.resize(g.n);
  for (int i = 0; i < g.n; ++i) {
    double d = prof.u[i] - pp.lambda;
    bool inside = std::abs(d) < delta;
    c.e_mask[i] = inside ? 1 : 0;
    if (inside) {
      double q = d / delta;
      c.chi[i] = 2.0 * q * q - q * q * q * q;
      c.chi_over[i] = (2.0 * d - d * d * d / (delta * delta)) / (delta * delta);
    } else {
      c.chi[i] = 1.0;
      c.chi_over[i] = 1.0 / d;
    }
    c.chi_c[i] = 1.0 - c.chi[i];
  }
  return c;
}

cplx weak_pairing(const ChebGrid& g, const VectorXcd& w_na, const VectorXcd& f) {
  return kernels::wdot(g.quad.data(), w_na.data(), f.data(), g.n);
}

}  // namespace shearstab
