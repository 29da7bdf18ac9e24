#include "shearstab/linevolve.hpp"

#include <cmath>

#include "shearstab/errors.hpp"
#include "shearstab/kernels.hpp"

namespace shearstab {

double ledger_lhs(const SpaceTimeLedger& led, double nu, int k) {
  double kk = std::abs(double(k));
  return kk * kk * led.T_L2L2_u + std::sqrt(nu) * kk * led.T_L2L2_om +
         led.sup_weighted_om * led.sup_weighted_om +
         led.sup_uinf * led.sup_uinf;
}

double ledger_ratio_unforced(const SpaceTimeLedger& led, double nu, int k) {
  return ledger_lhs(led, nu, k) / std::max(led.E_in, 1e-300);
}

double ledger_ratio_forced(const SpaceTimeLedger& led, double nu, int k) {
  double den = led.E_in + led.T_L2L2_f / nu;
  return ledger_lhs(led, nu, k) / std::max(den, 1e-300);
}

LinEvolver::LinEvolver(const ChebGrid& g, const ShearProfile& prof, double nu,
                       int k, LinOptions opts)
    : grid_(&g), nu_(nu), k_(k), opts_(opts), flow_(prof) {
  if (!(nu > 0.0)) throw std::invalid_argument("LinEvolver: nu must be positive");
  if (k == 0) throw std::invalid_argument("LinEvolver: k must be nonzero");
  if (prof.grid != &g)
    throw std::invalid_argument("LinEvolver: profile grid mismatch");

  const int n = g.n;
  double umax = prof.u.cwiseAbs().maxCoeff();
  double cfl = 0.4 / (std::abs(double(k)) * std::max(umax, 1e-12));
  dt_ = opts.dt > 0.0 ? opts.dt : std::min(0.1 * std::cbrt(nu), cfl);
  if (dt_ * std::abs(double(k)) * umax > 0.5)
    throw std::invalid_argument("LinEvolver: advective CFL violated");

  U_ = prof.u;
  d2U_ = prof.d2u;

  MatrixXd helm = g.d2 - double(k) * k * MatrixXd::Identity(n, n);
  MatrixXd A = MatrixXd::Identity(n, n) - 0.5 * dt_ * nu * helm;
  B_ = MatrixXd::Identity(n, n) + 0.5 * dt_ * nu * helm;
  A.row(0).setZero();
  A(0, 0) = 1.0;
  A.row(n - 1).setZero();
  A(n - 1, n - 1) = 1.0;
  lu_A_.compute(A);

  hop_ = g.helmholtz(double(k));

  // influence basis: homogeneous implicit solves with unit wall vorticity
  VectorXd e = VectorXd::Zero(n);
  e[0] = 1.0;
  VectorXd h1 = lu_A_.solve(e);
  e[0] = 0.0;
  e[n - 1] = 1.0;
  VectorXd h2 = lu_A_.solve(e);
  om_h1_ = h1.cast<cplx>();
  om_h2_ = h2.cast<cplx>();
  // rhs rows for the Helmholtz solve must vanish at the walls
  VectorXd h1b = h1, h2b = h2;
  h1b[0] = 0.0;
  h1b[n - 1] = 0.0;
  h2b[0] = 0.0;
  h2b[n - 1] = 0.0;
  VectorXd p1 = hop_->solve(h1b);
  VectorXd p2 = hop_->solve(h2b);
  psi_h1_ = p1.cast<cplx>();
  psi_h2_ = p2.cast<cplx>();

  Eigen::Matrix2d m;
  m(0, 0) = g.d1.row(0).dot(p1);
  m(0, 1) = g.d1.row(0).dot(p2);
  m(1, 0) = g.d1.row(n - 1).dot(p1);
  m(1, 1) = g.d1.row(n - 1).dot(p2);
  inf_ = m.inverse();

  sqw_.resize(n);
  for (int i = 0; i < n; ++i) {
    double s = 1.0 - (2.0 * g.nodes[i] - 1.0) * (2.0 * g.nodes[i] - 1.0);
    sqw_[i] = std::sqrt(std::max(0.0, s));
  }

  omega_ = VectorXcd::Zero(n);
  psi_ = VectorXcd::Zero(n);
  u2_ = VectorXcd::Zero(n);
}

VectorXcd LinEvolver::solve_A(const VectorXcd& rhs) const {
  VectorXd re = lu_A_.solve(rhs.real());
  VectorXd im = lu_A_.solve(rhs.imag());
  return re + cplx(0, 1) * im;
}

VectorXcd LinEvolver::explicit_term(const VectorXcd& om,
                                    const VectorXcd& ps) const {
  const int n = grid_->n;
  const cplx ik(0.0, double(k_));
  VectorXcd out(n);
  for (int i = 0; i < n; ++i)
    out[i] = -ik * U_[i] * om[i] + ik * d2U_[i] * ps[i];
  return out;
}

void LinEvolver::apply_noslip(VectorXcd& om, VectorXcd& ps) const {
  const int n = grid_->n;
  cplx dp0 = grid_->d1.row(0).cast<cplx>().dot(ps);
  cplx dp1 = grid_->d1.row(n - 1).cast<cplx>().dot(ps);
  cplx a = -(inf_(0, 0) * dp0 + inf_(0, 1) * dp1);
  cplx b = -(inf_(1, 0) * dp0 + inf_(1, 1) * dp1);
  kernels::axpy(a, om_h1_.data(), om.data(), n);
  kernels::axpy(b, om_h2_.data(), om.data(), n);
  kernels::axpy(a, psi_h1_.data(), ps.data(), n);
  kernels::axpy(b, psi_h2_.data(), ps.data(), n);
}

void LinEvolver::set_state(const VectorXcd& omega_in) {
  if (omega_in.size() != grid_->n)
    throw std::invalid_argument("set_state: size mismatch");
  t_ = 0.0;
  omega_ = omega_in;
  VectorXcd b = omega_;
  b[0] = 0.0;
  b[grid_->n - 1] = 0.0;
  psi_ = hop_->solve(b);
  u2_ = -cplx(0, double(k_)) * psi_;
  have_nprev_ = false;
  if (opts_.evolve_profile) flow_.eval_u_d2u(nu_, 0.0, U_, d2U_);
}

void LinEvolver::step(const VectorXcd& f1, const VectorXcd& f2) {
  const int n = grid_->n;
  const cplx ik(0.0, double(k_));
  VectorXcd N = explicit_term(omega_, psi_);
  if (f1.size() == n) {
    for (int i = 0; i < n; ++i) N[i] -= ik * f1[i];
  }
  if (f2.size() == n) N -= grid_->d1 * f2;

  if (!have_nprev_) {
    nprev_ = N;
    have_nprev_ = true;
  }
  VectorXcd rhs = B_ * omega_;
  for (int i = 0; i < n; ++i) rhs[i] += dt_ * (1.5 * N[i] - 0.5 * nprev_[i]);
  rhs[0] = 0.0;
  rhs[n - 1] = 0.0;

  VectorXcd om = solve_A(rhs);
  VectorXcd b = om;
  b[0] = 0.0;
  b[n - 1] = 0.0;
  VectorXcd ps = hop_->solve(b);
  apply_noslip(om, ps);

  omega_.swap(om);
  psi_.swap(ps);
  u2_ = -ik * psi_;
  nprev_.swap(N);
  t_ += dt_;
  if (opts_.evolve_profile && !flow_.is_steady())
    flow_.eval_u_d2u(nu_, t_, U_, d2U_);

  if (!std::isfinite(omega_[n / 2].real()) ||
      !std::isfinite(omega_[n / 2].imag()))
    throw BlowupError("linear evolution produced NaN", t_, k_);
}

void LinEvolver::step_unforced() {
  static const VectorXcd empty;
  step(empty, empty);
}

VectorXcd LinEvolver::u1() const { return grid_->d1 * psi_; }

double LinEvolver::initial_energy(const VectorXcd& omega_in) const {
  const ChebGrid& g = *grid_;
  const int n = g.n;
  const double kk = double(k_);
  VectorXcd dom = g.d1 * omega_in;
  double e = kernels::wnorm2(g.quad.data(), dom.data(), n) / (kk * kk);
  VectorXcd b = omega_in;
  b[0] = 0.0;
  b[n - 1] = 0.0;
  VectorXcd ps = hop_->solve(b);
  VectorXcd w1 = g.d1 * ps;
  VectorXcd w2 = -cplx(0, kk) * ps;
  VectorXcd dw1 = g.d1 * w1;
  VectorXcd dw2 = g.d1 * w2;
  double h1 = kernels::wnorm2(g.quad.data(), w1.data(), n) * (1.0 + kk * kk) +
              kernels::wnorm2(g.quad.data(), w2.data(), n) * (1.0 + kk * kk) +
              kernels::wnorm2(g.quad.data(), dw1.data(), n) +
              kernels::wnorm2(g.quad.data(), dw2.data(), n);
  return e + h1;
}

SpaceTimeLedger LinEvolver::run(const VectorXcd& omega_in, double horizon,
                                const Forcing& forcing) {
  const ChebGrid& g = *grid_;
  const int n = g.n;
  set_state(omega_in);

  SpaceTimeLedger led;
  led.eps_rate = opts_.eps_rate;
  led.E_in = initial_energy(omega_in);

  const double rate = opts_.eps_rate * std::cbrt(nu_);
  VectorXcd f1, f2;
  if (forcing) {
    f1 = VectorXcd::Zero(n);
    f2 = VectorXcd::Zero(n);
  }

  long nsteps = std::max(1L, std::lround(std::ceil(horizon / dt_)));
  long sample_every = std::max(1L, nsteps / std::max(1, opts_.samples));

  auto measure = [&](double* gu, double* gom, double* gf) {
    double e2 = std::exp(2.0 * rate * t_);
    VectorXcd w1 = u1();
    double u_sq = kernels::wnorm2(g.quad.data(), w1.data(), n) +
                  kernels::wnorm2(g.quad.data(), u2_.data(), n);
    double om_sq = kernels::wnorm2(g.quad.data(), omega_.data(), n);
    *gu = e2 * u_sq;
    *gom = e2 * om_sq;
    if (forcing) {
      double f_sq = kernels::wnorm2(g.quad.data(), f1.data(), n) +
                    kernels::wnorm2(g.quad.data(), f2.data(), n);
      *gf = e2 * f_sq;
    } else {
      *gf = 0.0;
    }
    double e1 = std::exp(rate * t_);
    VectorXd wq = g.quad.cwiseProduct(sqw_.cwiseProduct(sqw_));
    double wom = std::sqrt(
        std::max(0.0, kernels::wnorm2(wq.data(), omega_.data(), n)));
    led.sup_weighted_om = std::max(led.sup_weighted_om, e1 * wom);
    double uinf = kernels::max_abs_pair(w1.data(), u2_.data(), n);
    led.sup_uinf = std::max(led.sup_uinf, e1 * uinf);
    return std::make_tuple(std::sqrt(om_sq), uinf, wom, std::sqrt(u_sq));
  };

  double gu0, gom0, gf0;
  if (forcing) forcing(t_, f1, f2);
  auto [oml2, uinf, wom, ul2] = measure(&gu0, &gom0, &gf0);
  led.samples.push_back({t_, oml2, uinf, wom, ul2});

  for (long s = 0; s < nsteps; ++s) {
    if (forcing) {
      forcing(t_, f1, f2);
      step(f1, f2);
    } else {
      step_unforced();
    }
    double gu1, gom1, gf1;
    auto [oml2b, uinfb, womb, ul2b] = measure(&gu1, &gom1, &gf1);
    led.T_L2L2_u += 0.5 * dt_ * (gu0 + gu1);
    led.T_L2L2_om += 0.5 * dt_ * (gom0 + gom1);
    led.T_L2L2_f += 0.5 * dt_ * (gf0 + gf1);
    gu0 = gu1;
    gom0 = gom1;
    gf0 = gf1;
    if (s % sample_every == sample_every - 1 || s == nsteps - 1)
      led.samples.push_back({t_, oml2b, uinfb, womb, ul2b});
  }
  return led;
}

DecayFit decay_rate(const std::vector<SpaceTimeLedger::Sample>& samples,
                    double horizon) {
  DecayFit out;
  std::vector<double> ts, ls;
  for (const auto& s : samples) {
    if (s.t < 0.5 * horizon || s.om_l2 <= 0.0) continue;
    ts.push_back(s.t);
    ls.push_back(std::log(s.om_l2));
  }
  if (ts.size() < 3) return out;
  double n = double(ts.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sx += ts[i];
    sy += ls[i];
    sxx += ts[i] * ts[i];
    sxy += ts[i] * ls[i];
    syy += ls[i] * ls[i];
  }
  double vxx = sxx - sx * sx / n;
  double vxy = sxy - sx * sy / n;
  double vyy = syy - sy * sy / n;
  if (vxx <= 0.0) return out;
  double slope = vxy / vxx;
  out.rate = -slope;
  out.decaying = out.rate > 0.0;
  out.r2 = vyy > 0.0 ? vxy * vxy / (vxx * vyy) : 1.0;
  return out;
}

double damping_factor(double nu, int k, double vprime, double t) {
  double k2 = double(k) * k;
  return std::exp(-nu * k2 * (vprime * vprime * t * t * t / 3.0 + t));
}

SplitDiag homogeneous_split_diag(const ChebGrid& g, const ShearProfile& prof,
                                 double nu, int k, const VectorXcd& omega_in,
                                 double horizon, int nsamples) {
  const int n = g.n;
  const cplx ik(0.0, double(k));
  LinOptions lo;
  lo.evolve_profile = false;
  LinEvolver evolver(g, prof, nu, k, lo);
  evolver.set_state(omega_in);

  auto hop = g.helmholtz(double(k));
  auto euler_rhs = [&](const VectorXcd& om) {
    VectorXcd b = om;
    b[0] = 0.0;
    b[n - 1] = 0.0;
    VectorXcd ps = hop->solve(b);
    VectorXcd out(n);
    for (int i = 0; i < n; ++i)
      out[i] = -ik * prof.u[i] * om[i] + ik * prof.d2u[i] * ps[i];
    return out;
  };

  double umax = prof.u.cwiseAbs().maxCoeff();
  double dte_target = 0.05 / (std::abs(double(k)) * std::max(umax, 1e-12));

  VectorXcd om0 = omega_in;  // inviscid solution
  double te = 0.0;
  auto rk4_to = [&](double target) {
    while (te < target - 1e-14) {
      double dt = std::min(dte_target, target - te);
      VectorXcd k1 = euler_rhs(om0);
      VectorXcd k2 = euler_rhs(om0 + 0.5 * dt * k1);
      VectorXcd k3 = euler_rhs(om0 + 0.5 * dt * k2);
      VectorXcd k4 = euler_rhs(om0 + dt * k3);
      om0 += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      te += dt;
    }
  };

  SplitDiag diag;
  double om_in_l2 = l2_norm(g, omega_in);
  diag.t.push_back(0.0);
  diag.discrepancy.push_back(0.0);

  long nsteps = std::max(1L, std::lround(std::ceil(horizon / evolver.dt())));
  long every = std::max(1L, nsteps / std::max(1, nsamples));
  for (long s = 0; s < nsteps; ++s) {
    evolver.step_unforced();
    if (s % every == every - 1 || s == nsteps - 1) {
      double t = evolver.time();
      rk4_to(t);
      VectorXcd omh1(n);
      for (int i = 0; i < n; ++i)
        omh1[i] = damping_factor(nu, k, prof.du[i], t) * om0[i];
      diag.t.push_back(t);
      diag.discrepancy.push_back(l2_norm(g, VectorXcd(evolver.omega() - omh1)) /
                                 om_in_l2);
    }
  }
  return diag;
}

ZeroModeStepper::ZeroModeStepper(const ChebGrid& g, double nu, double dt)
    : grid_(&g), dt_(dt) {
  if (!(nu > 0.0) || !(dt > 0.0))
    throw std::invalid_argument("ZeroModeStepper: nu, dt must be positive");
  const int n = g.n;
  MatrixXd A = MatrixXd::Identity(n, n) - 0.5 * dt * nu * g.d2;
  B_ = MatrixXd::Identity(n, n) + 0.5 * dt * nu * g.d2;
  A.row(0).setZero();
  A(0, 0) = 1.0;
  A.row(n - 1).setZero();
  A(n - 1, n - 1) = 1.0;
  lu_A_.compute(A);
}

VectorXd ZeroModeStepper::step(const VectorXd& u10, const VectorXd& f021) const {
  const int n = grid_->n;
  VectorXd rhs = B_ * u10;
  if (f021.size() == n) rhs -= dt_ * f021;
  rhs[0] = 0.0;
  rhs[n - 1] = 0.0;
  return lu_A_.solve(rhs);
}

VectorXd zero_mode_step(const ChebGrid& g, double nu, const VectorXd& u10,
                        double dt, const VectorXd& f021) {
  return ZeroModeStepper(g, nu, dt).step(u10, f021);
}

double calibrate_eps0(int n) {
  const double nu = 1e-4;
  const int k = 1;
  ChebGrid g = build_grid(n);
  ShearProfile prof = make_profile(g, "couette");

  VectorXcd psi0(g.n);
  for (int i = 0; i < g.n; ++i) {
    double y = g.nodes[i];
    psi0[i] = y * y * (1.0 - y) * (1.0 - y);
  }
  MatrixXd helm = g.d2 - double(k) * k * MatrixXd::Identity(g.n, g.n);
  VectorXcd om_in = helm.cast<cplx>() * psi0;
  om_in /= l2_norm(g, om_in);

  double horizon = 5.0 * std::pow(nu, -1.0 / 3.0);
  auto ratio_at = [&](double eps) {
    LinOptions lo;
    lo.eps_rate = eps;
    LinEvolver ev(g, prof, nu, k, lo);
    SpaceTimeLedger led = ev.run(om_in, horizon);
    return ledger_ratio_unforced(led, nu, k);
  };

  double r0 = ratio_at(0.0);
  double best = 0.01;
  for (int i = 0; i < 9; ++i) {
    double eps = 0.01 * std::pow(20.0, i / 8.0);  // log grid over [0.01, 0.2]
    if (ratio_at(eps) <= 10.0 * r0) best = eps;
  }
  return best;
}

}  // namespace shearstab
