#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "shearstab/resolvent.hpp"

using namespace shearstab;

namespace {

ScalarField sample(const ChebGrid& g, const std::function<cplx(double)>& f) {
  ScalarField s = ScalarField::zero(g);
  for (int i = 0; i < g.n; ++i) s.v[i] = f(g.nodes[i]);
  return s;
}

double recomposition_residual(const ChebGrid& g, const ResolventSolution& s) {
  VectorXcd r = s.w - (s.w_na + s.c1 * s.w1 + s.c2 * s.w2);
  return l2_norm(g, r) / l2_norm(g, s.w);
}

}  // namespace

TEST_CASE("parameter validation") {
  ChebGrid g = build_grid(129);
  ShearProfile prof = make_profile(g, "couette");
  ScalarField F = sample(g, [](double y) { return std::sin(M_PI * y); });

  ProblemParams bad;
  bad.k = 0;
  CHECK_THROWS_AS(solve_noslip(bad, prof, F), std::invalid_argument);

  ProblemParams shifted;
  shifted.nu = 1e-4;
  shifted.k = 1;
  shifted.o_term = cplx(1.0, 0.0);  // far above eps1 (nu k^2)^(1/3)
  CHECK_THROWS_AS(solve_noslip(shifted, prof, F), std::invalid_argument);
}

TEST_CASE("zero forcing gives zero solutions") {
  ChebGrid g = build_grid(129);
  ShearProfile prof = make_profile(g, "sinus-concave", 0.1);
  ProblemParams pp;
  pp.nu = 1e-3;
  pp.k = 1;
  pp.lambda = 0.5;
  ScalarField zero = ScalarField::zero(g);
  ResolventSolution ns = solve_noslip(pp, prof, zero);
  CHECK(ns.w.cwiseAbs().maxCoeff() < 1e-12);
  ResolventSolution na = solve_navier_slip(pp, prof, zero);
  CHECK(na.w_na.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("boundary conditions of all four solves") {
  ChebGrid g = build_grid(129);
  ShearProfile prof = make_profile(g, "sinus-concave", 0.1);
  ProblemParams pp;
  pp.nu = 1e-4;
  pp.k = 2;
  pp.lambda = 0.4;
  OsSolver solver(g, prof, pp);
  ScalarField F = sample(g, [](double y) { return std::sin(M_PI * y); });

  ResolventSolution s = solver.full_solve(F.v);
  const int n = g.n;
  double wscale = s.w.cwiseAbs().maxCoeff();

  CHECK(std::abs(s.phi[0]) <= 1e-10 * wscale);
  CHECK(std::abs(s.phi[n - 1]) <= 1e-10 * wscale);
  VectorXcd dphi = g.d1 * s.phi;
  CHECK(std::abs(dphi[0]) <= 1e-8 * wscale);
  CHECK(std::abs(dphi[n - 1]) <= 1e-8 * wscale);

  double nascale = std::max(1.0, s.w_na.cwiseAbs().maxCoeff());
  CHECK(std::abs(s.w_na[0]) <= 1e-10 * nascale);
  CHECK(std::abs(s.w_na[n - 1]) <= 1e-10 * nascale);
  CHECK(std::abs(s.phi_na[0]) <= 1e-10 * nascale);
  CHECK(std::abs(s.phi_na[n - 1]) <= 1e-10 * nascale);

  VectorXcd dphi1 = g.d1 * s.phi1;
  VectorXcd dphi2 = g.d1 * s.phi2;
  CHECK(std::abs(dphi1[n - 1] - 1.0) <= 1e-8);
  CHECK(std::abs(dphi1[0]) <= 1e-8);
  CHECK(std::abs(dphi2[0] - 1.0) <= 1e-8);
  CHECK(std::abs(dphi2[n - 1]) <= 1e-8);

  CHECK(s.residual < 1e-10);
}

TEST_CASE("decomposition identity w = w_na + c1 w1 + c2 w2") {
  ChebGrid g = build_grid(129);
  ShearProfile couette = make_profile(g, "couette");
  ShearProfile concave = make_profile(g, "sinus-concave", 0.1);
  ScalarField F = sample(g, [](double y) { return std::sin(M_PI * y); });

  for (const ShearProfile* prof : {&couette, &concave}) {
    for (double nu : {1e-3, 1e-4}) {
      for (int k : {1, 2, -1}) {
        for (double lambda : {0.2, 0.5, 0.9}) {
          ProblemParams pp;
          pp.nu = nu;
          pp.k = k;
          pp.lambda = lambda;
          OsSolver solver(g, *prof, pp);
          ResolventSolution s = solver.full_solve(F.v);
          INFO("profile=", prof->name, " nu=", nu, " k=", k, " lambda=", lambda);
          CHECK(recomposition_residual(g, s) <= 1e-7);
        }
      }
    }
  }
}

TEST_CASE("randomized decomposition suite stays below 1e-7") {
  std::mt19937_64 eng(20260810);
  auto rnd = [&]() { return double(eng() >> 11) * 0x1p-53; };
  ChebGrid base = build_grid(129);
  ShearProfile prof = make_profile(base, "sinus-convex", 0.1);

  for (int trial = 0; trial < 12; ++trial) {
    double nu = std::pow(10.0, -3.0 - 3.0 * rnd());  // [1e-6, 1e-3]
    int kk[4] = {1, 2, 4, 8};
    int k = kk[eng() % 4] * (eng() % 2 ? 1 : -1);
    double lambda = -0.2 + 1.4 * rnd();
    int n = recommended_n(nu, k);
    ChebGrid g = build_grid(n);
    ShearProfile p = make_profile(g, "sinus-convex", 0.1);
    ProblemParams pp;
    pp.nu = nu;
    pp.k = k;
    pp.lambda = lambda;
    OsSolver solver(g, p, pp);
    ScalarField F = sample(g, [&](double y) {
      return cplx(std::sin(M_PI * y), std::cos(2 * M_PI * y) - 1.0);
    });
    ResolventSolution s = solver.full_solve(F.v);
    INFO("nu=", nu, " k=", k, " lambda=", lambda, " n=", n);
    CHECK(recomposition_residual(g, s) <= 1e-7);
  }
}

TEST_CASE("no-slip Couette solve matches the finite-difference oracle") {
  double nu = 1e-3, lambda = 0.5;
  int k = 1;
  ChebGrid g = build_grid(129);
  ShearProfile prof = make_profile(g, "couette");
  ProblemParams pp;
  pp.nu = nu;
  pp.k = k;
  pp.lambda = lambda;
  ResolventSolution s =
      solve_noslip(pp, prof, sample(g, [](double y) { return std::sin(M_PI * y); }));

  const int N = 4096;
  VectorXcd w_fd = oracles::fd_noslip_os(
      nu, k, lambda, 0.0, [](double y) { return y; }, [](double) { return 0.0; },
      [](double y) { return cplx(std::sin(M_PI * y)); }, N);

  double num = 0.0, den = 0.0;
  for (int j = 0; j <= N; ++j) {
    cplx ws = interp_node_values(g, s.w, double(j) / N);
    num += std::norm(ws - w_fd[j]);
    den += std::norm(w_fd[j]);
  }
  CHECK(std::sqrt(num / den) < 1e-5);
}

TEST_CASE("navier-slip Couette decouples and matches the tridiagonal oracle") {
  double nu = 1e-4, lambda = 0.5;
  int k = 1;
  ChebGrid g = build_grid(129);
  ShearProfile prof = make_profile(g, "couette");
  ProblemParams pp;
  pp.nu = nu;
  pp.k = k;
  pp.lambda = lambda;
  ResolventSolution s = solve_navier_slip(
      pp, prof, sample(g, [](double y) { return std::sin(M_PI * y); }));

  const int N = 8192;
  VectorXcd w_fd = oracles::fd_navier_decoupled(
      nu, k, lambda, 0.0, [](double y) { return y; },
      [](double y) { return cplx(std::sin(M_PI * y)); }, N);
  double num = 0.0, den = 0.0;
  for (int j = 0; j <= N; ++j) {
    cplx ws = interp_node_values(g, s.w_na, double(j) / N);
    num += std::norm(ws - w_fd[j]);
    den += std::norm(w_fd[j]);
  }
  CHECK(std::sqrt(num / den) < 1e-6);
}

TEST_CASE("coefficient quadratures") {
  ChebGrid g = build_grid(129);
  int k = 1;

  SUBCASE("zero input gives zero coefficients") {
    auto [c1, c2] = coefficients(g, VectorXcd::Zero(g.n), k);
    CHECK(std::abs(c1) == 0.0);
    CHECK(std::abs(c2) == 0.0);
  }

  SUBCASE("bottom kernel against itself reproduces the closed form") {
    VectorXd kb = sinh_kernel_bottom(g, k);
    auto [qb, qt] = sinh_pairings(g, kb.cast<cplx>(), k);
    double expect =
        (std::sinh(2.0) / 2.0 - 1.0) / (2.0 * std::sinh(1.0) * std::sinh(1.0));
    CHECK(qb.real() == doctest::Approx(expect).epsilon(1e-10));
    CHECK(std::abs(qb.imag()) < 1e-14);
    // the Neumann-matching coefficient of the bottom corrector carries qb
    auto [c1, c2] = coefficients(g, kb.cast<cplx>(), k);
    CHECK(c2.real() == doctest::Approx(expect).epsilon(1e-10));
    CHECK(c1 == -qt);
  }

  SUBCASE("weak pairing against the kernel equals the quadrature") {
    ChebGrid& gg = g;
    VectorXcd w(gg.n);
    for (int i = 0; i < gg.n; ++i)
      w[i] = cplx(std::cos(gg.nodes[i]), gg.nodes[i]);
    VectorXd kb = sinh_kernel_bottom(gg, k);
    cplx p = weak_pairing(gg, w, kb.cast<cplx>());
    auto [qb, qt] = sinh_pairings(gg, w, k);
    CHECK(std::abs(p - qb) < 1e-14);
    cplx self = weak_pairing(gg, w, w);
    CHECK(self.real() == doctest::Approx(l2_norm(gg, w) * l2_norm(gg, w))
                             .epsilon(1e-12));
  }

  SUBCASE("kernels stay finite for large k") {
    VectorXd kb = sinh_kernel_bottom(g, 800);
    CHECK(kb.allFinite());
    CHECK(kb[0] == doctest::Approx(1.0));
    CHECK(kb[g.n - 1] == doctest::Approx(0.0));
  }
}

TEST_CASE("weight function") {
  ChebGrid g = build_grid(129);
  ProblemParams pp;
  pp.nu = 1e-3;
  pp.k = 1;
  WeightFn w = make_weight(pp, g);
  CHECK(w.L == doctest::Approx(10.0));
  CHECK(w.values[0] == 0.0);
  CHECK(w.values[g.n - 1] == 0.0);
  CHECK(w.values[(g.n - 1) / 2] == 1.0);
  CHECK(w.values.minCoeff() >= 0.0);
  CHECK(w.values.maxCoeff() <= 1.0);
}

TEST_CASE("cutoff function") {
  ChebGrid g = build_grid(129);
  ShearProfile prof = make_profile(g, "couette");
  ProblemParams pp;
  pp.nu = 1e-3;
  pp.k = 1;
  pp.lambda = 0.5;  // exactly the midpoint node on an odd grid

  CutoffFn c = make_cutoff(pp, prof, 0.05);
  int mid = (g.n - 1) / 2;
  CHECK(c.chi[mid] == 0.0);
  CHECK(c.chi_over[mid] == 0.0);
  for (int i = 0; i < g.n; ++i) {
    CHECK(c.chi[i] >= -1e-15);
    CHECK(c.chi[i] <= 1.0 + 1e-15);
    if (!c.e_mask[i]) CHECK(c.chi[i] == 1.0);
    CHECK(std::isfinite(c.chi_over[i]));
  }

  // |chi_delta/(V-lambda)|_{L2} <= C delta^{-1/2}, C stable in delta
  auto scaled_norm = [&](double delta) {
    auto chi_over = [&](double y) {
      double d = y - 0.5;
      if (std::abs(d) < delta)
        return (2.0 * d - d * d * d / (delta * delta)) / (delta * delta);
      return 1.0 / d;
    };
    double val = std::sqrt(
        oracles::simpson([&](double y) { return chi_over(y) * chi_over(y); },
                         400000));
    return val * std::sqrt(delta);
  };
  double c1 = scaled_norm(1e-1);
  double c2 = scaled_norm(1e-2);
  double c3 = scaled_norm(1e-3);
  double lo = std::min({c1, c2, c3}), hi = std::max({c1, c2, c3});
  CHECK(hi / lo < 3.0);
}

TEST_CASE("corrector symmetry on the reflected Couette problem") {
  ChebGrid g = build_grid(129);
  ShearProfile prof = make_profile(g, "couette");
  for (double lambda : {0.3, 0.7}) {
    ProblemParams a, b;
    a.nu = b.nu = 1e-4;
    a.k = b.k = 1;
    a.lambda = lambda;
    b.lambda = 1.0 - lambda;  // V(0)+V(1)-lambda
    auto [w1a, phi1a] = solve_corrector(a, prof, 1);
    auto [w2b, phi2b] = solve_corrector(b, prof, 2);
    double n1 = field_norm(w1a, NormKind::L2);
    double n2 = field_norm(w2b, NormKind::L2);
    CHECK(std::abs(n1 - n2) <= 1e-8 * std::max(n1, n2));
  }
}

TEST_CASE("grid refinement leaves the no-slip norm unchanged") {
  ProblemParams pp;
  pp.nu = 1e-4;
  pp.k = 2;
  pp.lambda = 0.3;
  auto norm_at = [&](int n) {
    ChebGrid g = build_grid(n);
    ShearProfile prof = make_profile(g, "sinus-concave", 0.1);
    ScalarField F = ScalarField::zero(g);
    for (int i = 0; i < g.n; ++i) F.v[i] = std::sin(M_PI * g.nodes[i]);
    ResolventSolution s = solve_noslip(pp, prof, F);
    return l2_norm(g, s.w);
  };
  double a = norm_at(129);
  double b = norm_at(257);
  CHECK(std::abs(a - b) / b < 1e-4);
}

TEST_CASE("corrector norm grows like nu^(-1/4) at the matched wall value") {
  // quick sanity at two viscosities; the scan module owns the full fit
  ChebGrid g = build_grid(129);
  ShearProfile prof = make_profile(g, "couette");
  auto w1_norm = [&](double nu) {
    ProblemParams pp;
    pp.nu = nu;
    pp.k = 1;
    pp.lambda = 0.0;  // V(0)
    int n = recommended_n(nu, 1);
    ChebGrid gg = build_grid(n);
    ShearProfile p = make_profile(gg, "couette");
    auto [w1, phi1] = solve_corrector(pp, p, 1);
    return field_norm(w1, NormKind::L2);
  };
  double r = w1_norm(1e-5) / w1_norm(1e-4);
  // expect about 10^(1/4) = 1.78
  CHECK(r > 1.3);
  CHECK(r < 2.4);
}
