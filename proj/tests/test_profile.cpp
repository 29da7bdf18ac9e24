#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "shearstab/profile.hpp"

using namespace shearstab;

TEST_CASE("condition (M) presets") {
  ChebGrid g = build_grid(129);

  SUBCASE("couette passes as linear with c0=C0=1") {
    ShearProfile p = make_profile(g, "couette");
    auto r = validate_condition_M(p);
    CHECK(r.pass);
    CHECK(p.convexity == Convexity::Linear);
    CHECK(p.c0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.C0 == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("sinus perturbation is concave with the analytic c0") {
    ShearProfile p = make_profile(g, "sinus-concave", 0.1);
    auto r = validate_condition_M(p);
    CHECK(r.pass);
    CHECK(p.convexity == Convexity::Concave);
    CHECK(p.c0 == doctest::Approx(1.0 - 0.1 * M_PI).epsilon(1e-9));
  }

  SUBCASE("quadratic fails monotonicity at the wall") {
    ShearProfile p = make_profile(g, "quadratic");
    auto r = validate_condition_M(p);
    CHECK(!r.pass);
    CHECK(!r.monotone);
  }

  SUBCASE("tanh profile is monotone but d2u does not vanish at walls") {
    ShearProfile p = make_profile(g, "tanh-monotone", 2.0);
    auto r = validate_condition_M(p);
    CHECK(!r.pass);
    CHECK(r.monotone);
    CHECK(!r.walls_flat);
  }

  SUBCASE("all five (M) presets validate") {
    for (const char* name : {"couette", "sinus-concave", "sinus-convex",
                             "poly-concave", "poly-convex"}) {
      ShearProfile p = make_profile(g, name);
      auto r = validate_condition_M(p);
      INFO("preset ", name);
      CHECK(r.pass);
    }
  }
}

TEST_CASE("heat evolution") {
  ChebGrid g = build_grid(129);

  SUBCASE("linear profiles are steady") {
    ShearProfile p = make_profile(g, "couette");
    ShearProfile q = heat_evolve(p, 1e-3, 5.0);
    CHECK((q.u - p.u).cwiseAbs().maxCoeff() < 1e-13);
  }

  SUBCASE("t=0 returns the input") {
    ShearProfile p = make_profile(g, "sinus-concave", 0.1);
    ShearProfile q = heat_evolve(p, 1e-3, 0.0);
    CHECK((q.u - p.u).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("single sine mode decays with the exact rate") {
    double eps = 0.1, nu = 1e-2, t = 3.0;
    ShearProfile p = make_profile(g, "sinus-concave", eps);
    ShearProfile q = heat_evolve(p, nu, t);
    double err = 0.0;
    double d = std::exp(-nu * M_PI * M_PI * t);
    for (int i = 0; i < g.n; ++i) {
      double exact = g.nodes[i] + eps * d * std::sin(M_PI * g.nodes[i]);
      err = std::max(err, std::abs(q.u[i] - exact));
    }
    CHECK(err < 1e-10);
  }

  SUBCASE("negative time or viscosity rejected") {
    ShearProfile p = make_profile(g, "couette");
    CHECK_THROWS_AS(heat_evolve(p, 1e-3, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(heat_evolve(p, -1e-3, 1.0), std::invalid_argument);
  }

  SUBCASE("monotonicity bounds survive evolution (maximum principle)") {
    double nu = 1e-3;
    for (const char* name : {"sinus-concave", "poly-convex", "poly-concave"}) {
      ShearProfile p = make_profile(g, name);
      HeatFlow flow(p);
      double tmax = std::pow(nu, -1.0 / 3.0);
      for (double t : {0.1 * tmax, tmax, 10.0 * tmax}) {
        ShearProfile q = flow.at(nu, t);
        INFO(name, " at t=", t);
        CHECK(q.c0 >= p.c0 - 1e-9);
        CHECK(q.C0 <= p.C0 + 1e-9);
        auto r = validate_condition_M(q);
        CHECK(r.pass);
      }
    }
  }

  SUBCASE("heat evolution matches a fine finite-difference solve") {
    double nu = 1e-2, t = 2.0;
    const int N = 4000;
    ShearProfile p = make_profile(g, "poly-concave", 1.0);
    ShearProfile q = heat_evolve(p, nu, t);
    auto u0 = [](double y) {
      return y - (y * y * y / 6.0 - y * y * y * y / 12.0);
    };
    VectorXd fd = oracles::fd_heat_dirichlet(u0, nu, t, N, 4000);
    double err = 0.0;
    for (int j = 0; j <= N; ++j) {
      double v = interp_node_values(g, q.u, double(j) / N);
      err = std::max(err, std::abs(v - fd[j]));
    }
    CHECK(err < 1e-6);  // FD oracle is second order
  }

  SUBCASE("instantaneous convexity sign") {
    ShearProfile p = make_profile(g, "poly-convex", 1.0);
    HeatFlow flow(p);
    for (double t : {1e-2, 1.0, 50.0}) {
      ShearProfile q = flow.at(1e-3, t);
      double scale = q.d2u.cwiseAbs().maxCoeff();
      for (int i = 1; i + 1 < g.n; ++i) CHECK(q.d2u[i] > -1e-12 * scale);
    }
  }

  SUBCASE("H2 energy bound: second derivative never grows") {
    for (const char* name : {"sinus-convex", "poly-concave"}) {
      ShearProfile p = make_profile(g, name);
      HeatFlow flow(p);
      double prev = 1e300;
      ScalarField d2 = ScalarField::zero(g);
      for (double t : {0.0, 0.5, 5.0, 50.0}) {
        ShearProfile q = flow.at(1e-3, t);
        d2.v = q.d2u.cast<cplx>();
        double nrm = field_norm(d2, NormKind::L2);
        CHECK(nrm <= prev + 1e-10);
        prev = nrm;
      }
    }
  }
}

TEST_CASE("regularity of the heat flow in time") {
  ChebGrid g = build_grid(129);
  ShearProfile p = make_profile(g, "sinus-concave", 0.1);

  SUBCASE("t=s gives zero differences") {
    auto r = regularity_check(p, 1e-3, 2.0, 2.0);
    CHECK(r.diff_u_inf == 0.0);
    CHECK(r.diff_d2u_l2 == 0.0);
  }

  SUBCASE("single-mode closed form for |U(1)-U(0)|") {
    double nu = 1e-2;
    auto r = regularity_check(p, nu, 1.0, 0.0);
    double expect = 0.1 * (1.0 - std::exp(-nu * M_PI * M_PI));
    CHECK(r.diff_u_inf == doctest::Approx(expect).epsilon(1e-8));
  }

  SUBCASE("ratio to nu |t-s| h4norm stays bounded across nu") {
    for (double nu : {1e-2, 1e-3, 1e-4}) {
      double dt = std::pow(nu, -1.0 / 3.0);
      auto r = regularity_check(p, nu, dt, 0.0);
      CHECK(r.ratio_u <= 2.0);
      CHECK(std::isfinite(r.ratio_d2u));
    }
  }
}
