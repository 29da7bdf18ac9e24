#include "shearstab/profile.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace shearstab {

namespace {

double quad_l2(const ChebGrid& g, const VectorXd& v) {
  double s = 0.0;
  for (int i = 0; i < g.n; ++i) s += g.quad[i] * v[i] * v[i];
  return std::sqrt(std::max(0.0, s));
}

// refine interior extrema of du (zeros of d2u) and fold them into [lo,hi]
void certify_bounds(ShearProfile& p) {
  const ChebGrid& g = *p.grid;
  double lo = p.du.minCoeff();
  double hi = p.du.maxCoeff();
  for (int i = 1; i + 2 < g.n; ++i) {
    if (p.d2u[i] == 0.0 || p.d2u[i] * p.d2u[i + 1] >= 0.0) continue;
    double y = 0.5 * (g.nodes[i] + g.nodes[i + 1]);
    for (int it = 0; it < 3; ++it) {
      double f = interp_node_values(g, p.d2u, y);
      double fp = interp_node_values(g, p.d3u, y);
      if (fp == 0.0) break;
      double step = f / fp;
      y -= step;
      if (y < g.nodes[i] || y > g.nodes[i + 1]) {
        y = std::clamp(y, g.nodes[i], g.nodes[i + 1]);
        break;
      }
    }
    double v = interp_node_values(g, p.du, y);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  p.c0 = lo;
  p.C0 = hi;
}

void classify_and_finish(ShearProfile& p) {
  const ChebGrid& g = *p.grid;
  certify_bounds(p);
  double scale = p.d2u.cwiseAbs().maxCoeff();
  double du_scale = std::max(1.0, p.du.cwiseAbs().maxCoeff());
  // spectral differentiation of u floors d2u noise at ~eps * n^2 * |u|
  double diff_noise =
      1e-12 * double(g.n) * g.n * std::max(1.0, p.u.cwiseAbs().maxCoeff());
  if (scale <= std::max(1e-10 * du_scale, diff_noise)) {
    p.convexity = Convexity::Linear;
  } else {
    double mn = 0.0, mx = 0.0;
    for (int i = 1; i + 1 < g.n; ++i) {
      mn = std::min(mn, p.d2u[i]);
      mx = std::max(mx, p.d2u[i]);
    }
    if (mn >= -1e-10 * scale)
      p.convexity = Convexity::Convex;
    else if (mx <= 1e-10 * scale)
      p.convexity = Convexity::Concave;
    else
      p.convexity = Convexity::Mixed;
  }
  double h4sq = 0.0;
  for (const VectorXd* f : {&p.u, &p.du, &p.d2u, &p.d3u, &p.d4u}) {
    double nrm = quad_l2(g, *f);
    h4sq += nrm * nrm;
  }
  p.h4norm = std::sqrt(h4sq);
}

}  // namespace

ShearProfile make_profile_from_values(const ChebGrid& g, std::string name,
                                      VectorXd u) {
  if (u.size() != g.n)
    throw std::invalid_argument("make_profile_from_values: size mismatch");
  ShearProfile p;
  p.grid = &g;
  p.name = std::move(name);
  p.u = std::move(u);
  p.du = g.d1 * p.u;
  p.d2u = g.d1 * p.du;
  p.d3u = g.d1 * p.d2u;
  p.d4u = g.d1 * p.d3u;
  classify_and_finish(p);
  return p;
}

std::vector<std::string> profile_presets() {
  return {"couette",      "sinus-concave", "sinus-convex", "poly-concave",
          "poly-convex",  "tanh-monotone", "quadratic"};
}

ShearProfile make_profile(const ChebGrid& g, const std::string& preset,
                          double param) {
  std::function<double(double)> f;
  std::string name = preset;
  if (preset == "couette") {
    f = [](double y) { return y; };
  } else if (preset == "sinus-concave") {
    double eps = param > 0 ? param : 0.1;
    f = [eps](double y) { return y + eps * std::sin(M_PI * y); };
    name += "(" + std::to_string(eps) + ")";
  } else if (preset == "sinus-convex") {
    double eps = param > 0 ? param : 0.1;
    f = [eps](double y) { return y - eps * std::sin(M_PI * y); };
    name += "(" + std::to_string(eps) + ")";
  } else if (preset == "poly-concave") {
    double a = param > 0 ? param : 1.0;
    f = [a](double y) {
      return y - a * (y * y * y / 6.0 - y * y * y * y / 12.0);
    };
    name += "(" + std::to_string(a) + ")";
  } else if (preset == "poly-convex") {
    double a = param > 0 ? param : 1.0;
    f = [a](double y) {
      return y + a * (y * y * y / 6.0 - y * y * y * y / 12.0);
    };
    name += "(" + std::to_string(a) + ")";
  } else if (preset == "tanh-monotone") {
    double a = param > 0 ? param : 2.0;
    double s = std::tanh(0.5 * a);
    f = [a, s](double y) { return 0.5 + std::tanh(a * (y - 0.5)) / (2.0 * s); };
    name += "(" + std::to_string(a) + ")";
  } else if (preset == "quadratic") {
    f = [](double y) { return y * y; };
  } else {
    throw std::invalid_argument("make_profile: unknown preset '" + preset + "'");
  }
  VectorXd u(g.n);
  for (int i = 0; i < g.n; ++i) u[i] = f(g.nodes[i]);
  return make_profile_from_values(g, name, std::move(u));
}

MValidationReport validate_condition_M(const ShearProfile& p) {
  MValidationReport r;
  r.c0 = p.c0;
  r.C0 = p.C0;
  r.convexity = p.convexity;

  r.h4_finite = std::isfinite(p.h4norm);
  if (!r.h4_finite) r.violations.push_back("H4 norm not finite");

  r.monotone = p.c0 > 1e-10 * std::max(1.0, p.C0);
  if (!r.monotone) r.violations.push_back("du is not bounded below by c0 > 0");

  r.single_signed = p.convexity != Convexity::Mixed;
  if (!r.single_signed)
    r.violations.push_back("d2u changes sign on the interior");

  double wall_tol = 1e-8 * std::max(1.0, p.h4norm);
  int n = p.grid->n;
  r.walls_flat =
      std::abs(p.d2u[0]) <= wall_tol && std::abs(p.d2u[n - 1]) <= wall_tol;
  if (!r.walls_flat) r.violations.push_back("d2u does not vanish at the walls");

  r.pass = r.h4_finite && r.monotone && r.single_signed && r.walls_flat;
  return r;
}

HeatFlow::HeatFlow(const ShearProfile& initial, int modes)
    : init_(initial), modes_(modes) {
  const ChebGrid& g = *initial.grid;
  const int n = g.n;
  const int M = modes_;
  wall0_ = initial.u[0];
  slope_ = initial.u[n - 1] - initial.u[0];

  // interpolate the wall-compatible remainder onto the uniform sine grid
  VectorXd fj(M + 1);
  for (int j = 0; j <= M; ++j) {
    double y = double(j) / M;
    double v = (j == 0)   ? initial.u[0]
               : (j == M) ? initial.u[n - 1]
                          : interp_node_values(g, initial.u, y);
    fj[j] = v - (wall0_ + slope_ * y);
  }

  b_.setZero(M - 1);
  for (int m = 1; m < M; ++m) {
    double s = 0.0;
    for (int j = 1; j < M; ++j) s += fj[j] * std::sin(M_PI * m * j / M);
    b_[m - 1] = 2.0 * s / M;
  }

  double bmax = b_.cwiseAbs().maxCoeff();
  double uscale = std::max(1.0, initial.u.cwiseAbs().maxCoeff());
  steady_ = bmax <= 1e-14 * uscale;
  if (!steady_) {
    ssin_.resize(n, M - 1);
    scos_.resize(n, M - 1);
    for (int i = 0; i < n; ++i)
      for (int m = 1; m < M; ++m) {
        ssin_(i, m - 1) = std::sin(M_PI * m * g.nodes[i]);
        scos_(i, m - 1) = std::cos(M_PI * m * g.nodes[i]);
      }
  }
}

void HeatFlow::eval_u_d2u(double nu, double t, VectorXd& u,
                          VectorXd& d2u) const {
  const ChebGrid& g = *init_.grid;
  if (steady_ || t == 0.0) {
    u = init_.u;
    d2u = init_.d2u;
    return;
  }
  const int M = modes_;
  VectorXd c(M - 1), c2(M - 1);
  for (int m = 1; m < M; ++m) {
    double mp = M_PI * m;
    double d = std::exp(-nu * mp * mp * t);
    c[m - 1] = b_[m - 1] * d;
    c2[m - 1] = -c[m - 1] * mp * mp;
  }
  u = ssin_ * c;
  for (int i = 0; i < g.n; ++i) u[i] += wall0_ + slope_ * g.nodes[i];
  d2u = ssin_ * c2;
}

ShearProfile HeatFlow::at(double nu, double t) const {
  if (nu <= 0.0) throw std::invalid_argument("heat_evolve: nu must be positive");
  if (t < 0.0) throw std::invalid_argument("heat_evolve: t must be >= 0");
  if (t == 0.0 || steady_) {
    ShearProfile p = init_;
    if (t > 0.0) p.name = init_.name + "@t=" + std::to_string(t);
    return p;
  }
  const ChebGrid& g = *init_.grid;
  const int M = modes_;
  VectorXd c(M - 1), c1(M - 1), c2(M - 1), c3(M - 1), c4(M - 1);
  for (int m = 1; m < M; ++m) {
    double mp = M_PI * m;
    double d = std::exp(-nu * mp * mp * t) * b_[m - 1];
    c[m - 1] = d;
    c1[m - 1] = d * mp;
    c2[m - 1] = -d * mp * mp;
    c3[m - 1] = -d * mp * mp * mp;
    c4[m - 1] = d * mp * mp * mp * mp;
  }
  ShearProfile p;
  p.grid = &g;
  p.name = init_.name + "@t=" + std::to_string(t);
  p.u = ssin_ * c;
  p.du = scos_ * c1;
  p.d2u = ssin_ * c2;
  p.d3u = scos_ * c3;
  p.d4u = ssin_ * c4;
  for (int i = 0; i < g.n; ++i) {
    p.u[i] += wall0_ + slope_ * g.nodes[i];
    p.du[i] += slope_;
  }
  classify_and_finish(p);
  return p;
}

ShearProfile heat_evolve(const ShearProfile& p, double nu, double t) {
  if (nu <= 0.0) throw std::invalid_argument("heat_evolve: nu must be positive");
  if (t < 0.0) throw std::invalid_argument("heat_evolve: t must be >= 0");
  if (t == 0.0) return p;
  HeatFlow flow(p);
  return flow.at(nu, t);
}

RegularityReport regularity_check(const ShearProfile& p, double nu, double t,
                                  double s) {
  if (t < 0.0 || s < 0.0)
    throw std::invalid_argument("regularity_check: times must be >= 0");
  HeatFlow flow(p);
  ShearProfile pt = flow.at(nu, t);
  ShearProfile ps = flow.at(nu, s);
  RegularityReport r;
  r.diff_u_inf = (pt.u - ps.u).cwiseAbs().maxCoeff();
  r.diff_d2u_l2 = quad_l2(*p.grid, pt.d2u - ps.d2u);
  r.reference = nu * std::abs(t - s) * p.h4norm;
  double tiny = 1e-300;
  r.ratio_u = r.diff_u_inf / std::max(r.reference, tiny);
  r.ratio_d2u = r.diff_d2u_l2 / std::max(r.reference, tiny);
  return r;
}

}  // namespace shearstab
