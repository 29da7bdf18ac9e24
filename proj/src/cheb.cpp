#include "shearstab/cheb.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "shearstab/kernels.hpp"

namespace shearstab {

namespace detail {
struct GridCache {
  std::mutex mu;
  std::map<long long, std::shared_ptr<const HelmholtzOp>> helm;
  std::map<long long, std::shared_ptr<const MatrixXd>> helm_inv;
};
}  // namespace detail

VectorXcd HelmholtzOp::solve(const VectorXcd& rhs) const {
  VectorXd re = lu.solve(rhs.real());
  VectorXd im = lu.solve(rhs.imag());
  return re + cplx(0, 1) * im;
}

ChebGrid build_grid(int n) {
  if (n < 8) throw std::invalid_argument("build_grid: n must be >= 8");
  if (n % 2 == 0) ++n;  // keep the Lobatto midpoint on the grid
  ChebGrid g;
  g.n = n;
  const int N = n - 1;
  g.nodes.resize(n);
  for (int i = 0; i < n; ++i)
    g.nodes[i] = 0.5 * (1.0 - std::cos(M_PI * i / N));
  g.nodes[0] = 0.0;
  g.nodes[N] = 1.0;
  if (n % 2 == 1) g.nodes[N / 2] = 0.5;

  g.bary.resize(n);
  for (int i = 0; i < n; ++i) {
    double w = (i % 2 == 0) ? 1.0 : -1.0;
    if (i == 0 || i == N) w *= 0.5;
    g.bary[i] = w;
  }

  // first-derivative matrix from the barycentric weights, negative-sum diagonal
  g.d1.setZero(n, n);
  for (int i = 0; i < n; ++i) {
    double rowsum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      double dij = (g.bary[j] / g.bary[i]) / (g.nodes[i] - g.nodes[j]);
      g.d1(i, j) = dij;
      rowsum += dij;
    }
    g.d1(i, i) = -rowsum;
  }

  // second derivative (Welfert recursion), negative-sum diagonal
  g.d2.setZero(n, n);
  for (int i = 0; i < n; ++i) {
    double rowsum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      double dij = 2.0 * g.d1(i, j) * (g.d1(i, i) - 1.0 / (g.nodes[i] - g.nodes[j]));
      g.d2(i, j) = dij;
      rowsum += dij;
    }
    g.d2(i, i) = -rowsum;
  }

  // Clenshaw-Curtis weights on [-1,1], then scaled to [0,1].
  g.quad.resize(n);
  {
    VectorXd w = VectorXd::Zero(n);
    VectorXd theta(n);
    for (int i = 0; i < n; ++i) theta[i] = M_PI * i / N;
    if (N % 2 == 0) {
      w[0] = w[N] = 1.0 / (N * N - 1);
      for (int i = 1; i < N; ++i) {
        double v = 1.0;
        for (int m = 1; m <= N / 2 - 1; ++m)
          v -= 2.0 * std::cos(2.0 * m * theta[i]) / (4.0 * m * m - 1.0);
        v -= std::cos(N * theta[i]) / (N * N - 1.0);
        w[i] = 2.0 * v / N;
      }
    } else {
      w[0] = w[N] = 1.0 / (N * N);
      for (int i = 1; i < N; ++i) {
        double v = 1.0;
        for (int m = 1; m <= (N - 1) / 2; ++m)
          v -= 2.0 * std::cos(2.0 * m * theta[i]) / (4.0 * m * m - 1.0);
        w[i] = 2.0 * v / N;
      }
    }
    // theta runs over decreasing x; our nodes increase in y, weights symmetric
    for (int i = 0; i < n; ++i) g.quad[i] = 0.5 * w[i];
  }

  g.cache = std::make_shared<detail::GridCache>();
  return g;
}

namespace {
long long key_of(double k) { return std::bit_cast<long long>(k); }
}  // namespace

std::shared_ptr<const HelmholtzOp> ChebGrid::helmholtz(double k) const {
  std::lock_guard<std::mutex> lock(cache->mu);
  auto it = cache->helm.find(key_of(k));
  if (it != cache->helm.end()) return it->second;
  auto op = std::make_shared<HelmholtzOp>();
  op->k = k;
  MatrixXd A = d2 - k * k * MatrixXd::Identity(n, n);
  A.row(0).setZero();
  A(0, 0) = 1.0;
  A.row(n - 1).setZero();
  A(n - 1, n - 1) = 1.0;
  op->lu.compute(A);
  cache->helm.emplace(key_of(k), op);
  return op;
}

std::shared_ptr<const MatrixXd> ChebGrid::helmholtz_inverse(double k) const {
  {
    std::lock_guard<std::mutex> lock(cache->mu);
    auto it = cache->helm_inv.find(key_of(k));
    if (it != cache->helm_inv.end()) return it->second;
  }
  auto op = helmholtz(k);
  auto inv = std::make_shared<MatrixXd>(op->lu.inverse());
  std::lock_guard<std::mutex> lock(cache->mu);
  cache->helm_inv.emplace(key_of(k), inv);
  return cache->helm_inv[key_of(k)];
}

double weighted_l2(const ChebGrid& g, const VectorXd& weight,
                   const VectorXcd& v) {
  VectorXd w = g.quad.cwiseProduct(weight);
  return std::sqrt(std::max(0.0, kernels::wnorm2(w.data(), v.data(), g.n)));
}

double l2_norm(const ChebGrid& g, const VectorXcd& v) {
  return std::sqrt(std::max(0.0, kernels::wnorm2(g.quad.data(), v.data(), g.n)));
}

cplx integrate(const ChebGrid& g, const VectorXcd& v) {
  cplx s = 0.0;
  for (int i = 0; i < g.n; ++i) s += g.quad[i] * v[i];
  return s;
}

VectorXcd solve_helmholtz_dirichlet(const ChebGrid& g, double k,
                                    const VectorXcd& rhs) {
  VectorXcd b = rhs;
  b[0] = 0.0;
  b[g.n - 1] = 0.0;
  return g.helmholtz(k)->solve(b);
}

ScalarField solve_helmholtz_dirichlet(const ChebGrid& g, double k,
                                      const ScalarField& rhs) {
  return {g, solve_helmholtz_dirichlet(g, k, rhs.v)};
}

double field_norm(const ScalarField& f, NormKind kind, double k) {
  const ChebGrid& g = *f.grid;
  switch (kind) {
    case NormKind::L2:
      return l2_norm(g, f.v);
    case NormKind::Linf:
      return kernels::max_abs(f.v.data(), g.n);
    case NormKind::H1k: {
      if (k == 0.0)
        throw std::invalid_argument("field_norm: H1k requires k != 0");
      VectorXcd dv = g.d1 * f.v;
      double a = kernels::wnorm2(g.quad.data(), dv.data(), g.n);
      double b = kernels::wnorm2(g.quad.data(), f.v.data(), g.n);
      return std::sqrt(a + k * k * b);
    }
    case NormKind::H1kDual: {
      if (k == 0.0)
        throw std::invalid_argument("field_norm: H1kDual requires k != 0");
      // Riesz representative: -(d^2/dy^2 - k^2) r = f, r(0)=r(1)=0
      VectorXcd r = solve_helmholtz_dirichlet(g, k, VectorXcd(-f.v));
      VectorXcd dr = g.d1 * r;
      double a = kernels::wnorm2(g.quad.data(), dr.data(), g.n);
      double b = kernels::wnorm2(g.quad.data(), r.data(), g.n);
      return std::sqrt(a + k * k * b);
    }
  }
  return 0.0;
}

namespace {

template <typename Vec>
auto interp_impl(const ChebGrid& g, const Vec& values, double y) ->
    typename Vec::Scalar {
  typename Vec::Scalar num = 0;
  double den = 0.0;
  for (int i = 0; i < g.n; ++i) {
    double d = y - g.nodes[i];
    if (std::abs(d) < 1e-14) return values[i];
    double c = g.bary[i] / d;
    num += c * values[i];
    den += c;
  }
  return num / den;
}

}  // namespace

double interp_node_values(const ChebGrid& g, const VectorXd& values, double y) {
  return interp_impl(g, values, y);
}

cplx interp_node_values(const ChebGrid& g, const VectorXcd& values, double y) {
  return interp_impl(g, values, y);
}

}  // namespace shearstab
