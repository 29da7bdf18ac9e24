#pragma once
// Chebyshev collocation on [0,1]: Gauss-Lobatto nodes, differentiation
// matrices, Clenshaw-Curtis quadrature, Sobolev norms and the Dirichlet
// Helmholtz solve everything else is built on.

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <memory>
#include <mutex>

namespace shearstab {

using cplx = std::complex<double>;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// (d^2/dy^2 - k^2) with identity rows at both walls, LU-factorized.
struct HelmholtzOp {
  double k = 0.0;
  Eigen::PartialPivLU<MatrixXd> lu;

  VectorXd solve(const VectorXd& rhs) const { return lu.solve(rhs); }
  VectorXcd solve(const VectorXcd& rhs) const;
};

namespace detail {
struct GridCache;
}

struct ChebGrid {
  int n = 0;
  VectorXd nodes;  // increasing, nodes[0]=0, nodes[n-1]=1
  MatrixXd d1, d2;
  VectorXd quad;  // Clenshaw-Curtis weights, sum 1
  VectorXd bary;  // barycentric weights

  std::shared_ptr<detail::GridCache> cache;

  // factorized Helmholtz operator for wavenumber k (cached per grid)
  std::shared_ptr<const HelmholtzOp> helmholtz(double k) const;
  // dense inverse of the same operator (cached; used by coupled solves)
  std::shared_ptr<const MatrixXd> helmholtz_inverse(double k) const;
};

ChebGrid build_grid(int n);

struct ScalarField {
  const ChebGrid* grid = nullptr;
  VectorXcd v;

  ScalarField() = default;
  ScalarField(const ChebGrid& g, VectorXcd values)
      : grid(&g), v(std::move(values)) {}
  static ScalarField zero(const ChebGrid& g) {
    return {g, VectorXcd::Zero(g.n)};
  }
};

enum class NormKind { L2, H1k, H1kDual, Linf };

double field_norm(const ScalarField& f, NormKind kind, double k = 0.0);

// weighted L2 over the grid: sqrt(sum quad_i * weight_i * |v_i|^2)
double weighted_l2(const ChebGrid& g, const VectorXd& weight,
                   const VectorXcd& v);
double l2_norm(const ChebGrid& g, const VectorXcd& v);
cplx integrate(const ChebGrid& g, const VectorXcd& v);

// solves (d^2/dy^2 - k^2) psi = rhs with psi(0)=psi(1)=0
ScalarField solve_helmholtz_dirichlet(const ChebGrid& g, double k,
                                      const ScalarField& rhs);
VectorXcd solve_helmholtz_dirichlet(const ChebGrid& g, double k,
                                    const VectorXcd& rhs);

// barycentric interpolation of node values to an arbitrary point
double interp_node_values(const ChebGrid& g, const VectorXd& values, double y);
cplx interp_node_values(const ChebGrid& g, const VectorXcd& values, double y);

}  // namespace shearstab
