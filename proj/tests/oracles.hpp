#pragma once
// Finite-difference and fine-quadrature oracles used by the test suites.
// Everything here is deliberately independent of the spectral library:
// uniform grids, central differences, banded solves.

#include <Eigen/Dense>
#include <complex>
#include <functional>

namespace oracles {

using cplx = std::complex<double>;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// tridiagonal solve (Thomas); a = sub, b = diag, c = super
VectorXcd thomas(VectorXcd a, VectorXcd b, VectorXcd c, VectorXcd d);

// uniform-grid Dirichlet Helmholtz: psi'' - k^2 psi = rhs, psi(0)=psi(1)=0.
// Returns psi at y_j = j/N, j=0..N.
VectorXcd fd_helmholtz(double k, const std::function<cplx(double)>& rhs, int N);

// Navier-slip OS solve for V''=0: (-nu(d2-k^2) + ik(V-lambda) + o) w = F,
// w(0)=w(1)=0, V given pointwise.
VectorXcd fd_navier_decoupled(double nu, int k, double lambda, cplx o,
                              const std::function<double(double)>& V,
                              const std::function<cplx(double)>& F, int N);

// no-slip OS solve, 4th order in phi with clamped conditions; returns
// w = phi'' - k^2 phi at the uniform nodes.
VectorXcd fd_noslip_os(double nu, int k, double lambda, cplx o,
                       const std::function<double(double)>& V,
                       const std::function<double(double)>& Vpp,
                       const std::function<cplx(double)>& F, int N);

// Crank-Nicolson heat solve with Dirichlet wall values held at the initial
// data; returns samples of U(t) on the uniform grid.
VectorXd fd_heat_dirichlet(const std::function<double(double)>& u0, double nu,
                           double t, int N, int steps);

// CN/AB2 linearized vorticity evolution on a uniform grid with
// influence-matrix no-slip enforcement; returns omega at the final time.
VectorXcd fd_lin_evolve(double nu, int k, const std::function<double(double)>& V,
                        const std::function<double(double)>& Vpp,
                        const std::function<cplx(double)>& omega_in,
                        double horizon, double dt, int N);

// composite Simpson integral of f over [0,1] with N (even) intervals
double simpson(const std::function<double(double)>& f, int N);

}  // namespace oracles
