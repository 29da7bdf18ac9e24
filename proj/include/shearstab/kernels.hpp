#pragma once
// SIMD core: data-parallel primitives used by the spectral solvers.
// Every entry point has a scalar reference implementation; on x86 an AVX2
// variant is selected at runtime.  Set SHEARSTAB_NO_SIMD=1 to force scalar.

#include <complex>
#include <cstddef>

namespace shearstab::kernels {

using cplx = std::complex<double>;

// sum_i w[i] * |f[i]|^2
double wnorm2(const double* w, const cplx* f, std::size_t n);
// sum_i w[i] * f[i] * conj(g[i])
cplx wdot(const double* w, const cplx* f, const cplx* g, std::size_t n);
// y[i] += a * x[i]
void axpy(cplx a, const cplx* x, cplx* y, std::size_t n);
// out[i] = a[i] * b[i]
void rmul(const double* a, const double* b, double* out, std::size_t n);
// out[i] += a[i] * b[i]
void rfma(const double* a, const double* b, double* out, std::size_t n);
// max_i |f[i]|
double max_abs(const cplx* f, std::size_t n);
// max_i sqrt(|u[i]|^2 + |v[i]|^2)
double max_abs_pair(const cplx* u, const cplx* v, std::size_t n);

// name of the instruction set the dispatch table resolved to ("avx2"/"scalar")
const char* active_isa();

namespace scalar {
double wnorm2(const double* w, const cplx* f, std::size_t n);
cplx wdot(const double* w, const cplx* f, const cplx* g, std::size_t n);
void axpy(cplx a, const cplx* x, cplx* y, std::size_t n);
void rmul(const double* a, const double* b, double* out, std::size_t n);
void rfma(const double* a, const double* b, double* out, std::size_t n);
double max_abs(const cplx* f, std::size_t n);
double max_abs_pair(const cplx* u, const cplx* v, std::size_t n);
}  // namespace scalar

#ifdef SHEARSTAB_HAVE_AVX2
namespace avx2 {
double wnorm2(const double* w, const cplx* f, std::size_t n);
cplx wdot(const double* w, const cplx* f, const cplx* g, std::size_t n);
void axpy(cplx a, const cplx* x, cplx* y, std::size_t n);
void rmul(const double* a, const double* b, double* out, std::size_t n);
void rfma(const double* a, const double* b, double* out, std::size_t n);
double max_abs(const cplx* f, std::size_t n);
double max_abs_pair(const cplx* u, const cplx* v, std::size_t n);
}  // namespace avx2
#endif

}  // namespace shearstab::kernels
