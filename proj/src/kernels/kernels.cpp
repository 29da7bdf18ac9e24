#include "shearstab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace shearstab::kernels {

namespace scalar {

double wnorm2(const double* w, const cplx* f, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    s += w[i] * (f[i].real() * f[i].real() + f[i].imag() * f[i].imag());
  return s;
}

cplx wdot(const double* w, const cplx* f, const cplx* g, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += w[i] * (f[i].real() * g[i].real() + f[i].imag() * g[i].imag());
    im += w[i] * (f[i].imag() * g[i].real() - f[i].real() * g[i].imag());
  }
  return {re, im};
}

void axpy(cplx a, const cplx* x, cplx* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void rmul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void rfma(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] += a[i] * b[i];
}

double max_abs(const cplx* f, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double a2 = f[i].real() * f[i].real() + f[i].imag() * f[i].imag();
    m = std::max(m, a2);
  }
  return std::sqrt(m);
}

double max_abs_pair(const cplx* u, const cplx* v, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double a2 = u[i].real() * u[i].real() + u[i].imag() * u[i].imag() +
                v[i].real() * v[i].real() + v[i].imag() * v[i].imag();
    m = std::max(m, a2);
  }
  return std::sqrt(m);
}

}  // namespace scalar

namespace {

struct Dispatch {
  double (*wnorm2)(const double*, const cplx*, std::size_t);
  cplx (*wdot)(const double*, const cplx*, const cplx*, std::size_t);
  void (*axpy)(cplx, const cplx*, cplx*, std::size_t);
  void (*rmul)(const double*, const double*, double*, std::size_t);
  void (*rfma)(const double*, const double*, double*, std::size_t);
  double (*max_abs)(const cplx*, std::size_t);
  double (*max_abs_pair)(const cplx*, const cplx*, std::size_t);
  const char* isa;

  Dispatch() {
    wnorm2 = scalar::wnorm2;
    wdot = scalar::wdot;
    axpy = scalar::axpy;
    rmul = scalar::rmul;
    rfma = scalar::rfma;
    max_abs = scalar::max_abs;
    max_abs_pair = scalar::max_abs_pair;
    isa = "scalar";
#ifdef SHEARSTAB_HAVE_AVX2
    const char* off = std::getenv("SHEARSTAB_NO_SIMD");
    bool want_simd = !(off && off[0] == '1');
    if (want_simd && __builtin_cpu_supports("avx2") &&
        __builtin_cpu_supports("fma")) {
      wnorm2 = avx2::wnorm2;
      wdot = avx2::wdot;
      axpy = avx2::axpy;
      rmul = avx2::rmul;
      rfma = avx2::rfma;
      max_abs = avx2::max_abs;
      max_abs_pair = avx2::max_abs_pair;
      isa = "avx2";
    }
#endif
  }
};

const Dispatch& disp() {
  static const Dispatch d;
  return d;
}

}  // namespace

double wnorm2(const double* w, const cplx* f, std::size_t n) {
  return disp().wnorm2(w, f, n);
}
cplx wdot(const double* w, const cplx* f, const cplx* g, std::size_t n) {
  return disp().wdot(w, f, g, n);
}
void axpy(cplx a, const cplx* x, cplx* y, std::size_t n) {
  disp().axpy(a, x, y, n);
}
void rmul(const double* a, const double* b, double* out, std::size_t n) {
  disp().rmul(a, b, out, n);
}
void rfma(const double* a, const double* b, double* out, std::size_t n) {
  disp().rfma(a, b, out, n);
}
double max_abs(const cplx* f, std::size_t n) { return disp().max_abs(f, n); }
double max_abs_pair(const cplx* u, const cplx* v, std::size_t n) {
  return disp().max_abs_pair(u, v, n);
}
const char* active_isa() { return disp().isa; }

}  // namespace shearstab::kernels
