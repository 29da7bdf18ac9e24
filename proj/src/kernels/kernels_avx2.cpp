// AVX2 variants of the SIMD core.  Complex arrays are interleaved (re,im);
// two complex lanes per 256-bit register.

#ifdef SHEARSTAB_HAVE_AVX2

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "shearstab/kernels.hpp"

namespace shearstab::kernels::avx2 {

namespace {

// [w0, w1] -> [w0, w0, w1, w1]
inline __m256d dup_weights(const double* w) {
  __m128d wp = _mm_loadu_pd(w);
  return _mm256_set_m128d(_mm_unpackhi_pd(wp, wp), _mm_unpacklo_pd(wp, wp));
}

inline double hsum(__m256d v) {
  double b[4];
  _mm256_storeu_pd(b, v);
  return (b[0] + b[1]) + (b[2] + b[3]);
}

}  // namespace

double wnorm2(const double* w, const cplx* f, std::size_t n) {
  const double* fd = reinterpret_cast<const double*>(f);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v0 = _mm256_loadu_pd(fd + 2 * i);
    __m256d v1 = _mm256_loadu_pd(fd + 2 * i + 4);
    acc0 = _mm256_fmadd_pd(_mm256_mul_pd(v0, v0), dup_weights(w + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_mul_pd(v1, v1), dup_weights(w + i + 2), acc1);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i)
    s += w[i] * (f[i].real() * f[i].real() + f[i].imag() * f[i].imag());
  return s;
}

cplx wdot(const double* w, const cplx* f, const cplx* g, std::size_t n) {
  const double* fd = reinterpret_cast<const double*>(f);
  const double* gd = reinterpret_cast<const double*>(g);
  __m256d acc_a = _mm256_setzero_pd();
  __m256d acc_b = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vf = _mm256_loadu_pd(fd + 2 * i);
    __m256d vg = _mm256_loadu_pd(gd + 2 * i);
    __m256d wd = dup_weights(w + i);
    acc_a = _mm256_fmadd_pd(_mm256_mul_pd(vf, vg), wd, acc_a);
    __m256d fs = _mm256_permute_pd(vf, 0b0101);
    acc_b = _mm256_fmadd_pd(_mm256_mul_pd(fs, vg), wd, acc_b);
  }
  double a[4], b[4];
  _mm256_storeu_pd(a, acc_a);
  _mm256_storeu_pd(b, acc_b);
  double re = (a[0] + a[1]) + (a[2] + a[3]);
  double im = (b[0] - b[1]) + (b[2] - b[3]);
  for (; i < n; ++i) {
    re += w[i] * (f[i].real() * g[i].real() + f[i].imag() * g[i].imag());
    im += w[i] * (f[i].imag() * g[i].real() - f[i].real() * g[i].imag());
  }
  return {re, im};
}

void axpy(cplx a, const cplx* x, cplx* y, std::size_t n) {
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  __m256d ar = _mm256_set1_pd(a.real());
  __m256d ai = _mm256_set1_pd(a.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(xd + 2 * i);
    __m256d vy = _mm256_loadu_pd(yd + 2 * i);
    __m256d t1 = _mm256_mul_pd(vx, ar);
    __m256d t2 = _mm256_mul_pd(_mm256_permute_pd(vx, 0b0101), ai);
    vy = _mm256_add_pd(vy, _mm256_addsub_pd(t1, t2));
    _mm256_storeu_pd(yd + 2 * i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void rmul(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i,
                     _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void rfma(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                                _mm256_loadu_pd(out + i));
    _mm256_storeu_pd(out + i, v);
  }
  for (; i < n; ++i) out[i] += a[i] * b[i];
}

double max_abs(const cplx* f, std::size_t n) {
  const double* fd = reinterpret_cast<const double*>(f);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d v = _mm256_loadu_pd(fd + 2 * i);
    __m256d m2 = _mm256_mul_pd(v, v);
    acc = _mm256_max_pd(acc, _mm256_hadd_pd(m2, m2));
  }
  double b[4];
  _mm256_storeu_pd(b, acc);
  double m = std::max(std::max(b[0], b[1]), std::max(b[2], b[3]));
  for (; i < n; ++i) {
    double a2 = f[i].real() * f[i].real() + f[i].imag() * f[i].imag();
    m = std::max(m, a2);
  }
  return std::sqrt(m);
}

double max_abs_pair(const cplx* u, const cplx* v, std::size_t n) {
  const double* ud = reinterpret_cast<const double*>(u);
  const double* vd = reinterpret_cast<const double*>(v);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d a = _mm256_loadu_pd(ud + 2 * i);
    __m256d b = _mm256_loadu_pd(vd + 2 * i);
    __m256d m2 = _mm256_fmadd_pd(b, b, _mm256_mul_pd(a, a));
    acc = _mm256_max_pd(acc, _mm256_hadd_pd(m2, m2));
  }
  double buf[4];
  _mm256_storeu_pd(buf, acc);
  double m = std::max(std::max(buf[0], buf[1]), std::max(buf[2], buf[3]));
  for (; i < n; ++i) {
    double a2 = u[i].real() * u[i].real() + u[i].imag() * u[i].imag() +
                v[i].real() * v[i].real() + v[i].imag() * v[i].imag();
    m = std::max(m, a2);
  }
  return std::sqrt(m);
}

}  // namespace shearstab::kernels::avx2

#endif  // SHEARSTAB_HAVE_AVX2
