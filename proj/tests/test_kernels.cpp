#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "shearstab/kernels.hpp"

using namespace shearstab;
using kernels::cplx;

namespace {

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(unsigned long long seed) : eng(seed) {}
  double real() { return double(eng() >> 11) * 0x1p-53 * 2.0 - 1.0; }
  cplx c() { return {real(), real()}; }
};

std::vector<double> rand_real(Rng& r, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = r.real();
  return v;
}

std::vector<cplx> rand_cplx(Rng& r, std::size_t n) {
  std::vector<cplx> v(n);
  for (auto& x : v) x = r.c();
  return v;
}

constexpr std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 64, 129, 200};

}  // namespace

TEST_CASE("dispatched kernels match the scalar reference") {
  Rng r(12345);
  INFO("active isa: ", kernels::active_isa());
  for (std::size_t n : kSizes) {
    auto w = rand_real(r, n);
    auto f = rand_cplx(r, n);
    auto g = rand_cplx(r, n);

    double s_ref = kernels::scalar::wnorm2(w.data(), f.data(), n);
    double s = kernels::wnorm2(w.data(), f.data(), n);
    CHECK(s == doctest::Approx(s_ref).epsilon(1e-13));

    cplx d_ref = kernels::scalar::wdot(w.data(), f.data(), g.data(), n);
    cplx d = kernels::wdot(w.data(), f.data(), g.data(), n);
    CHECK(std::abs(d - d_ref) <= 1e-13 * (1.0 + std::abs(d_ref)));

    cplx a = r.c();
    auto y1 = g, y2 = g;
    kernels::scalar::axpy(a, f.data(), y1.data(), n);
    kernels::axpy(a, f.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::abs(y1[i] - y2[i]) <= 1e-14 * (1.0 + std::abs(y1[i])));

    auto b = rand_real(r, n);
    std::vector<double> o1(n, 0.5), o2(n, 0.5);
    kernels::scalar::rmul(w.data(), b.data(), o1.data(), n);
    kernels::rmul(w.data(), b.data(), o2.data(), n);
    CHECK(o1 == o2);

    std::vector<double> p1(n, 0.25), p2(n, 0.25);
    kernels::scalar::rfma(w.data(), b.data(), p1.data(), n);
    kernels::rfma(w.data(), b.data(), p2.data(), n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(p1[i] == doctest::Approx(p2[i]).epsilon(1e-15));

    CHECK(kernels::max_abs(f.data(), n) ==
          doctest::Approx(kernels::scalar::max_abs(f.data(), n)).epsilon(1e-15));
    CHECK(kernels::max_abs_pair(f.data(), g.data(), n) ==
          doctest::Approx(kernels::scalar::max_abs_pair(f.data(), g.data(), n))
              .epsilon(1e-15));
  }
}

TEST_CASE("wnorm2 agrees with wdot of a field with itself") {
  Rng r(777);
  for (std::size_t n : {5u, 64u, 129u}) {
    auto w = rand_real(r, n);
    auto f = rand_cplx(r, n);
    cplx d = kernels::wdot(w.data(), f.data(), f.data(), n);
    double s = kernels::wnorm2(w.data(), f.data(), n);
    CHECK(d.real() == doctest::Approx(s).epsilon(1e-12));
    CHECK(std::abs(d.imag()) <= 1e-12 * (1.0 + std::abs(s)));
  }
}

TEST_CASE("axpy with zero coefficient is a no-op") {
  Rng r(9);
  auto f = rand_cplx(r, 77);
  auto y = rand_cplx(r, 77);
  auto y0 = y;
  kernels::axpy(cplx(0, 0), f.data(), y.data(), 77);
  CHECK(y == y0);
}
