// Unit tests for the truncated-series kernels and jet algebra.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lips/jet.hpp"

using namespace lips;

namespace {

Jet make_jet(double center, int order, std::initializer_list<double> vals) {
  Jet j;
  j.center = center;
  j.order = order;
  int k = 0;
  for (double v : vals) j.values[static_cast<std::size_t>(k++)] = v;
  return j;
}

// binomial coefficients up to n = 6
double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("jet/series conversion round trip") {
  const Jet j = make_jet(0.4, 6, {1.5, -2.0, 6.0, -24.0, 120.0, -720.0, 0.5});
  const Series s = jet_to_series(j);
  // series coefficient k = f^(k)/k!
  CHECK(s[0] == doctest::Approx(1.5));
  CHECK(s[1] == doctest::Approx(-2.0));
  CHECK(s[2] == doctest::Approx(3.0));
  CHECK(s[3] == doctest::Approx(-4.0));
  CHECK(s[4] == doctest::Approx(5.0));
  CHECK(s[5] == doctest::Approx(-6.0));
  CHECK(s[6] == doctest::Approx(0.5 / 720.0));
  const Jet back = series_to_jet(s, j.center, j.order);
  CHECK(back.center == j.center);
  CHECK(back.order == j.order);
  for (int k = 0; k <= 6; ++k)
    CHECK(back[k] == doctest::Approx(j[k]).epsilon(1e-15));
}

TEST_CASE("series_mul matches polynomial products") {
  Series a{}, b{};
  a[0] = 1.0;
  a[1] = 1.0;  // 1 + t
  b = a;
  const Series sq = series_mul(a, b, 6);
  CHECK(sq[0] == 1.0);
  CHECK(sq[1] == 2.0);
  CHECK(sq[2] == 1.0);
  CHECK(sq[3] == 0.0);

  Series c{}, d{};
  c[0] = 1.0;
  c[1] = 2.0;
  c[2] = 3.0;
  d[0] = 4.0;
  d[1] = 5.0;
  const Series e = series_mul(c, d, 2);  // truncated to order 2
  CHECK(e[0] == 4.0);
  CHECK(e[1] == 13.0);
  CHECK(e[2] == 22.0);
}

TEST_CASE("series_compose on polynomials") {
  // outer(u) = u^2, inner(t) = t + t^2  =>  t^2 + 2 t^3 + t^4
  Series outer{}, inner{};
  outer[2] = 1.0;
  inner[1] = 1.0;
  inner[2] = 1.0;
  const Series comp = series_compose(outer, inner, 6);
  CHECK(comp[0] == doctest::Approx(0.0));
  CHECK(comp[1] == doctest::Approx(0.0));
  CHECK(comp[2] == doctest::Approx(1.0));
  CHECK(comp[3] == doctest::Approx(2.0));
  CHECK(comp[4] == doctest::Approx(1.0));
  CHECK(comp[5] == doctest::Approx(0.0));
  CHECK(comp[6] == doctest::Approx(0.0));
}

TEST_CASE("series_revert inverts a cubic near zero") {
  // a(t) = t + t^3/3; the reversion b must satisfy b(a(t)) = t through
  // order 6.
  Series a{};
  a[1] = 1.0;
  a[3] = 1.0 / 3.0;
  const Series b = series_revert(a, 6);
  const Series idt = series_compose(b, a, 6);
  CHECK(idt[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(idt[1] == doctest::Approx(1.0).epsilon(1e-15));
  for (int k = 2; k <= 6; ++k)
    CHECK(std::fabs(idt[static_cast<std::size_t>(k)]) < 1e-14);
  // known closed form: b(t) = t - t^3/3 + t^5/3 - ...
  CHECK(b[1] == doctest::Approx(1.0));
  CHECK(b[3] == doctest::Approx(-1.0 / 3.0));
  CHECK(b[5] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("jet_compose agrees with the Leibniz square") {
  // g(y) = y + y^3/3 at y0 = 0.5; outer u -> u^2 expanded at g(y0).
  const double y0 = 0.5;
  const Jet g = make_jet(
      y0, 6, {y0 + y0 * y0 * y0 / 3.0, 1.0 + y0 * y0, 2.0 * y0, 2.0, 0.0, 0.0,
              0.0});
  const Jet outer =
      make_jet(g[0], 6, {g[0] * g[0], 2.0 * g[0], 2.0, 0.0, 0.0, 0.0, 0.0});
  const Jet comp = jet_compose(outer, g);
  CHECK(comp.center == doctest::Approx(y0));
  // (g^2)^(k) = sum_j C(k,j) g^(j) g^(k-j)
  for (int k = 0; k <= 6; ++k) {
    double expect = 0.0;
    for (int j = 0; j <= k; ++j) expect += binom(k, j) * g[j] * g[k - j];
    CHECK(comp[k] == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("jet_invert reproduces closed-form inverse derivatives") {
  // f(y) = y + y^3/3 at y0 = 0: inverse jet at 0 is
  // [0, 1, 0, -2, 0, 40, 0].
  const Jet f0 = make_jet(0.0, 6, {0.0, 1.0, 0.0, 2.0, 0.0, 0.0, 0.0});
  const Jet inv0 = jet_invert(f0);
  CHECK(inv0.center == doctest::Approx(0.0));
  const double expect0[7] = {0.0, 1.0, 0.0, -2.0, 0.0, 40.0, 0.0};
  for (int k = 0; k <= 6; ++k)
    CHECK(inv0[k] == doctest::Approx(expect0[k]).epsilon(1e-13));

  // at y0 = 1 (value 4/3): [1, 1/2, -1/4, 1/4, -5/16, 5/16, 35/64]
  const Jet f1 = make_jet(1.0, 6, {4.0 / 3.0, 2.0, 2.0, 2.0, 0.0, 0.0, 0.0});
  const Jet inv1 = jet_invert(f1);
  CHECK(inv1.center == doctest::Approx(4.0 / 3.0));
  const double expect1[7] = {1.0,     0.5,     -0.25,    0.25,
                             -0.3125, 0.3125,  0.546875};
  for (int k = 0; k <= 6; ++k)
    CHECK(inv1[k] == doctest::Approx(expect1[k]).epsilon(1e-13));

  // composing the two jets must give the identity derivative stack
  const Jet ident = jet_compose(inv1, f1);
  CHECK(ident[0] == doctest::Approx(1.0));
  CHECK(ident[1] == doctest::Approx(1.0));
  for (int k = 2; k <= 6; ++k) CHECK(std::fabs(ident[k]) < 1e-12);
}
