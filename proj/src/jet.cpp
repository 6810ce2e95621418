#include "lips/jet.hpp"

#include <algorithm>
#include <cmath>

#include "lips/errors.hpp"

namespace lips {

namespace {
constexpr std::array<double, kMaxJetOrder + 1> kFactorial = {1.0,  1.0,  2.0,
                                                             6.0,  24.0, 120.0,
                                                             720.0};
}  // namespace

Series jet_to_series(const Jet& j) {
  Series s{};
  for (int k = 0; k <= j.order; ++k)
    s[static_cast<size_t>(k)] = j.values[static_cast<size_t>(k)] /
                                kFactorial[static_cast<size_t>(k)];
  return s;
}

Jet series_to_jet(const Series& s, double center, int order) {
  Jet j;
  j.center = center;
  j.order = order;
  for (int k = 0; k <= order; ++k)
    j.values[static_cast<size_t>(k)] = s[static_cast<size_t>(k)] *
                                       kFactorial[static_cast<size_t>(k)];
  return j;
}

Series series_mul(const Series& a, const Series& b, int n) {
  Series c{};
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) c[static_cast<size_t>(i + j)] +=
        a[static_cast<size_t>(i)] * b[static_cast<size_t>(j)];
  return c;
}

Series series_compose(const Series& outer, const Series& inner, int n) {
  if (inner[0] != 0.0)
    throw ArgumentError("series_compose: inner constant term must vanish");
  // Horner scheme on truncated series: result = sum_k outer[k] * inner^k.
  Series result{};
  result[0] = outer[static_cast<size_t>(n)];
  for (int k = n - 1; k >= 0; --k) {
    result = series_mul(result, inner, n);
    result[0] += outer[static_cast<size_t>(k)];
  }
  return result;
}

Series series_revert(const Series& a, int n) {
  if (a[0] != 0.0)
    throw ArgumentError("series_revert: constant term must vanish");
  if (a[1] == 0.0)
    throw ArgumentError("series_revert: linear term must not vanish");
  // Newton iteration on series: b <- b - (a(b) - t) / a'(b), starting from
  // the linear inverse.  Each sweep doubles the number of correct orders;
  // for n <= 6 a fixed iteration count suffices.
  Series b{};
  b[1] = 1.0 / a[1];
  Series ap{};  // derivative of a
  for (int k = 1; k <= n; ++k)
    ap[static_cast<size_t>(k - 1)] = a[static_cast<size_t>(k)] * k;
  for (int it = 0; it < 5; ++it) {
    // compose a and a' with b; subtract t; divide by a'(b)
    Series ab = series_compose(a, b, n);
    ab[1] -= 1.0;  // a(b(t)) - t
    Series apb = series_compose(ap, b, n);
    // series division ab / apb  (apb[0] = a'(0-preimage) != 0)
    Series quot{};
    for (int k = 0; k <= n; ++k) {
      double acc = ab[static_cast<size_t>(k)];
      for (int j = 0; j < k; ++j)
        acc -= quot[static_cast<size_t>(j)] *
               apb[static_cast<size_t>(k - j)];
      quot[static_cast<size_t>(k)] = acc / apb[0];
    }
    for (int k = 0; k <= n; ++k)
      b[static_cast<size_t>(k)] -= quot[static_cast<size_t>(k)];
  }
  return b;
}

Jet jet_compose(const Jet& f_at_gc, const Jet& g) {
  const int n = std::min(f_at_gc.order, g.order);
  Series inner = jet_to_series(g);
  inner[0] = 0.0;  // expand around g(center)
  const Series outer = jet_to_series(f_at_gc);
  Series comp = series_compose(outer, inner, n);
  return series_to_jet(comp, g.center, n);
}

Jet jet_invert(const Jet& f) {
  if (f.values[1] == 0.0)
    throw ArgumentError("jet_invert: derivative vanishes at center");
  const int n = f.order;
  Series a = jet_to_series(f);
  const double f0 = a[0];
  a[0] = 0.0;
  Series b = series_revert(a, n);
  Jet inv = series_to_jet(b, f0, n);
  inv.values[0] = f.center;  // f^{-1}(f(center)) = center
  return inv;
}

}  // namespace lips
