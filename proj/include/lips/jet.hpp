#ifndef LIPS_JET_HPP
#define LIPS_JET_HPP

#include <array>
#include <cstddef>

namespace lips {

// Maximum derivative order carried anywhere in the toolkit.  Order 6 covers
// every formula in use (fifth derivatives for the codimension-2 flip test,
// sixth-order derivative stacks for the cyclicity system).
inline constexpr int kMaxJetOrder = 6;

// A derivative stack ("jet") of a scalar function at a point:
//   values[k] = d^k f / dy^k evaluated at `center`,  k = 0 .. order.
// Derivative values are stored, not Taylor coefficients; series helpers
// convert internally.
struct Jet {
  double center = 0.0;
  int order = 0;  // 1 <= order <= kMaxJetOrder for public API results
  std::array<double, kMaxJetOrder + 1> values{};

  double operator[](int k) const { return values[static_cast<std::size_t>(k)]; }
};

// ---- truncated power-series kernels (Taylor coefficients, length n+1) ----
// Coefficient arrays c satisfy g(t) = sum_k c[k] t^k + O(t^{n+1}).

using Series = std::array<double, kMaxJetOrder + 1>;

// Convert derivative values -> Taylor coefficients and back.
Series jet_to_series(const Jet& j);
Jet series_to_jet(const Series& s, double center, int order);

// Truncated product of two series to order n.
Series series_mul(const Series& a, const Series& b, int n);

// Composition (outer ∘ inner) to order n; inner[0] must be 0 (the outer
// series is understood as expanded around the inner constant term).
Series series_compose(const Series& outer, const Series& inner, int n);

// Series reversion: given a with a[0] == 0 and a[1] != 0, returns b with
// b(a(t)) = t + O(t^{n+1}).
Series series_revert(const Series& a, int n);

// Jet of the composition f∘g at g's center, from the jet of g and the jet
// of f at g(center).  Orders are clipped to min(f.order, g.order).
Jet jet_compose(const Jet& f_at_gc, const Jet& g);

// Jet of the inverse function f^{-1} at f(center), from an invertible jet
// of f (values[1] != 0).
Jet jet_invert(const Jet& f);

}  // namespace lips

#endif  // LIPS_JET_HPP
