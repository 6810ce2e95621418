#ifndef LIPS_NUMERIC_HPP
#define LIPS_NUMERIC_HPP

#include <cmath>
#include <functional>
#include <utility>

namespace lips {

// Small shared numerical kernels: bracketed root finding and adaptive
// Simpson quadrature.  Everything is deterministic and allocation-free.

inline double sq(double x) { return x * x; }

// Bisection on a bracketing interval [a,b] with g(a) and g(b) of opposite
// sign (or zero at an endpoint).  Returns the midpoint after the interval
// has shrunk below `xtol` (absolute + relative mix).
double bisect(const std::function<double(double)>& g, double a, double b,
              double xtol, int max_iter = 200);

// Safeguarded Newton iteration: starts from the midpoint of a bracketing
// interval, keeps the bracket updated, and falls back to bisection whenever
// the Newton step leaves the bracket or the derivative collapses.
// Converges to |step| < xtol or |g| == 0.  `dg` is the derivative of g.
double newton_bisect(const std::function<double(double)>& g,
                     const std::function<double(double)>& dg, double a,
                     double b, double xtol, int max_iter = 100);

// Adaptive Simpson quadrature of g over [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& g, double a,
                        double b, double tol);

}  // namespace lips

#endif  // LIPS_NUMERIC_HPP
