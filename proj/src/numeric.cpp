#include "lips/numeric.hpp"

#include <cmath>

#include "lips/errors.hpp"

namespace lips {

double bisect(const std::function<double(double)>& g, double a, double b,
              double xtol, int max_iter) {
  double ga = g(a), gb = g(b);
  if (ga == 0.0) return a;
  if (gb == 0.0) return b;
  if (ga * gb > 0.0) throw NumericalError("bisect: no bracketing interval");
  for (int i = 0; i < max_iter; ++i) {
    const double m = 0.5 * (a + b);
    const double gm = g(m);
    if (gm == 0.0 || (b - a) < xtol * (1.0 + std::fabs(m))) return m;
    if (ga * gm < 0.0)
      b = m, gb = gm;
    else
      a = m, ga = gm;
  }
  return 0.5 * (a + b);
}

double newton_bisect(const std::function<double(double)>& g,
                     const std::function<double(double)>& dg, double a,
                     double b, double xtol, int max_iter) {
  double ga = g(a);
  const double gb = g(b);
  if (ga == 0.0) return a;
  if (gb == 0.0) return b;
  if ((ga < 0.0) == (gb < 0.0))
    throw NumericalError("newton_bisect: no bracketing interval");
  double x = 0.5 * (a + b);
  double gx = g(x);
  for (int i = 0; i < max_iter; ++i) {
    if (gx == 0.0) return x;
    // keep the bracket current; compare signs so that an exact zero or a
    // product underflow can never corrupt the bracket
    if ((ga < 0.0) != (gx < 0.0))
      b = x;
    else
      a = x, ga = gx;
    const double d = dg(x);
    double xn = (d != 0.0) ? x - gx / d : 0.5 * (a + b);
    if (!(xn > a && xn < b)) xn = 0.5 * (a + b);  // safeguard
    const double step = std::fabs(xn - x);
    x = xn;
    gx = g(x);
    if (gx == 0.0 || step < xtol * (1.0 + std::fabs(x))) return x;
  }
  throw NumericalError("newton_bisect: no convergence within iteration cap");
}

namespace {

double simpson_rec(const std::function<double(double)>& g, double a,
                   double fa, double m, double fm, double b, double fb,
                   double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = g(lm), frm = g(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0) return left + right;
  if (std::fabs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(g, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(g, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& g, double a,
                        double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = g(a), fm = g(m), fb = g(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(g, a, fa, m, fm, b, fb, whole, tol, 48);
}

}  // namespace lips
