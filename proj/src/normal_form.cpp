#include "lips/normal_form.hpp"

#include <cmath>
#include <cstdlib>

#include "lips/errors.hpp"

namespace lips {

double ln_coeff_C(double u) {
  if (!(u > 0.0)) throw DomainError("transition coefficient requires u > 0");
  const double s = std::sqrt(u);
  return -2.0 / s * std::atan(1.0 / s);
}

double coeff_C1(double eps) { return std::exp(ln_coeff_C(eps)); }
double coeff_C2(double delta) { return std::exp(ln_coeff_C(delta)); }

TransitionResult transition_1(double y, double eps) {
  if (std::fabs(y) > 1.0)
    throw ArgumentError("transition_1: |y| <= 1 required");
  TransitionResult r;
  r.value = y / coeff_C1(eps);
  r.in_section = std::fabs(r.value) <= 1.0;
  return r;
}

TransitionResult transition_2(double y, double delta) {
  if (std::fabs(y) > 1.0)
    throw ArgumentError("transition_2: |y| <= 1 required");
  TransitionResult r;
  r.value = coeff_C2(delta) * y;
  r.in_section = std::fabs(r.value) <= 1.0;
  return r;
}

double g_map(double y, double lambda) { return -y + lambda; }

namespace {

// One RK4 pass with n steps for dy/dx = y (1 + a1 x)/(x^2 + eps) on [-1,1].
double rk4_pass(double eps, double a1, double y0, long n) {
  const double h = 2.0 / static_cast<double>(n);
  auto rhs = [&](double x, double y) {
    return y * (1.0 + a1 * x) / (x * x + eps);
  };
  double y = y0;
  for (long i = 0; i < n; ++i) {
    const double x = -1.0 + h * static_cast<double>(i);
    const double k1 = rhs(x, y);
    const double k2 = rhs(x + 0.5 * h, y + 0.5 * h * k1);
    const double k3 = rhs(x + 0.5 * h, y + 0.5 * h * k2);
    const double k4 = rhs(x + h, y + h * k3);
    y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

}  // namespace

OdeVerification verify_transition_ode(double eps, double y0,
                                      const NormalFormConfig& config) {
  if (!(eps > 0.0)) throw DomainError("verify_transition_ode: eps > 0");
  if (std::fabs(y0) > 1.0)
    throw ArgumentError("verify_transition_ode: |y0| <= 1 required");
  if (std::fabs(config.a1) >= 1.0)
    throw ArgumentError("verify_transition_ode: |a1| < 1 required");

  OdeVerification v;
  v.analytic = y0 / coeff_C1(eps);
  if (y0 == 0.0) {  // invariant axis, exact at any resolution
    v.empirical = 0.0;
    v.relative_error = 0.0;
    return v;
  }
  const long kCap = 10'000'000;
  long n = 1000;
  double prev = rk4_pass(eps, config.a1, y0, n);
  for (;;) {
    n *= 2;
    if (n > kCap)
      throw NumericalError(
          "verify_transition_ode: refinement cap exceeded (eps too small)");
    const double cur = rk4_pass(eps, config.a1, y0, n);
    const double scale = std::max(std::fabs(cur), 1e-300);
    if (std::fabs(cur - prev) / scale <= 1e-9) {
      v.empirical = cur;
      v.steps_used = n;
      break;
    }
    prev = cur;
  }
  v.relative_error =
      std::fabs(v.empirical - v.analytic) / std::fabs(v.analytic);
  return v;
}

Stratum classify_stratum(const Params& nu) {
  const double eps = nu.eps, delta = nu.delta;
  // Treat |lambda| below 1e-12 as an intact separatrix connection.
  const bool lz = std::fabs(nu.lambda) <= 1e-12;
  auto S = [](int label, const char* text) {
    return Stratum{label, text};
  };
  if (eps > 0.0 && delta > 0.0)
    throw DomainError(
        "classify_stratum: the open positive quadrant is the limit-cycle "
        "regime; use the return-map modules");
  if (eps == 0.0 && delta == 0.0)
    return lz ? S(1, "two saddle-nodes connected by a separatrix")
              : S(2, "two saddle-nodes without connection");
  if (eps < 0.0 && delta < 0.0)
    return lz ? S(3,
                  "two saddles connected by a separatrix, one stable and one "
                  "unstable node")
              : S(4, "two saddles without connection, a stable and an "
                     "unstable node");
  if (eps < 0.0 && delta == 0.0)
    return lz ? S(5,
                  "saddle and saddle-node connected by a separatrix, and "
                  "also a stable node")
              : S(6, "saddle, saddle-node and a stable node without "
                     "connection");
  if (eps < 0.0 && delta > 0.0) return S(7, "a saddle and a stable node");
  if (eps == 0.0 && delta < 0.0)
    return lz ? S(8,
                  "a saddle and a saddle-node connected by a separatrix, and "
                  "also an unstable node")
              : S(9, "a saddle, a saddle-node and an unstable node without "
                     "connections");
  if ((eps == 0.0 && delta > 0.0) || (eps > 0.0 && delta == 0.0))
    return S(10, "a saddle-node");
  // remaining: eps > 0, delta < 0
  return S(11, "saddle and an unstable node");
}

}  // namespace lips
