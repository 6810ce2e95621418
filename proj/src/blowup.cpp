#include "lips/blowup.hpp"

#include <cmath>
#include <limits>

#include "lips/errors.hpp"
#include "lips/numeric.hpp"

namespace lips {

namespace {

constexpr double kEpsMax = 10.0;

// d/d(eps) of ln C1(eps); positive everywhere (C1 strictly increasing).
double dln_coeff_C(double eps) {
  const double s = std::sqrt(eps);
  return std::atan(1.0 / s) / (eps * s) + 1.0 / (eps * (eps + 1.0));
}

// Solve ln C1(eps) = target on (0, kEpsMax]; the left end is -infinity so a
// bracket always exists once the right end clears the target.
double solve_eps(double target, bool* near_upper) {
  if (ln_coeff_C(kEpsMax) < target)
    throw RangeError(
        "blow_down: p outside the attainable range C1((0, eps_max])/C2(delta)");
  double lo = 1e-12;
  while (ln_coeff_C(lo) > target) lo *= 0.5;  // cannot underflow to 0 first
  double eps = newton_bisect(
      [&](double e) { return ln_coeff_C(e) - target; },
      [&](double e) { return dln_coeff_C(e); }, lo, kEpsMax, 1e-15, 200);
  if (near_upper) *near_upper = eps > 0.9 * kEpsMax;
  return eps;
}

}  // namespace

BlownParams blow_up(const Params& nu) {
  if (!(nu.eps > 0.0) || !(nu.delta > 0.0))
    throw DomainError("blow_up: eps > 0 and delta > 0 required");
  BlownParams bp;
  bp.delta = nu.delta;
  // p in log space (C2 underflows for delta below ~2.5e-5).
  bp.p = std::exp(ln_coeff_C(nu.eps) - ln_coeff_C(nu.delta));
  bp.q = nu.lambda * std::exp(-ln_coeff_C(nu.delta));
  return bp;
}

Params blow_down(const BlownParams& bp, bool* near_upper_range) {
  if (bp.delta < 0.0) throw DomainError("blow_down: delta >= 0 required");
  Params nu;
  if (near_upper_range) *near_upper_range = false;
  if (bp.delta == 0.0) return nu;  // the whole half-plane blows down to 0
  if (!(bp.p > 0.0)) throw DomainError("blow_down: p > 0 required");
  nu.delta = bp.delta;
  const double target = std::log(bp.p) + ln_coeff_C(bp.delta);
  nu.eps = solve_eps(target, near_upper_range);
  nu.lambda = bp.q * std::exp(ln_coeff_C(bp.delta));
  return nu;
}

std::vector<HornRow> horn_asymptotics(double p, double q,
                                      const std::vector<double>& deltas) {
  if (!(p > 0.0)) throw DomainError("horn_asymptotics: p > 0 required");
  std::vector<HornRow> rows;
  rows.reserve(deltas.size());
  for (double d : deltas) {
    if (!(d > 0.0))
      throw DomainError("horn_asymptotics: deltas must be positive");
    HornRow row;
    row.delta = d;
    const double target = std::log(p) + ln_coeff_C(d);
    row.eps = solve_eps(target, nullptr);
    row.eps_over_delta = row.eps / d;
    row.opening_ratio = (row.eps - d) / std::pow(d, 1.5);
    row.lambda = q * std::exp(ln_coeff_C(d));
    row.lambda_scaled = q * std::exp(ln_coeff_C(d) + M_PI / std::sqrt(d));
    rows.push_back(row);
  }
  return rows;
}

DomainD select_domain_D(const ModelFunction& f) {
  // Extrema of f' and |f| on [-1,1]: dense grid, then golden-section style
  // refinement of the best bracket.
  const int kGrid = 2001;
  auto refine = [&](auto&& value, double ymin, double ymax, bool maximize) {
    double best_y = ymin, best = value(ymin);
    for (int i = 1; i < kGrid; ++i) {
      const double y = ymin + (ymax - ymin) * i / (kGrid - 1);
      const double v = value(y);
      if (maximize ? v > best : v < best) best = v, best_y = y;
    }
    // local ternary refinement around the best sample
    const double h = (ymax - ymin) / (kGrid - 1);
    double a = std::max(ymin, best_y - h), b = std::min(ymax, best_y + h);
    for (int it = 0; it < 200; ++it) {
      const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
      const bool keep_left = maximize ? value(m1) > value(m2)
                                      : value(m1) < value(m2);
      if (keep_left)
        b = m2;
      else
        a = m1;
      if (b - a < 1e-14) break;
    }
    return value(0.5 * (a + b));
  };
  const auto fp = [&](double y) { return f.deriv(y, 1); };
  const auto absf = [&](double y) { return std::fabs(f.deriv(y, 0)); };
  const double min_fp = refine(fp, -1.0, 1.0, false);
  const double max_fp = refine(fp, -1.0, 1.0, true);
  const double max_absf = refine(absf, -1.0, 1.0, true);
  DomainD d;
  d.p0 = 0.5 * min_fp;
  d.p1 = 1.25 * max_fp;
  d.qmax = 1.25 * (max_fp + max_absf);
  return d;
}

}  // namespace lips
