#include "lips/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "lips/errors.hpp"
#include "lips/numeric.hpp"

namespace lips {

ModelFunction ModelFunction::poly(std::vector<double> coeffs,
                                  bool allow_affine) {
  if (coeffs.empty()) throw ArgumentError("poly: empty coefficient list");
  ModelFunction f;
  f.kind_ = Kind::kPoly;
  f.coeffs_ = std::move(coeffs);
  // Precompute coefficient stacks of the first 6 derivatives.
  f.dcoeffs_.assign(kMaxJetOrder + 1, {});
  f.dcoeffs_[0] = f.coeffs_;
  for (int m = 1; m <= kMaxJetOrder; ++m) {
    const auto& prev = f.dcoeffs_[static_cast<size_t>(m - 1)];
    std::vector<double> d;
    for (size_t k = 1; k < prev.size(); ++k)
      d.push_back(prev[k] * static_cast<double>(k));
    f.dcoeffs_[static_cast<size_t>(m)] = std::move(d);
  }
  f.certify(allow_affine);
  return f;
}

ModelFunction ModelFunction::sine(double a, double b) {
  ModelFunction f;
  f.kind_ = Kind::kSine;
  f.a_ = a;
  f.b_ = b;
  f.certify(/*allow_affine=*/a == 0.0);
  return f;
}

ModelFunction ModelFunction::identity_affine() {
  return poly({0.0, 1.0}, /*allow_affine=*/true);
}

ModelFunction ModelFunction::reference() {
  return poly({0.0, 1.0, 0.0, 1.0 / 3.0});
}

void ModelFunction::certify(bool allow_affine) {
  const int kGrid = 2001;
  double min_fp = std::numeric_limits<double>::infinity();
  double max_nonlinear = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    const double y = -1.0 + 2.0 * i / (kGrid - 1);
    const double fp = deriv(y, 1);
    min_fp = std::min(min_fp, fp);
    max_nonlinear = std::max(
        max_nonlinear, std::max(std::fabs(deriv(y, 2)), std::fabs(deriv(y, 3))));
    if (!(fp > 0.0))
      throw DomainError("model function is not strictly increasing on [-1,1]");
  }
  if (kind_ == Kind::kPoly) {
    // Between-sample guarantee: on each subinterval of width h, f' can drop
    // below its sampled values by at most h * max|f''|; bound max|f''| on
    // [-1,1] by the l1 norm of the second-derivative coefficients.
    double b2 = 0.0;
    for (double c : dcoeffs_[2]) b2 += std::fabs(c);
    const double h = 2.0 / (kGrid - 1);
    if (!(min_fp > h * b2) && !(b2 == 0.0))
      throw DomainError(
          "model function monotonicity cannot be certified between samples");
  } else {
    // sine family: f'(y) = 1 + a b cos(b y) >= 1 - |a b| globally.
    if (!(1.0 - std::fabs(a_ * b_) > 0.0))
      throw DomainError("sine family requires |a*b| < 1 for monotonicity");
  }
  degenerate_affine_ = max_nonlinear <= 1e-12;
  if (degenerate_affine_ && !allow_affine)
    throw DegeneracyError(
        "affine model function rejected (pass the degenerate flag to admit "
        "it for analytic test cases)");
  f_lo_ = deriv(-1.0, 0);
  f_hi_ = deriv(1.0, 0);
}

double ModelFunction::deriv(double y, int m) const {
  if (m < 0 || m > kMaxJetOrder)
    throw ArgumentError("deriv: order out of range");
  if (kind_ == Kind::kPoly) {
    const auto& c = dcoeffs_[static_cast<size_t>(m)];
    double acc = 0.0;
    for (size_t k = c.size(); k-- > 0;) acc = acc * y + c[k];
    return acc;
  }
  // sine: f(y) = y + a sin(b y);  f^{(m)}(y) = a b^m sin(b y + m pi/2) for
  // m >= 1 (plus the identity part at m <= 1).
  if (m == 0) return y + a_ * std::sin(b_ * y);
  const double phase = b_ * y + 0.5 * M_PI * m;
  double val = a_ * std::pow(b_, m) * std::sin(phase);
  if (m == 1) val += 1.0;
  return val;
}

double ModelFunction::inverse(double q, bool extended) const {
  double lo = -1.0, hi = 1.0;
  if (extended) {
    // Grow the bracket; both families are strictly increasing on the whole
    // line whenever certify() succeeded (poly growth is eventually monotone
    // dominated by its leading term for the supported instances; the caller
    // keeps the needed extension within the chart bound it computed).
    while (deriv(lo, 0) > q && lo > -64.0) lo *= 2.0;
    while (deriv(hi, 0) < q && hi < 64.0) hi *= 2.0;
  }
  if (q < deriv(lo, 0) || q > deriv(hi, 0))
    throw DomainError("inverse: value outside the attainable range");
  double y = newton_bisect([&](double t) { return deriv(t, 0) - q; },
                           [&](double t) { return deriv(t, 1); }, lo, hi,
                           1e-15, 100);
  return y;
}

std::string ModelFunction::describe() const {
  char buf[256];
  if (kind_ == Kind::kPoly) {
    std::string s = "poly[";
    for (size_t k = 0; k < coeffs_.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%s%.17g", k ? "," : "", coeffs_[k]);
      s += buf;
    }
    return s + "]";
  }
  std::snprintf(buf, sizeof buf, "sine[a=%.17g,b=%.17g]", a_, b_);
  return buf;
}

Jet eval_jet(const ModelFunction& f, double y0, int order) {
  if (order < 1 || order > kMaxJetOrder)
    throw ArgumentError("eval_jet: order must be in 1..6");
  if (y0 < -1.0 - 1e-12 || y0 > 1.0 + 1e-12)
    throw ArgumentError("eval_jet: y0 outside [-1,1]");
  Jet j;
  j.center = y0;
  j.order = order;
  for (int m = 0; m <= order; ++m)
    j.values[static_cast<size_t>(m)] = f.deriv(y0, m);
  return j;
}

Jet eval_inverse_jet(const ModelFunction& f, double q, int order) {
  if (order < 1 || order > kMaxJetOrder)
    throw ArgumentError("eval_inverse_jet: order must be in 1..6");
  if (q < f.f_lo() - 1e-12 || q > f.f_hi() + 1e-12)
    throw DomainError("eval_inverse_jet: q outside [f(-1), f(1)]");
  const double y = f.inverse(q);
  Jet fwd = eval_jet(f, std::clamp(y, -1.0, 1.0), order);
  fwd.center = y;
  Jet inv = jet_invert(fwd);
  inv.center = q;
  return inv;
}

namespace {

// Residual of matching derivative stacks (orders 0..n) of f(alpha(x)) and
// alpha^{-1}(f^{-1}(x)) at x = y0, alpha(x) = b1 x + b2.
double conjugacy_residual(const ModelFunction& f, double y0, int n, double b1,
                          double b2) {
  const double z = b1 * y0 + b2;  // alpha(y0), must lie in [-1,1]
  if (z < -1.0 || z > 1.0) return std::numeric_limits<double>::infinity();
  if (y0 < f.f_lo() || y0 > f.f_hi())
    return std::numeric_limits<double>::infinity();
  const Jet fj = eval_jet(f, z, n);
  const Jet gj = eval_inverse_jet(f, y0, n);
  double acc = 0.0;
  // order 0: f(alpha(y0)) vs (f^{-1}(y0) - b2)/b1
  acc += sq(fj[0] - (gj[0] - b2) / b1);
  double b1m = 1.0;
  for (int m = 1; m <= n; ++m) {
    b1m *= b1;
    acc += sq(fj[m] * b1m - gj[m] / b1);
  }
  return std::sqrt(acc);
}

}  // namespace

GenericityPoint check_genericity_at(const ModelFunction& f, double y0,
                                    double tolerance) {
  GenericityPoint pt;
  pt.y0 = y0;
  // condition (i): minimal order with a nonvanishing nonlinear derivative
  const Jet j = eval_jet(f, y0, kMaxJetOrder);
  const double scale = std::max(1.0, std::fabs(j[1]));
  for (int m = 2; m <= kMaxJetOrder; ++m) {
    if (std::fabs(j[m]) > 1e-12 * scale) {
      pt.first_nonaffine_order = m;
      break;
    }
  }
  // condition (ii): minimize the conjugacy residual at order n over
  // b1 in [-6, 0), b2 in [-2, 2] by deterministic grid + zoom.
  const int n = pt.first_nonaffine_order ? pt.first_nonaffine_order : 3;
  if (y0 >= f.f_lo() && y0 <= f.f_hi()) {
    double best = std::numeric_limits<double>::infinity();
    double bb1 = -1.0, bb2 = 0.0;
    for (int a = 1; a <= 240; ++a) {
      const double b1 = -a / 40.0;
      for (int b = -80; b <= 80; ++b) {
        const double b2 = b / 40.0;
        const double r = conjugacy_residual(f, y0, n, b1, b2);
        if (r < best) best = r, bb1 = b1, bb2 = b2;
      }
    }
    for (double sc : {0.02, 0.004, 0.0008, 0.00016}) {
      double cb1 = bb1, cb2 = bb2;
      for (int a = -10; a <= 10; ++a)
        for (int b = -10; b <= 10; ++b) {
          const double b1 = cb1 + sc * a / 10.0;
          const double b2 = cb2 + sc * b / 10.0;
          if (b1 >= 0.0) continue;
          const double r = conjugacy_residual(f, y0, n, b1, b2);
          if (r < best) best = r, bb1 = b1, bb2 = b2;
        }
    }
    pt.cond2_residual = best;
    pt.cond2_b1 = bb1;
    pt.cond2_b2 = bb2;
    const double s2 = std::max(1.0, std::fabs(f.deriv(y0, 1)));
    pt.cond2_holds = best > tolerance * s2;
  }
  return pt;
}

GenericityReport check_genericity(const ModelFunction& f, int grid_n) {
  if (grid_n < 2) throw ArgumentError("check_genericity: grid_n >= 2");
  GenericityReport rep;
  rep.generic_everywhere = true;
  for (int i = 0; i < grid_n; ++i) {
    const double y0 = -1.0 + 2.0 * i / (grid_n - 1);
    GenericityPoint pt = check_genericity_at(f, y0, rep.tolerance);
    if (!pt.first_nonaffine_order || !pt.cond2_holds)
      rep.generic_everywhere = false;
    rep.points.push_back(pt);
  }
  return rep;
}

}  // namespace lips
