#include "lips/return_map.hpp"

#include <algorithm>
#include <cmath>

#include "lips/errors.hpp"
#include "lips/numeric.hpp"

namespace lips {

namespace {

double inner_w(const ReturnSystem& sys, double y) {
  return (sys.q() - sys.f->deriv(y, 0)) / sys.p();
}

double phi_raw(const ReturnSystem& sys, double y) {
  return -sys.p() * y + sys.q() - sys.f->deriv(inner_w(sys, y), 0);
}

// phi'(y) = -p + f'(w) f'(y) / p
double dphi_raw(const ReturnSystem& sys, double y) {
  const double w = inner_w(sys, y);
  return -sys.p() + sys.f->deriv(w, 1) * sys.f->deriv(y, 1) / sys.p();
}

double residual_scale(const ReturnSystem& sys) {
  return std::max({1.0, std::fabs(sys.q()), sys.p()});
}

}  // namespace

double poincare_map(const ReturnSystem& sys, double y) {
  const double u = -sys.p() * y + sys.q();
  if (u < sys.f->f_lo() || u > sys.f->f_hi())
    throw EscapeError("poincare_map: image leaves the range of f");
  return sys.f->inverse(u);
}

std::optional<std::pair<double, double>> fixed_point(const ReturnSystem& sys) {
  // root of g(y) = f(y) + p y - q, strictly increasing
  auto g = [&](double y) {
    return sys.f->deriv(y, 0) + sys.p() * y - sys.q();
  };
  if (g(-1.0) > 0.0 || g(1.0) < 0.0) return std::nullopt;
  const double y = newton_bisect(
      g, [&](double t) { return sys.f->deriv(t, 1) + sys.p(); }, -1.0, 1.0,
      1e-13, 200);
  return std::make_pair(y, -sys.p() / sys.f->deriv(y, 1));
}

double period2_residual(const ReturnSystem& sys, double y) {
  const double w = inner_w(sys, y);
  if (std::fabs(w) > 1.0 + sys.w_margin)
    throw EscapeError("period2_residual: inner argument beyond the margin");
  return phi_raw(sys, y);
}

Jet period2_jet(const ReturnSystem& sys, double y0, int order) {
  // w(y) = (q - f(y))/p as a jet, then compose with the jet of f at w(y0).
  Jet fy;
  fy.center = y0;
  fy.order = order;
  for (int m = 0; m <= order; ++m)
    fy.values[static_cast<size_t>(m)] = sys.f->deriv(y0, m);
  Jet wj = fy;
  wj.values[0] = (sys.q() - fy[0]) / sys.p();
  for (int m = 1; m <= order; ++m)
    wj.values[static_cast<size_t>(m)] = -fy[m] / sys.p();
  Jet fw;
  fw.center = wj[0];
  fw.order = order;
  for (int m = 0; m <= order; ++m)
    fw.values[static_cast<size_t>(m)] = sys.f->deriv(wj[0], m);
  Jet comp = jet_compose(fw, wj);  // jet of f((q - f(y))/p) at y0
  Jet phi;
  phi.center = y0;
  phi.order = order;
  phi.values[0] = -sys.p() * y0 + sys.q() - comp[0];
  for (int m = 1; m <= order; ++m)
    phi.values[static_cast<size_t>(m)] =
        (m == 1 ? -sys.p() : 0.0) - comp[m];
  return phi;
}

RootReport find_period2_roots(const ReturnSystem& sys, int grid_n) {
  if (grid_n < 100)
    throw ArgumentError("find_period2_roots: grid_n >= 100 required");
  RootReport rep;
  const double scale = residual_scale(sys);

  // Grid pass: residuals, degeneracy accounting, sign-change brackets.
  std::vector<double> ys(static_cast<size_t>(grid_n));
  std::vector<double> vals(static_cast<size_t>(grid_n));
  int tiny = 0;
  for (int i = 0; i < grid_n; ++i) {
    const double y = -1.0 + 2.0 * i / (grid_n - 1);
    ys[static_cast<size_t>(i)] = y;
    const double v = phi_raw(sys, y);
    vals[static_cast<size_t>(i)] = v;
    if (std::fabs(v) < 1e-10 * scale) ++tiny;
  }
  if (tiny > grid_n / 2)
    throw DegeneracyError(
        "find_period2_roots: residual vanishes on most of the grid "
        "(degenerate family, e.g. affine f with p = 1)");

  std::vector<double> roots;
  auto push_root = [&](double y) {
    y = std::clamp(y, -1.0, 1.0);
    for (double r : roots)
      if (std::fabs(r - y) < 1e-10 * (1.0 + std::fabs(y))) return;
    roots.push_back(y);
  };

  for (int i = 0; i + 1 < grid_n; ++i) {
    const double a = ys[static_cast<size_t>(i)],
                 b = ys[static_cast<size_t>(i + 1)];
    const double va = vals[static_cast<size_t>(i)],
                 vb = vals[static_cast<size_t>(i + 1)];
    if (va == 0.0) push_root(a);
    if (va * vb < 0.0) {
      const double r = newton_bisect([&](double t) { return phi_raw(sys, t); },
                                     [&](double t) { return dphi_raw(sys, t); },
                                     a, b, 1e-14, 200);
      push_root(r);
    }
  }
  if (vals[static_cast<size_t>(grid_n - 1)] == 0.0) push_root(1.0);

  // The fixed point of Delta always solves phi = 0; merge it in (it may sit
  // at an even-multiplicity tangency the sign scan cannot see).
  rep.fixed_root = fixed_point(sys);
  if (rep.fixed_root) push_root(rep.fixed_root->first);

  // Pairing invariant: the partner w = (q - f(y))/p of every root is a root.
  // Polish partners that fall inside the section and merge.
  std::vector<double> partners;
  for (double y : roots) {
    const double w = inner_w(sys, y);
    if (std::fabs(w) <= 1.0) partners.push_back(w);
  }
  for (double w : partners) {
    // polish in case of accumulated roundoff; phi(w) is already ~0
    double r = w;
    for (int it = 0; it < 3; ++it) {
      const double d = dphi_raw(sys, r);
      if (std::fabs(d) < 1e-9 * scale) break;
      r -= phi_raw(sys, r) / d;
      r = std::clamp(r, -1.0, 1.0);
    }
    if (std::fabs(phi_raw(sys, r)) < 1e-8 * scale) push_root(r);
  }

  std::sort(roots.begin(), roots.end());

  for (double y : roots) {
    Period2Root r;
    r.y = y;
    const Jet j = period2_jet(sys, y, 3);
    if (std::fabs(j[1]) > 1e-6 * scale)
      r.multiplicity = Multiplicity::kSimple;
    else if (std::fabs(j[2]) > 1e-6 * scale)
      r.multiplicity = Multiplicity::kDouble;
    else
      r.multiplicity = Multiplicity::kTripleOrMore;
    r.is_fixed = rep.fixed_root &&
                 std::fabs(y - rep.fixed_root->first) < 1e-9;
    r.escape_flag = std::fabs(1.0 - std::fabs(y)) < 1e-9;
    rep.any_escape = rep.any_escape || r.escape_flag;
    rep.period2_roots.push_back(r);
  }
  return rep;
}

Jet displacement_jet(const ReturnSystem& sys, double y0, int order) {
  if (order < 1 || order > kMaxJetOrder)
    throw ArgumentError("displacement_jet: order must be in 1..6");
  const double u0 = -sys.p() * y0 + sys.q();
  if (u0 < sys.f->f_lo() || u0 > sys.f->f_hi())
    throw EscapeError("displacement_jet: -p y0 + q outside the range of f");
  const Jet inv = eval_inverse_jet(*sys.f, u0, order);
  Jet v;
  v.center = y0;
  v.order = order;
  v.values[0] = inv[0] + sys.f->deriv(y0, 0) / sys.p() - sys.q() / sys.p();
  double pm = 1.0;
  for (int m = 1; m <= order; ++m) {
    pm *= -sys.p();
    v.values[static_cast<size_t>(m)] =
        pm * inv[m] + sys.f->deriv(y0, m) / sys.p();
  }
  return v;
}

}  // namespace lips
