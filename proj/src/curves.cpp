#include "lips/curves.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <unordered_map>

#include "lips/errors.hpp"
#include "lips/numeric.hpp"

namespace lips {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Pt {
  double y = 0.0;
  double w = 0.0;
};

double dist(const Pt& a, const Pt& b) { return std::hypot(a.y - b.y, a.w - b.w); }

// p = sqrt(f'(w) f'(y)); NaN outside the monotone extension.
double chart_p(const ModelFunction& f, double y, double w) {
  const double a = f.deriv(y, 1), b = f.deriv(w, 1);
  if (!(a > 0.0) || !(b > 0.0)) return kNaN;
  return std::sqrt(a * b);
}

// Partial derivatives of the chart maps p(y, w) and q(y, w) = p w + f(y).
struct ChartJac {
  double p = 0, py = 0, pw = 0, qy = 0, qw = 0;
};

ChartJac chart_jacobian(const ModelFunction& f, double y, double w) {
  ChartJac j;
  j.p = chart_p(f, y, w);
  const double fpy = f.deriv(y, 1), fpw = f.deriv(w, 1);
  j.py = j.p * f.deriv(y, 2) / (2.0 * fpy);
  j.pw = j.p * f.deriv(w, 2) / (2.0 * fpw);
  j.qy = j.py * w + fpy;
  j.qw = j.pw * w + j.p;
  return j;
}

// Chord slope of f over [s, t] and its t-derivative; smooth through t = s.
double chord_p(const ModelFunction& f, double s, double t) {
  if (std::fabs(t - s) < 1e-7) {
    // second-order expansion: f'(s) + f''(s) h/2 + f'''(s) h^2/6
    const double h = t - s;
    return f.deriv(s, 1) + 0.5 * h * f.deriv(s, 2) +
           h * h * f.deriv(s, 3) / 6.0;
  }
  return (f.deriv(t, 0) - f.deriv(s, 0)) / (t - s);
}

double chord_dp(const ModelFunction& f, double s, double t) {
  if (std::fabs(t - s) < 1e-7) {
    const double h = t - s;
    return 0.5 * f.deriv(s, 2) + h * f.deriv(s, 3) / 3.0 +
           h * h * f.deriv(s, 4) / 8.0;
  }
  const double d = t - s;
  return (f.deriv(t, 1) * d - (f.deriv(t, 0) - f.deriv(s, 0))) / (d * d);
}

// Unit tangent of the off-diagonal zero set at x; false when the gradient
// degenerates (diagonal contact) or leaves the monotone extension.
bool tangent_at(const ModelFunction& f, const Pt& x, Pt* t) {
  double fy = 0, fw = 0;
  offdiagonal_gradient(f, x.y, x.w, &fy, &fw);
  if (!std::isfinite(fy) || !std::isfinite(fw)) return false;
  const double n = std::hypot(fy, fw);
  if (n < 1e-13) return false;
  t->y = -fw / n;
  t->w = fy / n;
  return true;
}

// Newton corrector: solve F = 0 on the hyperplane through `anchor`
// orthogonal to `t`.
bool correct_onto_curve(const ModelFunction& f, Pt* x, const Pt& t,
                        const Pt& anchor, double tol) {
  for (int it = 0; it < 25; ++it) {
    const double fv = offdiagonal_residual(f, x->y, x->w);
    if (!std::isfinite(fv)) return false;
    const double cc = (x->y - anchor.y) * t.y + (x->w - anchor.w) * t.w;
    double fy = 0, fw = 0;
    offdiagonal_gradient(f, x->y, x->w, &fy, &fw);
    const double det = fy * t.w - fw * t.y;
    if (!std::isfinite(det) || std::fabs(det) < 1e-14) return false;
    const double dy = (-fv * t.w + fw * cc) / det;
    const double dw = (-fy * cc + fv * t.y) / det;
    x->y += dy;
    x->w += dw;
    if (std::fabs(fv) < tol && std::hypot(dy, dw) < tol) return true;
  }
  return false;
}

struct TraceCfg {
  double bound = 1.5;
  double strip = 1e-3;
  double h_target = 1e-2;
  double h_min = 1e-9;
  double tol = 1e-12;
};

bool outside_square(const Pt& x, double bound) {
  return std::fabs(x.y) > bound || std::fabs(x.w) > bound;
}

struct Walk {
  std::vector<Pt> pts;
  bool closed = false;
};

// Bisect the straight segment [a, b] for a sign change of `c`, then project
// the hit back onto the curve.  Returns false when no terminal sample could
// be produced (the branch then ends at `a`).
bool refine_stop(const ModelFunction& f, const Pt& a, const Pt& b, const Pt& t,
                 const TraceCfg& cfg, const std::function<double(const Pt&)>& c,
                 Pt* out) {
  double lo = 0.0, hi = 1.0;
  const double ca = c(a);
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Pt m{a.y + mid * (b.y - a.y), a.w + mid * (b.w - a.w)};
    if ((c(m) > 0.0) == (ca > 0.0))
      lo = mid;
    else
      hi = mid;
  }
  Pt m{a.y + hi * (b.y - a.y), a.w + hi * (b.w - a.w)};
  const Pt anchor = m;
  if (!correct_onto_curve(f, &m, t, anchor, cfg.tol)) return false;
  *out = m;
  return true;
}

Walk walk_branch(const ModelFunction& f, const Pt& start, Pt t,
                 const TraceCfg& cfg, std::size_t cap) {
  Walk out;
  Pt x = start;
  double h = cfg.h_target;
  int steps_ok = 0;
  while (out.pts.size() < cap) {
    const Pt xp{x.y + h * t.y, x.w + h * t.w};
    Pt xn = xp;
    if (!correct_onto_curve(f, &xn, t, xp, cfg.tol) ||
        dist(xn, x) > 3.0 * h) {  // corrector failed or jumped sheets
      h *= 0.5;
      if (h < cfg.h_min) break;
      continue;
    }
    Pt tn;
    if (!tangent_at(f, xn, &tn)) break;
    if (tn.y * t.y + tn.w * t.w < 0.0) {
      tn.y = -tn.y;
      tn.w = -tn.w;
    }
    if (tn.y * t.y + tn.w * t.w < 0.5 && h > 4.0 * cfg.h_min) {
      h *= 0.5;  // sharp turn: resolve it with a smaller step
      continue;
    }
    if (std::fabs(xn.y - xn.w) <= cfg.strip) {
      Pt b;
      if (refine_stop(
              f, x, xn, t, cfg,
              [&](const Pt& u) { return std::fabs(u.y - u.w) - cfg.strip; },
              &b))
        out.pts.push_back(b);
      break;
    }
    if (outside_square(xn, cfg.bound)) {
      Pt b;
      if (refine_stop(f, x, xn, t, cfg,
                      [&](const Pt& u) {
                        return std::max(std::fabs(u.y), std::fabs(u.w)) -
                               cfg.bound;
                      },
                      &b))
        out.pts.push_back(b);
      break;
    }
    if (out.pts.size() > 25 && dist(xn, start) < 0.75 * cfg.h_target) {
      out.pts.push_back(start);
      out.closed = true;
      break;
    }
    out.pts.push_back(xn);
    x = xn;
    t = tn;
    if (++steps_ok >= 3) {
      h = std::min(h * 1.5, cfg.h_target);
      steps_ok = 0;
    }
  }
  return out;
}

// Scan grid lines of the chart square for off-diagonal sign changes of F.
std::vector<Pt> hunt_seeds(const ModelFunction& f, const TraceCfg& cfg,
                           int lines) {
  std::vector<Pt> seeds;
  const int m = std::max(400, 8 * lines);
  const double B = cfg.bound;
  auto scan_line = [&](bool vertical, double c) {
    bool have_prev = false;
    double prev_t = 0.0, prev_v = 0.0;
    for (int k = 0; k < m; ++k) {
      const double t = -B + 2.0 * B * k / (m - 1);
      // crossing the diagonal means crossing the trivial zero: reset
      if (std::fabs(t - c) <= 4.0 * cfg.strip) {
        have_prev = false;
        continue;
      }
      const double y = vertical ? c : t;
      const double w = vertical ? t : c;
      const double v = offdiagonal_residual(f, y, w);
      if (!std::isfinite(v)) {
        have_prev = false;
        continue;
      }
      if (have_prev && (t - c) * (prev_t - c) > 0.0 && v * prev_v < 0.0) {
        auto g = [&](double u) {
          return vertical ? offdiagonal_residual(f, c, u)
                          : offdiagonal_residual(f, u, c);
        };
        const double root = bisect(g, prev_t, t, 1e-12, 200);
        const Pt s = vertical ? Pt{c, root} : Pt{root, c};
        if (std::fabs(s.y - s.w) > 2.0 * cfg.strip) seeds.push_back(s);
      }
      have_prev = true;
      prev_t = t;
      prev_v = v;
    }
  };
  for (int i = 0; i < lines; ++i) {
    const double c = -B + 2.0 * B * i / (lines - 1);
    scan_line(true, c);
    scan_line(false, c);
  }
  return seeds;
}

// Solve a small dense linear system in place; returns false when singular.
bool solve_dense(std::vector<std::vector<double>>& a, std::vector<double>& b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (std::fabs(a[piv][col]) < 1e-14) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double fac = a[r][col] / a[col][col];
      for (std::size_t cc = col; cc < n; ++cc) a[r][cc] -= fac * a[col][cc];
      b[r] -= fac * b[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t cc = i + 1; cc < n; ++cc) s -= a[i][cc] * b[cc];
    b[i] = s / a[i][i];
  }
  return true;
}

// The cusp condition along the off-diagonal branches.
double cusp_residual(const ModelFunction& f, double y, double w) {
  const double r = chart_p(f, y, w);
  if (!std::isfinite(r)) return kNaN;
  return f.deriv(w, 2) * sq(f.deriv(y, 1)) -
         f.deriv(w, 1) * f.deriv(y, 2) * r;
}

void cusp_gradient(const ModelFunction& f, double y, double w, double* ky,
                   double* kw) {
  const double fpy = f.deriv(y, 1), fpw = f.deriv(w, 1);
  const double f2y = f.deriv(y, 2), f2w = f.deriv(w, 2);
  const double r = std::sqrt(fpw * fpy);
  const double ry = r * f2y / (2.0 * fpy), rw = r * f2w / (2.0 * fpw);
  *ky = 2.0 * f2w * fpy * f2y - fpw * f.deriv(y, 3) * r - fpw * f2y * ry;
  *kw = f.deriv(w, 3) * sq(fpy) - f2w * f2y * r - fpw * f2y * rw;
}

// Cubic-term value certifying a detected cusp is an ordinary one.
double cusp_nondegeneracy(const ModelFunction& f, double y, double w) {
  const double fpy = f.deriv(y, 1), fpw = f.deriv(w, 1);
  const double r = std::sqrt(fpw * fpy);
  return f.deriv(w, 3) * fpy * sq(fpy) -
         3.0 * f.deriv(w, 2) * f.deriv(y, 2) * fpy * r +
         f.deriv(y, 3) * sq(fpw) * fpy;
}

// 2-D Newton on {F = 0, K = 0}; false on divergence.
bool newton_cusp(const ModelFunction& f, Pt* x, double bound) {
  for (int it = 0; it < 60; ++it) {
    const double fv = offdiagonal_residual(f, x->y, x->w);
    const double kv = cusp_residual(f, x->y, x->w);
    if (!std::isfinite(fv) || !std::isfinite(kv)) return false;
    double fy = 0, fw = 0, ky = 0, kw = 0;
    offdiagonal_gradient(f, x->y, x->w, &fy, &fw);
    cusp_gradient(f, x->y, x->w, &ky, &kw);
    const double det = fy * kw - fw * ky;
    if (std::fabs(det) < 1e-14) return false;
    double dy = (-fv * kw + fw * kv) / det;
    double dw = (-fy * kv + fv * ky) / det;
    const double n = std::hypot(dy, dw);
    if (n > 0.3) {
      dy *= 0.3 / n;
      dw *= 0.3 / n;
    }
    x->y += dy;
    x->w += dw;
    if (outside_square(*x, 1.5 * bound)) return false;
    if (std::fabs(fv) < 1e-12 && std::fabs(kv) < 1e-12 &&
        std::hypot(dy, dw) < 1e-12)
      return true;
  }
  return false;
}

CurveSample make_offdiag_sample(const ModelFunction& f, const Pt& x) {
  CurveSample s;
  s.y = x.y;
  s.w = x.w;
  s.p = chart_p(f, x.y, x.w);
  s.q = s.p * x.w + f.deriv(x.y, 0);
  return s;
}

}  // namespace

std::string curve_kind_name(CurveKind k) {
  switch (k) {
    case CurveKind::kL0:
      return "L0";
    case CurveKind::kLambda0OffDiagonal:
      return "Lambda0_offdiagonal";
    case CurveKind::kLPlus:
      return "l_plus";
    case CurveKind::kLMinus:
      return "l_minus";
  }
  return "unknown";
}

std::string singular_kind_name(SingularKind k) {
  switch (k) {
    case SingularKind::kCusp:
      return "cusp";
    case SingularKind::kFlip2:
      return "flip2";
    case SingularKind::kEndpointTangency:
      return "endpoint_tangency";
    case SingularKind::kSelfIntersection:
      return "self_intersection";
  }
  return "unknown";
}

std::pair<std::size_t, std::size_t> PlanarCurve::branch_range(
    std::size_t b) const {
  const std::size_t first = branch_start.at(b);
  const std::size_t last =
      b + 1 < branch_start.size() ? branch_start[b + 1] : samples.size();
  return {first, last};
}

double offdiagonal_residual(const ModelFunction& f, double y, double w) {
  const double r = chart_p(f, y, w);
  if (!std::isfinite(r)) return kNaN;
  return f.deriv(w, 0) - f.deriv(y, 0) + r * (y - w);
}

void offdiagonal_gradient(const ModelFunction& f, double y, double w,
                          double* fy, double* fw) {
  const double fpy = f.deriv(y, 1), fpw = f.deriv(w, 1);
  if (!(fpy > 0.0) || !(fpw > 0.0)) {
    *fy = kNaN;
    *fw = kNaN;
    return;
  }
  const double r = std::sqrt(fpw * fpy);
  const double ry = r * f.deriv(y, 2) / (2.0 * fpy);
  const double rw = r * f.deriv(w, 2) / (2.0 * fpw);
  *fy = -fpy + ry * (y - w) + r;
  *fw = fpw + rw * (y - w) - r;
}

PlanarCurve trace_L0(const ModelFunction& f, int n) {
  if (n < 2) throw ArgumentError("trace_L0: need at least 2 samples");
  PlanarCurve c;
  c.kind = CurveKind::kL0;
  c.model = &f;
  c.branch_start = {0};
  c.samples.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double y = -1.0 + 2.0 * i / (n - 1);
    CurveSample s;
    s.y = y;
    s.w = y;
    s.p = f.deriv(y, 1);
    s.q = s.p * y + f.deriv(y, 0);
    c.samples.push_back(s);
  }
  return c;
}

PlanarCurve trace_Lambda0(const ModelFunction& f, int seeds) {
  const DomainD d = select_domain_D(f);
  return trace_Lambda0(f, seeds, offdiagonal_w_bound(f, d), 100000);
}

PlanarCurve trace_Lambda0(const ModelFunction& f, int seeds, double w_bound,
                          int max_samples) {
  if (f.degenerate_affine())
    throw DegeneracyError(
        "trace_Lambda0: the defining residual vanishes identically for "
        "affine models");
  if (seeds < 10)
    throw ArgumentError("trace_Lambda0: at least 10 seed grid lines required");
  if (!(w_bound > 0.0) || max_samples < 10)
    throw ArgumentError("trace_Lambda0: invalid chart bound or sample cap");

  TraceCfg cfg;
  cfg.bound = w_bound;

  std::vector<std::vector<Pt>> branches;
  auto near_existing = [&](const Pt& s) {
    for (const auto& br : branches)
      for (const auto& u : br)
        if (dist(u, s) < 2.5 * cfg.h_target) return true;
    return false;
  };

  std::size_t total = 0;
  const std::size_t cap = static_cast<std::size_t>(max_samples);
  for (const Pt& s : hunt_seeds(f, cfg, seeds)) {
    if (total >= cap) break;
    if (near_existing(s)) continue;
    Pt t0;
    if (!tangent_at(f, s, &t0)) continue;
    std::vector<Pt> br;
    const Walk fwd = walk_branch(f, s, t0, cfg, cap - total);
    if (fwd.closed) {
      br.push_back(s);
      br.insert(br.end(), fwd.pts.begin(), fwd.pts.end());
    } else {
      const std::size_t left = cap - total - std::min(cap - total, fwd.pts.size());
      const Walk bwd = walk_branch(f, s, Pt{-t0.y, -t0.w}, cfg, left);
      br.assign(bwd.pts.rbegin(), bwd.pts.rend());
      br.push_back(s);
      br.insert(br.end(), fwd.pts.begin(), fwd.pts.end());
    }
    if (br.size() >= 5) {
      total += br.size();
      branches.push_back(std::move(br));
    }
  }

  // Canonicalise to w > y: the swap (y, w) -> (w, y) maps a branch to the
  // same (p, q) trace, so one representative per component suffices.
  for (auto& br : branches) {
    std::size_t upper = 0;
    for (const auto& u : br)
      if (u.w > u.y) ++upper;
    if (2 * upper < br.size())
      for (auto& u : br) std::swap(u.y, u.w);
  }
  std::stable_sort(branches.begin(), branches.end(),
                   [](const std::vector<Pt>& a, const std::vector<Pt>& b) {
                     return a.size() > b.size();
                   });
  std::vector<std::vector<Pt>> kept;
  for (auto& br : branches) {
    bool dup = false;
    for (const auto& k : kept) {
      int hits = 0, probes = 0;
      for (std::size_t j = 0; j < 7; ++j) {
        const Pt& u = br[j * (br.size() - 1) / 6];
        ++probes;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& v : k) best = std::min(best, dist(u, v));
        if (best < 3.0 * cfg.h_target) ++hits;
      }
      if (hits >= probes - 1) {
        dup = true;
        break;
      }
    }
    if (!dup) kept.push_back(std::move(br));
  }

  PlanarCurve c;
  c.kind = CurveKind::kLambda0OffDiagonal;
  c.model = &f;
  for (const auto& br : kept) {
    c.branch_start.push_back(c.samples.size());
    for (const auto& u : br) c.samples.push_back(make_offdiag_sample(f, u));
  }
  return c;
}

PlanarCurve trace_l_pm(const ModelFunction& f, int sign, int n, double w_lo,
                       double w_hi) {
  if (sign != 1 && sign != -1)
    throw ArgumentError("trace_l_pm: sign must be +1 or -1");
  if (n < 2 || !(w_lo < w_hi))
    throw ArgumentError("trace_l_pm: need n >= 2 and w_lo < w_hi");
  const double s = static_cast<double>(sign);
  const double fs = f.deriv(s, 0);
  PlanarCurve c;
  c.kind = sign > 0 ? CurveKind::kLPlus : CurveKind::kLMinus;
  c.model = &f;
  c.component = "chord";
  c.branch_start = {0};
  c.samples.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double w = w_lo + (w_hi - w_lo) * i / (n - 1);
    const double p = adaptive_simpson(
        [&](double t) { return f.deriv(s + t * (w - s), 1); }, 0.0, 1.0,
        1e-12);
    if (!(p > 0.0)) continue;  // outside the monotone extension
    CurveSample cs;
    cs.y = s;
    cs.w = w;
    cs.p = p;
    cs.q = p * w + fs;
    c.samples.push_back(cs);
  }
  return c;
}

PlanarCurve trace_boundary_fixed_line(const ModelFunction& f, int sign,
                                      double p_lo, double p_hi, int n) {
  if (sign != 1 && sign != -1)
    throw ArgumentError("trace_boundary_fixed_line: sign must be +1 or -1");
  if (n < 2 || !(p_lo > 0.0) || !(p_lo < p_hi))
    throw ArgumentError(
        "trace_boundary_fixed_line: need n >= 2 and 0 < p_lo < p_hi");
  const double s = static_cast<double>(sign);
  const double fs = f.deriv(s, 0);
  PlanarCurve c;
  c.kind = sign > 0 ? CurveKind::kLPlus : CurveKind::kLMinus;
  c.model = &f;
  c.component = "boundary-fixed-line";
  c.branch_start = {0};
  for (int i = 0; i < n; ++i) {
    const double p = p_lo + (p_hi - p_lo) * i / (n - 1);
    CurveSample cs;
    cs.y = s;
    cs.w = s;
    cs.p = p;
    cs.q = s * p + fs;
    c.samples.push_back(cs);
  }
  return c;
}

std::vector<SingularPoint> find_flips(const ModelFunction& f) {
  if (f.degenerate_affine())
    throw DegeneracyError("find_flips: affine models carry no flip structure");
  auto cond = [&](double y) {
    return -2.0 * f.deriv(y, 3) + 3.0 * sq(f.deriv(y, 2)) / f.deriv(y, 1);
  };
  auto dcond = [&](double y) {
    const double fp = f.deriv(y, 1), f2 = f.deriv(y, 2), f3 = f.deriv(y, 3);
    return -2.0 * f.deriv(y, 4) + 6.0 * f2 * f3 / fp -
           3.0 * f2 * f2 * f2 / sq(fp);
  };
  auto fifth = [&](double y) {
    const double fp = f.deriv(y, 1), f2 = f.deriv(y, 2);
    return -2.0 * f.deriv(y, 5) +
           (15.0 * f2 / fp) * (f.deriv(y, 4) - 2.0 * f2 * f2 * f2 / sq(fp));
  };
  const int n = 4001;
  std::vector<double> roots;
  auto push = [&](double y) {
    for (double r : roots)
      if (std::fabs(r - y) < 1e-9) return;
    roots.push_back(y);
  };
  double prev_y = -1.0, prev_v = cond(-1.0);
  if (prev_v == 0.0) push(-1.0);
  for (int i = 1; i < n; ++i) {
    const double y = -1.0 + 2.0 * i / (n - 1);
    const double v = cond(y);
    if (v == 0.0)
      push(y);
    else if (prev_v * v < 0.0)
      push(newton_bisect(cond, dcond, prev_y, y, 1e-13, 200));
    prev_y = y;
    prev_v = v;
  }
  std::sort(roots.begin(), roots.end());

  std::vector<SingularPoint> out;
  for (double y : roots) {
    SingularPoint sp;
    sp.kind = SingularKind::kFlip2;
    sp.y = y;
    sp.w = y;
    sp.p = f.deriv(y, 1);
    sp.q = sp.p * y + f.deriv(y, 0);
    sp.residual = std::fabs(cond(y));
    sp.nondegeneracy = fifth(y);
    if (std::fabs(sp.nondegeneracy) <= 1e-6)
      sp.warning =
          "degenerate flip: fifth-derivative value below the 1e-6 floor";
    out.push_back(sp);
  }
  return out;
}

std::vector<SingularPoint> find_cusps(const ModelFunction& f,
                                      const PlanarCurve& lambda0) {
  double bound = 1.5;
  for (const auto& s : lambda0.samples)
    bound = std::max({bound, std::fabs(s.y), std::fabs(s.w)});

  std::vector<SingularPoint> out;
  auto accept = [&](const Pt& x, bool resolved, const std::string& note) {
    const double pv = chart_p(f, x.y, x.w);
    if (!std::isfinite(pv)) return;
    for (const auto& e : out) {
      const double q = pv * x.w + f.deriv(x.y, 0);
      if (std::fabs(e.p - pv) < 1e-6 && std::fabs(e.q - q) < 1e-6) return;
    }
    SingularPoint sp;
    sp.kind = SingularKind::kCusp;
    sp.y = x.y;
    sp.w = x.w;
    sp.p = pv;
    sp.q = pv * x.w + f.deriv(x.y, 0);
    sp.residual = std::max(std::fabs(offdiagonal_residual(f, x.y, x.w)),
                           std::fabs(cusp_residual(f, x.y, x.w)));
    sp.nondegeneracy = cusp_nondegeneracy(f, x.y, x.w);
    sp.resolved = resolved;
    sp.warning = note;
    if (resolved && std::fabs(sp.nondegeneracy) <= 1e-6)
      sp.warning = "degenerate cusp: cubic-term value below the 1e-6 floor";
    out.push_back(sp);
  };

  // Candidates from sign changes of the cusp condition along the branches.
  for (std::size_t b = 0; b < lambda0.branch_count(); ++b) {
    const auto [first, last] = lambda0.branch_range(b);
    for (std::size_t i = first; i + 1 < last; ++i) {
      const auto& a = lambda0.samples[i];
      const auto& c = lambda0.samples[i + 1];
      const double ka = cusp_residual(f, a.y, a.w);
      const double kc = cusp_residual(f, c.y, c.w);
      if (!std::isfinite(ka) || !std::isfinite(kc) || ka * kc >= 0.0) continue;
      Pt x{0.5 * (a.y + c.y), 0.5 * (a.w + c.w)};
      if (newton_cusp(f, &x, bound) && std::fabs(x.y - x.w) > 1e-3)
        accept(x, true, "");
      else
        accept(Pt{0.5 * (a.y + c.y), 0.5 * (a.w + c.w)}, false,
               "refinement diverged from a sign-change bracket");
    }
  }

  // Independent seed grids; the finer grid cross-checks the coarser one.
  std::vector<std::size_t> grid_counts;
  for (int g : {50, 100}) {
    std::size_t found = 0;
    std::vector<double> fv(static_cast<std::size_t>((g + 1) * (g + 1)));
    std::vector<double> kv(fv.size());
    for (int i = 0; i <= g; ++i)
      for (int j = 0; j <= g; ++j) {
        const double y = -bound + 2.0 * bound * i / g;
        const double w = -bound + 2.0 * bound * j / g;
        const std::size_t id = static_cast<std::size_t>(i * (g + 1) + j);
        fv[id] = offdiagonal_residual(f, y, w);
        kv[id] = cusp_residual(f, y, w);
      }
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) {
        double fmin = std::numeric_limits<double>::infinity(), fmax = -fmin;
        double kmin = fmin, kmax = -fmin;
        bool ok = true;
        for (int di = 0; di <= 1 && ok; ++di)
          for (int dj = 0; dj <= 1 && ok; ++dj) {
            const std::size_t id =
                static_cast<std::size_t>((i + di) * (g + 1) + (j + dj));
            if (!std::isfinite(fv[id]) || !std::isfinite(kv[id])) ok = false;
            fmin = std::min(fmin, fv[id]);
            fmax = std::max(fmax, fv[id]);
            kmin = std::min(kmin, kv[id]);
            kmax = std::max(kmax, kv[id]);
          }
        if (!ok || fmin > 0.0 || fmax < 0.0 || kmin > 0.0 || kmax < 0.0)
          continue;
        Pt x{-bound + 2.0 * bound * (i + 0.5) / g,
             -bound + 2.0 * bound * (j + 0.5) / g};
        if (std::fabs(x.y - x.w) < 4e-3) continue;
        if (newton_cusp(f, &x, bound) && std::fabs(x.y - x.w) > 1e-3 &&
            !outside_square(x, bound)) {
          accept(x, true, "");
          ++found;
        }
      }
    grid_counts.push_back(found);
  }
  if (grid_counts[0] != grid_counts[1])
    for (auto& sp : out)
      if (sp.warning.empty())
        sp.warning = "seed-grid refinement changed the candidate count";
  return out;
}

std::vector<SingularPoint> find_self_intersections(
    const PlanarCurve& lambda0) {
  struct Seg {
    std::size_t branch;
    std::size_t i;  // samples[i] -> samples[i+1]
  };
  std::vector<Seg> segs;
  std::vector<bool> branch_closed(lambda0.branch_count(), false);
  for (std::size_t b = 0; b < lambda0.branch_count(); ++b) {
    const auto [first, last] = lambda0.branch_range(b);
    if (last - first >= 3) {
      const auto& s0 = lambda0.samples[first];
      const auto& s1 = lambda0.samples[last - 1];
      branch_closed[b] =
          std::hypot(s0.p - s1.p, s0.q - s1.q) < 1e-12;
    }
    for (std::size_t i = first; i + 1 < last; ++i) {
      const auto& a = lambda0.samples[i];
      const auto& c = lambda0.samples[i + 1];
      if (std::hypot(a.p - c.p, a.q - c.q) > 0.0) segs.push_back({b, i});
    }
  }

  // Spatial hash over (p, q) so the pair sweep stays near-linear.
  double cell = 0.0;
  for (const auto& sg : segs) {
    const auto& a = lambda0.samples[sg.i];
    const auto& c = lambda0.samples[sg.i + 1];
    cell = std::max(cell, std::max(std::fabs(a.p - c.p), std::fabs(a.q - c.q)));
  }
  cell = std::max(cell * 2.0, 1e-9);
  std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets;
  auto key = [&](double p, double q) {
    const auto ip = static_cast<std::int64_t>(std::floor(p / cell));
    const auto iq = static_cast<std::int64_t>(std::floor(q / cell));
    return (ip << 32) ^ (iq & 0xffffffff);
  };
  for (std::size_t si = 0; si < segs.size(); ++si) {
    const auto& a = lambda0.samples[segs[si].i];
    const auto& c = lambda0.samples[segs[si].i + 1];
    const double plo = std::min(a.p, c.p), phi = std::max(a.p, c.p);
    const double qlo = std::min(a.q, c.q), qhi = std::max(a.q, c.q);
    for (double pp = plo;; pp += cell) {
      for (double qq = qlo;; qq += cell) {
        buckets[key(pp, qq)].push_back(si);
        if (qq >= qhi) break;
      }
      if (pp >= phi) break;
    }
  }

  std::vector<SingularPoint> out;
  auto adjacent = [&](const Seg& a, const Seg& b) {
    if (a.branch != b.branch) return false;
    const auto [first, last] = lambda0.branch_range(a.branch);
    const std::size_t na = last - first - 1;  // segment count
    const std::size_t ia = a.i - first, ib = b.i - first;
    const std::size_t d = ia > ib ? ia - ib : ib - ia;
    if (d <= 1) return true;
    return branch_closed[a.branch] && d == na - 1;  // seam of a closed loop
  };

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& [k, ids] : buckets) {
    (void)k;
    for (std::size_t u = 0; u < ids.size(); ++u)
      for (std::size_t v = u + 1; v < ids.size(); ++v)
        pairs.emplace_back(std::min(ids[u], ids[v]), std::max(ids[u], ids[v]));
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  for (const auto& [ia, ib] : pairs) {
    const Seg& A = segs[ia];
    const Seg& B = segs[ib];
    if (adjacent(A, B)) continue;
    const auto& a1 = lambda0.samples[A.i];
    const auto& a2 = lambda0.samples[A.i + 1];
    const auto& b1 = lambda0.samples[B.i];
    const auto& b2 = lambda0.samples[B.i + 1];
    const double d1p = a2.p - a1.p, d1q = a2.q - a1.q;
    const double d2p = b2.p - b1.p, d2q = b2.q - b1.q;
    const double denom = d1p * d2q - d1q * d2p;
    const double n1 = std::hypot(d1p, d1q), n2 = std::hypot(d2p, d2q);
    if (std::fabs(denom) < 1e-15 * n1 * n2) continue;
    const double rp = b1.p - a1.p, rq = b1.q - a1.q;
    const double t = (rp * d2q - rq * d2p) / denom;
    const double u = (rp * d1q - rq * d1p) / denom;
    if (t < -1e-12 || t > 1.0 + 1e-12 || u < -1e-12 || u > 1.0 + 1e-12)
      continue;
    const double px = a1.p + t * d1p, qx = a1.q + t * d1q;
    // vertex contact of two segments sharing an endpoint is not a crossing
    if ((std::hypot(px - a1.p, qx - a1.q) < 1e-9 ||
         std::hypot(px - a2.p, qx - a2.q) < 1e-9) &&
        (std::hypot(px - b1.p, qx - b1.q) < 1e-9 ||
         std::hypot(px - b2.p, qx - b2.q) < 1e-9))
      continue;

    SingularPoint sp;
    sp.kind = SingularKind::kSelfIntersection;
    sp.p = px;
    sp.q = qx;
    sp.y = a1.y + t * (a2.y - a1.y);
    sp.w = a1.w + t * (a2.w - a1.w);
    sp.y2 = b1.y + u * (b2.y - b1.y);
    sp.w2 = b1.w + u * (b2.w - b1.w);
    sp.nondegeneracy = std::fabs(denom) / (n1 * n2);  // sine of crossing angle
    if (sp.nondegeneracy < 1e-3)
      sp.warning = "tangential near-crossing: segment directions nearly "
                   "parallel";

    if (lambda0.model != nullptr) {
      const ModelFunction& f = *lambda0.model;
      std::vector<double> x{sp.y, sp.w, sp.y2, sp.w2};
      bool converged = false;
      for (int it = 0; it < 40; ++it) {
        const ChartJac j1 = chart_jacobian(f, x[0], x[1]);
        const ChartJac j2 = chart_jacobian(f, x[2], x[3]);
        double f1y, f1w, f2y, f2w;
        offdiagonal_gradient(f, x[0], x[1], &f1y, &f1w);
        offdiagonal_gradient(f, x[2], x[3], &f2y, &f2w);
        const double q1 = j1.p * x[1] + f.deriv(x[0], 0);
        const double q2 = j2.p * x[3] + f.deriv(x[2], 0);
        std::vector<double> g{offdiagonal_residual(f, x[0], x[1]),
                              offdiagonal_residual(f, x[2], x[3]),
                              j1.p - j2.p, q1 - q2};
        if (!std::isfinite(g[0]) || !std::isfinite(g[1])) break;
        const double gn = std::max(std::max(std::fabs(g[0]), std::fabs(g[1])),
                                   std::max(std::fabs(g[2]), std::fabs(g[3])));
        std::vector<std::vector<double>> J{
            {f1y, f1w, 0.0, 0.0},
            {0.0, 0.0, f2y, f2w},
            {j1.py, j1.pw, -j2.py, -j2.pw},
            {j1.qy, j1.qw, -j2.qy, -j2.qw}};
        std::vector<double> rhs{-g[0], -g[1], -g[2], -g[3]};
        if (!solve_dense(J, rhs)) break;
        double step = 0.0;
        for (int kk = 0; kk < 4; ++kk) {
          x[static_cast<std::size_t>(kk)] += rhs[static_cast<std::size_t>(kk)];
          step = std::max(step, std::fabs(rhs[static_cast<std::size_t>(kk)]));
        }
        if (gn < 1e-12 && step < 1e-12) {
          converged = true;
          break;
        }
      }
      const bool same_pair =
          std::hypot(x[0] - x[2], x[1] - x[3]) < 1e-3 ||
          std::hypot(x[0] - x[3], x[1] - x[2]) < 1e-3;
      if (converged && same_pair) continue;  // spurious duplicate-trace hit
      if (converged) {
        sp.y = x[0];
        sp.w = x[1];
        sp.y2 = x[2];
        sp.w2 = x[3];
        const double pv = chart_p(f, x[0], x[1]);
        sp.p = pv;
        sp.q = pv * x[1] + f.deriv(x[0], 0);
        sp.residual =
            std::max(std::fabs(offdiagonal_residual(f, x[0], x[1])),
                     std::fabs(offdiagonal_residual(f, x[2], x[3])));
      } else {
        sp.resolved = false;
        if (sp.warning.empty())
          sp.warning = "refinement of the crossing system diverged";
      }
    }

    bool dup = false;
    for (const auto& e : out)
      if (std::hypot(e.p - sp.p, e.q - sp.q) <
          1e-7 * std::max(1.0, std::fabs(sp.q)))
        dup = true;
    if (!dup) out.push_back(sp);
  }
  return out;
}

std::vector<SingularPoint> endpoint_tangency(const ModelFunction& f,
                                             const PlanarCurve& lambda0,
                                             const PlanarCurve& l) {
  int sign = 0;
  if (l.kind == CurveKind::kLPlus)
    sign = 1;
  else if (l.kind == CurveKind::kLMinus)
    sign = -1;
  else
    throw ArgumentError("endpoint_tangency: l must be an escape curve");
  if (l.component == "boundary-fixed-line") return {};
  const double s = static_cast<double>(sign);

  double l_wmin = std::numeric_limits<double>::infinity(), l_wmax = -l_wmin;
  for (const auto& cs : l.samples) {
    l_wmin = std::min(l_wmin, cs.w);
    l_wmax = std::max(l_wmax, cs.w);
  }

  struct Event {
    double y, w;     // preimage pair on the contour, one coordinate == s
    double t;        // matching chord parameter on l
    bool diagonal;   // endpoint of the diagonal family
  };
  std::vector<Event> events;

  // The diagonal family ends at y = s, where l's chord parameter is also s.
  events.push_back({s, s, s, true});

  // Off-diagonal events: a preimage coordinate crosses the section edge.
  for (std::size_t b = 0; b < lambda0.branch_count(); ++b) {
    const auto [first, last] = lambda0.branch_range(b);
    for (std::size_t i = first; i + 1 < last; ++i) {
      const auto& a = lambda0.samples[i];
      const auto& c = lambda0.samples[i + 1];
      // w-coordinate crossing w = s: solve F(y, s) = 0 for y
      if ((a.w - s) * (c.w - s) < 0.0) {
        double y = a.y + (c.y - a.y) * (s - a.w) / (c.w - a.w);
        bool ok = false;
        for (int it = 0; it < 50; ++it) {
          const double g = offdiagonal_residual(f, y, s);
          double gy, gw;
          offdiagonal_gradient(f, y, s, &gy, &gw);
          if (!std::isfinite(g) || !std::isfinite(gy) ||
              std::fabs(gy) < 1e-14)
            break;
          const double d = g / gy;
          y -= d;
          if (std::fabs(g) < 1e-13 && std::fabs(d) < 1e-13) {
            ok = true;
            break;
          }
        }
        if (ok && std::fabs(y - s) > 1e-3) events.push_back({y, s, y, false});
      }
      // y-coordinate crossing y = s: solve F(s, w) = 0 for w
      if ((a.y - s) * (c.y - s) < 0.0) {
        double w = a.w + (c.w - a.w) * (s - a.y) / (c.y - a.y);
        bool ok = false;
        for (int it = 0; it < 50; ++it) {
          const double g = offdiagonal_residual(f, s, w);
          double gy, gw;
          offdiagonal_gradient(f, s, w, &gy, &gw);
          if (!std::isfinite(g) || !std::isfinite(gw) ||
              std::fabs(gw) < 1e-14)
            break;
          const double d = g / gw;
          w -= d;
          if (std::fabs(g) < 1e-13 && std::fabs(d) < 1e-13) {
            ok = true;
            break;
          }
        }
        if (ok && std::fabs(w - s) > 1e-3) events.push_back({s, w, w, false});
      }
    }
  }

  std::vector<SingularPoint> out;
  for (const Event& e : events) {
    SingularPoint sp;
    sp.kind = SingularKind::kEndpointTangency;
    sp.y = e.y;
    sp.w = e.w;

    double dpa, dqa;  // contour-side direction
    if (e.diagonal) {
      sp.p = f.deriv(s, 1);
      sp.q = sp.p * s + f.deriv(s, 0);
      sp.residual = 0.0;
      dpa = f.deriv(s, 2);
      dqa = f.deriv(s, 2) * s + 2.0 * f.deriv(s, 1);
    } else {
      const ChartJac j = chart_jacobian(f, e.y, e.w);
      sp.p = j.p;
      sp.q = j.p * e.w + f.deriv(e.y, 0);
      sp.residual = std::fabs(offdiagonal_residual(f, e.y, e.w));
      double fy, fw;
      offdiagonal_gradient(f, e.y, e.w, &fy, &fw);
      const double ty = -fw, tw = fy;
      dpa = j.py * ty + j.pw * tw;
      dqa = j.qy * ty + j.qw * tw;
    }

    const double pc = chord_p(f, s, e.t);
    const double dpc = chord_dp(f, s, e.t);
    const double dpb = dpc;
    const double dqb = dpc * e.t + pc;

    const double na = std::hypot(dpa, dqa), nb = std::hypot(dpb, dqb);
    if (na < 1e-300 || nb < 1e-300) {
      sp.resolved = false;
      sp.warning = "vanishing tangent at the endpoint";
    } else {
      sp.nondegeneracy =
          std::fabs(dpa * dqb - dqa * dpb) / (na * nb);
      sp.slope_a = std::fabs(dpa) > 1e-300
                       ? dqa / dpa
                       : std::numeric_limits<double>::infinity();
      sp.slope_b = std::fabs(dpb) > 1e-300
                       ? dqb / dpb
                       : std::numeric_limits<double>::infinity();
    }
    if (e.t < l_wmin - 1e-9 || e.t > l_wmax + 1e-9) {
      sp.resolved = false;
      sp.warning =
          "matching escape-curve samples do not reach the tangency parameter";
    }

    bool dup = false;
    for (const auto& prev : out)
      if (std::fabs(prev.p - sp.p) < 1e-6 && std::fabs(prev.q - sp.q) < 1e-6)
        dup = true;
    if (!dup) out.push_back(sp);
  }
  return out;
}

double offdiagonal_w_bound(const ModelFunction& f, const DomainD& d) {
  const double reach = d.p1 + d.qmax;
  const double hi = f.inverse(reach, true);
  const double lo = f.inverse(-reach, true);
  return std::max(1.5, 1.02 * std::max(std::fabs(hi), std::fabs(lo)));
}

}  // namespace lips
