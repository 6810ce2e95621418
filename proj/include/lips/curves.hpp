#ifndef LIPS_CURVES_HPP
#define LIPS_CURVES_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "lips/blowup.hpp"
#include "lips/model.hpp"

namespace lips {

// Families of curves in the (p, q) half-plane that organise the limit-cycle
// diagram: the diagonal family L0 (a fixed point of the return map becomes a
// multiple period-2 root), the off-diagonal contour branches (two distinct
// period-2 roots merge), and the escape boundaries l+/l- (a root sits on the
// section edge y = +1 or y = -1).
enum class CurveKind { kL0, kLambda0OffDiagonal, kLPlus, kLMinus };

std::string curve_kind_name(CurveKind k);

struct CurveSample {
  double p = 0.0;  // image point in the parameter half-plane
  double q = 0.0;
  double y = 0.0;  // preimage pair; y == w on the diagonal families
  double w = 0.0;
};

struct PlanarCurve {
  CurveKind kind = CurveKind::kL0;
  std::vector<CurveSample> samples;       // ordered, branches concatenated
  std::vector<std::size_t> branch_start;  // first sample index of each branch
  const ModelFunction* model = nullptr;   // null for synthetic fixtures
  std::string component;                  // sub-family tag, e.g. "chord"

  std::size_t branch_count() const { return branch_start.size(); }
  // half-open sample range [first, last) of branch b
  std::pair<std::size_t, std::size_t> branch_range(std::size_t b) const;
};

enum class SingularKind {
  kCusp,
  kFlip2,
  kEndpointTangency,
  kSelfIntersection,
};

std::string singular_kind_name(SingularKind k);

struct SingularPoint {
  SingularKind kind = SingularKind::kFlip2;
  double p = 0.0;
  double q = 0.0;
  double y = 0.0;  // preimage; diagonal points have w == y
  double w = 0.0;
  double y2 = 0.0;  // second preimage pair (self-intersections only)
  double w2 = 0.0;
  // magnitude of the defining residual actually achieved at the point
  double residual = 0.0;
  // the nondegeneracy quantity evaluated there (fifth-derivative value for
  // flips, the cubic-term value for cusps, the crossing angle for
  // self-intersections, the slope difference for endpoint tangencies)
  double nondegeneracy = 0.0;
  double slope_a = 0.0;  // endpoint tangencies: the two slopes compared
  double slope_b = 0.0;
  bool resolved = true;  // false: refinement diverged or a match is missing
  std::string warning;   // degeneracy / tangential / missing notes
};

// Diagonal family: (p, q) = (f'(y), f'(y) y + f(y)), y in [-1, 1], closed
// form, n >= 2 samples.
PlanarCurve trace_L0(const ModelFunction& f, int n);

// Off-diagonal branches: zero set of
//   F(y, w) = f(w) - f(y) + sqrt(f'(w) f'(y)) (y - w)
// with y != w, mapped through p = sqrt(f'(w) f'(y)), q = p w + f(y).
// `seeds` grid lines are scanned for brackets inside the chart square minus
// the diagonal strip |y - w| <= 1e-3; branches are followed by
// pseudo-arclength continuation (adaptive step, target 1e-2, corrector
// tolerance 1e-12).  Branches are canonicalised to w > y (the swap
// (y, w) -> (w, y) maps to the same (p, q) point) and swap-duplicates are
// dropped.  Returns an empty curve when no off-diagonal branch exists.
PlanarCurve trace_Lambda0(const ModelFunction& f, int seeds);
PlanarCurve trace_Lambda0(const ModelFunction& f, int seeds, double w_bound,
                          int max_samples);

// F and its gradient, exposed for tests and for the singularity solvers.
double offdiagonal_residual(const ModelFunction& f, double y, double w);
void offdiagonal_gradient(const ModelFunction& f, double y, double w,
                          double* fy, double* fw);

// Escape-boundary chords: for sign = +1 (resp. -1) and parameter w,
//   p(w) = integral_0^1 f'(s + t (w - s)) dt   with s = sign * 1,
//   q(w) = p(w) w + f(s),
// the condition for a period-2 root to sit exactly at y = s with partner w.
// The integral is evaluated by adaptive Simpson quadrature to 1e-12.
PlanarCurve trace_l_pm(const ModelFunction& f, int sign, int n,
                       double w_lo = -1.0, double w_hi = 1.0);

// The companion straight component of the same escape boundary: the fixed
// point itself sits at y = s, i.e. q = s p + f(s), traced over [p_lo, p_hi].
PlanarCurve trace_boundary_fixed_line(const ModelFunction& f, int sign,
                                      double p_lo, double p_hi, int n);

// Codimension-2 flips on the diagonal: roots of
//   -2 f''' + 3 f''^2 / f'   on [-1, 1],
// each attached with the fifth-derivative nondegeneracy value
//   -2 f''''' + (15 f'' / f') (f'''' - 2 f''^3 / f'^2).
std::vector<SingularPoint> find_flips(const ModelFunction& f);

// Ordinary cusps on the off-diagonal branches: zeros of the branch residual
//   K(y, w) = f''(w) f'(y)^2 - f'(w) f''(y) sqrt(f'(w) f'(y))
// along the traced branches, refined by 2-D Newton on {F = 0, K = 0} and
// cross-checked from 50x50 and 100x100 seed grids; the cubic-term
// nondegeneracy value is attached.  Diverged candidates are reported with
// resolved = false rather than dropped.
std::vector<SingularPoint> find_cusps(const ModelFunction& f,
                                      const PlanarCurve& lambda0);

// Transversal crossings of the (p, q) trace of a curve with itself, found by
// a segment-pair sweep and refined by Newton on the 4-unknown system (two
// preimage pairs mapping to one (p, q)) when the curve carries its model.
// Tangential near-crossings are reported with warnings.
std::vector<SingularPoint> find_self_intersections(const PlanarCurve& lambda0);

// Endpoint tangencies: where the off-diagonal branches (or the diagonal
// family) reach the section edge (preimage y = s or w = s, s = sign of l),
// the escape curve l passes through the same (p, q) point with the same
// slope.  Reports each endpoint with both slopes and their difference.
std::vector<SingularPoint> endpoint_tangency(const ModelFunction& f,
                                             const PlanarCurve& lambda0,
                                             const PlanarCurve& l);

// Chart bound for the partner coordinate: any period-2 partner w of a root
// y in [-1, 1] at parameters (p, q) in d satisfies |f(w)| <= d.qmax + d.p1,
// so |w| stays below this bound (2% headroom, floor 1.5).
double offdiagonal_w_bound(const ModelFunction& f, const DomainD& d);

}  // namespace lips

#endif  // LIPS_CURVES_HPP
