#ifndef LIPS_RETURN_MAP_HPP
#define LIPS_RETURN_MAP_HPP

#include <optional>
#include <vector>

#include "lips/blowup.hpp"
#include "lips/jet.hpp"
#include "lips/model.hpp"

namespace lips {

// The return system on the section [-1,1] in blown-up parameters:
//   Delta(y) = f^{-1}(-p y + q)            (the return map)
//   phi(y)   = -p y + q - f((q - f(y))/p)  (the period-2 residual)
// delta is carried as metadata only — the instantiated family makes the
// remainders vanish identically, so the equations depend on (p,q) alone.
struct ReturnSystem {
  const ModelFunction* f = nullptr;
  BlownParams bp;
  // Evaluation bound for the inner argument w = (q - f(y))/p.  The public
  // period2_residual contract uses the default margin 0.5 beyond [-1,1];
  // root scans over a full domain rectangle D need the partners of genuine
  // roots, which reach |w| = |f^{-1}|(P1 + Q), so the oracle constructs
  // systems with margin offdiagonal_w_bound(f, D) - 1.  Both families are
  // analytic on the needed extension.
  double w_margin = 0.5;

  ReturnSystem(const ModelFunction& fn, const BlownParams& blown,
               double margin = 0.5)
      : f(&fn), bp(blown), w_margin(margin) {}

  double p() const { return bp.p; }
  double q() const { return bp.q; }
};

// Root multiplicity classes reported by the root finder.
enum class Multiplicity { kSimple = 1, kDouble = 2, kTripleOrMore = 3 };

struct Period2Root {
  double y = 0.0;
  Multiplicity multiplicity = Multiplicity::kSimple;
  bool is_fixed = false;    // coincides with the fixed point of Delta
  bool escape_flag = false; // within 1e-9 of the section boundary
};

struct RootReport {
  // fixed point of Delta with the derivative Delta'(y) = -p/f'(y), when the
  // fixed-point equation has a root in [-1,1].
  std::optional<std::pair<double, double>> fixed_root;
  std::vector<Period2Root> period2_roots;  // sorted by y
  bool any_escape = false;
  int count() const { return static_cast<int>(period2_roots.size()); }
};

// Poincare map value; throws EscapeError when -p y + q leaves the range of f.
double poincare_map(const ReturnSystem& sys, double y);

// Unique fixed point of Delta on [-1,1] (f(y) + p y strictly increasing):
// bisection bracket + Newton polish to 1e-12; absent when the sign change
// does not occur.  Returns (y, Delta'(y)).
std::optional<std::pair<double, double>> fixed_point(const ReturnSystem& sys);

// phi(y) = -p y + q - f((q - f(y))/p); throws EscapeError when the inner
// argument exceeds the system margin.
double period2_residual(const ReturnSystem& sys, double y);

// Jet of phi at y0 (exact, by composition of exact jets).
Jet period2_jet(const ReturnSystem& sys, double y0, int order);

// All roots of phi on [-1,1]: sign-change brackets on a grid of grid_n
// points, Newton-polished to 1e-12, fixed root merged in (it is always a
// root of phi), multiplicities from the scaled first/second derivative,
// pairing invariant enforced (the partner w of every root is also a root).
// Throws DegeneracyError when |phi| < 1e-10*scale on more than half of the
// grid (affine f with p = 1).
RootReport find_period2_roots(const ReturnSystem& sys, int grid_n = 4001);

// Displacement map V(y) = f^{-1}(-p y + q) + f(y)/p - q/p, whose derivative
// stack at y0 drives the cyclicity bound:
//   V^{(m)}(y0) = (-p)^m (f^{-1})^{(m)}(-p y0 + q) + f^{(m)}(y0)/p,  m >= 1.
Jet displacement_jet(const ReturnSystem& sys, double y0, int order);

}  // namespace lips

#endif  // LIPS_RETURN_MAP_HPP
