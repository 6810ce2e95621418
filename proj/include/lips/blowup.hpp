#ifndef LIPS_BLOWUP_HPP
#define LIPS_BLOWUP_HPP

#include <vector>

#include "lips/model.hpp"
#include "lips/normal_form.hpp"

namespace lips {

// Blown-up parameters: (delta, p, q) with p = C1(eps)/C2(delta) and
// q = lambda / C2(delta).
struct BlownParams {
  double delta = 0.0;
  double p = 0.0;
  double q = 0.0;
};

// Compact parameter rectangle [P0, P1] x [-Q, Q] in the (p,q) half-plane.
// Outside it the period-2 equation has only simple roots.
struct DomainD {
  double p0 = 0.0;
  double p1 = 0.0;
  double qmax = 0.0;
  bool contains(double p, double q, double margin = 0.0) const {
    return p >= p0 + margin && p <= p1 - margin && q >= -qmax + margin &&
           q <= qmax - margin;
  }
};

// Forward reparametrization; requires eps > 0 and delta > 0.
BlownParams blow_up(const Params& nu);

// Inverse reparametrization: solves ln C1(eps) = ln p + ln C2(delta) for eps
// by bisection plus Newton polish (relative tolerance 1e-14, bracket
// (0, 10]), and sets lambda = q * C2(delta).  delta = 0 maps the whole
// half-plane to nu = 0.  p outside the attainable range is a RangeError;
// `near_upper_range`, when given, is set when eps lands within 10% of the
// bracket top (inverse reliable but close to the modeled range).
Params blow_down(const BlownParams& bp, bool* near_upper_range = nullptr);

// One row of the horn-asymptotics table: how the preimage of a fixed (p,q)
// approaches the diagonal eps = delta as delta -> 0+.
struct HornRow {
  double delta = 0.0;
  double eps = 0.0;
  double eps_over_delta = 0.0;       // -> 1
  double opening_ratio = 0.0;        // (eps-delta)/delta^{3/2} -> 2 ln(p)/pi
  double lambda = 0.0;               // q * C2(delta), may underflow to 0
  double lambda_scaled = 0.0;        // q * exp(ln C2(delta) + pi/sqrt(delta)),
                                     // bounded (-> q e^2)
};

std::vector<HornRow> horn_asymptotics(double p, double q,
                                      const std::vector<double>& deltas);

// Rectangle selection: P0 = 0.5 min f', P1 = 1.25 max f',
// Q = 1.25 (max f' + max |f|), extrema on [-1,1] by dense sampling plus
// local refinement.
DomainD select_domain_D(const ModelFunction& f);

}  // namespace lips

#endif  // LIPS_BLOWUP_HPP
