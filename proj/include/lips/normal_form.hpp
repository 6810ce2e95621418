#ifndef LIPS_NORMAL_FORM_HPP
#define LIPS_NORMAL_FORM_HPP

#include <string>

namespace lips {

// Original unfolding parameters of the two semi-hyperbolic points and the
// separatrix displacement.
struct Params {
  double eps = 0.0;
  double delta = 0.0;
  double lambda = 0.0;
};

// Chart coefficients a1, a2 of the local normal forms
//   x' = (x^2 + eps)  / (1 + a1 x),  y' =  y   (repelling point O1)
//   x' = (x^2 + delta)/(1 + a2 x),  y' = -y   (attracting point O2)
struct NormalFormConfig {
  double a1 = 0.0;
  double a2 = 0.0;
};

// Phase-portrait stratum for parameters outside the open positive quadrant:
// label in 1..11 plus its fixed description (one label covers the two
// symmetric half-axis components, so 11 labels describe 12 components).
struct Stratum {
  int label = 0;
  std::string description;
};

// ln C(u) = -(2/sqrt(u)) * arctan(1/sqrt(u)) — the log of the transition
// coefficient; exposed because C itself underflows for u < ~2.5e-5.
double ln_coeff_C(double u);

// C1(eps) = exp(ln C(eps)), strictly increasing, (0,1) on (0, 1e3].
double coeff_C1(double eps);
// C2(delta): the same function of its argument.
double coeff_C2(double delta);

// Transition maps through the two normal-form charts (exact closed forms):
//   Delta1(y) = y / C1(eps)   across the repelling point,
//   Delta2(y) = C2(delta) * y across the attracting point.
// The flag reports whether the image stays inside the section [-1,1].
struct TransitionResult {
  double value = 0.0;
  bool in_section = false;
};
TransitionResult transition_1(double y, double eps);
TransitionResult transition_2(double y, double delta);

// Connection map g(y) = -y + lambda (orientation-reversing).
double g_map(double y, double lambda);

// Independent verification of the transition closed form: integrates
//   dy/dx = y (1 + a1 x) / (x^2 + eps)
// from x = -1 to x = 1 by fixed-step RK4 with step doubling until two
// successive refinements agree to 1e-9 (relative), then compares with
// y0 / C1(eps).  The a1-dependence must vanish because the odd part of the
// time-of-flight integrand integrates to zero over [-1,1].
struct OdeVerification {
  double empirical = 0.0;
  double analytic = 0.0;
  double relative_error = 0.0;
  long steps_used = 0;
};
OdeVerification verify_transition_ode(double eps, double y0,
                                      const NormalFormConfig& config);

// Sign-pattern classification of the phase portrait for parameters outside
// the open positive quadrant.  |lambda| <= 1e-12 is treated as lambda = 0
// (separatrix connection intact), documented artifact tolerance.
Stratum classify_stratum(const Params& nu);

}  // namespace lips

#endif  // LIPS_NORMAL_FORM_HPP
