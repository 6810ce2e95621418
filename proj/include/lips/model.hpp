#ifndef LIPS_MODEL_HPP
#define LIPS_MODEL_HPP

#include <optional>
#include <string>
#include <vector>

#include "lips/jet.hpp"

namespace lips {

// The transition diffeomorphism f along the connection.  Two closed-form
// families are supported so that every derivative up to order 6 is exact:
//
//   poly:  f(y) = c0 + c1 y + ... + ck y^k
//   sine:  f(y) = y + a*sin(b*y)
//
// Constructed instances are certified strictly increasing on [-1,1] by a
// dense 2001-point derivative grid; polynomials additionally get a
// second-derivative bound check on every subinterval, so positivity between
// samples is guaranteed, not sampled.  Affine functions are rejected unless
// the degenerate flag is set (they remain useful as analytic test cases).
class ModelFunction {
 public:
  enum class Kind { kPoly, kSine };

  static ModelFunction poly(std::vector<double> coeffs,
                            bool allow_affine = false);
  static ModelFunction sine(double a, double b);
  // f(y) = y, admitted behind the degenerate flag.
  static ModelFunction identity_affine();
  // The reference cubic f(y) = y + y^3/3.
  static ModelFunction reference();

  Kind kind() const { return kind_; }
  bool degenerate_affine() const { return degenerate_affine_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double sine_a() const { return a_; }
  double sine_b() const { return b_; }

  // m-th derivative at y, exact closed form; m = 0 is f itself.
  double deriv(double y, int m) const;
  double operator()(double y) const { return deriv(y, 0); }

  // Range endpoints f(-1), f(1) (cached at construction).
  double f_lo() const { return f_lo_; }
  double f_hi() const { return f_hi_; }

  // Inverse value by safeguarded Newton on a monotone bracket.  The bracket
  // is grown beyond [-1,1] when `extended` allows values outside the range
  // of the section (both families are monotone on the needed extension —
  // verified by the caller via chart bounds).
  double inverse(double q, bool extended = false) const;

  // Human-readable, deterministic description (used in CSV headers).
  std::string describe() const;

 private:
  ModelFunction() = default;
  void certify(bool allow_affine);

  Kind kind_ = Kind::kPoly;
  std::vector<double> coeffs_;           // poly coefficients, index = power
  std::vector<std::vector<double>> dcoeffs_;  // derivative coeff stacks
  double a_ = 0.0, b_ = 0.0;             // sine parameters
  bool degenerate_affine_ = false;
  double f_lo_ = 0.0, f_hi_ = 0.0;
};

// Jet of f at y0 (exact derivatives), 1 <= order <= 6, y0 in [-1,1].
Jet eval_jet(const ModelFunction& f, double y0, int order);

// Jet of f^{-1} at q, q in [f(-1), f(1)]; center found by safeguarded
// Newton (<= 100 iterations), derivatives by series reversion of the
// forward jet.
Jet eval_inverse_jet(const ModelFunction& f, double q, int order);

// Genericity report: for each grid point y0, the minimal order at which the
// jet of f differs from its affine part (condition i), plus a numerical
// verdict on affine inequivalence of f and f^{-1} through an
// orientation-reversing affine conjugacy (condition ii): the least-squares
// residual of matching the derivative stacks of f(alpha(x)) and
// alpha^{-1}(f^{-1}(x)) over alpha(x) = b1 x + b2 with b1 < 0.
struct GenericityPoint {
  double y0 = 0.0;
  // minimal n <= 6 with a nonvanishing nonlinear derivative; 0 if none.
  int first_nonaffine_order = 0;
  // minimized conjugacy residual at order n and the minimizer.
  double cond2_residual = 0.0;
  double cond2_b1 = 0.0, cond2_b2 = 0.0;
  bool cond2_holds = false;  // residual > tolerance
};

struct GenericityReport {
  std::vector<GenericityPoint> points;
  double tolerance = 1e-8;
  bool generic_everywhere = false;
};

GenericityReport check_genericity(const ModelFunction& f, int grid_n = 21);

// Both genericity conditions evaluated at a single base point.
GenericityPoint check_genericity_at(const ModelFunction& f, double y0,
                                    double tolerance = 1e-8);

}  // namespace lips

#endif  // LIPS_MODEL_HPP
