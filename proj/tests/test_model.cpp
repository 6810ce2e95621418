// Unit tests for the model-function families, exact jets, inverses and the
// genericity checks.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lips/errors.hpp"
#include "lips/model.hpp"

using namespace lips;

TEST_CASE("reference model basics") {
  const ModelFunction f = ModelFunction::reference();
  CHECK(f.kind() == ModelFunction::Kind::kPoly);
  CHECK_FALSE(f.degenerate_affine());
  REQUIRE(f.coeffs().size() == 4);
  CHECK(f.coeffs()[1] == 1.0);
  CHECK(f.coeffs()[3] == doctest::Approx(1.0 / 3.0));
  CHECK(f.f_lo() == doctest::Approx(-4.0 / 3.0));
  CHECK(f.f_hi() == doctest::Approx(4.0 / 3.0));
  CHECK(f.describe() == "poly[0,1,0,0.33333333333333331]");

  CHECK(f(0.5) == doctest::Approx(0.5 + 0.125 / 3.0).epsilon(1e-16));
  CHECK(f.deriv(0.5, 1) == doctest::Approx(1.25));
  CHECK(f.deriv(-0.7, 2) == doctest::Approx(-1.4));
  CHECK(f.deriv(0.9, 3) == doctest::Approx(2.0));
  CHECK(f.deriv(0.9, 4) == 0.0);
  CHECK(f.deriv(0.9, 6) == 0.0);
  CHECK_THROWS_AS(f.deriv(0.0, 7), ArgumentError);
}

TEST_CASE("sine family derivatives are exact") {
  const double a = 0.4, b = 1.3;
  const ModelFunction f = ModelFunction::sine(a, b);
  const double y = 0.3;
  CHECK(f(y) == doctest::Approx(y + a * std::sin(b * y)).epsilon(1e-16));
  CHECK(f.deriv(y, 1) ==
        doctest::Approx(1.0 + a * b * std::cos(b * y)).epsilon(1e-15));
  CHECK(f.deriv(y, 2) ==
        doctest::Approx(-a * b * b * std::sin(b * y)).epsilon(1e-15));
  CHECK(f.deriv(y, 3) ==
        doctest::Approx(-a * b * b * b * std::cos(b * y)).epsilon(1e-15));
  CHECK(f.deriv(y, 4) ==
        doctest::Approx(a * std::pow(b, 4) * std::sin(b * y)).epsilon(1e-15));
  CHECK(f.deriv(y, 5) ==
        doctest::Approx(a * std::pow(b, 5) * std::cos(b * y)).epsilon(1e-15));
}

TEST_CASE("construction rejects non-monotone and affine functions") {
  // f' = 1 - 3 y^2 turns negative inside [-1,1]
  CHECK_THROWS_AS(ModelFunction::poly({0.0, 1.0, 0.0, -1.0}), DomainError);
  // |a b| >= 1 allows f' to vanish
  CHECK_THROWS_AS(ModelFunction::sine(1.0, 1.2), DomainError);
  // affine rejected unless explicitly allowed
  CHECK_THROWS_AS(ModelFunction::poly({0.0, 2.0}), DegeneracyError);
  const ModelFunction id = ModelFunction::identity_affine();
  CHECK(id.degenerate_affine());
  CHECK(id(0.3) == 0.3);
  // decreasing affine still rejected even with the degenerate flag
  CHECK_THROWS_AS(ModelFunction::poly({0.0, -1.0}, true), DomainError);
}

TEST_CASE("inverse is exact at an exact midpoint root") {
  const ModelFunction f = ModelFunction::reference();
  // the bracket midpoint of [-1,1] is the root itself; the safeguarded
  // Newton must return it exactly rather than drifting to an endpoint
  CHECK(f.inverse(0.0) == 0.0);
  CHECK(f.inverse(f(0.7)) == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(f.inverse(f(-0.35)) == doctest::Approx(-0.35).epsilon(1e-14));
  CHECK(f.inverse(f.f_hi()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(f.inverse(1.5), DomainError);
  // extended bracket reaches beyond the section
  const double w = f.inverse(2.0, true);
  CHECK(w > 1.0);
  CHECK(f(w) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("eval_jet validates and is exact") {
  const ModelFunction f = ModelFunction::reference();
  CHECK_THROWS_AS(eval_jet(f, 1.5, 6), ArgumentError);
  CHECK_THROWS_AS(eval_jet(f, 0.0, 0), ArgumentError);
  CHECK_THROWS_AS(eval_jet(f, 0.0, 7), ArgumentError);
  const Jet j = eval_jet(f, 0.0, 6);
  CHECK(j.center == 0.0);
  const double expect[7] = {0.0, 1.0, 0.0, 2.0, 0.0, 0.0, 0.0};
  for (int k = 0; k <= 6; ++k) CHECK(j[k] == expect[k]);
}

TEST_CASE("eval_inverse_jet matches closed forms at both anchors") {
  const ModelFunction f = ModelFunction::reference();
  CHECK_THROWS_AS(eval_inverse_jet(f, 2.0, 6), DomainError);

  const Jet at0 = eval_inverse_jet(f, 0.0, 6);
  const double expect0[7] = {0.0, 1.0, 0.0, -2.0, 0.0, 40.0, 0.0};
  for (int k = 0; k <= 6; ++k)
    CHECK(at0[k] == doctest::Approx(expect0[k]).epsilon(1e-12));

  const Jet at1 = eval_inverse_jet(f, 4.0 / 3.0, 6);
  const double expect1[7] = {1.0,     0.5,    -0.25,   0.25,
                             -0.3125, 0.3125, 0.546875};
  for (int k = 0; k <= 6; ++k)
    CHECK(at1[k] == doctest::Approx(expect1[k]).epsilon(1e-11));
}

TEST_CASE("genericity holds everywhere for the reference model") {
  const ModelFunction f = ModelFunction::reference();
  const GenericityReport rep = check_genericity(f, 21);
  CHECK(rep.generic_everywhere);
  REQUIRE(rep.points.size() == 21);
  for (const auto& pt : rep.points) {
    CHECK(pt.first_nonaffine_order >= 2);
    CHECK(pt.first_nonaffine_order <= 3);
    CHECK(pt.cond2_holds);
  }
  // f'' vanishes only at y0 = 0, where the cubic term takes over
  const GenericityPoint mid = check_genericity_at(f, 0.0);
  CHECK(mid.first_nonaffine_order == 3);
  const GenericityPoint off = check_genericity_at(f, 0.5);
  CHECK(off.first_nonaffine_order == 2);
  // the hardest point of the affine-conjugacy separation still clears the
  // tolerance by four orders of magnitude
  const GenericityPoint worst = check_genericity_at(f, -0.78076);
  CHECK(worst.cond2_holds);
  CHECK(worst.cond2_residual > 1e-4);
  CHECK(worst.cond2_b1 < 0.0);
}

TEST_CASE("affine identity fails genericity") {
  const ModelFunction id = ModelFunction::identity_affine();
  const GenericityPoint pt = check_genericity_at(id, 0.0);
  CHECK(pt.first_nonaffine_order == 0);
  CHECK_FALSE(pt.cond2_holds);
}
