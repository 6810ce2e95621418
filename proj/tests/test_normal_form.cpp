// Unit tests for the local normal-form transitions, the ODE cross-check and
// the parameter-space stratification.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lips/errors.hpp"
#include "lips/normal_form.hpp"

using namespace lips;

TEST_CASE("transition coefficient closed form") {
  // C(1) = exp(-2 arctan 1) = e^{-pi/2}
  CHECK(coeff_C1(1.0) ==
        doctest::Approx(0.20787957635076191).epsilon(1e-15));
  CHECK(coeff_C1(1.0) ==
        doctest::Approx(std::exp(-M_PI / 2.0)).epsilon(1e-15));
  CHECK(coeff_C1(0.25) ==
        doctest::Approx(0.011931242833065577).epsilon(1e-14));
  CHECK(coeff_C1(0.05) ==
        doctest::Approx(5.6605065384616592e-06).epsilon(1e-14));
  CHECK(coeff_C1(0.01) ==
        doctest::Approx(1.6670452081181001e-13).epsilon(1e-14));
  // C2 is the same function of its own argument
  CHECK(coeff_C2(0.25) == coeff_C1(0.25));
  // monotone increasing
  CHECK(coeff_C1(0.5) > coeff_C1(0.25));
  CHECK_THROWS_AS(ln_coeff_C(0.0), DomainError);
  CHECK_THROWS_AS(ln_coeff_C(-1.0), DomainError);
}

TEST_CASE("log form survives where the coefficient underflows") {
  // at u = 1e-6 the coefficient itself is below the smallest double
  const double ln_c = ln_coeff_C(1e-6);
  CHECK(std::isfinite(ln_c));
  CHECK(ln_c == doctest::Approx(-2000.0 * std::atan(1000.0)).epsilon(1e-15));
  CHECK(coeff_C2(1e-6) == 0.0);  // documented underflow
}

TEST_CASE("transition maps") {
  const TransitionResult t1 = transition_1(0.1, 1.0);
  CHECK(t1.value == doctest::Approx(0.48104773809653517).epsilon(1e-15));
  CHECK(t1.in_section);
  // leaving the section is flagged, not thrown
  const TransitionResult t1b = transition_1(0.9, 0.25);
  CHECK(t1b.value == doctest::Approx(0.9 / coeff_C1(0.25)).epsilon(1e-15));
  CHECK_FALSE(t1b.in_section);

  const TransitionResult t2 = transition_2(0.5, 0.25);
  CHECK(t2.value == doctest::Approx(0.0059656214165327886).epsilon(1e-15));
  CHECK(t2.in_section);

  CHECK_THROWS_AS(transition_1(1.5, 1.0), ArgumentError);
  CHECK_THROWS_AS(transition_2(-1.5, 1.0), ArgumentError);

  CHECK(g_map(0.3, 0.1) == doctest::Approx(-0.2));
  CHECK(g_map(-0.25, 0.0) == doctest::Approx(0.25));
}

TEST_CASE("ODE integration reproduces the closed-form transition") {
  for (double eps : {0.05, 0.25, 1.0})
    for (double y0 : {-0.1, 0.01, 0.1}) {
      const OdeVerification v = verify_transition_ode(eps, y0, {0.0, 0.0});
      CHECK(v.relative_error < 1e-6);
      CHECK(v.analytic ==
            doctest::Approx(y0 / coeff_C1(eps)).epsilon(1e-14));
      CHECK(v.steps_used > 0);
    }
}

TEST_CASE("chart coefficient a1 does not shift the transition") {
  // the odd part of the integrand integrates to zero over [-1,1]
  const OdeVerification v0 = verify_transition_ode(0.25, 0.05, {0.0, 0.0});
  const OdeVerification vp = verify_transition_ode(0.25, 0.05, {0.5, 0.0});
  const OdeVerification vm = verify_transition_ode(0.25, 0.05, {-0.5, 0.0});
  CHECK(vp.empirical == doctest::Approx(v0.empirical).epsilon(1e-8));
  CHECK(vm.empirical == doctest::Approx(v0.empirical).epsilon(1e-8));
  CHECK_THROWS_AS(verify_transition_ode(-0.1, 0.05, {0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(verify_transition_ode(0.25, 0.05, {1.5, 0.0}),
                  ArgumentError);
}

TEST_CASE("stratification labels") {
  auto label = [](double e, double d, double l) {
    return classify_stratum({e, d, l}).label;
  };
  CHECK(label(0.0, 0.0, 0.0) == 1);
  CHECK(label(0.0, 0.0, 0.5) == 2);
  CHECK(label(-0.1, -0.2, 0.0) == 3);
  CHECK(label(-0.1, -0.2, -0.3) == 4);
  CHECK(label(-0.1, 0.0, 0.0) == 5);
  CHECK(label(-0.1, 0.0, 0.7) == 6);
  CHECK(label(-0.1, 0.2, 0.0) == 7);
  CHECK(label(-0.1, 0.2, 0.9) == 7);  // lambda does not split this stratum
  CHECK(label(0.0, -0.2, 0.0) == 8);
  CHECK(label(0.0, -0.2, 0.4) == 9);
  CHECK(label(0.0, 0.2, 0.0) == 10);
  CHECK(label(0.1, 0.0, -0.4) == 10);
  CHECK(label(0.1, -0.2, 0.0) == 11);

  // tiny lambda counts as an intact connection
  CHECK(label(0.0, 0.0, 1e-13) == 1);
  CHECK(label(0.0, 0.0, 1e-11) == 2);

  CHECK(classify_stratum({-0.1, 0.2, 0.0}).description ==
        "a saddle and a stable node");
  CHECK_THROWS_AS(classify_stratum({0.1, 0.2, 0.0}), DomainError);
}
