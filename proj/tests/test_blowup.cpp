// Unit tests for the parameter blow-up, its inverse, the horn asymptotics
// and the rectangle selection.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "lips/blowup.hpp"
#include "lips/errors.hpp"

using namespace lips;

TEST_CASE("blow_up closed form") {
  const BlownParams bp = blow_up({1.0, 0.25, 1.0});
  CHECK(bp.delta == 0.25);
  CHECK(bp.p == doctest::Approx(17.423128441796198).epsilon(1e-14));
  CHECK(bp.q == doctest::Approx(1.0 / coeff_C2(0.25)).epsilon(1e-14));
  // eps == delta collapses p to exactly one
  const BlownParams eq = blow_up({0.25, 0.25, 0.5});
  CHECK(eq.p == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(blow_up({0.0, 0.25, 0.0}), DomainError);
  CHECK_THROWS_AS(blow_up({0.25, -0.1, 0.0}), DomainError);
}

TEST_CASE("blow_down inverts blow_up to 1e-10 over a parameter sweep") {
  std::mt19937_64 rng(20260816u);
  std::uniform_real_distribution<double> ulog(std::log(1e-3), std::log(1.0));
  std::uniform_real_distribution<double> ulam(-2.0, 2.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Params nu{std::exp(ulog(rng)), std::exp(ulog(rng)), ulam(rng)};
    const Params back = blow_down(blow_up(nu));
    const double rel = std::max(
        {std::fabs(back.eps - nu.eps) / nu.eps,
         std::fabs(back.delta - nu.delta) / nu.delta,
         std::fabs(back.lambda - nu.lambda) / (1.0 + std::fabs(nu.lambda))});
    worst = std::max(worst, rel);
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("blow_down edge behaviour") {
  // delta = 0 collapses the half-plane to the origin of parameters
  const Params zero = blow_down({0.0, 1.7, -2.4});
  CHECK(zero.eps == 0.0);
  CHECK(zero.delta == 0.0);
  CHECK(zero.lambda == 0.0);
  // unattainably large p has no eps preimage in the modeled bracket
  CHECK_THROWS_AS(blow_down({0.25, 1e5, 0.0}), RangeError);
  // flag raised when eps lands close to the top of the modeled bracket
  bool near = false;
  const double p_big = coeff_C1(9.7) / coeff_C2(0.25);
  blow_down({0.25, p_big, 0.0}, &near);
  CHECK(near);
  near = true;
  blow_down({0.25, 1.0, 0.0}, &near);
  CHECK_FALSE(near);
}

TEST_CASE("horn asymptotics approach the logarithmic opening law") {
  const double p = 2.0, q = 1.0;
  const auto rows = horn_asymptotics(p, q, {1e-2, 1e-3, 1e-4});
  REQUIRE(rows.size() == 3);
  const double limit = 2.0 * std::log(2.0) / M_PI;
  // the opening ratio tends to 2 ln p / pi from above
  CHECK(rows[2].opening_ratio ==
        doctest::Approx(0.442736099579097).epsilon(1e-9));
  CHECK(std::fabs(rows[2].opening_ratio - limit) / limit < 5e-3);
  CHECK(std::fabs(rows[1].opening_ratio - limit) >
        std::fabs(rows[2].opening_ratio - limit));
  // eps/delta -> 1
  CHECK(rows[2].eps_over_delta == doctest::Approx(1.0).epsilon(1e-2));
  // raw lambda underflows near the corner while the rescaled value tends
  // to q e^2
  CHECK(rows[2].lambda < 1e-100);
  CHECK(rows[2].lambda_scaled ==
        doctest::Approx(q * std::exp(2.0)).epsilon(1e-3));
}

TEST_CASE("domain rectangle from the reference model") {
  const ModelFunction f = ModelFunction::reference();
  const DomainD d = select_domain_D(f);
  CHECK(d.p0 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.p1 == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(d.qmax == doctest::Approx(25.0 / 6.0).epsilon(1e-12));
  CHECK(d.contains(1.0, 0.0));
  CHECK(d.contains(d.p0, -d.qmax));
  CHECK_FALSE(d.contains(0.49, 0.0));
  CHECK_FALSE(d.contains(1.0, 4.2));
  // margin shrinks the rectangle from every side
  CHECK_FALSE(d.contains(0.52, 0.0, 0.05));
  CHECK(d.contains(0.56, 0.0, 0.05));
}
