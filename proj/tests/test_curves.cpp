// Unit tests for the organising curves in the parameter half-plane and
// their singular points.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "lips/blowup.hpp"
#include "lips/curves.hpp"
#include "lips/model.hpp"

using namespace lips;

namespace {
const double kSqrt6 = std::sqrt(6.0);
}

TEST_CASE("diagonal family closed form") {
  const ModelFunction f = ModelFunction::reference();
  const PlanarCurve c = trace_L0(f, 801);
  CHECK(c.kind == CurveKind::kL0);
  CHECK(curve_kind_name(c.kind) == "L0");
  REQUIRE(c.samples.size() == 801);
  CHECK(c.branch_count() == 1);
  // every sample satisfies p = f'(y), q = p y + f(y) exactly
  for (const auto& s : c.samples) {
    CHECK(s.y == s.w);
    CHECK(s.p == doctest::Approx(f.deriv(s.y, 1)).epsilon(1e-14));
    CHECK(s.q == doctest::Approx(s.p * s.y + f(s.y)).epsilon(1e-14));
  }
  // endpoints (2, -10/3) and (2, 10/3); the midpoint sits at (1, 0)
  CHECK(c.samples.front().p == doctest::Approx(2.0));
  CHECK(c.samples.front().q == doctest::Approx(-10.0 / 3.0));
  CHECK(c.samples.back().p == doctest::Approx(2.0));
  CHECK(c.samples.back().q == doctest::Approx(10.0 / 3.0));
  CHECK(c.samples[400].p == doctest::Approx(1.0));
  CHECK(std::fabs(c.samples[400].q) < 1e-14);
}

TEST_CASE("off-diagonal residual properties") {
  const ModelFunction f = ModelFunction::reference();
  // vanishes identically on the diagonal, antisymmetric off it
  CHECK(offdiagonal_residual(f, 0.3, 0.3) == 0.0);
  CHECK(offdiagonal_residual(f, 0.2, 0.7) ==
        doctest::Approx(-offdiagonal_residual(f, 0.7, 0.2)).epsilon(1e-15));
  double fy = 0.0, fw = 0.0;
  offdiagonal_gradient(f, 0.4, 0.4, &fy, &fw);
  CHECK(std::fabs(fy) < 1e-12);
  CHECK(std::fabs(fw) < 1e-12);
  // the tangency preimage (sqrt(6)-2, 1) lies on the zero set
  CHECK(std::fabs(offdiagonal_residual(f, kSqrt6 - 2.0, 1.0)) < 1e-12);
}

TEST_CASE("off-diagonal branches: canonical form and residuals") {
  const ModelFunction f = ModelFunction::reference();
  const DomainD d = select_domain_D(f);
  const double bound = offdiagonal_w_bound(f, d);
  CHECK(bound == doctest::Approx(2.395546206456129).epsilon(1e-6));

  const PlanarCurve lam = trace_Lambda0(f, 300, bound, 100000);
  CHECK(lam.kind == CurveKind::kLambda0OffDiagonal);
  CHECK(lam.branch_count() == 2);
  REQUIRE(lam.samples.size() > 100);
  for (const auto& s : lam.samples) {
    CHECK(s.w > s.y);  // canonical orientation
    CHECK(std::fabs(offdiagonal_residual(f, s.y, s.w)) < 1e-10);
    const double p = std::sqrt(f.deriv(s.w, 1) * f.deriv(s.y, 1));
    CHECK(s.p == doctest::Approx(p).epsilon(1e-12));
    CHECK(s.q == doctest::Approx(p * s.w + f(s.y)).epsilon(1e-11));
  }
  // one branch crosses the section edge y = -1 at w = 2 - sqrt(6)
  double best = 1e9, w_at = 0.0;
  for (const auto& s : lam.samples)
    if (std::fabs(s.y + 1.0) < best) {
      best = std::fabs(s.y + 1.0);
      w_at = s.w;
    }
  CHECK(best < 5e-3);
  CHECK(w_at == doctest::Approx(2.0 - kSqrt6).epsilon(1e-2));
}

TEST_CASE("escape chords equal the secant slope") {
  const ModelFunction f = ModelFunction::reference();
  const PlanarCurve lp = trace_l_pm(f, +1, 501);
  CHECK(lp.kind == CurveKind::kLPlus);
  REQUIRE(lp.samples.size() == 501);
  for (const auto& s : lp.samples) {
    CHECK(s.y == 1.0);
    if (std::fabs(s.w - 1.0) > 1e-6) {
      const double secant = (f(s.w) - f(1.0)) / (s.w - 1.0);
      CHECK(s.p == doctest::Approx(secant).epsilon(1e-11));
    }
    CHECK(s.q == doctest::Approx(s.p * s.w + f(1.0)).epsilon(1e-12));
  }
  // anchor: partner w = -1 maps to (4/3, 0)
  const auto& first = lp.samples.front();
  CHECK(first.w == -1.0);
  CHECK(first.p == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(std::fabs(first.q) < 1e-12);
  // partner w = +1 degenerates to the tangency value p = f'(1) = 2
  const auto& last = lp.samples.back();
  CHECK(last.p == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(last.q == doctest::Approx(10.0 / 3.0).epsilon(1e-10));

  const PlanarCurve lm = trace_l_pm(f, -1, 501);
  CHECK(lm.kind == CurveKind::kLMinus);
  // odd model: l- is the mirror image q -> -q of l+; its partner w = +1
  // sits at the end of the parameter sweep
  CHECK(lm.samples.back().p == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(std::fabs(lm.samples.back().q) < 1e-12);
  CHECK(lm.samples.front().p == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(lm.samples.front().q == doctest::Approx(-10.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("boundary fixed lines") {
  const ModelFunction f = ModelFunction::reference();
  const PlanarCurve bl = trace_boundary_fixed_line(f, +1, 0.5, 2.5, 101);
  CHECK(bl.kind == CurveKind::kLPlus);
  CHECK(bl.component == "boundary-fixed-line");
  for (const auto& s : bl.samples)
    CHECK(s.q == doctest::Approx(s.p + 4.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("exactly two flips with the cubic-term sign change") {
  const ModelFunction f = ModelFunction::reference();
  const auto flips = find_flips(f);
  REQUIRE(flips.size() == 2);
  const double y0 = 1.0 / std::sqrt(2.0);
  for (const auto& s : flips) {
    CHECK(s.kind == SingularKind::kFlip2);
    CHECK(std::fabs(std::fabs(s.y) - y0) < 1e-9);
    CHECK(s.nondegeneracy == doctest::Approx(-320.0 / 9.0).epsilon(1e-6));
    CHECK(s.p == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(std::fabs(s.q) == doctest::Approx(1.8856180831641265).epsilon(1e-9));
    CHECK(s.resolved);
    CHECK(s.residual < 1e-10);
  }
  CHECK(flips[0].y == doctest::Approx(-flips[1].y).epsilon(1e-12));
}

TEST_CASE("no cusps and no self-intersections for the reference model") {
  const ModelFunction f = ModelFunction::reference();
  const DomainD d = select_domain_D(f);
  const PlanarCurve lam = trace_Lambda0(f, 300, offdiagonal_w_bound(f, d),
                                        100000);
  CHECK(find_cusps(f, lam).empty());
  CHECK(find_self_intersections(lam).empty());
}

TEST_CASE("endpoint tangencies carry matching slopes") {
  const ModelFunction f = ModelFunction::reference();
  const DomainD d = select_domain_D(f);
  const PlanarCurve lam = trace_Lambda0(f, 300, offdiagonal_w_bound(f, d),
                                        100000);
  const PlanarCurve lp = trace_l_pm(f, +1, 501);
  auto tps = endpoint_tangency(f, lam, lp);
  REQUIRE(tps.size() == 2);
  std::sort(tps.begin(), tps.end(),
            [](const SingularPoint& a, const SingularPoint& b) {
              return a.p < b.p;
            });
  // interior tangency where the off-diagonal branch reaches w = +1
  CHECK(tps[0].p == doctest::Approx(1.5505102572168219).epsilon(1e-9));
  CHECK(tps[0].q == doctest::Approx(2.0302717900324019).epsilon(1e-9));
  CHECK(tps[0].y == doctest::Approx(kSqrt6 - 2.0).epsilon(1e-9));
  CHECK(std::fabs(tps[0].slope_a - tps[0].slope_b) < 1e-6);
  CHECK(tps[0].resolved);
  // corner tangency with the diagonal family at (2, 10/3), slope 3
  CHECK(tps[1].p == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(tps[1].q == doctest::Approx(10.0 / 3.0).epsilon(1e-9));
  CHECK(tps[1].slope_a == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(std::fabs(tps[1].slope_a - tps[1].slope_b) < 1e-6);

  const PlanarCurve lm = trace_l_pm(f, -1, 501);
  auto tms = endpoint_tangency(f, lam, lm);
  REQUIRE(tms.size() == 2);
  for (const auto& t : tms) CHECK(std::fabs(t.slope_a - t.slope_b) < 1e-6);
}
