#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"
#include "viakern/ageclass.hpp"

using namespace viakern;
namespace vt = viakern::testing;

namespace {

AgeClassParams tiny_params() {
  AgeClassParams p;
  p.max_age = 2;
  p.alpha = 1.0;
  p.beta = 0.1;
  p.natural_mortality = {0.5, 0.5};
  p.fishing_mortality = {1.0, 1.0};
  p.weight_gr = {1.0, 2.0};
  p.maturity = {0.0, 1.0};
  p.plus_group = false;
  p.lambda_min = 0.0;
  p.lambda_max = 1.0;
  return p;
}

}  // namespace

TEST_CASE("beverton-holt recruitment cases") {
  // Constant case alpha = 0.
  CHECK(beverton_holt(0.0, 0.5, 123.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(beverton_holt(0.0, 0.5, 0.0) == doctest::Approx(2.0).epsilon(1e-15));
  // Linear case beta = 0.
  CHECK(beverton_holt(2.0, 0.0, 10.0) == doctest::Approx(5.0).epsilon(1e-15));
  // Sea bass parameters at B = 1e9 g, checked against 50-digit arithmetic.
  CHECK(beverton_holt(1.4e-3, 4.65e-7, 1e9) ==
        doctest::Approx(2150531.1596911321).epsilon(1e-14));
  CHECK(beverton_holt(1.4e-3, 4.65e-7, 0.0) == 0.0);
  CHECK_THROWS_AS(beverton_holt(0.0, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(beverton_holt(1.0, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("beverton-holt derivative") {
  CHECK(beverton_holt_derivative(2.0, 0.0, 7.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(beverton_holt_derivative(0.0, 0.5, 1.0) == 0.0);
  // Decreasing in B (concavity).
  CHECK(beverton_holt_derivative(1.0, 0.1, 5.0) < beverton_holt_derivative(1.0, 0.1, 1.0));
}

TEST_CASE("ssb examples") {
  AgeClassParams p = tiny_params();
  CHECK(ssb(p, StateVector::zeros(2)) == 0.0);
  CHECK(ssb(p, StateVector{5.0, 3.0}) == doctest::Approx(6.0).epsilon(1e-15));
}

TEST_CASE("step maps zero to zero and rejects bad inputs") {
  const AgeClassParams p = vt::seabass();
  const StateVector next = step(p, StateVector::zeros(36), 0.2);
  CHECK(l1_norm(next) == 0.0);

  CHECK_THROWS_AS(step(p, StateVector::zeros(36), -0.1), std::invalid_argument);
  std::vector<double> neg(36, 1.0);
  neg[3] = -1.0;
  CHECK_THROWS_AS(step(p, StateVector(neg), 0.1), std::invalid_argument);
  CHECK_THROWS_AS(step(p, StateVector::zeros(35), 0.1), std::invalid_argument);
}

TEST_CASE("step survival factors at lambda 0 are exp(-M)") {
  const AgeClassParams p = vt::seabass();
  std::vector<double> unit(36, 0.0);
  unit[4] = 1.0;
  const StateVector next = step(p, StateVector(unit), 0.0);
  CHECK(next[5] == doctest::Approx(std::exp(-0.16)).epsilon(1e-15));
}

TEST_CASE("equilibrium is a fixed point of step for both species") {
  const AgeClassParams p = vt::seabass();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lam(p.lambda_min, p.lambda_max);
  for (int i = 0; i < 20; ++i) {
    const double l = i == 0 ? 0.0 : lam(rng);
    const StateVector n_bar = equilibrium(p, l);
    REQUIRE(l1_norm(n_bar) > 0.0);
    const double resid = l1_distance(step(p, n_bar, l), n_bar) / l1_norm(n_bar);
    CHECK(resid < 1e-9);
  }

  const TwoSexParams tp = vt::alfonsino();
  std::uniform_real_distribution<double> lam2(tp.male.lambda_min, tp.male.lambda_max);
  for (int i = 0; i < 5; ++i) {
    const double l = i == 0 ? 0.0 : lam2(rng);
    const TwoSexState eq = two_sex_equilibrium(tp, l);
    const TwoSexState next = two_sex_step(tp, eq, l);
    const double scale = l1_norm(eq.male) + l1_norm(eq.female);
    REQUIRE(scale > 0.0);
    const double resid =
        (l1_distance(next.male, eq.male) + l1_distance(next.female, eq.female)) / scale;
    CHECK(resid < 1e-9);
  }
}

TEST_CASE("survival fractions") {
  AgeClassParams p = tiny_params();
  SUBCASE("no plus group") {
    const auto s = survival_fractions(p, 0.0);
    CHECK(s[0] == 1.0);
    CHECK(s[1] == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  }
  SUBCASE("plus group inflates the terminal class") {
    p.plus_group = true;
    const auto s = survival_fractions(p, 0.0);
    CHECK(s[1] ==
          doctest::Approx(std::exp(-0.5) / (1.0 - std::exp(-0.5))).epsilon(1e-14));
  }
  SUBCASE("plus-group denominator guard") {
    p.plus_group = true;
    p.natural_mortality = {0.5, 0.0};  // M_A = 0 and lambda = 0
    CHECK_THROWS_AS(survival_fractions(p, 0.0), std::invalid_argument);
  }
  SUBCASE("lambda adds fishing mortality") {
    const auto s = survival_fractions(p, 1.0);
    CHECK(s[1] == doctest::Approx(std::exp(-1.5)).epsilon(1e-14));
  }
}

TEST_CASE("spawning per recruit") {
  AgeClassParams p = tiny_params();
  SUBCASE("zero when nothing matures") {
    p.maturity = {0.0, 0.0};
    CHECK(spawning_per_recruit(p, 0.3) == 0.0);
  }
  SUBCASE("nonincreasing in lambda") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
      double a = dist(rng), b = dist(rng);
      if (a > b) std::swap(a, b);
      CHECK(spawning_per_recruit(p, b) <= spawning_per_recruit(p, a) + 1e-15);
    }
  }
  SUBCASE("sea bass SSB identity SSB(N(lambda)) = Z * spr") {
    const AgeClassParams sb = vt::seabass();
    for (double l : {0.0, 0.2, 0.39}) {
      const double spr = spawning_per_recruit(sb, l);
      const double z = (spr - sb.alpha) / (sb.beta * spr);
      const double b = ssb(sb, equilibrium(sb, l));
      CHECK(b == doctest::Approx(z * spr).epsilon(1e-12));
    }
  }
}

TEST_CASE("equilibrium clamps") {
  AgeClassParams p = tiny_params();
  SUBCASE("beta = 0 gives the zero vector") {
    p.beta = 0.0;
    CHECK(l1_norm(equilibrium(p, 0.0)) == 0.0);
  }
  SUBCASE("spr <= alpha gives the zero vector") {
    p.alpha = 1e9;
    CHECK(l1_norm(equilibrium(p, 0.0)) == 0.0);
  }
}

TEST_CASE("catch at age") {
  const AgeClassParams p = vt::seabass();
  SUBCASE("zero harvest, zero catch") {
    const auto c = catch_at_age(p, equilibrium(p, 0.0), 0.0);
    for (double v : c) CHECK(v == 0.0);
  }
  SUBCASE("hand-verified Baranov value") {
    AgeClassParams q = tiny_params();
    q.natural_mortality = {0.2, 0.2};
    q.fishing_mortality = {1.0, 1.0};
    const auto c = catch_at_age(q, StateVector{100.0, 0.0}, 1.0);
    CHECK(c[0] == doctest::Approx(58.23381567398316).epsilon(1e-14));
  }
  SUBCASE("catch is strictly below abundance") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> lam(1e-3, 1.0);
    std::uniform_real_distribution<double> abun(1.0, 1e6);
    for (int i = 0; i < 50; ++i) {
      std::vector<double> n(36);
      for (auto& v : n) v = abun(rng);
      const StateVector state(n);
      const auto c = catch_at_age(p, state, lam(rng));
      for (int a = 0; a < 36; ++a) CHECK(c[static_cast<std::size_t>(a)] < state[a]);
    }
  }
}

TEST_CASE("yield") {
  const AgeClassParams p = vt::seabass();
  CHECK(yield(p, equilibrium(p, 0.0), 0.0) == 0.0);
  // Monotone in the state and in lambda on sampled points.
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> lam(0.0, 0.39);
  std::uniform_real_distribution<double> abun(0.0, 1e6);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> n(36), bump(36);
    for (auto& v : n) v = abun(rng);
    for (auto& v : bump) v = abun(rng);
    std::vector<double> np(36);
    for (int a = 0; a < 36; ++a) np[static_cast<std::size_t>(a)] =
        n[static_cast<std::size_t>(a)] + bump[static_cast<std::size_t>(a)];
    double a = lam(rng), b = lam(rng);
    if (a > b) std::swap(a, b);
    CHECK(yield(p, StateVector(n), a) <= yield(p, StateVector(np), a) + 1e-9);
    CHECK(yield(p, StateVector(n), a) <= yield(p, StateVector(n), b) + 1e-9);
  }
}

TEST_CASE("sea bass thresholds: frozen values and published targets") {
  const ThresholdReport r = max_sustainable_thresholds(vt::seabass());
  CHECK(r.max_yield_tons == doctest::Approx(vt::kSeabassMaxYieldTons).epsilon(1e-9));
  CHECK(r.max_ssb_tons == doctest::Approx(vt::kSeabassMaxSsbTons).epsilon(1e-9));
  CHECK(r.phi_g == doctest::Approx(vt::kSeabassPhiG).epsilon(1e-9));
  CHECK(r.contraction_valid);
  // Published Table values at the acceptance tolerances.
  CHECK(vt::within_rel(r.max_yield_tons, vt::kPaperSeabassYieldTons, 0.01));
  CHECK(vt::within_rel(r.max_ssb_tons, vt::kPaperSeabassSsbTons, 0.01));
  CHECK(std::abs(r.phi_g - vt::kPaperSeabassPhiG) < 0.005);
}

TEST_CASE("degenerate control interval") {
  AgeClassParams p = vt::seabass();
  p.lambda_max = p.lambda_min;
  const ThresholdReport r = max_sustainable_thresholds(p);
  CHECK(r.max_yield_tons ==
        doctest::Approx(grams_to_tons(yield(p, equilibrium(p, p.lambda_min), p.lambda_min))));
}

TEST_CASE("phi_g") {
  const AgeClassParams p = vt::seabass();
  CHECK(phi_g(p, 0.0) == doctest::Approx(vt::kSeabassPhiG).epsilon(1e-12));
  // Lower bound: the recruitment term is nonnegative.
  double max_surv = 0.0;
  for (int a = 0; a < p.max_age; ++a) {
    max_surv = std::max(max_surv, std::exp(-p.natural_mortality[static_cast<std::size_t>(a)]));
  }
  CHECK(phi_g(p, 0.0) >= max_surv);

  AgeClassParams constant = p;
  constant.alpha = 0.0;
  CHECK(phi_g(constant, 0.0) == doctest::Approx(max_surv).epsilon(1e-12));
}

TEST_CASE("phi_g_on extends the bound below the equilibrium SSB") {
  const AgeClassParams p = vt::seabass();
  const double b_bar = ssb(p, equilibrium(p, 0.0));
  CHECK(phi_g_on(p, 0.0, b_bar * 1.5) == doctest::Approx(phi_g(p, 0.0)).epsilon(1e-12));
  CHECK(phi_g_on(p, 0.0, b_bar * 0.5) >= phi_g(p, 0.0));
  CHECK(phi_g_on(p, 0.0, tons_to_grams(50000.0)) < 1.0);
}

TEST_CASE("yield set construction") {
  const AgeClassParams p = vt::seabass();
  const IndicatorSet d = make_yield_set(p, tons_to_grams(15000.0), tons_to_grams(50000.0));
  CHECK(d.classification() == SetKind::Production);
  CHECK(contains(d, equilibrium(p, 0.0), ControlValue::scalar(p.lambda_max)));
  CHECK_FALSE(contains(d, StateVector::zeros(36), ControlValue::scalar(p.lambda_max)));

  // Tie at the indicator threshold counts as satisfied.
  const double b_bar_gr = ssb(p, equilibrium(p, 0.0));
  const IndicatorSet tie = make_yield_set(p, 0.0, b_bar_gr);
  CHECK(contains(tie, equilibrium(p, 0.0), ControlValue::scalar(0.0)));
}

TEST_CASE("protect set construction") {
  const AgeClassParams p = vt::seabass();
  const IndicatorSet d = make_protect_set(p, tons_to_grams(50000.0), 1.0);
  CHECK(d.classification() == SetKind::Preservation);
  const StateVector n_bar = equilibrium(p, 0.0);
  CHECK(contains(d, n_bar, ControlValue::scalar(0.0)));
  const IndicatorSet high = make_protect_set(p, tons_to_grams(60000.0), 1.0);
  CHECK_FALSE(contains(high, n_bar, ControlValue::scalar(0.0)));
}

TEST_CASE("two-sex step basics") {
  const TwoSexParams tp = vt::alfonsino();
  const TwoSexState zero{StateVector::zeros(20), StateVector::zeros(20)};
  const TwoSexState next = two_sex_step(tp, zero, 0.3);
  CHECK(l1_norm(next.male) == 0.0);
  CHECK(l1_norm(next.female) == 0.0);

  TwoSexParams even = tp;
  even.recruit_sex_split = 0.5;
  const TwoSexState eq = two_sex_equilibrium(even, 0.0);
  const TwoSexState stepped = two_sex_step(even, eq, 0.2);
  CHECK(stepped.male[0] == doctest::Approx(stepped.female[0]).epsilon(1e-12));
}

TEST_CASE("two-sex degenerate composition matches a halved single-sex model") {
  // Equal sexes, female-only SSB, 50/50 split: each sex follows the
  // single-sex model with recruitment phi/2, i.e. alpha and beta doubled.
  const TwoSexParams tp = vt::alfonsino();
  TwoSexParams degenerate = tp;
  degenerate.male = tp.female;
  degenerate.recruit_sex_split = 0.5;
  degenerate.ssb_convention = SsbConvention::FemaleOnly;

  AgeClassParams halved = tp.female;
  halved.alpha *= 2.0;
  halved.beta *= 2.0;

  for (double l : {0.0, 0.3}) {
    const TwoSexState eq = two_sex_equilibrium(degenerate, l);
    const StateVector ref = equilibrium(halved, l);
    REQUIRE(l1_norm(ref) > 0.0);
    CHECK(l1_distance(eq.female, ref) / l1_norm(ref) < 1e-8);
    CHECK(l1_distance(eq.male, ref) / l1_norm(ref) < 1e-8);
  }
}

TEST_CASE("two-sex closed-form cross-check under the female-carried convention") {
  TwoSexParams tp = vt::alfonsino();
  tp.ssb_convention = SsbConvention::FemaleOnly;
  tp.recruit_sex_split = 1.0;
  const TwoSexState eq = two_sex_equilibrium(tp, 0.0);
  const double spr_f = spawning_per_recruit(tp.female, 0.0);
  const double b_closed = (spr_f - tp.female.alpha) / tp.female.beta;
  CHECK(two_sex_ssb(tp, eq) == doctest::Approx(b_closed).epsilon(1e-8));
  // All recruits female: the male block decays to numerical zero.
  CHECK(l1_norm(eq.male) < 1e-6 * l1_norm(eq.female));
}

TEST_CASE("two-sex thresholds per convention") {
  const TwoSexParams base = vt::alfonsino();

  TwoSexParams carried = base;
  carried.ssb_convention = SsbConvention::FemaleOnly;
  carried.recruit_sex_split = 1.0;
  const ThresholdReport r = two_sex_thresholds(carried);
  CHECK(r.max_yield_tons == doctest::Approx(vt::kAlfonsinoMaxYieldTons).epsilon(1e-8));
  CHECK(r.max_ssb_tons == doctest::Approx(vt::kAlfonsinoMaxSsbTons).epsilon(1e-8));
  CHECK(r.phi_g == doctest::Approx(vt::kAlfonsinoPhiG).epsilon(1e-8));
  CHECK(r.convention == "female_carried");
  // Published Table values at the acceptance tolerances.
  CHECK(vt::within_rel(r.max_yield_tons, vt::kPaperAlfonsinoYieldTons, 0.05));
  CHECK(vt::within_rel(r.max_ssb_tons, vt::kPaperAlfonsinoSsbTons, 0.05));
  CHECK(std::abs(r.phi_g - vt::kPaperAlfonsinoPhiG) < 0.005);

  TwoSexParams pooled = base;  // spec defaults
  const ThresholdReport rp = two_sex_thresholds(pooled);
  CHECK(rp.max_yield_tons == doctest::Approx(14838.77658596638).epsilon(1e-8));
  CHECK(rp.max_ssb_tons == doctest::Approx(50375.83637534283).epsilon(1e-8));

  TwoSexParams barren = base;
  barren.male.beta = 0.0;
  barren.female.beta = 0.0;
  const ThresholdReport rb = two_sex_thresholds(barren);
  CHECK(rb.max_yield_tons == 0.0);
  CHECK(rb.max_ssb_tons == 0.0);
}

TEST_CASE("two-sex parameter validation") {
  TwoSexParams tp = vt::alfonsino();
  tp.male.alpha *= 2.0;
  CHECK_THROWS_AS(tp.validate(), std::invalid_argument);

  TwoSexParams tq = vt::alfonsino();
  tq.male.maturity[5] = 0.5;
  CHECK_THROWS_AS(tq.validate(), std::invalid_argument);
}

TEST_CASE("concat and split round-trip") {
  const TwoSexParams tp = vt::alfonsino();
  const TwoSexState eq = two_sex_equilibrium(tp, 0.1);
  const StateVector flat = concat(eq);
  CHECK(flat.size() == 40);
  const TwoSexState back = split_state(tp, flat);
  CHECK(l1_distance(back.male, eq.male) == 0.0);
  CHECK(l1_distance(back.female, eq.female) == 0.0);
}

TEST_CASE("unit conversion is exactly 1e-6") {
  CHECK(grams_to_tons(1e6) == 1.0);
  CHECK(tons_to_grams(56521.0) == 56521e6);
}
