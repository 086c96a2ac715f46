#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "viakern/toy.hpp"

using namespace viakern;

namespace {

ToySpec production_spec() {
  ToySpec spec;
  spec.state_dim = 1;
  spec.control_lo = 0.0;
  spec.control_hi = 0.3;
  spec.dynamics_exprs = {"1.1051709180756477*x1*exp(-1*u1)"};
  spec.indicator_exprs = {"x1 >= 1", "1*u1*x1 >= 0.05"};
  spec.declared_kind = SetKind::Production;
  return spec;
}

}  // namespace

TEST_CASE("production toy parses and evaluates") {
  const ToySystem toy = parse_toy(production_spec());
  CHECK(toy.acceptable_set.classification() == SetKind::Production);

  // x e^{0.1-u} at a few points.
  for (double x : {0.5, 1.0, 2.0}) {
    for (double u : {0.0, 0.15, 0.3}) {
      const double got = toy.dynamics.map(StateVector{x}, ControlValue::scalar(u))[0];
      CHECK(got == doctest::Approx(x * std::exp(0.1 - u)).epsilon(1e-12));
    }
  }
  CHECK(toy.dynamics.bounds.lower[0] == 0.0);
  CHECK(toy.dynamics.bounds.upper[0] == 0.3);

  CHECK(contains(toy.acceptable_set, StateVector{2.0}, ControlValue::scalar(0.1)));
  CHECK_FALSE(contains(toy.acceptable_set, StateVector{2.0}, ControlValue::scalar(0.0)));
  CHECK_FALSE(contains(toy.acceptable_set, StateVector{0.5}, ControlValue::scalar(0.3)));
}

TEST_CASE("affine preservation toy parses") {
  ToySpec spec;
  spec.state_dim = 1;
  spec.control_lo = 0.0;
  spec.control_hi = 0.5;
  spec.dynamics_exprs = {"0.5 + 0.5*x1"};
  spec.indicator_exprs = {"x1 >= 0.9", "-1*u1 >= -0.4"};
  spec.declared_kind = SetKind::Preservation;
  const ToySystem toy = parse_toy(spec);
  CHECK(toy.acceptable_set.classification() == SetKind::Preservation);
  CHECK(toy.dynamics.map(StateVector{3.0}, ControlValue::scalar(0.2))[0] ==
        doctest::Approx(2.0).epsilon(1e-15));
  CHECK(contains(toy.acceptable_set, StateVector{1.0}, ControlValue::scalar(0.3)));
  CHECK_FALSE(contains(toy.acceptable_set, StateVector{1.0}, ControlValue::scalar(0.45)));
}

TEST_CASE("indicator Lipschitz bounds from the grammar") {
  const ToySystem toy = parse_toy(production_spec());
  REQUIRE(toy.acceptable_set.indicators.size() == 2);
  CHECK(toy.acceptable_set.indicators[0].state_lipschitz.value() ==
        doctest::Approx(1.0).epsilon(1e-15));
  // u*x term: bounded by the largest admissible control.
  CHECK(toy.acceptable_set.indicators[1].state_lipschitz.value() ==
        doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("two-dimensional dynamics with cross terms") {
  ToySpec spec;
  spec.state_dim = 2;
  spec.control_lo = 0.0;
  spec.control_hi = 1.0;
  spec.dynamics_exprs = {"0.3 + 0.5*x2", "0.9*x1*exp(-0.5*u1)"};
  spec.indicator_exprs = {"0.5*x1 + 1*x2 >= 0.2"};
  spec.declared_kind = SetKind::Production;
  const ToySystem toy = parse_toy(spec);
  const StateVector next = toy.dynamics.map(StateVector{1.0, 2.0}, ControlValue::scalar(1.0));
  CHECK(next[0] == doctest::Approx(1.3).epsilon(1e-15));
  CHECK(next[1] == doctest::Approx(0.9 * std::exp(-0.5)).epsilon(1e-14));
  CHECK(toy.acceptable_set.indicators[0].state_lipschitz.value() ==
        doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("grammar rejects monotonicity-breaking constructs") {
  ToySpec spec = production_spec();

  SUBCASE("negative dynamics coefficient") {
    spec.dynamics_exprs = {"-1*x1"};
    CHECK_THROWS_AS(parse_toy(spec), std::invalid_argument);
  }
  SUBCASE("exp with a positive rate") {
    spec.dynamics_exprs = {"1*x1*exp(0.1*u1)"};
    CHECK_THROWS_AS(parse_toy(spec), std::invalid_argument);
  }
  SUBCASE("negative state-touching indicator term") {
    spec.indicator_exprs = {"-1*x1 >= 0"};
    CHECK_THROWS_AS(parse_toy(spec), std::invalid_argument);
  }
  SUBCASE("mixed control signs within one indicator") {
    spec.indicator_exprs = {"1*u1 + -1*u1 >= 0"};
    CHECK_THROWS_AS(parse_toy(spec), std::invalid_argument);
  }
  SUBCASE("out-of-range state index") {
    spec.dynamics_exprs = {"1*x2"};
    CHECK_THROWS_AS(parse_toy(spec), std::invalid_argument);
  }
  SUBCASE("vector controls are rejected") {
    spec.indicator_exprs = {"1*u2 >= 0"};
    CHECK_THROWS_AS(parse_toy(spec), std::invalid_argument);
  }
  SUBCASE("trailing garbage") {
    spec.dynamics_exprs = {"1*x1 banana"};
    CHECK_THROWS_AS(parse_toy(spec), std::invalid_argument);
  }
  SUBCASE("declared kind must match the derived classification") {
    spec.declared_kind = SetKind::Preservation;  // but u*x term is increasing
    CHECK_THROWS_AS(parse_toy(spec), std::invalid_argument);
  }
  SUBCASE("dimension mismatch between dynamics and state") {
    spec.dynamics_exprs = {"1*x1", "1*x1"};
    spec.state_dim = 1;
    CHECK_THROWS_AS(parse_toy(spec), std::invalid_argument);
  }
}

TEST_CASE("control-free indicators adopt the declared kind") {
  ToySpec spec;
  spec.state_dim = 1;
  spec.control_lo = 0.0;
  spec.control_hi = 1.0;
  spec.dynamics_exprs = {"0.5*x1"};
  spec.indicator_exprs = {"x1 >= 0.1"};

  spec.declared_kind = SetKind::Production;
  CHECK(parse_toy(spec).acceptable_set.classification() == SetKind::Production);
  spec.declared_kind = SetKind::Preservation;
  CHECK(parse_toy(spec).acceptable_set.classification() == SetKind::Preservation);
}

TEST_CASE("parsed toys pass the monotonicity probe") {
  const ToySystem toy = parse_toy(production_spec());
  const DomainBox box(StateVector{0.0}, StateVector{4.0});
  CHECK(check_monotonicity(toy.dynamics, 500, 1234, box).clean());
}
