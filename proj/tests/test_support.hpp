#pragma once

#include <cmath>
#include <string>

#include "viakern/ageclass.hpp"
#include "viakern/io.hpp"
#include "viakern/order.hpp"

namespace viakern::testing {

inline std::string fixture(const std::string& name) {
  return std::string(FIXTURES_DIR) + "/" + name;
}

inline AgeClassParams seabass() {
  return load_species(fixture("seabass_scalars.txt"), fixture("seabass_ages.csv")).single_params();
}

inline TwoSexParams alfonsino() {
  return load_species(fixture("alfonsino_scalars.txt"), fixture("alfonsino_ages.csv"))
      .two_sex_params();
}

// Values computed from the fixture tables (frozen at double precision, cross
// checked against an independent high-precision evaluation).
inline constexpr double kSeabassMaxYieldTons = 15178.28597060971;
inline constexpr double kSeabassMaxSsbTons = 56059.535819249955;
inline constexpr double kSeabassPhiG = 0.85214388252078554;
inline constexpr double kAlfonsinoMaxYieldTons = 15936.363840839818;  // female_carried
inline constexpr double kAlfonsinoMaxSsbTons = 52913.56462719586;     // female_carried
inline constexpr double kAlfonsinoPhiG = 0.8187307758404372;

// Published reference values and their acceptance tolerances.
inline constexpr double kPaperSeabassYieldTons = 15166.0;
inline constexpr double kPaperSeabassSsbTons = 56521.0;
inline constexpr double kPaperSeabassPhiG = 0.852;
inline constexpr double kPaperAlfonsinoYieldTons = 16158.0;
inline constexpr double kPaperAlfonsinoSsbTons = 52373.0;
inline constexpr double kPaperAlfonsinoPhiG = 0.818;

inline bool within_rel(double value, double target, double rel) {
  return std::abs(value - target) <= rel * std::abs(target);
}

// 1-D production toy: G(x,u) = x e^{0.1-u}, u in [0, 0.3],
// D = { x >= 1, u x >= 0.05 }. The true kernel is {x >= 1} (stationary
// u = 0.1 works there), while both lower-estimate kernels are empty.
inline MonotoneDynamics production_toy_dynamics() {
  return MonotoneDynamics{
      [](const StateVector& x, const ControlValue& u) {
        return StateVector{x[0] * std::exp(0.1 - u[0])};
      },
      ControlBounds(ControlValue::scalar(0.0), ControlValue::scalar(0.3)), true, true};
}

inline IndicatorSet production_toy_set() {
  IndicatorSet d;
  Indicator level;
  level.eval = [](const StateVector& x, const ControlValue&) { return x[0]; };
  level.control_direction = ControlDirection::Increasing;
  level.threshold = 1.0;
  level.label = "x";
  level.state_lipschitz = 1.0;
  d.indicators.push_back(level);
  Indicator product;
  product.eval = [](const StateVector& x, const ControlValue& u) { return u[0] * x[0]; };
  product.control_direction = ControlDirection::Increasing;
  product.threshold = 0.05;
  product.label = "ux";
  product.state_lipschitz = 0.3;  // max u on [0, 0.3]
  d.indicators.push_back(product);
  return d;
}

// 1-D preservation toy: G(x,u) = (0.5 + 0.5x) e^{-u}, u in [0, 0.5],
// D = { x >= b, -u >= -0.4 }. G♭ = 0.5 + 0.5x contracts to x̄ = 1 with
// L = 0.5, so the kernel is {x >= b} when b <= 1 and empty otherwise.
inline MonotoneDynamics preservation_toy_dynamics() {
  return MonotoneDynamics{
      [](const StateVector& x, const ControlValue& u) {
        return StateVector{(0.5 + 0.5 * x[0]) * std::exp(-u[0])};
      },
      ControlBounds(ControlValue::scalar(0.0), ControlValue::scalar(0.5)), true, true};
}

inline IndicatorSet preservation_toy_set(double floor_b, double effort_cap = 0.4) {
  IndicatorSet d;
  Indicator level;
  level.eval = [](const StateVector& x, const ControlValue&) { return x[0]; };
  level.control_direction = ControlDirection::Decreasing;
  level.threshold = floor_b;
  level.label = "x";
  level.state_lipschitz = 1.0;
  d.indicators.push_back(level);
  Indicator effort;
  effort.eval = [](const StateVector&, const ControlValue& u) { return -u[0]; };
  effort.control_direction = ControlDirection::Decreasing;
  effort.threshold = -effort_cap;
  effort.label = "-u";
  effort.state_lipschitz = 0.0;
  d.indicators.push_back(effort);
  return d;
}

// Production toy whose sharp lower estimate is nonempty:
// G(x,u) = (0.5 + 0.5x) e^{-u}, u in [0, 0.5], D = { x >= 0.2, u x >= 0.02 }.
// G♯ contracts to x̄♯ = 0.5 e^{-0.5} / (1 - 0.5 e^{-0.5}) ≈ 0.4353 which sits
// strictly inside V₀♯ = { x >= 0.2 }.
inline IndicatorSet sharp_viable_toy_set() {
  IndicatorSet d;
  Indicator level;
  level.eval = [](const StateVector& x, const ControlValue&) { return x[0]; };
  level.control_direction = ControlDirection::Increasing;
  level.threshold = 0.2;
  level.label = "x";
  level.state_lipschitz = 1.0;
  d.indicators.push_back(level);
  Indicator product;
  product.eval = [](const StateVector& x, const ControlValue& u) { return u[0] * x[0]; };
  product.control_direction = ControlDirection::Increasing;
  product.threshold = 0.02;
  product.label = "ux";
  product.state_lipschitz = 0.5;
  d.indicators.push_back(product);
  return d;
}

inline double sharp_toy_fixed_point() {
  const double s = 0.5 * std::exp(-0.5);
  return s / (1.0 - s);
}

}  // namespace viakern::testing
