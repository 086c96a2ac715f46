#pragma once

#include <string>
#include <vector>

#include "viakern/order.hpp"

namespace viakern {

/// Inline toy-system grammar for the CLI. Expressions are restricted to
/// compositions that guarantee the monotone-bioeconomic hypotheses, so every
/// parsed system is increasing in the state and decreasing in the control by
/// construction.
///
/// Dynamics component (one expression per state coordinate):
///   expr  := term ('+' term)*
///   term  := coeff ['*' 'x'IDX] ['*' 'exp(-' coeff '*u'IDX ')']
/// with coeff a nonnegative decimal literal and IDX a 1-based index.
/// Example: "1.1051709180756477*x1*exp(-1*u1)" is x·e^{0.1-u}.
///
/// Indicator (LHS '>=' threshold):
///   iexpr := iterm ('+' iterm)*
///   iterm := coeff | coeff '*x'IDX | coeff '*u'IDX | coeff '*u'IDX '*x'IDX
/// State-touching terms need nonnegative coefficients (indicators are
/// increasing in the state); pure-control terms may be negative. The control
/// direction is derived from the signs and must be consistent within each
/// indicator; u-free indicators adopt the direction given by the declared set
/// kind.
struct ToySpec {
  std::size_t state_dim = 0;
  double control_lo = 0.0;
  double control_hi = 0.0;
  std::vector<std::string> dynamics_exprs;   // one per state coordinate
  std::vector<std::string> indicator_exprs;  // "LHS >= THRESHOLD"
  SetKind declared_kind = SetKind::Production;
};

struct ToySystem {
  MonotoneDynamics dynamics;
  IndicatorSet acceptable_set;
};

/// Throws std::invalid_argument with a description of the offending token or
/// monotonicity restriction.
ToySystem parse_toy(const ToySpec& spec);

}  // namespace viakern
