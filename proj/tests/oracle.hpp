#pragma once

// Test-only brute-force kernel oracle, independent of the estimation code
// paths: exhaustive search over a uniform control grid, collapsed to a greedy
// scan. For monotone dynamics and production/preservation sets the greedy
// choice (smallest feasible control, which maximizes the next state) is
// complete: if any grid control sequence keeps the trajectory acceptable for
// the horizon, the greedy one does. Induction: a state that dominates another
// componentwise has a superset of feasible controls (acceptable sets are
// upper sets) and its greedy successor dominates the other trajectory's
// successor (G increasing in state, decreasing in control).
//
// Verdicts are approximate with one-sided guarantees: a surviving trajectory
// certifies membership up to the horizon; greedy death certifies that no grid
// control sequence survives.

#include <vector>

#include "viakern/order.hpp"

namespace viakern::testing {

struct OracleConfig {
  int control_levels = 64;
  int horizon = 200;
};

inline bool oracle_member(const MonotoneDynamics& g, const IndicatorSet& d, const StateVector& x0,
                          OracleConfig cfg = {}) {
  const double lo = g.bounds.lower[0];
  const double hi = g.bounds.upper[0];
  std::vector<double> levels(static_cast<std::size_t>(cfg.control_levels));
  for (int i = 0; i < cfg.control_levels; ++i) {
    levels[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * i / (cfg.control_levels - 1);
  }

  StateVector x = x0;
  for (int t = 0; t < cfg.horizon; ++t) {
    bool stepped = false;
    for (double u : levels) {
      const ControlValue cv = ControlValue::scalar(u);
      if (contains(d, x, cv)) {
        x = g.map(x, cv);
        stepped = true;
        break;
      }
    }
    if (!stepped) return false;
  }
  return true;
}

/// Oracle nonemptiness: some probe state (a uniform grid over the box plus
/// the supplied extras) survives the horizon.
inline bool oracle_nonempty(const MonotoneDynamics& g, const IndicatorSet& d, double box_lo,
                            double box_hi, int grid_points,
                            const std::vector<StateVector>& extras, OracleConfig cfg = {}) {
  for (const auto& x : extras) {
    if (oracle_member(g, d, x, cfg)) return true;
  }
  for (int i = 0; i < grid_points; ++i) {
    const double v = box_lo + (box_hi - box_lo) * i / (grid_points - 1);
    if (oracle_member(g, d, StateVector{v}, cfg)) return true;
  }
  return false;
}

}  // namespace viakern::testing
