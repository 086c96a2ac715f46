#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "viakern/order.hpp"

namespace viakern {

/// Configuration for kernel-membership queries. The norm is L1 throughout.
///
/// steady_state / contraction_constant describe the dynamics being iterated
/// (x̄(u♭) and its contraction factor L < 1 on the slice, for G♭ queries);
/// steady_state_sharp / contraction_sharp optionally do the same for G♯ so
/// the lower estimate of the production sandwich can also certify Viable.
struct KernelQueryConfig {
  int horizon = 1000;
  std::optional<StateVector> steady_state;
  std::optional<double> contraction_constant;
  std::optional<StateVector> steady_state_sharp;
  std::optional<double> contraction_sharp;
  /// Decision radius ε > 0. Values <= 0 select the default
  /// 1e-6 * ||x̄||₁ (1e-6 absolute when x̄ = 0).
  double decision_radius = 0.0;
  /// Caller-supplied override for the ball-inside-V₀ certification. When
  /// absent the slice's certified_radius (indicator slacks / Lipschitz
  /// bounds) decides; when no bounds exist the query degrades to
  /// Undetermined rather than emitting an unsound Viable.
  std::optional<bool> ball_certified;

  void validate() const;  // throws std::invalid_argument
};

double default_decision_radius(const StateVector& steady);

/// Three-valued outcome of one uncontrolled membership query.
/// Viable is only ever returned with a certificate: the trajectory entered
/// the ε-ball around x̄ whose closure is certified inside V₀, with L < 1
/// keeping the tail in the ball.
struct KernelVerdict {
  enum class Outcome { Viable, NonViable, Undetermined };

  Outcome outcome = Outcome::Undetermined;
  /// First violation step for NonViable, certificate-entry step for Viable,
  /// the horizon for Undetermined.
  int step = 0;
  std::vector<std::pair<int, bool>> trajectory_summary;  // (step, in constraint)

  bool viable() const { return outcome == Outcome::Viable; }
  bool non_viable() const { return outcome == Outcome::NonViable; }
};

enum class Conclusion { InKernel, NotInKernel, Unknown };

/// Proposition-1 sandwich verdict.
struct EstimateVerdict {
  enum class Tristate { True, False, Undetermined };

  bool lower_member = false;
  Tristate upper_member = Tristate::Undetermined;
  Conclusion conclusion = Conclusion::Unknown;

  // Sub-verdicts, for reporting: V(G♭,D♭), V(G♯,D♯) and V(G♭,D♯) for
  // production sets; only lower_flat is populated for preservation sets
  // (where it already equals the kernel).
  KernelVerdict lower_flat;
  KernelVerdict lower_sharp;
  KernelVerdict upper;
};

/// Iterates [x0, f(x0), ..., f^t_max(x0)]. Throws std::runtime_error naming
/// the step at the first non-finite component.
std::vector<StateVector> trajectory(const StateMap& f, const StateVector& x0, int t_max);

/// Membership of x0 in V(f, V₀) for uncontrolled dynamics f, decided by
/// iteration: NonViable at the first exit from v0, Viable via the ε-ball
/// contraction certificate, Undetermined at the horizon otherwise.
KernelVerdict kernel_membership_uncontrolled(const StateMap& f, const SlicePredicate& v0,
                                             const StateVector& x0,
                                             const KernelQueryConfig& cfg);

/// Sandwich estimate of x0 ∈ V(G, D).
/// Production:   V(G♭,D♭) ∪ V(G♯,D♯)  ⊆  V(G,D)  ⊆  V(G♭,D♯).
/// Preservation: V(G,D) = V(G♭,D♭) exactly.
/// Throws std::invalid_argument for Mixed classification.
EstimateVerdict estimate_membership(const MonotoneDynamics& g, const IndicatorSet& d,
                                    const StateVector& x0, const KernelQueryConfig& cfg);

enum class ProductionEmptiness { KernelEmpty, Inconclusive };

/// Necessary condition for a nonempty kernel of a production set: some
/// indicator below its threshold at (x̄(u♭), u♯) proves emptiness; otherwise
/// inconclusive (the test is one-directional). Requires a verified
/// contraction constant L < 1 on V₀ (see check_contraction).
ProductionEmptiness emptiness_test_production(const IndicatorSet& d, const StateVector& x_bar,
                                              const ControlValue& u_sharp, double contraction_l);

struct PreservationEmptiness {
  bool empty = false;
  /// x̄(u♭), viable under the stationary control u♭, when nonempty.
  std::optional<StateVector> witness;
};

/// Equivalence for preservation sets: the kernel is nonempty iff every
/// indicator holds at (x̄(u♭), u♭).
PreservationEmptiness emptiness_test_preservation(const IndicatorSet& d, const StateVector& x_bar,
                                                  const ControlValue& u_flat,
                                                  double contraction_l);

/// Seeded sampling of contraction ratios ||f(x) - x̄||₁ / ||x - x̄||₁ over
/// box ∩ v0. A falsification tool, not a proof: estimated_l is the sample
/// maximum, violations counts ratios >= 1.
struct ContractionReport {
  double estimated_l = 0.0;
  int violations = 0;
  int samples = 0;
};

ContractionReport check_contraction(const StateMap& f, const StateVector& x_bar,
                                    const std::function<bool(const StateVector&)>& v0,
                                    int sample_count, std::uint64_t seed, const DomainBox& box);

/// Axis-aligned slice through the state space: one or two free coordinates
/// swept over [lo, hi], the rest pinned at base.
struct SlicePlane {
  std::size_t axis_x = 0;
  std::optional<std::size_t> axis_y;
  StateVector base;
  double x_lo = 0.0, x_hi = 0.0;
  double y_lo = 0.0, y_hi = 0.0;
};

struct KernelGrid {
  SlicePlane plane;
  int resolution = 0;
  /// Row-major, index = iy * resolution + ix (single row for 1-D slices).
  std::vector<Conclusion> cells;

  int rows() const { return plane.axis_y ? resolution : 1; }
  double x_coord(int ix) const;
  double y_coord(int iy) const;
};

/// Classifies every grid point via estimate_membership. Cells are
/// independent; evaluation order never affects the result.
KernelGrid kernel_slice_grid(const MonotoneDynamics& g, const IndicatorSet& d,
                             const SlicePlane& plane, int resolution,
                             const KernelQueryConfig& cfg);

}  // namespace viakern
