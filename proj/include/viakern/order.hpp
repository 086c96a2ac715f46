#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace viakern {

/// State vector under the componentwise partial order. For population models
/// the components are abundances at age; for toy systems they are arbitrary
/// nonnegative coordinates.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::vector<double> values) : values_(std::move(values)) {}
  StateVector(std::initializer_list<double> values) : values_(values) {}

  static StateVector zeros(std::size_t n) { return StateVector(std::vector<double>(n, 0.0)); }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

 private:
  std::vector<double> values_;
};

/// Control vector (scalar fishing-effort multiplier in the fishery instance).
class ControlValue {
 public:
  ControlValue() = default;
  explicit ControlValue(std::vector<double> values) : values_(std::move(values)) {}
  ControlValue(std::initializer_list<double> values) : values_(values) {}
  static ControlValue scalar(double u) { return ControlValue({u}); }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

/// Componentwise a <= b. Throws std::invalid_argument on dimension mismatch.
bool leq(const StateVector& a, const StateVector& b);
bool leq(const ControlValue& a, const ControlValue& b);

double l1_norm(const StateVector& a);
double l1_distance(const StateVector& a, const StateVector& b);
bool is_finite(const StateVector& a);
bool is_nonnegative(const StateVector& a);

/// Bounds u♭ <= u <= u♯ of the control set. Construction validates the order.
struct ControlBounds {
  ControlValue lower;  // u♭
  ControlValue upper;  // u♯

  ControlBounds(ControlValue lo, ControlValue hi);
};

/// Discrete-time dynamics x(t+1) = G(x(t), u(t)) declared monotone: increasing
/// in the state and decreasing in the control. The declaration is a modelling
/// hypothesis; check_monotonicity() probes it by seeded sampling.
struct MonotoneDynamics {
  using Map = std::function<StateVector(const StateVector&, const ControlValue&)>;

  Map map;
  ControlBounds bounds;
  bool increasing_in_state = true;
  bool decreasing_in_control = true;
};

enum class ControlBound { Lower, Upper };

using StateMap = std::function<StateVector(const StateVector&)>;

/// Freezes the control at one bound.
///
/// Flat/sharp naming: G♭ := G(·, u♭) is the UPPER dynamics (no harvest
/// pressure dominates every controlled transition) and G♯ := G(·, u♯) is the
/// LOWER dynamics, so G♯(x) <= G(x,u) <= G♭(x) for every admissible u. The
/// musical symbols track the control bound, not the envelope side.
StateMap fixed_control_dynamics(const MonotoneDynamics& g, ControlBound which);

/// G♭ = G(·, u♭), the upper envelope.
StateMap flat_dynamics(const MonotoneDynamics& g);
/// G♯ = G(·, u♯), the lower envelope.
StateMap sharp_dynamics(const MonotoneDynamics& g);

enum class ControlDirection { Increasing, Decreasing };

/// One scalar constraint L(x,u) >= threshold. Indicators are increasing in the
/// state; the control direction is declared per indicator and drives the
/// production/preservation classification.
struct Indicator {
  using Eval = std::function<double(const StateVector&, const ControlValue&)>;

  Eval eval;
  ControlDirection control_direction = ControlDirection::Increasing;
  double threshold = 0.0;
  std::string label;
  /// L1 Lipschitz bound in the state at any admissible fixed control, when
  /// known: |L(x,u) - L(y,u)| <= state_lipschitz * ||x - y||_1. Enables
  /// certified membership verdicts; without it queries degrade to
  /// Undetermined rather than guessing.
  std::optional<double> state_lipschitz;
};

enum class SetKind { Production, Preservation, Mixed };

/// Acceptable set D = { (x,u) : L_i(x,u) >= l_i for all i }.
struct IndicatorSet {
  std::vector<Indicator> indicators;

  /// Production iff every indicator is increasing in the control,
  /// Preservation iff every one is decreasing, Mixed otherwise. An empty set
  /// classifies as Production (vacuously).
  SetKind classification() const;
};

/// Threshold comparisons are exact (>=), no tolerance.
bool contains(const IndicatorSet& d, const StateVector& x, const ControlValue& u);

/// The state slice of D at a fixed control: x ↦ [ (x, u_fixed) ∈ D ].
/// For a production set the slice at u♯ equals the projection V₀; for a
/// preservation set the slice at u♭ does.
struct SlicePredicate {
  std::function<bool(const StateVector&)> test;
  /// Largest radius r such that the closed L1 ball B(x, r) is certified
  /// inside the slice, computed from indicator slacks and Lipschitz bounds.
  /// May be negative (x itself outside); nullopt when some indicator carries
  /// no state_lipschitz bound.
  std::function<std::optional<double>(const StateVector&)> certified_radius;
};

SlicePredicate state_slice(const IndicatorSet& d, const ControlValue& u_fixed);

struct DomainBox {
  StateVector lower;
  StateVector upper;

  DomainBox(StateVector lo, StateVector hi);
};

/// Outcome of the seeded randomized probe of the declared monotonicity and of
/// the G♯ <= G <= G♭ sandwich. Violations are report entries, not errors.
struct MonotonicityReport {
  int samples = 0;
  int state_violations = 0;     // x' >= x but G(x',u) !>= G(x,u)
  int control_violations = 0;   // u' >= u but G(x,u') !<= G(x,u)
  int sandwich_violations = 0;  // G♯(x) <= G(x,u) <= G♭(x) failed
  int map_failures = 0;         // map threw or produced a non-finite state
  std::vector<std::string> notes;  // first few violation descriptions

  bool clean() const {
    return state_violations == 0 && control_violations == 0 &&
           sandwich_violations == 0 && map_failures == 0;
  }
};

MonotonicityReport check_monotonicity(const MonotoneDynamics& g, int sample_count,
                                      std::uint64_t seed, const DomainBox& box);

}  // namespace viakern
