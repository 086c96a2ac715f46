#pragma once

#include <string>
#include <vector>

#include "viakern/order.hpp"

namespace viakern {

/// Biomass unit conventions: all internal arithmetic is in grams (the
/// weight-at-age tables are tabulated in grams); reports convert to metric
/// tons at the boundary, and nowhere else.
constexpr double kGramsPerTon = 1e6;
constexpr double grams_to_tons(double grams) { return grams * 1e-6; }
constexpr double tons_to_grams(double tons) { return tons * 1e6; }

/// Per-species parameters of the age-structured harvested population model.
/// Ages run 1..A; vectors are indexed 0..A-1.
struct AgeClassParams {
  int max_age = 0;                         // A
  double alpha = 0.0;                      // Beverton-Holt α (dimensionless)
  double beta = 0.0;                       // Beverton-Holt β (per gram)
  std::vector<double> natural_mortality;   // M_a (per year)
  std::vector<double> fishing_mortality;   // F_a, the exploitation pattern
  std::vector<double> weight_gr;           // w_a (grams)
  std::vector<double> maturity;            // γ_a in [0,1]
  bool plus_group = true;                  // π
  double lambda_min = 0.0;                 // λ♭
  double lambda_max = 0.0;                 // λ♯

  void validate() const;  // throws std::invalid_argument with the failing field
};

/// Beverton-Holt recruitment φ(B) = B / (α + βB); α = 0 gives the constant
/// case (≡ 1/β), β = 0 the linear case (B/α). Throws on the 0/0 corner
/// α = β = 0, B = 0.
double beverton_holt(double alpha, double beta, double biomass_gr);

/// φ'(B) = α / (α + βB)².
double beverton_holt_derivative(double alpha, double beta, double biomass_gr);

/// Spawning stock biomass Σ_a γ_a w_a N_a, in grams.
double ssb(const AgeClassParams& p, const StateVector& n);

/// One year of the dynamics: recruitment φ(SSB(N)) into age 1, survival
/// e^{-(M_a + λF_a)} shifting ages up, the last class a plus group when π=1.
/// Throws on negative λ or abundances.
StateVector step(const AgeClassParams& p, const StateVector& n, double lambda);

/// Baranov catch at age: C_a = [λF_a/(λF_a+M_a)]·(1-e^{-(M_a+λF_a)})·N_a,
/// with the 0/0 limit at λF_a = 0 resolved to 0.
std::vector<double> catch_at_age(const AgeClassParams& p, const StateVector& n, double lambda);

/// Production in biomass, Σ_a w_a C_a(N, λ), grams.
double yield(const AgeClassParams& p, const StateVector& n, double lambda);

/// Proportions of equilibrium recruits surviving to each age:
/// s₁ = 1, s_a = exp(-Σ_{k<a}(M_k+λF_k)), the plus group divided by
/// (1 - π e^{-(M_A+λF_A)}).
std::vector<double> survival_fractions(const AgeClassParams& p, double lambda);

/// Spawning per recruit at equilibrium, spr(λ) = Σ_a γ_a w_a s_a(λ), grams.
double spawning_per_recruit(const AgeClassParams& p, double lambda);

/// Closed-form equilibrium N̄_a(λ) = Z(λ) s_a(λ) with
/// Z = max{0, (spr-α)/(β·spr)} for β > 0 and Z = 0 for β = 0.
StateVector equilibrium(const AgeClassParams& p, double lambda);

/// Lipschitz-type contraction bound for G(·,λ♭) on {SSB >= B_lim} when
/// B_lim > SSB(N̄(λ♭)):
///   φ_G(λ♭) = φ'(SSB(N̄(λ♭)))·max_a γ_a w_a + max_a e^{-(M_a+λ♭F_a)}.
double phi_g(const AgeClassParams& p, double lambda_flat);

/// Generalization of phi_g valid on {SSB >= B_lim} for any B_lim >= 0: the
/// φ' factor is evaluated at min(B_lim, SSB(N̄(λ♭))); concavity of φ makes
/// the same mean-value bound go through. Equals phi_g when
/// B_lim >= SSB(N̄(λ♭)).
double phi_g_on(const AgeClassParams& p, double lambda_flat, double b_lim_gr);

/// Maximal sustainable thresholds (reporting type, tons).
struct ThresholdReport {
  double max_yield_tons = 0.0;  // Y(N̄(λ♭), λ♯)
  double max_ssb_tons = 0.0;    // SSB(N̄(λ♭))
  double phi_g = 0.0;
  bool contraction_valid = false;  // phi_g < 1
  std::string convention;          // two-sex coupling label, empty for single sex
};

/// Y(N̄(λ♭),λ♯), SSB(N̄(λ♭)) and φ_G(λ♭). When φ_G >= 1 the report flags
/// contraction_valid = false: the emptiness consequences of these numbers
/// are then unproven.
ThresholdReport max_sustainable_thresholds(const AgeClassParams& p);

/// The model as monotone bioeconomic dynamics with control bounds [λ♭, λ♯].
MonotoneDynamics dynamics(const AgeClassParams& p);

/// D_yield(y_min, B_lim) = { Y(N,λ) >= y_min, SSB(N) >= B_lim }, a
/// production acceptable set (the SSB indicator ignores the control and is
/// registered increasing). Thresholds in grams.
IndicatorSet make_yield_set(const AgeClassParams& p, double y_min_gr, double b_lim_gr);

/// ICES-style preservation set { SSB(N) >= B_lim, -F(λ) >= -F_lim } with
/// F(λ) = λ·max_a F_a. Thresholds: B_lim in grams, F_lim dimensionless.
IndicatorSet make_protect_set(const AgeClassParams& p, double b_lim_gr, double f_lim);

// ---------------------------------------------------------------------------
// Two-sex composition (Alfonsino): one funcdyn block per sex, coupled through
// recruitment.
// ---------------------------------------------------------------------------

enum class SsbConvention { BothSexes, FemaleOnly };

struct TwoSexParams {
  AgeClassParams male;
  AgeClassParams female;
  /// Fraction of total recruits entering the female first age class.
  double recruit_sex_split = 0.5;
  SsbConvention ssb_convention = SsbConvention::BothSexes;

  void validate() const;  // same A, shared α/β/λ bounds, equal maturity ogives
};

struct TwoSexState {
  StateVector male;
  StateVector female;
};

/// Spawning biomass entering the recruitment relationship (and the SSB
/// indicator) under the configured convention, grams.
double two_sex_ssb(const TwoSexParams& tp, const TwoSexState& s);

/// One year: recruits φ(B) split across the sexes, per-sex survival shifts.
TwoSexState two_sex_step(const TwoSexParams& tp, const TwoSexState& s, double lambda);

double two_sex_yield(const TwoSexParams& tp, const TwoSexState& s, double lambda);

/// Coupled equilibrium at λ by fixed-point iteration from the single-sex
/// closed-form seed (tolerance 1e-10 relative, at most 1e5 steps; throws on
/// non-convergence).
TwoSexState two_sex_equilibrium(const TwoSexParams& tp, double lambda);

double two_sex_phi_g(const TwoSexParams& tp, double lambda_flat);

ThresholdReport two_sex_thresholds(const TwoSexParams& tp);

/// Concatenated 2A-dimensional view (male block then female block) so the
/// kernel machinery applies unchanged.
StateVector concat(const TwoSexState& s);
TwoSexState split_state(const TwoSexParams& tp, const StateVector& x);
MonotoneDynamics dynamics(const TwoSexParams& tp);
IndicatorSet make_yield_set(const TwoSexParams& tp, double y_min_gr, double b_lim_gr);
IndicatorSet make_protect_set(const TwoSexParams& tp, double b_lim_gr, double f_lim);

/// The enumerated recruitment/SSB conventions probed when reproducing the
/// published Alfonsino thresholds.
struct TwoSexConvention {
  std::string label;
  SsbConvention ssb;
  double split;
};
std::vector<TwoSexConvention> enumerate_two_sex_conventions();

/// Applies a convention: copy of tp with ssb_convention/recruit_sex_split set.
TwoSexParams with_convention(const TwoSexParams& tp, const TwoSexConvention& c);

}  // namespace viakern
