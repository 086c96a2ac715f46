#include "viakern/ageclass.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace viakern {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

double max_gamma_w(const AgeClassParams& p) {
  double m = 0.0;
  for (int a = 0; a < p.max_age; ++a) m = std::max(m, p.maturity[a] * p.weight_gr[a]);
  return m;
}

double max_survival(const AgeClassParams& p, double lambda) {
  double m = 0.0;
  for (int a = 0; a < p.max_age; ++a) {
    m = std::max(m, std::exp(-(p.natural_mortality[a] + lambda * p.fishing_mortality[a])));
  }
  return m;
}

}  // namespace

void AgeClassParams::validate() const {
  require(max_age >= 1, "AgeClassParams: A must be >= 1");
  const auto n = static_cast<std::size_t>(max_age);
  require(natural_mortality.size() == n, "AgeClassParams: M list length != A");
  require(fishing_mortality.size() == n, "AgeClassParams: F list length != A");
  require(weight_gr.size() == n, "AgeClassParams: weight list length != A");
  require(maturity.size() == n, "AgeClassParams: maturity list length != A");
  require(alpha >= 0.0, "AgeClassParams: alpha must be >= 0");
  require(beta >= 0.0, "AgeClassParams: beta must be >= 0");
  for (int a = 0; a < max_age; ++a) {
    require(natural_mortality[a] > 0.0, "AgeClassParams: M_a must be > 0");
    require(fishing_mortality[a] >= 0.0, "AgeClassParams: F_a must be >= 0");
    require(weight_gr[a] > 0.0, "AgeClassParams: w_a must be > 0");
    require(maturity[a] >= 0.0 && maturity[a] <= 1.0, "AgeClassParams: gamma_a must be in [0,1]");
  }
  require(lambda_min >= 0.0, "AgeClassParams: lambda_min must be >= 0");
  require(lambda_max >= lambda_min, "AgeClassParams: lambda_max must be >= lambda_min");
}

double beverton_holt(double alpha, double beta, double biomass_gr) {
  require(biomass_gr >= 0.0, "beverton_holt: biomass must be >= 0");
  if (biomass_gr == 0.0) {
    if (alpha > 0.0) return 0.0;
    if (beta > 0.0) return 1.0 / beta;  // constant case, continuous extension
    throw std::invalid_argument("beverton_holt: 0/0 with alpha = beta = 0");
  }
  return biomass_gr / (alpha + beta * biomass_gr);
}

double beverton_holt_derivative(double alpha, double beta, double biomass_gr) {
  const double denom = alpha + beta * biomass_gr;
  return alpha / (denom * denom);
}

double ssb(const AgeClassParams& p, const StateVector& n) {
  require(n.size() == static_cast<std::size_t>(p.max_age), "ssb: state length != A");
  double total = 0.0;
  for (int a = 0; a < p.max_age; ++a) total += p.maturity[a] * p.weight_gr[a] * n[a];
  return total;
}

StateVector step(const AgeClassParams& p, const StateVector& n, double lambda) {
  require(n.size() == static_cast<std::size_t>(p.max_age), "step: state length != A");
  require(lambda >= 0.0, "step: lambda must be >= 0");
  require(is_nonnegative(n), "step: abundances must be >= 0");

  const int A = p.max_age;
  std::vector<double> out(static_cast<std::size_t>(A), 0.0);
  const double biomass = ssb(p, n);
  out[0] = (biomass == 0.0 && p.alpha > 0.0) ? 0.0 : beverton_holt(p.alpha, p.beta, biomass);
  for (int a = 1; a < A; ++a) {
    out[a] = std::exp(-(p.natural_mortality[a - 1] + lambda * p.fishing_mortality[a - 1])) *
             n[a - 1];
  }
  if (p.plus_group && A >= 1) {
    out[A - 1] += std::exp(-(p.natural_mortality[A - 1] + lambda * p.fishing_mortality[A - 1])) *
                  n[A - 1];
  }
  return StateVector(std::move(out));
}

std::vector<double> catch_at_age(const AgeClassParams& p, const StateVector& n, double lambda) {
  require(n.size() == static_cast<std::size_t>(p.max_age), "catch_at_age: state length != A");
  require(lambda >= 0.0, "catch_at_age: lambda must be >= 0");
  std::vector<double> c(static_cast<std::size_t>(p.max_age), 0.0);
  for (int a = 0; a < p.max_age; ++a) {
    const double lf = lambda * p.fishing_mortality[a];
    if (lf == 0.0) continue;  // 0/0 resolved to the limit 0
    const double z = p.natural_mortality[a] + lf;
    c[a] = (lf / z) * (1.0 - std::exp(-z)) * n[a];
  }
  return c;
}

double yield(const AgeClassParams& p, const StateVector& n, double lambda) {
  const std::vector<double> c = catch_at_age(p, n, lambda);
  double total = 0.0;
  for (int a = 0; a < p.max_age; ++a) total += p.weight_gr[a] * c[a];
  return total;
}

std::vector<double> survival_fractions(const AgeClassParams& p, double lambda) {
  require(lambda >= 0.0, "survival_fractions: lambda must be >= 0");
  const int A = p.max_age;
  std::vector<double> s(static_cast<std::size_t>(A), 1.0);
  double cumulative = 0.0;
  for (int a = 1; a < A; ++a) {
    cumulative += p.natural_mortality[a - 1] + lambda * p.fishing_mortality[a - 1];
    s[a] = std::exp(-cumulative);
  }
  if (p.plus_group) {
    const double last = std::exp(-(p.natural_mortality[A - 1] + lambda * p.fishing_mortality[A - 1]));
    const double denom = 1.0 - last;
    if (denom <= 0.0) {
      throw std::invalid_argument("survival_fractions: plus-group denominator vanished (M_A + lambda F_A == 0)");
    }
    s[A - 1] /= denom;
  }
  return s;
}

double spawning_per_recruit(const AgeClassParams& p, double lambda) {
  const std::vector<double> s = survival_fractions(p, lambda);
  double total = 0.0;
  for (int a = 0; a < p.max_age; ++a) total += p.maturity[a] * p.weight_gr[a] * s[a];
  return total;
}

StateVector equilibrium(const AgeClassParams& p, double lambda) {
  const std::vector<double> s = survival_fractions(p, lambda);
  const double spr = spawning_per_recruit(p, lambda);
  double z = 0.0;
  if (p.beta > 0.0 && spr > p.alpha && spr > 0.0) {
    z = (spr - p.alpha) / (p.beta * spr);
  }
  std::vector<double> n(static_cast<std::size_t>(p.max_age));
  for (int a = 0; a < p.max_age; ++a) n[a] = z * s[a];
  return StateVector(std::move(n));
}

double phi_g(const AgeClassParams& p, double lambda_flat) {
  const double b_bar = ssb(p, equilibrium(p, lambda_flat));
  return beverton_holt_derivative(p.alpha, p.beta, b_bar) * max_gamma_w(p) +
         max_survival(p, lambda_flat);
}

double phi_g_on(const AgeClassParams& p, double lambda_flat, double b_lim_gr) {
  const double b_bar = ssb(p, equilibrium(p, lambda_flat));
  const double b_eval = std::min(std::max(b_lim_gr, 0.0), b_bar);
  return beverton_holt_derivative(p.alpha, p.beta, b_eval) * max_gamma_w(p) +
         max_survival(p, lambda_flat);
}

ThresholdReport max_sustainable_thresholds(const AgeClassParams& p) {
  p.validate();
  const StateVector n_bar = equilibrium(p, p.lambda_min);
  ThresholdReport r;
  r.max_yield_tons = grams_to_tons(yield(p, n_bar, p.lambda_max));
  r.max_ssb_tons = grams_to_tons(ssb(p, n_bar));
  r.phi_g = phi_g(p, p.lambda_min);
  r.contraction_valid = r.phi_g < 1.0;
  return r;
}

MonotoneDynamics dynamics(const AgeClassParams& p) {
  MonotoneDynamics g{
      [p](const StateVector& x, const ControlValue& u) { return step(p, x, u[0]); },
      ControlBounds(ControlValue::scalar(p.lambda_min), ControlValue::scalar(p.lambda_max)),
      true, true};
  return g;
}

namespace {

// L1 Lipschitz bound of N ↦ Y(N, λ) valid for every λ in [0, λ♯]: the
// per-age harvest fraction is increasing in λ.
double yield_state_lipschitz(const AgeClassParams& p, double lambda_hi) {
  double m = 0.0;
  for (int a = 0; a < p.max_age; ++a) {
    const double lf = lambda_hi * p.fishing_mortality[a];
    if (lf == 0.0) continue;
    const double z = p.natural_mortality[a] + lf;
    m = std::max(m, p.weight_gr[a] * (lf / z) * (1.0 - std::exp(-z)));
  }
  return m;
}

}  // namespace

IndicatorSet make_yield_set(const AgeClassParams& p, double y_min_gr, double b_lim_gr) {
  require(y_min_gr >= 0.0 && b_lim_gr >= 0.0, "make_yield_set: thresholds must be >= 0");
  IndicatorSet d;
  Indicator yield_ind;
  yield_ind.eval = [p](const StateVector& x, const ControlValue& u) { return yield(p, x, u[0]); };
  yield_ind.control_direction = ControlDirection::Increasing;
  yield_ind.threshold = y_min_gr;
  yield_ind.label = "yield_gr";
  yield_ind.state_lipschitz = yield_state_lipschitz(p, p.lambda_max);
  d.indicators.push_back(std::move(yield_ind));

  Indicator ssb_ind;
  ssb_ind.eval = [p](const StateVector& x, const ControlValue&) { return ssb(p, x); };
  // Control-independent, registered increasing so the set stays production.
  ssb_ind.control_direction = ControlDirection::Increasing;
  ssb_ind.threshold = b_lim_gr;
  ssb_ind.label = "ssb_gr";
  ssb_ind.state_lipschitz = max_gamma_w(p);
  d.indicators.push_back(std::move(ssb_ind));
  return d;
}

IndicatorSet make_protect_set(const AgeClassParams& p, double b_lim_gr, double f_lim) {
  require(b_lim_gr >= 0.0 && f_lim >= 0.0, "make_protect_set: thresholds must be >= 0");
  IndicatorSet d;
  Indicator ssb_ind;
  ssb_ind.eval = [p](const StateVector& x, const ControlValue&) { return ssb(p, x); };
  ssb_ind.control_direction = ControlDirection::Decreasing;
  ssb_ind.threshold = b_lim_gr;
  ssb_ind.label = "ssb_gr";
  ssb_ind.state_lipschitz = max_gamma_w(p);
  d.indicators.push_back(std::move(ssb_ind));

  const double f_max = *std::max_element(p.fishing_mortality.begin(), p.fishing_mortality.end());
  Indicator effort_ind;
  effort_ind.eval = [f_max](const StateVector&, const ControlValue& u) { return -(u[0] * f_max); };
  effort_ind.control_direction = ControlDirection::Decreasing;
  effort_ind.threshold = -f_lim;
  effort_ind.label = "neg_fishing_mortality";
  effort_ind.state_lipschitz = 0.0;
  d.indicators.push_back(std::move(effort_ind));
  return d;
}

// ---------------------------------------------------------------------------
// Two-sex composition
// ---------------------------------------------------------------------------

void TwoSexParams::validate() const {
  male.validate();
  female.validate();
  require(male.max_age == female.max_age, "TwoSexParams: sexes must share A");
  require(male.alpha == female.alpha && male.beta == female.beta,
          "TwoSexParams: sexes must share the recruitment parameters");
  require(male.lambda_min == female.lambda_min && male.lambda_max == female.lambda_max,
          "TwoSexParams: sexes must share the effort bounds");
  require(male.plus_group == female.plus_group, "TwoSexParams: sexes must share the plus group");
  require(male.maturity == female.maturity, "TwoSexParams: maturity ogives must be equal");
  require(recruit_sex_split >= 0.0 && recruit_sex_split <= 1.0,
          "TwoSexParams: recruit split must lie in [0,1]");
}

double two_sex_ssb(const TwoSexParams& tp, const TwoSexState& s) {
  double b = ssb(tp.female, s.female);
  if (tp.ssb_convention == SsbConvention::BothSexes) b += ssb(tp.male, s.male);
  return b;
}

namespace {

// Survival shift of one sex (everything in funcdyn except recruitment).
void shift_ages(const AgeClassParams& p, const StateVector& n, double lambda,
                std::vector<double>& out) {
  const int A = p.max_age;
  for (int a = 1; a < A; ++a) {
    out[a] = std::exp(-(p.natural_mortality[a - 1] + lambda * p.fishing_mortality[a - 1])) *
             n[a - 1];
  }
  if (p.plus_group) {
    out[A - 1] += std::exp(-(p.natural_mortality[A - 1] + lambda * p.fishing_mortality[A - 1])) *
                  n[A - 1];
  }
}

}  // namespace

TwoSexState two_sex_step(const TwoSexParams& tp, const TwoSexState& s, double lambda) {
  require(lambda >= 0.0, "two_sex_step: lambda must be >= 0");
  require(is_nonnegative(s.male) && is_nonnegative(s.female),
          "two_sex_step: abundances must be >= 0");
  const int A = tp.male.max_age;
  require(s.male.size() == static_cast<std::size_t>(A) &&
              s.female.size() == static_cast<std::size_t>(A),
          "two_sex_step: state length != A");

  const double biomass = two_sex_ssb(tp, s);
  const double recruits =
      (biomass == 0.0 && tp.male.alpha > 0.0) ? 0.0
                                              : beverton_holt(tp.male.alpha, tp.male.beta, biomass);

  std::vector<double> m(static_cast<std::size_t>(A), 0.0);
  std::vector<double> f(static_cast<std::size_t>(A), 0.0);
  m[0] = (1.0 - tp.recruit_sex_split) * recruits;
  f[0] = tp.recruit_sex_split * recruits;
  shift_ages(tp.male, s.male, lambda, m);
  shift_ages(tp.female, s.female, lambda, f);
  return {StateVector(std::move(m)), StateVector(std::move(f))};
}

double two_sex_yield(const TwoSexParams& tp, const TwoSexState& s, double lambda) {
  return yield(tp.male, s.male, lambda) + yield(tp.female, s.female, lambda);
}

TwoSexState two_sex_equilibrium(const TwoSexParams& tp, double lambda) {
  tp.validate();
  TwoSexState state{equilibrium(tp.male, lambda), equilibrium(tp.female, lambda)};
  const int max_iters = 100000;
  const double rel_tol = 1e-10;
  for (int it = 0; it < max_iters; ++it) {
    TwoSexState next = two_sex_step(tp, state, lambda);
    const double delta =
        l1_distance(next.male, state.male) + l1_distance(next.female, state.female);
    const double scale = l1_norm(next.male) + l1_norm(next.female);
    state = std::move(next);
    if (delta <= rel_tol * std::max(scale, 1e-300)) return state;
  }
  throw std::runtime_error("two_sex_equilibrium: fixed-point iteration did not converge");
}

double two_sex_phi_g(const TwoSexParams& tp, double lambda_flat) {
  const TwoSexState eq = two_sex_equilibrium(tp, lambda_flat);
  const double b_bar = two_sex_ssb(tp, eq);
  // The recruitment rows see the SSB of the counted sexes only; the survival
  // term ranges over both blocks.
  double gw = max_gamma_w(tp.female);
  if (tp.ssb_convention == SsbConvention::BothSexes) gw = std::max(gw, max_gamma_w(tp.male));
  const double surv = std::max(max_survival(tp.male, lambda_flat),
                               max_survival(tp.female, lambda_flat));
  return beverton_holt_derivative(tp.male.alpha, tp.male.beta, b_bar) * gw + surv;
}

namespace {

std::string convention_label(const TwoSexParams& tp) {
  for (const auto& c : enumerate_two_sex_conventions()) {
    if (c.ssb == tp.ssb_convention && c.split == tp.recruit_sex_split) return c.label;
  }
  std::ostringstream os;
  os << (tp.ssb_convention == SsbConvention::FemaleOnly ? "female_ssb" : "pooled_ssb")
     << "_split" << tp.recruit_sex_split;
  return os.str();
}

}  // namespace

ThresholdReport two_sex_thresholds(const TwoSexParams& tp) {
  tp.validate();
  const double lambda_flat = tp.male.lambda_min;
  const double lambda_sharp = tp.male.lambda_max;
  const TwoSexState eq = two_sex_equilibrium(tp, lambda_flat);
  ThresholdReport r;
  r.max_yield_tons = grams_to_tons(two_sex_yield(tp, eq, lambda_sharp));
  r.max_ssb_tons = grams_to_tons(two_sex_ssb(tp, eq));
  r.phi_g = two_sex_phi_g(tp, lambda_flat);
  r.contraction_valid = r.phi_g < 1.0;
  r.convention = convention_label(tp);
  return r;
}

StateVector concat(const TwoSexState& s) {
  std::vector<double> v;
  v.reserve(s.male.size() + s.female.size());
  v.insert(v.end(), s.male.begin(), s.male.end());
  v.insert(v.end(), s.female.begin(), s.female.end());
  return StateVector(std::move(v));
}

TwoSexState split_state(const TwoSexParams& tp, const StateVector& x) {
  const auto A = static_cast<std::size_t>(tp.male.max_age);
  if (x.size() != 2 * A) {
    throw std::invalid_argument("split_state: state length != 2A");
  }
  std::vector<double> m(x.begin(), x.begin() + A);
  std::vector<double> f(x.begin() + A, x.end());
  return {StateVector(std::move(m)), StateVector(std::move(f))};
}

MonotoneDynamics dynamics(const TwoSexParams& tp) {
  MonotoneDynamics g{
      [tp](const StateVector& x, const ControlValue& u) {
        return concat(two_sex_step(tp, split_state(tp, x), u[0]));
      },
      ControlBounds(ControlValue::scalar(tp.male.lambda_min),
                    ControlValue::scalar(tp.male.lambda_max)),
      true, true};
  return g;
}

IndicatorSet make_yield_set(const TwoSexParams& tp, double y_min_gr, double b_lim_gr) {
  require(y_min_gr >= 0.0 && b_lim_gr >= 0.0, "make_yield_set: thresholds must be >= 0");
  IndicatorSet d;
  Indicator yield_ind;
  yield_ind.eval = [tp](const StateVector& x, const ControlValue& u) {
    return two_sex_yield(tp, split_state(tp, x), u[0]);
  };
  yield_ind.control_direction = ControlDirection::Increasing;
  yield_ind.threshold = y_min_gr;
  yield_ind.label = "yield_gr";
  yield_ind.state_lipschitz =
      std::max(yield_state_lipschitz(tp.male, tp.male.lambda_max),
               yield_state_lipschitz(tp.female, tp.female.lambda_max));
  d.indicators.push_back(std::move(yield_ind));

  Indicator ssb_ind;
  ssb_ind.eval = [tp](const StateVector& x, const ControlValue&) {
    return two_sex_ssb(tp, split_state(tp, x));
  };
  ssb_ind.control_direction = ControlDirection::Increasing;
  ssb_ind.threshold = b_lim_gr;
  ssb_ind.label = "ssb_gr";
  ssb_ind.state_lipschitz = std::max(max_gamma_w(tp.male), max_gamma_w(tp.female));
  d.indicators.push_back(std::move(ssb_ind));
  return d;
}

IndicatorSet make_protect_set(const TwoSexParams& tp, double b_lim_gr, double f_lim) {
  require(b_lim_gr >= 0.0 && f_lim >= 0.0, "make_protect_set: thresholds must be >= 0");
  IndicatorSet d;
  Indicator ssb_ind;
  ssb_ind.eval = [tp](const StateVector& x, const ControlValue&) {
    return two_sex_ssb(tp, split_state(tp, x));
  };
  ssb_ind.control_direction = ControlDirection::Decreasing;
  ssb_ind.threshold = b_lim_gr;
  ssb_ind.label = "ssb_gr";
  ssb_ind.state_lipschitz = std::max(max_gamma_w(tp.male), max_gamma_w(tp.female));
  d.indicators.push_back(std::move(ssb_ind));

  double f_max = 0.0;
  for (double v : tp.male.fishing_mortality) f_max = std::max(f_max, v);
  for (double v : tp.female.fishing_mortality) f_max = std::max(f_max, v);
  Indicator effort_ind;
  effort_ind.eval = [f_max](const StateVector&, const ControlValue& u) { return -(u[0] * f_max); };
  effort_ind.control_direction = ControlDirection::Decreasing;
  effort_ind.threshold = -f_lim;
  effort_ind.label = "neg_fishing_mortality";
  effort_ind.state_lipschitz = 0.0;
  d.indicators.push_back(std::move(effort_ind));
  return d;
}

std::vector<TwoSexConvention> enumerate_two_sex_conventions() {
  return {
      {"pooled_ssb_split50", SsbConvention::BothSexes, 0.5},
      {"female_ssb_split50", SsbConvention::FemaleOnly, 0.5},
      {"female_carried", SsbConvention::FemaleOnly, 1.0},
      {"pooled_ssb_female_carried", SsbConvention::BothSexes, 1.0},
  };
}

TwoSexParams with_convention(const TwoSexParams& tp, const TwoSexConvention& c) {
  TwoSexParams out = tp;
  out.ssb_convention = c.ssb;
  out.recruit_sex_split = c.split;
  return out;
}

}  // namespace viakern
