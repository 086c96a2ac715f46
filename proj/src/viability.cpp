#include "viakern/viability.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace viakern {

namespace {

double canonical(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

void KernelQueryConfig::validate() const {
  if (horizon < 1) throw std::invalid_argument("KernelQueryConfig: horizon must be >= 1");
  if (contraction_constant && !(*contraction_constant >= 0.0 && *contraction_constant < 1.0)) {
    throw std::invalid_argument("KernelQueryConfig: contraction constant must lie in [0,1)");
  }
  if (contraction_sharp && !(*contraction_sharp >= 0.0 && *contraction_sharp < 1.0)) {
    throw std::invalid_argument("KernelQueryConfig: sharp contraction constant must lie in [0,1)");
  }
}

double default_decision_radius(const StateVector& steady) {
  double norm = l1_norm(steady);
  return norm > 0.0 ? 1e-6 * norm : 1e-6;
}

std::vector<StateVector> trajectory(const StateMap& f, const StateVector& x0, int t_max) {
  if (t_max < 0) throw std::invalid_argument("trajectory: t_max must be >= 0");
  std::vector<StateVector> out;
  out.reserve(static_cast<std::size_t>(t_max) + 1);
  out.push_back(x0);
  for (int t = 1; t <= t_max; ++t) {
    StateVector next = f(out.back());
    if (!is_finite(next)) {
      std::ostringstream os;
      os << "trajectory: non-finite component at step " << t;
      throw std::runtime_error(os.str());
    }
    out.push_back(std::move(next));
  }
  return out;
}

KernelVerdict kernel_membership_uncontrolled(const StateMap& f, const SlicePredicate& v0,
                                             const StateVector& x0,
                                             const KernelQueryConfig& cfg) {
  cfg.validate();
  KernelVerdict verdict;

  const bool has_certificate_setup =
      cfg.steady_state.has_value() && cfg.contraction_constant.has_value() &&
      *cfg.contraction_constant < 1.0;
  double epsilon = cfg.decision_radius;
  bool ball_ok = false;
  if (has_certificate_setup) {
    if (epsilon <= 0.0) epsilon = default_decision_radius(*cfg.steady_state);
    if (cfg.ball_certified) {
      ball_ok = *cfg.ball_certified;
    } else if (auto r = v0.certified_radius(*cfg.steady_state)) {
      ball_ok = (*r >= epsilon);
    }
  }

  StateVector x = x0;
  for (int t = 0; t <= cfg.horizon; ++t) {
    bool inside = v0.test(x);
    verdict.trajectory_summary.emplace_back(t, inside);
    if (!inside) {
      verdict.outcome = KernelVerdict::Outcome::NonViable;
      verdict.step = t;
      return verdict;
    }
    if (has_certificate_setup && ball_ok &&
        l1_distance(x, *cfg.steady_state) <= epsilon) {
      // Tail certificate: the ball around x̄ lies in V₀ and L < 1 keeps every
      // further iterate inside it.
      verdict.outcome = KernelVerdict::Outcome::Viable;
      verdict.step = t;
      return verdict;
    }
    if (t == cfg.horizon) break;
    x = f(x);
    if (!is_finite(x)) {
      std::ostringstream os;
      os << "kernel membership: non-finite component at step " << (t + 1);
      throw std::runtime_error(os.str());
    }
  }
  verdict.outcome = KernelVerdict::Outcome::Undetermined;
  verdict.step = cfg.horizon;
  return verdict;
}

namespace {

EstimateVerdict::Tristate to_tristate(const KernelVerdict& v) {
  switch (v.outcome) {
    case KernelVerdict::Outcome::Viable:
      return EstimateVerdict::Tristate::True;
    case KernelVerdict::Outcome::NonViable:
      return EstimateVerdict::Tristate::False;
    default:
      return EstimateVerdict::Tristate::Undetermined;
  }
}

KernelQueryConfig sharp_view(const KernelQueryConfig& cfg) {
  KernelQueryConfig out = cfg;
  out.steady_state = cfg.steady_state_sharp;
  out.contraction_constant = cfg.contraction_sharp;
  out.steady_state_sharp.reset();
  out.contraction_sharp.reset();
  out.decision_radius = 0.0;  // re-derive from the sharp steady state
  return out;
}

}  // namespace

EstimateVerdict estimate_membership(const MonotoneDynamics& g, const IndicatorSet& d,
                                    const StateVector& x0, const KernelQueryConfig& cfg) {
  cfg.validate();
  const SetKind kind = d.classification();
  if (kind == SetKind::Mixed) {
    throw std::invalid_argument(
        "Proposition 1 inapplicable: acceptable set is neither production nor preservation");
  }

  EstimateVerdict verdict;
  const StateMap g_flat = flat_dynamics(g);
  const SlicePredicate slice_flat = state_slice(d, g.bounds.lower);

  if (kind == SetKind::Preservation) {
    // V(G,D) = V(G♭,D♭) exactly.
    verdict.lower_flat = kernel_membership_uncontrolled(g_flat, slice_flat, x0, cfg);
    verdict.lower_member = verdict.lower_flat.viable();
    verdict.upper_member = to_tristate(verdict.lower_flat);
    switch (verdict.lower_flat.outcome) {
      case KernelVerdict::Outcome::Viable:
        verdict.conclusion = Conclusion::InKernel;
        break;
      case KernelVerdict::Outcome::NonViable:
        verdict.conclusion = Conclusion::NotInKernel;
        break;
      default:
        verdict.conclusion = Conclusion::Unknown;
        break;
    }
    return verdict;
  }

  // Production sandwich.
  const StateMap g_sharp = sharp_dynamics(g);
  const SlicePredicate slice_sharp = state_slice(d, g.bounds.upper);

  verdict.lower_flat = kernel_membership_uncontrolled(g_flat, slice_flat, x0, cfg);
  verdict.lower_sharp =
      kernel_membership_uncontrolled(g_sharp, slice_sharp, x0, sharp_view(cfg));
  verdict.upper = kernel_membership_uncontrolled(g_flat, slice_sharp, x0, cfg);

  verdict.lower_member = verdict.lower_flat.viable() || verdict.lower_sharp.viable();
  verdict.upper_member = to_tristate(verdict.upper);

  if (verdict.lower_member && verdict.upper_member == EstimateVerdict::Tristate::False) {
    // Impossible under the Proposition 1 hypotheses; a supplied certificate
    // (steady state or contraction constant) must be wrong.
    throw std::logic_error(
        "estimate_membership: lower estimate inside but upper estimate outside; "
        "check the supplied steady states and contraction constants");
  }
  if (verdict.lower_member) {
    verdict.conclusion = Conclusion::InKernel;
  } else if (verdict.upper_member == EstimateVerdict::Tristate::False) {
    verdict.conclusion = Conclusion::NotInKernel;
  } else {
    verdict.conclusion = Conclusion::Unknown;
  }
  return verdict;
}

ProductionEmptiness emptiness_test_production(const IndicatorSet& d, const StateVector& x_bar,
                                              const ControlValue& u_sharp,
                                              double contraction_l) {
  if (!(contraction_l < 1.0)) {
    throw std::invalid_argument(
        "emptiness_test_production: contraction hypothesis violated (L >= 1)");
  }
  for (const auto& ind : d.indicators) {
    if (ind.eval(x_bar, u_sharp) < ind.threshold) return ProductionEmptiness::KernelEmpty;
  }
  return ProductionEmptiness::Inconclusive;
}

PreservationEmptiness emptiness_test_preservation(const IndicatorSet& d,
                                                  const StateVector& x_bar,
                                                  const ControlValue& u_flat,
                                                  double contraction_l) {
  if (!(contraction_l < 1.0)) {
    throw std::invalid_argument(
        "emptiness_test_preservation: contraction hypothesis violated (L >= 1)");
  }
  PreservationEmptiness out;
  for (const auto& ind : d.indicators) {
    if (!(ind.eval(x_bar, u_flat) >= ind.threshold)) {
      out.empty = true;
      return out;
    }
  }
  out.empty = false;
  out.witness = x_bar;
  return out;
}

ContractionReport check_contraction(const StateMap& f, const StateVector& x_bar,
                                    const std::function<bool(const StateVector&)>& v0,
                                    int sample_count, std::uint64_t seed,
                                    const DomainBox& box) {
  const double norm_bar = l1_norm(x_bar);
  const double fixed_point_residual = l1_distance(f(x_bar), x_bar);
  if (fixed_point_residual > 1e-9 * std::max(norm_bar, 1e-300)) {
    std::ostringstream os;
    os << "check_contraction: x_bar is not a fixed point (relative residual "
       << fixed_point_residual / std::max(norm_bar, 1e-300) << ")";
    throw std::invalid_argument(os.str());
  }

  ContractionReport report;
  std::mt19937_64 rng(seed);
  const std::size_t n = box.lower.size();
  const long long max_attempts = 10000LL * std::max(sample_count, 1);
  long long attempts = 0;
  while (report.samples < sample_count) {
    if (++attempts > max_attempts) {
      throw std::runtime_error(
          "check_contraction: could not draw enough samples from box ∩ v0; "
          "choose a box with more mass inside the constraint set");
    }
    std::vector<double> xv(n);
    for (std::size_t i = 0; i < n; ++i) {
      xv[i] = box.lower[i] + canonical(rng) * (box.upper[i] - box.lower[i]);
    }
    StateVector x(xv);
    if (!v0(x)) continue;
    double denom = l1_distance(x, x_bar);
    if (denom == 0.0) continue;
    double ratio = l1_distance(f(x), x_bar) / denom;
    ++report.samples;
    if (ratio > report.estimated_l) report.estimated_l = ratio;
    if (ratio >= 1.0) ++report.violations;
  }
  return report;
}

double KernelGrid::x_coord(int ix) const {
  return plane.x_lo + (plane.x_hi - plane.x_lo) * ix / (resolution - 1);
}

double KernelGrid::y_coord(int iy) const {
  return plane.y_lo + (plane.y_hi - plane.y_lo) * iy / (resolution - 1);
}

KernelGrid kernel_slice_grid(const MonotoneDynamics& g, const IndicatorSet& d,
                             const SlicePlane& plane, int resolution,
                             const KernelQueryConfig& cfg) {
  if (resolution < 2) throw std::invalid_argument("kernel_slice_grid: resolution must be >= 2");
  if (plane.axis_x >= plane.base.size() ||
      (plane.axis_y && *plane.axis_y >= plane.base.size())) {
    throw std::invalid_argument("kernel_slice_grid: axis index out of range");
  }

  KernelGrid grid;
  grid.plane = plane;
  grid.resolution = resolution;
  const int ny = plane.axis_y ? resolution : 1;
  grid.cells.reserve(static_cast<std::size_t>(ny) * resolution);

  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < resolution; ++ix) {
      std::vector<double> coords = plane.base.values();
      coords[plane.axis_x] = grid.x_coord(ix);
      if (plane.axis_y) coords[*plane.axis_y] = grid.y_coord(iy);
      EstimateVerdict v = estimate_membership(g, d, StateVector(coords), cfg);
      grid.cells.push_back(v.conclusion);
    }
  }
  return grid;
}

}  // namespace viakern
