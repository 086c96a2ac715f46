#include "viakern/order.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace viakern {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw std::invalid_argument(os.str());
  }
}

// Deterministic canonical double in [0,1), independent of the standard
// library's distribution internals.
double canonical(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

bool leq(const StateVector& a, const StateVector& b) {
  require_same_size(a.size(), b.size(), "leq(StateVector)");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] <= b[i])) return false;
  }
  return true;
}

bool leq(const ControlValue& a, const ControlValue& b) {
  require_same_size(a.size(), b.size(), "leq(ControlValue)");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] <= b[i])) return false;
  }
  return true;
}

double l1_norm(const StateVector& a) {
  double s = 0.0;
  for (double v : a) s += std::abs(v);
  return s;
}

double l1_distance(const StateVector& a, const StateVector& b) {
  require_same_size(a.size(), b.size(), "l1_distance");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

bool is_finite(const StateVector& a) {
  for (double v : a) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool is_nonnegative(const StateVector& a) {
  for (double v : a) {
    if (!(v >= 0.0)) return false;
  }
  return true;
}

ControlBounds::ControlBounds(ControlValue lo, ControlValue hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
  if (!leq(lower, upper)) {
    throw std::invalid_argument("ControlBounds: lower bound exceeds upper bound");
  }
}

StateMap fixed_control_dynamics(const MonotoneDynamics& g, ControlBound which) {
  ControlValue u = (which == ControlBound::Lower) ? g.bounds.lower : g.bounds.upper;
  auto map = g.map;
  return [map, u](const StateVector& x) { return map(x, u); };
}

StateMap flat_dynamics(const MonotoneDynamics& g) {
  return fixed_control_dynamics(g, ControlBound::Lower);
}

StateMap sharp_dynamics(const MonotoneDynamics& g) {
  return fixed_control_dynamics(g, ControlBound::Upper);
}

SetKind IndicatorSet::classification() const {
  bool all_increasing = true;
  bool all_decreasing = true;
  for (const auto& ind : indicators) {
    if (ind.control_direction == ControlDirection::Increasing) {
      all_decreasing = false;
    } else {
      all_increasing = false;
    }
  }
  if (all_increasing) return SetKind::Production;
  if (all_decreasing) return SetKind::Preservation;
  return SetKind::Mixed;
}

bool contains(const IndicatorSet& d, const StateVector& x, const ControlValue& u) {
  for (const auto& ind : d.indicators) {
    if (!(ind.eval(x, u) >= ind.threshold)) return false;
  }
  return true;
}

SlicePredicate state_slice(const IndicatorSet& d, const ControlValue& u_fixed) {
  SlicePredicate slice;
  auto indicators = d.indicators;
  slice.test = [indicators, u_fixed](const StateVector& x) {
    for (const auto& ind : indicators) {
      if (!(ind.eval(x, u_fixed) >= ind.threshold)) return false;
    }
    return true;
  };
  slice.certified_radius = [indicators, u_fixed](const StateVector& x) -> std::optional<double> {
    double radius = std::numeric_limits<double>::infinity();
    for (const auto& ind : indicators) {
      if (!ind.state_lipschitz) return std::nullopt;
      double slack = ind.eval(x, u_fixed) - ind.threshold;
      double lip = *ind.state_lipschitz;
      if (lip == 0.0) {
        // State-independent indicator: satisfied everywhere or nowhere.
        if (slack < 0.0) return slack;
        continue;
      }
      radius = std::min(radius, slack / lip);
    }
    return radius;
  };
  return slice;
}

DomainBox::DomainBox(StateVector lo, StateVector hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (!leq(lower, upper)) {
    throw std::invalid_argument("DomainBox: lower corner exceeds upper corner");
  }
}

MonotonicityReport check_monotonicity(const MonotoneDynamics& g, int sample_count,
                                      std::uint64_t seed, const DomainBox& box) {
  MonotonicityReport report;
  std::mt19937_64 rng(seed);
  const std::size_t n = box.lower.size();
  const std::size_t m = g.bounds.lower.size();

  auto note = [&report](const std::string& s) {
    if (report.notes.size() < 8) report.notes.push_back(s);
  };

  for (int k = 0; k < sample_count; ++k) {
    ++report.samples;
    std::vector<double> xv(n), xpv(n);
    for (std::size_t i = 0; i < n; ++i) {
      double lo = box.lower[i], hi = box.upper[i];
      xv[i] = lo + canonical(rng) * (hi - lo);
      xpv[i] = xv[i] + canonical(rng) * (hi - xv[i]);  // x <= x' <= hi
    }
    std::vector<double> uv(m), upv(m);
    for (std::size_t j = 0; j < m; ++j) {
      double lo = g.bounds.lower[j], hi = g.bounds.upper[j];
      uv[j] = lo + canonical(rng) * (hi - lo);
      upv[j] = uv[j] + canonical(rng) * (hi - uv[j]);  // u <= u' <= u♯
    }
    StateVector x(xv), xp(xpv);
    ControlValue u(uv), up(upv);

    StateVector gxu, gxpu, gxup, glo, ghi;
    try {
      gxu = g.map(x, u);
      gxpu = g.map(xp, u);
      gxup = g.map(x, up);
      glo = g.map(x, g.bounds.lower);
      ghi = g.map(x, g.bounds.upper);
    } catch (const std::exception& e) {
      ++report.map_failures;
      note(std::string("map failure: ") + e.what());
      continue;
    }
    if (!is_finite(gxu) || !is_finite(gxpu) || !is_finite(gxup) || !is_finite(glo) ||
        !is_finite(ghi)) {
      ++report.map_failures;
      note("map produced a non-finite component");
      continue;
    }
    if (!leq(gxu, gxpu)) {
      ++report.state_violations;
      note("state monotonicity violated at sample " + std::to_string(k));
    }
    if (!leq(gxup, gxu)) {
      ++report.control_violations;
      note("control monotonicity violated at sample " + std::to_string(k));
    }
    if (!leq(ghi, gxu) || !leq(gxu, glo)) {
      ++report.sandwich_violations;
      note("dynamics sandwich violated at sample " + std::to_string(k));
    }
  }
  return report;
}

}  // namespace viakern
