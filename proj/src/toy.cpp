#include "viakern/toy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string_view>

namespace viakern {

namespace {

[[noreturn]] void fail(const std::string& expr, const std::string& message) {
  throw std::invalid_argument("toy expression '" + expr + "': " + message);
}

struct Scanner {
  std::string_view s;
  std::size_t pos = 0;
  const std::string& origin;

  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= s.size();
  }
  bool peek(char c) {
    skip_ws();
    return pos < s.size() && s[pos] == c;
  }
  bool consume(char c) {
    if (peek(c)) {
      ++pos;
      return true;
    }
    return false;
  }
  bool consume_word(std::string_view w) {
    skip_ws();
    if (s.substr(pos, w.size()) == w) {
      pos += w.size();
      return true;
    }
    return false;
  }
  double number() {
    skip_ws();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), value);
    if (ec != std::errc{} || ptr == s.data() + pos) fail(origin, "expected a number");
    pos = static_cast<std::size_t>(ptr - s.data());
    return value;
  }
  int index() {
    skip_ws();
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), value);
    if (ec != std::errc{} || ptr == s.data() + pos) fail(origin, "expected an index");
    pos = static_cast<std::size_t>(ptr - s.data());
    return value;
  }
};

struct DynTerm {
  double coeff = 1.0;
  int x_index = -1;
  double exp_coeff = 0.0;
  int u_index = -1;
};

struct IndTerm {
  double coeff = 1.0;
  int x_index = -1;
  int u_index = -1;
};

// term := coeff ['*' 'x'IDX] ['*' 'exp(-' coeff '*u'IDX ')'], any factor
// order, numeric factors multiply together.
DynTerm parse_dyn_term(Scanner& sc, std::size_t state_dim) {
  DynTerm t;
  bool any = false;
  while (true) {
    sc.skip_ws();
    if (sc.consume_word("exp")) {
      if (t.u_index >= 0) fail(sc.origin, "at most one exp factor per term");
      if (!sc.consume('(')) fail(sc.origin, "expected '(' after exp");
      if (!sc.consume('-')) fail(sc.origin, "only exp(-...) is monotone-safe");
      t.exp_coeff = sc.number();
      if (t.exp_coeff < 0.0) fail(sc.origin, "exp rate must be >= 0");
      if (!sc.consume('*')) fail(sc.origin, "expected '*u' inside exp");
      if (!sc.consume('u')) fail(sc.origin, "expected a control factor inside exp");
      t.u_index = sc.index() - 1;
      if (t.u_index != 0) fail(sc.origin, "toy controls are scalar: use u1");
      if (!sc.consume(')')) fail(sc.origin, "expected ')'");
    } else if (sc.consume('x')) {
      if (t.x_index >= 0) fail(sc.origin, "at most one state factor per term");
      t.x_index = sc.index() - 1;
      if (t.x_index < 0 || static_cast<std::size_t>(t.x_index) >= state_dim) {
        fail(sc.origin, "state index out of range");
      }
    } else {
      double v = sc.number();
      if (v < 0.0) fail(sc.origin, "dynamics coefficients must be >= 0");
      t.coeff *= v;
    }
    any = true;
    if (!sc.consume('*')) break;
  }
  if (!any) fail(sc.origin, "empty term");
  return t;
}

IndTerm parse_ind_term(Scanner& sc, std::size_t state_dim) {
  IndTerm t;
  bool any = false;
  bool negated = sc.consume('-');
  while (true) {
    sc.skip_ws();
    if (sc.consume('x')) {
      if (t.x_index >= 0) fail(sc.origin, "at most one state factor per term");
      t.x_index = sc.index() - 1;
      if (t.x_index < 0 || static_cast<std::size_t>(t.x_index) >= state_dim) {
        fail(sc.origin, "state index out of range");
      }
    } else if (sc.consume('u')) {
      if (t.u_index >= 0) fail(sc.origin, "at most one control factor per term");
      t.u_index = sc.index() - 1;
      if (t.u_index != 0) fail(sc.origin, "toy controls are scalar: use u1");
    } else {
      t.coeff *= sc.number();
    }
    any = true;
    if (!sc.consume('*')) break;
  }
  if (!any) fail(sc.origin, "empty term");
  if (negated) t.coeff = -t.coeff;
  if (t.x_index >= 0 && t.coeff < 0.0) {
    fail(sc.origin, "state-touching terms need nonnegative coefficients (indicators are increasing in the state)");
  }
  return t;
}

}  // namespace

ToySystem parse_toy(const ToySpec& spec) {
  if (spec.state_dim == 0) throw std::invalid_argument("toy: state dimension must be >= 1");
  if (spec.dynamics_exprs.size() != spec.state_dim) {
    throw std::invalid_argument("toy: need one dynamics expression per state coordinate");
  }
  if (!(spec.control_lo <= spec.control_hi)) {
    throw std::invalid_argument("toy: control bounds out of order");
  }
  if (spec.declared_kind == SetKind::Mixed) {
    throw std::invalid_argument("toy: declared set kind must be production or preservation");
  }

  std::vector<std::vector<DynTerm>> components;
  for (const auto& expr : spec.dynamics_exprs) {
    Scanner sc{expr, 0, expr};
    std::vector<DynTerm> terms;
    terms.push_back(parse_dyn_term(sc, spec.state_dim));
    while (sc.consume('+')) terms.push_back(parse_dyn_term(sc, spec.state_dim));
    if (!sc.done()) fail(expr, "trailing input");
    components.push_back(std::move(terms));
  }

  const std::size_t dim = spec.state_dim;
  MonotoneDynamics dynamics{
      [components, dim](const StateVector& x, const ControlValue& u) {
        if (x.size() != dim) throw std::invalid_argument("toy dynamics: state dimension mismatch");
        std::vector<double> out(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
          double acc = 0.0;
          for (const auto& t : components[i]) {
            double v = t.coeff;
            if (t.x_index >= 0) v *= x[static_cast<std::size_t>(t.x_index)];
            if (t.u_index >= 0) v *= std::exp(-t.exp_coeff * u[static_cast<std::size_t>(t.u_index)]);
            acc += v;
          }
          out[i] = acc;
        }
        return StateVector(std::move(out));
      },
      ControlBounds(ControlValue::scalar(spec.control_lo), ControlValue::scalar(spec.control_hi)),
      true, true};

  IndicatorSet d;
  const double u_abs = std::max(std::abs(spec.control_lo), std::abs(spec.control_hi));
  for (const auto& line : spec.indicator_exprs) {
    auto ge = line.find(">=");
    if (ge == std::string::npos) fail(line, "expected 'LHS >= THRESHOLD'");
    const std::string lhs = line.substr(0, ge);
    const std::string rhs = line.substr(ge + 2);

    Scanner sc{lhs, 0, line};
    std::vector<IndTerm> terms;
    terms.push_back(parse_ind_term(sc, spec.state_dim));
    while (sc.consume('+')) terms.push_back(parse_ind_term(sc, spec.state_dim));
    if (!sc.done()) fail(line, "trailing input before '>='");

    Scanner rs{rhs, 0, line};
    bool neg = rs.consume('-');
    double threshold = rs.number();
    if (neg) threshold = -threshold;
    if (!rs.done()) fail(line, "trailing input after threshold");

    bool has_increasing_u = false, has_decreasing_u = false;
    for (const auto& t : terms) {
      if (t.u_index < 0) continue;
      (t.coeff >= 0.0 ? has_increasing_u : has_decreasing_u) = true;
    }
    if (has_increasing_u && has_decreasing_u) {
      fail(line, "inconsistent control direction within one indicator");
    }

    Indicator ind;
    ind.label = lhs;
    ind.threshold = threshold;
    if (has_increasing_u) {
      ind.control_direction = ControlDirection::Increasing;
    } else if (has_decreasing_u) {
      ind.control_direction = ControlDirection::Decreasing;
    } else {
      ind.control_direction = spec.declared_kind == SetKind::Production
                                  ? ControlDirection::Increasing
                                  : ControlDirection::Decreasing;
    }

    // Lipschitz bound in the state at any admissible control.
    double lip = 0.0;
    std::vector<double> per_coord(spec.state_dim, 0.0);
    for (const auto& t : terms) {
      if (t.x_index < 0) continue;
      per_coord[static_cast<std::size_t>(t.x_index)] +=
          t.u_index >= 0 ? t.coeff * u_abs : std::abs(t.coeff);
    }
    for (double v : per_coord) lip = std::max(lip, v);
    ind.state_lipschitz = lip;

    ind.eval = [terms](const StateVector& x, const ControlValue& u) {
      double acc = 0.0;
      for (const auto& t : terms) {
        double v = t.coeff;
        if (t.x_index >= 0) v *= x[static_cast<std::size_t>(t.x_index)];
        if (t.u_index >= 0) v *= u[static_cast<std::size_t>(t.u_index)];
        acc += v;
      }
      return acc;
    };
    d.indicators.push_back(std::move(ind));
  }

  if (d.classification() != spec.declared_kind) {
    throw std::invalid_argument(
        "toy: indicators do not classify as the declared set kind (check control-term signs)");
  }
  return ToySystem{std::move(dynamics), std::move(d)};
}

}  // namespace viakern
