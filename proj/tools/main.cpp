#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "viakern/ageclass.hpp"
#include "viakern/io.hpp"
#include "viakern/order.hpp"
#include "viakern/toy.hpp"
#include "viakern/viability.hpp"

namespace vk = viakern;

namespace {

std::uint64_t env_seed() {
  if (const char* s = std::getenv("VIAKERN_SEED")) {
    return std::strtoull(s, nullptr, 10);
  }
  return 202508;
}

std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto pos = text.find(',', start);
    std::string tok = pos == std::string::npos ? text.substr(start)
                                               : text.substr(start, pos - start);
    if (!tok.empty()) out.push_back(std::stod(tok));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

// Uniform command-level view over single-sex and two-sex species.
struct ModelView {
  std::size_t dim = 0;
  double lambda_min = 0.0, lambda_max = 0.0;
  vk::MonotoneDynamics dyn{nullptr,
                           vk::ControlBounds(vk::ControlValue::scalar(0.0),
                                             vk::ControlValue::scalar(0.0)),
                           true, true};
  std::function<double(const vk::StateVector&)> ssb_gr;
  std::function<double(const vk::StateVector&, double)> yield_gr;
  std::function<vk::StateVector(double)> equilibrium_at;
  std::function<vk::IndicatorSet(double, double)> yield_set_gr;    // (ymin_gr, blim_gr)
  std::function<vk::IndicatorSet(double, double)> protect_set;     // (blim_gr, flim)
  std::function<double(double, double)> phi_on;                    // (lambda_fixed, blim_gr)
  std::string convention;                                          // two-sex only
};

vk::TwoSexParams apply_convention_flags(const vk::TwoSexParams& base, const std::string& ssb_flag,
                                        double split) {
  vk::TwoSexParams tp = base;
  tp.ssb_convention = ssb_flag == "pooled" ? vk::SsbConvention::BothSexes
                                           : vk::SsbConvention::FemaleOnly;
  tp.recruit_sex_split = split;
  tp.validate();
  return tp;
}

ModelView make_view(const vk::SpeciesConfig& cfg, const std::string& ssb_flag, double split) {
  ModelView v;
  if (cfg.sexes == 1) {
    const vk::AgeClassParams p = cfg.single_params();
    v.dim = static_cast<std::size_t>(p.max_age);
    v.lambda_min = p.lambda_min;
    v.lambda_max = p.lambda_max;
    v.dyn = vk::dynamics(p);
    v.ssb_gr = [p](const vk::StateVector& x) { return vk::ssb(p, x); };
    v.yield_gr = [p](const vk::StateVector& x, double lam) { return vk::yield(p, x, lam); };
    v.equilibrium_at = [p](double lam) { return vk::equilibrium(p, lam); };
    v.yield_set_gr = [p](double y, double b) { return vk::make_yield_set(p, y, b); };
    v.protect_set = [p](double b, double f) { return vk::make_protect_set(p, b, f); };
    v.phi_on = [p](double lam, double blim) { return vk::phi_g_on(p, lam, blim); };
    return v;
  }
  const vk::TwoSexParams tp = apply_convention_flags(cfg.two_sex_params(), ssb_flag, split);
  v.dim = 2 * static_cast<std::size_t>(tp.male.max_age);
  v.lambda_min = tp.male.lambda_min;
  v.lambda_max = tp.male.lambda_max;
  v.dyn = vk::dynamics(tp);
  v.ssb_gr = [tp](const vk::StateVector& x) { return vk::two_sex_ssb(tp, vk::split_state(tp, x)); };
  v.yield_gr = [tp](const vk::StateVector& x, double lam) {
    return vk::two_sex_yield(tp, vk::split_state(tp, x), lam);
  };
  v.equilibrium_at = [tp](double lam) { return vk::concat(vk::two_sex_equilibrium(tp, lam)); };
  v.yield_set_gr = [tp](double y, double b) { return vk::make_yield_set(tp, y, b); };
  v.protect_set = [tp](double b, double f) { return vk::make_protect_set(tp, b, f); };
  v.phi_on = [tp](double lam, double blim) {
    // Same mean-value bound as the single-sex phi_g_on, with the recruitment
    // slope taken at min(blim, equilibrium SSB) of the counted sexes.
    const vk::TwoSexState eq = vk::two_sex_equilibrium(tp, lam);
    const double b_bar = vk::two_sex_ssb(tp, eq);
    const double b_eval = std::min(std::max(blim, 0.0), b_bar);
    double gw = 0.0;
    for (int a = 0; a < tp.female.max_age; ++a) {
      gw = std::max(gw, tp.female.maturity[static_cast<std::size_t>(a)] *
                            tp.female.weight_gr[static_cast<std::size_t>(a)]);
    }
    if (tp.ssb_convention == vk::SsbConvention::BothSexes) {
      for (int a = 0; a < tp.male.max_age; ++a) {
        gw = std::max(gw, tp.male.maturity[static_cast<std::size_t>(a)] *
                              tp.male.weight_gr[static_cast<std::size_t>(a)]);
      }
    }
    double surv = 0.0;
    for (int a = 0; a < tp.male.max_age; ++a) {
      surv = std::max(surv, std::exp(-(tp.male.natural_mortality[static_cast<std::size_t>(a)] +
                                       lam * tp.male.fishing_mortality[static_cast<std::size_t>(a)])));
      surv = std::max(surv, std::exp(-(tp.female.natural_mortality[static_cast<std::size_t>(a)] +
                                       lam * tp.female.fishing_mortality[static_cast<std::size_t>(a)])));
    }
    return vk::beverton_holt_derivative(tp.male.alpha, tp.male.beta, b_eval) * gw + surv;
  };
  v.convention = (tp.ssb_convention == vk::SsbConvention::FemaleOnly ? "female" : "pooled");
  return v;
}

vk::StateVector parse_initial_state(const ModelView& view, const std::string& spec) {
  const std::string prefix = "equilibrium@";
  if (spec.rfind(prefix, 0) == 0) {
    const double lam = std::stod(spec.substr(prefix.size()));
    return view.equilibrium_at(lam);
  }
  auto values = parse_csv_doubles(spec);
  if (values.size() != view.dim) {
    throw std::invalid_argument("initial state needs " + std::to_string(view.dim) + " values");
  }
  return vk::StateVector(values);
}

// Seeded spot check of the declared monotonicity before any Proposition 1
// claim is printed.
void require_monotone(const vk::MonotoneDynamics& dyn, const vk::DomainBox& box,
                      const std::string& what) {
  const vk::MonotonicityReport report = vk::check_monotonicity(dyn, 256, env_seed(), box);
  if (!report.clean()) {
    std::string detail = report.notes.empty() ? std::string("violations found") : report.notes[0];
    throw std::invalid_argument(what + ": declared monotonicity failed the sampled check (" +
                                detail + ")");
  }
}

vk::DomainBox default_box_around(const vk::StateVector& anchor) {
  std::vector<double> hi(anchor.size());
  for (std::size_t i = 0; i < anchor.size(); ++i) {
    hi[i] = anchor[i] > 0.0 ? 3.0 * anchor[i] : 1.0;
  }
  return vk::DomainBox(vk::StateVector::zeros(anchor.size()), vk::StateVector(hi));
}

struct SpeciesOpts {
  std::string scalars_path;
  std::string ages_path;
  std::string ssb_convention = "female";  // identified Table-1 convention
  double recruit_split = 1.0;
};

void add_species_options(CLI::App* cmd, SpeciesOpts& opts, bool required) {
  auto* a = cmd->add_option("--species-scalars", opts.scalars_path, "Species scalar file");
  auto* b = cmd->add_option("--species-ages", opts.ages_path, "Species per-age CSV");
  if (required) {
    a->required();
    b->required();
  }
  cmd->add_option("--ssb-convention", opts.ssb_convention,
                  "Two-sex SSB convention: female|pooled (default female, the convention that "
                  "reproduces the published thresholds)")
      ->check(CLI::IsMember({"female", "pooled"}));
  cmd->add_option("--recruit-split", opts.recruit_split,
                  "Two-sex fraction of recruits entering the female class (default 1.0)");
}

struct ToyOpts {
  std::vector<std::string> dynamics;
  std::vector<std::string> indicators;
  std::string control;  // "LO,HI"
  std::string set_kind = "production";
  std::string steady;
  std::string steady_sharp;
  double contraction = -1.0;
  double contraction_sharp = -1.0;
};

void add_toy_options(CLI::App* cmd, ToyOpts& opts) {
  cmd->add_option("--toy-dyn", opts.dynamics,
                  "Toy dynamics, one expression per state coordinate, e.g. "
                  "'1.105170918*x1*exp(-1*u1)'");
  cmd->add_option("--toy-control", opts.control, "Toy control bounds LO,HI");
  cmd->add_option("--ind", opts.indicators, "Indicator 'LHS >= THRESHOLD', repeatable");
  cmd->add_option("--set", opts.set_kind, "Acceptable-set kind: production|preservation")
      ->check(CLI::IsMember({"production", "preservation"}));
  cmd->add_option("--steady", opts.steady, "Steady state of the flat dynamics, comma list");
  cmd->add_option("--contraction", opts.contraction,
                  "Contraction constant L < 1 of the flat dynamics on the slice");
  cmd->add_option("--steady-sharp", opts.steady_sharp,
                  "Steady state of the sharp dynamics, comma list");
  cmd->add_option("--contraction-sharp", opts.contraction_sharp,
                  "Contraction constant of the sharp dynamics");
}

vk::ToySystem build_toy(const ToyOpts& opts) {
  vk::ToySpec spec;
  spec.dynamics_exprs = opts.dynamics;
  spec.state_dim = opts.dynamics.size();
  spec.indicator_exprs = opts.indicators;
  auto bounds = parse_csv_doubles(opts.control);
  if (bounds.size() != 2) throw std::invalid_argument("--toy-control needs LO,HI");
  spec.control_lo = bounds[0];
  spec.control_hi = bounds[1];
  spec.declared_kind =
      opts.set_kind == "production" ? vk::SetKind::Production : vk::SetKind::Preservation;
  return vk::parse_toy(spec);
}

std::filesystem::path ensure_out_dir(const std::string& out) {
  std::filesystem::path dir(out);
  std::filesystem::create_directories(dir);
  return dir;
}

const char* conclusion_name(vk::Conclusion c) {
  switch (c) {
    case vk::Conclusion::InKernel:
      return "InKernel";
    case vk::Conclusion::NotInKernel:
      return "NotInKernel";
    default:
      return "Unknown";
  }
}

const char* outcome_name(const vk::KernelVerdict& v) {
  switch (v.outcome) {
    case vk::KernelVerdict::Outcome::Viable:
      return "Viable";
    case vk::KernelVerdict::Outcome::NonViable:
      return "NonViable";
    default:
      return "Undetermined";
  }
}

// ---------------------------------------------------------------------------
// thresholds
// ---------------------------------------------------------------------------

int run_thresholds(const SpeciesOpts& species, const std::string& out_dir) {
  const vk::SpeciesConfig cfg = vk::load_species(species.scalars_path, species.ages_path);
  const auto dir = ensure_out_dir(out_dir);

  vk::ThresholdReport report;
  if (cfg.sexes == 1) {
    report = vk::max_sustainable_thresholds(cfg.single_params());
  } else {
    const vk::TwoSexParams tp = apply_convention_flags(cfg.two_sex_params(),
                                                       species.ssb_convention,
                                                       species.recruit_split);
    report = vk::two_sex_thresholds(tp);

    // Side table: every enumerated convention, for transparency when the
    // coupling is under-determined.
    std::vector<std::vector<std::string>> rows;
    for (const auto& conv : vk::enumerate_two_sex_conventions()) {
      const vk::ThresholdReport r =
          vk::two_sex_thresholds(vk::with_convention(cfg.two_sex_params(), conv));
      rows.push_back({conv.label, vk::format_sig6(r.max_yield_tons),
                      vk::format_sig6(r.max_ssb_tons), vk::format_sig6(r.phi_g)});
    }
    vk::write_text_file((dir / "thresholds_conventions.tsv").string(),
                        vk::write_table_tsv({"convention", "max_yield_tons", "max_ssb_tons",
                                             "phi_g"},
                                            rows));
  }

  vk::write_text_file((dir / "thresholds.csv").string(),
                      vk::write_report(vk::threshold_report_rows(report)));
  std::cout << "max_yield_tons " << vk::format_sig6(report.max_yield_tons) << "\n"
            << "max_ssb_tons " << vk::format_sig6(report.max_ssb_tons) << "\n"
            << "phi_g " << vk::format_sig6(report.phi_g) << "\n";
  if (!report.convention.empty()) std::cout << "convention " << report.convention << "\n";
  if (!report.contraction_valid) {
    std::cout << "warning: phi_g >= 1, the emptiness consequences are unproven\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

int run_simulate(const SpeciesOpts& species, const std::string& out_dir, const std::string& n0,
                 const std::string& lambda_spec, int steps, bool svg) {
  if (steps < 0) throw std::invalid_argument("--steps must be >= 0");
  const vk::SpeciesConfig cfg = vk::load_species(species.scalars_path, species.ages_path);
  const ModelView view = make_view(cfg, species.ssb_convention, species.recruit_split);
  const auto dir = ensure_out_dir(out_dir);

  const auto schedule = parse_csv_doubles(lambda_spec);
  if (schedule.empty()) throw std::invalid_argument("--lambda needs at least one value");
  if (schedule.size() > 1 && static_cast<int>(schedule.size()) < steps) {
    throw std::invalid_argument("lambda schedule shorter than --steps");
  }
  auto lambda_at = [&schedule](int t) {
    if (schedule.size() == 1) return schedule[0];
    return t < static_cast<int>(schedule.size()) ? schedule[static_cast<std::size_t>(t)]
                                                 : schedule.back();
  };
  for (double lam : schedule) {
    if (lam < view.lambda_min || lam > view.lambda_max) {
      std::cerr << "warning: lambda " << vk::format_sig6(lam) << " outside ["
                << vk::format_sig6(view.lambda_min) << ", " << vk::format_sig6(view.lambda_max)
                << "]; simulation proceeds, kernel claims do not apply\n";
      break;
    }
  }

  vk::StateVector state = parse_initial_state(view, n0);
  std::vector<vk::TrajectoryRecord> records;
  for (int t = 0; t <= steps; ++t) {
    const double lam = lambda_at(t);
    vk::TrajectoryRecord rec;
    rec.step = t;
    rec.lambda = lam;
    rec.state = state;
    rec.ssb_tons = vk::grams_to_tons(view.ssb_gr(state));
    rec.yield_tons = vk::grams_to_tons(view.yield_gr(state, lam));
    records.push_back(rec);
    if (t < steps) state = view.dyn.map(state, vk::ControlValue::scalar(lam));
  }

  vk::write_text_file((dir / "trajectory.tsv").string(), vk::write_trajectory_tsv(records));
  if (svg) {
    std::vector<std::pair<double, double>> ssb_points, yield_points;
    for (const auto& r : records) {
      ssb_points.emplace_back(r.step, r.ssb_tons);
      yield_points.emplace_back(r.step, r.yield_tons);
    }
    vk::write_text_file((dir / "trajectory_ssb.svg").string(),
                        vk::render_series_svg("SSB (tons)", ssb_points, std::nullopt));
    vk::write_text_file((dir / "trajectory_yield.svg").string(),
                        vk::render_series_svg("yield (tons)", yield_points, std::nullopt));
  }
  std::cout << "steps " << steps << "\n"
            << "final_ssb_tons " << vk::format_sig6(records.back().ssb_tons) << "\n"
            << "final_yield_tons " << vk::format_sig6(records.back().yield_tons) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// check-series
// ---------------------------------------------------------------------------

int run_check_series(const SpeciesOpts& species, const std::string& out_dir,
                     const std::string& series_path, const std::string& kind_name, bool svg) {
  const vk::SpeciesConfig cfg = vk::load_species(species.scalars_path, species.ages_path);
  const auto dir = ensure_out_dir(out_dir);
  const auto kind = kind_name == "landings" ? vk::ObservedSeries::Kind::Landings
                                            : vk::ObservedSeries::Kind::Ssb;
  const vk::ObservedSeries series = vk::parse_series(vk::read_text_file(series_path), kind);

  vk::ThresholdReport report;
  if (cfg.sexes == 1) {
    report = vk::max_sustainable_thresholds(cfg.single_params());
  } else {
    report = vk::two_sex_thresholds(apply_convention_flags(
        cfg.two_sex_params(), species.ssb_convention, species.recruit_split));
  }
  const double threshold =
      kind == vk::ObservedSeries::Kind::Landings ? report.max_yield_tons : report.max_ssb_tons;

  int exceedances = 0;
  std::vector<std::vector<std::string>> rows;
  for (const auto& [year, value] : series.rows) {
    const bool exceeds = value > threshold;
    exceedances += exceeds ? 1 : 0;
    rows.push_back({std::to_string(year), vk::format_sig6(value), vk::format_sig6(threshold),
                    exceeds ? "1" : "0"});
  }
  std::string audit;
  audit += "year,value_tons,threshold_tons,exceeds\n";
  for (const auto& row : rows) {
    audit += row[0] + "," + row[1] + "," + row[2] + "," + row[3] + "\n";
  }
  vk::write_text_file((dir / "series_audit.csv").string(), audit);
  if (svg) {
    std::vector<std::pair<double, double>> points;
    for (const auto& [year, value] : series.rows) points.emplace_back(year, value);
    const std::string title = kind == vk::ObservedSeries::Kind::Landings
                                  ? "landings (tons) vs maximal sustainable catch"
                                  : "SSB (tons) vs maximal sustainable SSB";
    vk::write_text_file((dir / "series_audit.svg").string(),
                        vk::render_series_svg(title, points, threshold));
  }

  std::cout << "threshold_tons " << vk::format_sig6(threshold) << "\n"
            << "exceedances " << exceedances << "\n";
  if (exceedances > 0) {
    std::cout << "verdict not-sustainable: flagged levels cannot be maintained forever from any "
                 "abundance\n";
    return 1;
  }
  std::cout << "verdict within-thresholds: cannot conclude non-viability from levels below the "
               "bound\n";
  return 0;
}

// ---------------------------------------------------------------------------
// kernel-test / kernel-slice
// ---------------------------------------------------------------------------

struct KernelProblem {
  vk::MonotoneDynamics dyn{nullptr,
                           vk::ControlBounds(vk::ControlValue::scalar(0.0),
                                             vk::ControlValue::scalar(0.0)),
                           true, true};
  vk::IndicatorSet set;
  vk::KernelQueryConfig cfg;
  std::size_t dim = 0;
};

struct KernelOpts {
  SpeciesOpts species;
  ToyOpts toy;
  std::string dset = "yield";
  double ymin_tons = 0.0;
  double blim_tons = 0.0;
  double flim = -1.0;
  std::string x0;
  int horizon = 1000;
  std::string out_dir = ".";
  // slice-only
  std::string axes = "1";
  std::string box;
  int resolution = 0;
  bool svg = false;
};

KernelProblem build_problem(const KernelOpts& opts, bool species_mode) {
  KernelProblem problem;
  problem.cfg.horizon = opts.horizon;

  if (species_mode) {
    const vk::SpeciesConfig cfg =
        vk::load_species(opts.species.scalars_path, opts.species.ages_path);
    const ModelView view =
        make_view(cfg, opts.species.ssb_convention, opts.species.recruit_split);
    problem.dyn = view.dyn;
    problem.dim = view.dim;
    const double blim_gr = vk::tons_to_grams(opts.blim_tons);
    if (opts.dset == "yield") {
      problem.set = view.yield_set_gr(vk::tons_to_grams(opts.ymin_tons), blim_gr);
    } else {
      const double flim = opts.flim >= 0.0 ? opts.flim : 1e9;
      problem.set = view.protect_set(blim_gr, flim);
    }
    problem.cfg.steady_state = view.equilibrium_at(view.lambda_min);
    const double l_flat = view.phi_on(view.lambda_min, blim_gr);
    if (l_flat < 1.0) problem.cfg.contraction_constant = l_flat;
    problem.cfg.steady_state_sharp = view.equilibrium_at(view.lambda_max);
    const double l_sharp = view.phi_on(view.lambda_max, blim_gr);
    if (l_sharp < 1.0) problem.cfg.contraction_sharp = l_sharp;
    require_monotone(problem.dyn, default_box_around(*problem.cfg.steady_state), "species dynamics");
    return problem;
  }

  vk::ToySystem toy = build_toy(opts.toy);
  problem.dyn = std::move(toy.dynamics);
  problem.set = std::move(toy.acceptable_set);
  problem.dim = opts.toy.dynamics.size();
  if (!opts.toy.steady.empty()) {
    auto v = parse_csv_doubles(opts.toy.steady);
    if (v.size() != problem.dim) throw std::invalid_argument("--steady has the wrong dimension");
    problem.cfg.steady_state = vk::StateVector(v);
  }
  if (opts.toy.contraction >= 0.0) problem.cfg.contraction_constant = opts.toy.contraction;
  if (!opts.toy.steady_sharp.empty()) {
    auto v = parse_csv_doubles(opts.toy.steady_sharp);
    if (v.size() != problem.dim) {
      throw std::invalid_argument("--steady-sharp has the wrong dimension");
    }
    problem.cfg.steady_state_sharp = vk::StateVector(v);
  }
  if (opts.toy.contraction_sharp >= 0.0) problem.cfg.contraction_sharp = opts.toy.contraction_sharp;

  vk::StateVector anchor = problem.cfg.steady_state ? *problem.cfg.steady_state
                                                    : vk::StateVector(std::vector<double>(problem.dim, 1.0));
  require_monotone(problem.dyn, default_box_around(anchor), "toy dynamics");
  return problem;
}

int run_kernel_test(const KernelOpts& opts, bool species_mode) {
  KernelProblem problem = build_problem(opts, species_mode);
  const auto dir = ensure_out_dir(opts.out_dir);
  std::vector<std::pair<std::string, std::string>> rows;
  const vk::SetKind kind = problem.set.classification();
  rows.emplace_back("classification", kind == vk::SetKind::Production     ? "production"
                                      : kind == vk::SetKind::Preservation ? "preservation"
                                                                          : "mixed");
  int exit_code = 0;

  if (opts.x0.empty()) {
    // Emptiness mode, Corollary 1 at the steady state of the flat dynamics.
    if (!problem.cfg.steady_state) {
      throw std::invalid_argument("emptiness mode needs a steady state (--steady for toys)");
    }
    if (!problem.cfg.contraction_constant) {
      throw std::invalid_argument(
          "emptiness mode needs a verified contraction constant L < 1 (--contraction for toys)");
    }
    const double l = *problem.cfg.contraction_constant;
    rows.emplace_back("mode", "emptiness");
    if (kind == vk::SetKind::Production) {
      const auto verdict = vk::emptiness_test_production(
          problem.set, *problem.cfg.steady_state, problem.dyn.bounds.upper, l);
      const bool empty = verdict == vk::ProductionEmptiness::KernelEmpty;
      rows.emplace_back("verdict", empty ? "KernelEmpty" : "Inconclusive");
      exit_code = empty ? 1 : 0;
    } else if (kind == vk::SetKind::Preservation) {
      const auto verdict = vk::emptiness_test_preservation(
          problem.set, *problem.cfg.steady_state, problem.dyn.bounds.lower, l);
      rows.emplace_back("verdict", verdict.empty ? "KernelEmpty" : "KernelNonEmpty");
      if (!verdict.empty) {
        std::string witness;
        for (std::size_t i = 0; i < verdict.witness->size(); ++i) {
          if (i) witness += ',';
          witness += vk::format_sig6((*verdict.witness)[i]);
        }
        rows.emplace_back("witness", witness);
      }
      exit_code = verdict.empty ? 1 : 0;
    } else {
      throw std::invalid_argument("Proposition 1 inapplicable: mixed acceptable set");
    }
  } else {
    rows.emplace_back("mode", "membership");
    const vk::StateVector x0 = [&] {
      if (species_mode) {
        const vk::SpeciesConfig cfg =
            vk::load_species(opts.species.scalars_path, opts.species.ages_path);
        const ModelView view =
            make_view(cfg, opts.species.ssb_convention, opts.species.recruit_split);
        return parse_initial_state(view, opts.x0);
      }
      auto v = parse_csv_doubles(opts.x0);
      if (v.size() != problem.dim) throw std::invalid_argument("--x0 has the wrong dimension");
      return vk::StateVector(v);
    }();
    const vk::EstimateVerdict verdict =
        vk::estimate_membership(problem.dyn, problem.set, x0, problem.cfg);
    rows.emplace_back("lower_member", verdict.lower_member ? "true" : "false");
    rows.emplace_back("upper_member",
                      verdict.upper_member == vk::EstimateVerdict::Tristate::True    ? "true"
                      : verdict.upper_member == vk::EstimateVerdict::Tristate::False ? "false"
                                                                                     : "undetermined");
    rows.emplace_back("conclusion", conclusion_name(verdict.conclusion));
    rows.emplace_back("lower_flat", outcome_name(verdict.lower_flat));
    if (kind == vk::SetKind::Production) {
      rows.emplace_back("lower_sharp", outcome_name(verdict.lower_sharp));
      rows.emplace_back("upper", outcome_name(verdict.upper));
    }
    exit_code = verdict.conclusion == vk::Conclusion::NotInKernel ? 1 : 0;
  }

  vk::write_text_file((dir / "kernel_test.csv").string(), vk::write_report(rows));
  for (const auto& [k, v] : rows) std::cout << k << " " << v << "\n";
  return exit_code;
}

int run_kernel_slice(const KernelOpts& opts, bool species_mode) {
  if (opts.resolution < 2) throw std::invalid_argument("--resolution must be >= 2");
  KernelProblem problem = build_problem(opts, species_mode);
  const auto dir = ensure_out_dir(opts.out_dir);

  auto axes = parse_csv_doubles(opts.axes);
  if (axes.empty() || axes.size() > 2) throw std::invalid_argument("--axes needs 1 or 2 indices");
  auto box = parse_csv_doubles(opts.box);
  if (box.size() != 2 * axes.size()) {
    throw std::invalid_argument("--box needs LO,HI per axis");
  }

  vk::SlicePlane plane;
  plane.axis_x = static_cast<std::size_t>(axes[0]) - 1;
  plane.x_lo = box[0];
  plane.x_hi = box[1];
  if (axes.size() == 2) {
    plane.axis_y = static_cast<std::size_t>(axes[1]) - 1;
    plane.y_lo = box[2];
    plane.y_hi = box[3];
  }
  plane.base = opts.x0.empty()
                   ? (problem.cfg.steady_state ? *problem.cfg.steady_state
                                               : vk::StateVector::zeros(problem.dim))
                   : [&] {
                       auto v = parse_csv_doubles(opts.x0);
                       if (v.size() != problem.dim) {
                         throw std::invalid_argument("--x0 has the wrong dimension");
                       }
                       return vk::StateVector(v);
                     }();

  const vk::KernelGrid grid =
      vk::kernel_slice_grid(problem.dyn, problem.set, plane, opts.resolution, problem.cfg);
  vk::write_text_file((dir / "kernel_grid.tsv").string(), vk::write_grid_tsv(grid));
  if (opts.svg) {
    vk::write_text_file((dir / "kernel_grid.svg").string(), vk::render_grid_svg(grid));
  }

  int in_kernel = 0, not_in = 0, unknown = 0;
  for (auto c : grid.cells) {
    (c == vk::Conclusion::InKernel ? in_kernel : c == vk::Conclusion::NotInKernel ? not_in : unknown)++;
  }
  std::cout << "cells " << grid.cells.size() << "\n"
            << "in_kernel " << in_kernel << "\n"
            << "not_in_kernel " << not_in << "\n"
            << "unknown " << unknown << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "viakern: viability-kernel estimates and sustainable-harvest thresholds for monotone "
      "age-structured bioeconomic models"};
  app.require_subcommand(1);

  SpeciesOpts thresholds_species;
  std::string thresholds_out = ".";
  auto* cmd_thresholds =
      app.add_subcommand("thresholds", "Maximal sustainable thresholds from species files");
  add_species_options(cmd_thresholds, thresholds_species, true);
  cmd_thresholds->add_option("--out", thresholds_out, "Output directory");

  SpeciesOpts sim_species;
  std::string sim_out = ".";
  std::string sim_n0 = "equilibrium@0";
  std::string sim_lambda = "0";
  int sim_steps = 10;
  bool sim_svg = false;
  auto* cmd_simulate = app.add_subcommand("simulate", "Forward simulation of the dynamics");
  add_species_options(cmd_simulate, sim_species, true);
  cmd_simulate->add_option("--out", sim_out, "Output directory");
  cmd_simulate->add_option("--n0", sim_n0, "Initial state: 'equilibrium@LAMBDA' or a comma list");
  cmd_simulate->add_option("--lambda", sim_lambda, "Effort multiplier: one value or a schedule");
  cmd_simulate->add_option("--steps", sim_steps, "Number of steps");
  cmd_simulate->add_flag("--svg", sim_svg, "Also render SVG charts");

  SpeciesOpts series_species;
  std::string series_out = ".";
  std::string series_path;
  std::string series_kind = "landings";
  bool series_svg = false;
  auto* cmd_series = app.add_subcommand(
      "check-series", "Audit an observed series against the maximal sustainable thresholds");
  add_species_options(cmd_series, series_species, true);
  cmd_series->add_option("--out", series_out, "Output directory");
  cmd_series->add_option("--series", series_path, "Series CSV (year,value_tons)")->required();
  cmd_series->add_option("--kind", series_kind, "Series kind: landings|ssb")
      ->check(CLI::IsMember({"landings", "ssb"}));
  cmd_series->add_flag("--svg", series_svg, "Also render an SVG chart");

  KernelOpts ktest;
  auto* cmd_ktest = app.add_subcommand(
      "kernel-test", "Kernel membership estimate or Corollary 1 emptiness test");
  add_species_options(cmd_ktest, ktest.species, false);
  add_toy_options(cmd_ktest, ktest.toy);
  cmd_ktest->add_option("--dset", ktest.dset, "Species set: yield|protect")
      ->check(CLI::IsMember({"yield", "protect"}));
  cmd_ktest->add_option("--ymin", ktest.ymin_tons, "Minimal yield threshold (tons)");
  cmd_ktest->add_option("--blim", ktest.blim_tons, "SSB floor (tons)");
  cmd_ktest->add_option("--flim", ktest.flim, "Fishing-mortality cap (protect set)");
  cmd_ktest->add_option("--x0", ktest.x0,
                        "Initial state (membership mode); omit for emptiness mode");
  cmd_ktest->add_option("--horizon", ktest.horizon, "Query horizon");
  cmd_ktest->add_option("--out", ktest.out_dir, "Output directory");

  KernelOpts kslice;
  auto* cmd_kslice =
      app.add_subcommand("kernel-slice", "Classify a 1-D or 2-D slice of the state space");
  add_species_options(cmd_kslice, kslice.species, false);
  add_toy_options(cmd_kslice, kslice.toy);
  cmd_kslice->add_option("--dset", kslice.dset, "Species set: yield|protect")
      ->check(CLI::IsMember({"yield", "protect"}));
  cmd_kslice->add_option("--ymin", kslice.ymin_tons, "Minimal yield threshold (tons)");
  cmd_kslice->add_option("--blim", kslice.blim_tons, "SSB floor (tons)");
  cmd_kslice->add_option("--flim", kslice.flim, "Fishing-mortality cap (protect set)");
  cmd_kslice->add_option("--axes", kslice.axes, "Swept axes, 1-based: I or I,J");
  cmd_kslice->add_option("--box", kslice.box, "Axis ranges LO,HI[,LO,HI]")->required();
  cmd_kslice->add_option("--resolution", kslice.resolution, "Grid resolution per axis")
      ->required();
  cmd_kslice->add_option("--x0", kslice.x0, "Base state for the pinned coordinates");
  cmd_kslice->add_option("--horizon", kslice.horizon, "Query horizon");
  cmd_kslice->add_option("--out", kslice.out_dir, "Output directory");
  cmd_kslice->add_flag("--svg", kslice.svg, "Also render an SVG heat chart");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(cmd_thresholds)) {
      return run_thresholds(thresholds_species, thresholds_out);
    }
    if (app.got_subcommand(cmd_simulate)) {
      return run_simulate(sim_species, sim_out, sim_n0, sim_lambda, sim_steps, sim_svg);
    }
    if (app.got_subcommand(cmd_series)) {
      return run_check_series(series_species, series_out, series_path, series_kind, series_svg);
    }
    if (app.got_subcommand(cmd_ktest)) {
      const bool species_mode = !ktest.species.scalars_path.empty();
      if (species_mode == !ktest.toy.dynamics.empty()) {
        throw std::invalid_argument("give either species files or a toy system, not both");
      }
      return run_kernel_test(ktest, species_mode);
    }
    if (app.got_subcommand(cmd_kslice)) {
      const bool species_mode = !kslice.species.scalars_path.empty();
      if (species_mode == !kslice.toy.dynamics.empty()) {
        throw std::invalid_argument("give either species files or a toy system, not both");
      }
      return run_kernel_slice(kslice, species_mode);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
