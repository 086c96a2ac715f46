#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "viakern/ageclass.hpp"
#include "viakern/viability.hpp"

namespace viakern {

/// Parse failure with the 1-based line (or row) number baked into what().
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Scalar block of a species file: `key = value` lines, `#` comments.
/// Required keys: A, alpha, beta, M, pi, lambda_min, lambda_max, sexes.
/// Unknown or duplicate keys are rejected.
struct SpeciesScalars {
  int max_age = 0;
  double alpha = 0.0;
  double beta = 0.0;
  double natural_mortality = 0.0;  // scalar M, expanded to a per-age list
  bool plus_group = false;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  int sexes = 1;
};

SpeciesScalars parse_scalars(std::string_view text);

/// Per-age CSV: header `age,weight_gr,maturity,fishing_mortality`, with a
/// leading `sex` column (male/female) when sexes = 2. Ages must form the
/// contiguous sequence 1..A per sex. Decimal separator is '.'.
struct PerAgeRow {
  int sex = 0;  // 0 single/male, 1 female
  int age = 0;
  double weight_gr = 0.0;
  double maturity = 0.0;
  double fishing_mortality = 0.0;
};

std::vector<PerAgeRow> parse_per_age(std::string_view text, int sexes, int max_age);

/// Fully assembled species configuration.
struct SpeciesConfig {
  int sexes = 1;
  std::optional<AgeClassParams> single;
  std::optional<TwoSexParams> two_sex;

  const AgeClassParams& single_params() const;
  const TwoSexParams& two_sex_params() const;
};

SpeciesConfig build_species(const SpeciesScalars& scalars, const std::vector<PerAgeRow>& rows);
SpeciesConfig parse_species(std::string_view scalars_text, std::string_view per_age_text);
SpeciesConfig load_species(const std::string& scalars_path, const std::string& per_age_path);

/// Observed yearly series (landings or SSB), tons. Years strictly increasing,
/// values nonnegative. Header: `year,value_tons`.
struct ObservedSeries {
  enum class Kind { Landings, Ssb };
  Kind kind = Kind::Landings;
  std::vector<std::pair<int, double>> rows;  // (year, tons)
};

ObservedSeries parse_series(std::string_view text, ObservedSeries::Kind kind);

// ---------------------------------------------------------------------------
// Serialization. All writers are deterministic: identical inputs give
// byte-identical text, LF newlines, '.' decimals.
// ---------------------------------------------------------------------------

/// Inverses of the parsers, for round-tripping species and series files.
std::string write_scalars(const SpeciesScalars& s);
std::string write_per_age(const std::vector<PerAgeRow>& rows, int sexes);
std::string write_series(const ObservedSeries& series);

/// 6 significant digits (CLI display precision).
std::string format_sig6(double v);
/// Shortest round-trip precision (full-precision report columns).
std::string format_full(double v);

/// Comma-separated key,value rows.
std::string write_report(const std::vector<std::pair<std::string, std::string>>& rows);

/// Report rows for a ThresholdReport: integer-rounded ton columns first,
/// full-precision columns after.
std::vector<std::pair<std::string, std::string>> threshold_report_rows(const ThresholdReport& r);

/// Tab-separated table, one header line.
std::string write_table_tsv(const std::vector<std::string>& header,
                            const std::vector<std::vector<std::string>>& rows);

std::string write_grid_tsv(const KernelGrid& grid);

struct TrajectoryRecord {
  int step = 0;
  double lambda = 0.0;
  StateVector state;
  double ssb_tons = 0.0;
  double yield_tons = 0.0;
};

std::string write_trajectory_tsv(const std::vector<TrajectoryRecord>& records);

/// Standalone SVG line chart of a series with an optional horizontal
/// threshold rule. No external dependencies.
std::string render_series_svg(const std::string& title,
                              const std::vector<std::pair<double, double>>& points,
                              std::optional<double> threshold);

/// Standalone SVG heat chart of a kernel grid (green in, red out, amber
/// unknown).
std::string render_grid_svg(const KernelGrid& grid);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace viakern
