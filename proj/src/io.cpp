#include "viakern/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace viakern {

namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view s, int line, const std::string& what) {
  s = trim(s);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError(line, "unparsable number for " + what + ": '" + std::string(s) + "'");
  }
  return value;
}

int parse_int(std::string_view s, int line, const std::string& what) {
  s = trim(s);
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError(line, "unparsable integer for " + what + ": '" + std::string(s) + "'");
  }
  return value;
}

// Splits into lines, keeping 1-based numbering; tolerates missing final LF.
std::vector<std::pair<int, std::string_view>> numbered_lines(std::string_view text) {
  std::vector<std::pair<int, std::string_view>> out;
  int number = 1;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) {
      if (start < text.size()) out.emplace_back(number, text.substr(start));
      break;
    }
    out.emplace_back(number, text.substr(start, pos - start));
    start = pos + 1;
    ++number;
  }
  return out;
}

}  // namespace

SpeciesScalars parse_scalars(std::string_view text) {
  static const std::set<std::string> known = {"A",  "alpha",      "beta",       "M",
                                              "pi", "lambda_min", "lambda_max", "sexes"};
  std::map<std::string, std::pair<int, std::string>> values;  // key -> (line, raw)
  for (auto [number, raw] : numbered_lines(text)) {
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(number, "expected 'key = value'");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (known.find(key) == known.end()) {
      throw ParseError(number, "unknown key '" + key + "'");
    }
    if (!values.emplace(key, std::make_pair(number, value)).second) {
      throw ParseError(number, "duplicate key '" + key + "'");
    }
  }
  for (const auto& key : known) {
    if (values.find(key) == values.end()) {
      throw ParseError(0, "missing key '" + key + "'");
    }
  }

  SpeciesScalars s;
  auto at = [&values](const char* k) -> std::pair<int, std::string>& { return values.at(k); };
  s.max_age = parse_int(at("A").second, at("A").first, "A");
  if (s.max_age < 1) throw ParseError(at("A").first, "A must be >= 1");
  s.alpha = parse_double(at("alpha").second, at("alpha").first, "alpha");
  s.beta = parse_double(at("beta").second, at("beta").first, "beta");
  s.natural_mortality = parse_double(at("M").second, at("M").first, "M");
  const int pi_value = parse_int(at("pi").second, at("pi").first, "pi");
  if (pi_value != 0 && pi_value != 1) throw ParseError(at("pi").first, "pi must be 0 or 1");
  s.plus_group = pi_value == 1;
  s.lambda_min = parse_double(at("lambda_min").second, at("lambda_min").first, "lambda_min");
  s.lambda_max = parse_double(at("lambda_max").second, at("lambda_max").first, "lambda_max");
  if (s.lambda_min > s.lambda_max) {
    throw ParseError(at("lambda_min").first, "lambda_min exceeds lambda_max");
  }
  s.sexes = parse_int(at("sexes").second, at("sexes").first, "sexes");
  if (s.sexes != 1 && s.sexes != 2) throw ParseError(at("sexes").first, "sexes must be 1 or 2");
  return s;
}

std::vector<PerAgeRow> parse_per_age(std::string_view text, int sexes, int max_age) {
  auto lines = numbered_lines(text);
  if (lines.empty()) throw ParseError(0, "empty per-age table");

  const std::string expected_header =
      sexes == 2 ? "sex,age,weight_gr,maturity,fishing_mortality"
                 : "age,weight_gr,maturity,fishing_mortality";
  if (std::string(trim(lines.front().second)) != expected_header) {
    throw ParseError(lines.front().first, "expected header '" + expected_header + "'");
  }

  std::vector<PerAgeRow> rows;
  std::vector<int> next_age(static_cast<std::size_t>(sexes), 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto [number, raw] = lines[i];
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    auto fields = split(line, ',');
    const std::size_t expected = sexes == 2 ? 5 : 4;
    if (fields.size() != expected) {
      throw ParseError(number, "expected " + std::to_string(expected) + " fields");
    }
    PerAgeRow row;
    std::size_t f = 0;
    if (sexes == 2) {
      std::string sex(trim(fields[f++]));
      if (sex == "male") {
        row.sex = 0;
      } else if (sex == "female") {
        row.sex = 1;
      } else {
        throw ParseError(number, "sex must be 'male' or 'female', got '" + sex + "'");
      }
    }
    row.age = parse_int(fields[f++], number, "age");
    row.weight_gr = parse_double(fields[f++], number, "weight_gr");
    row.maturity = parse_double(fields[f++], number, "maturity");
    row.fishing_mortality = parse_double(fields[f++], number, "fishing_mortality");

    int& expected_age = next_age[static_cast<std::size_t>(row.sex)];
    if (row.age != expected_age) {
      if (row.age < expected_age) {
        throw ParseError(number, "duplicate or out-of-order age " + std::to_string(row.age));
      }
      throw ParseError(number, "gap in ages: expected " + std::to_string(expected_age) + ", got " +
                                   std::to_string(row.age));
    }
    if (row.age > max_age) {
      throw ParseError(number, "age " + std::to_string(row.age) + " exceeds A = " +
                                   std::to_string(max_age));
    }
    if (!(row.weight_gr > 0.0)) throw ParseError(number, "weight_gr must be > 0");
    if (!(row.maturity >= 0.0 && row.maturity <= 1.0)) {
      throw ParseError(number, "maturity must lie in [0,1]");
    }
    if (!(row.fishing_mortality >= 0.0)) {
      throw ParseError(number, "fishing_mortality must be >= 0");
    }
    ++expected_age;
    rows.push_back(row);
  }
  for (int sex = 0; sex < sexes; ++sex) {
    if (next_age[static_cast<std::size_t>(sex)] != max_age + 1) {
      throw ParseError(static_cast<int>(lines.size()),
                       "row count mismatch: expected ages 1.." + std::to_string(max_age) +
                           (sexes == 2 ? std::string(" for ") + (sex == 0 ? "male" : "female")
                                       : std::string()));
    }
  }
  return rows;
}

const AgeClassParams& SpeciesConfig::single_params() const {
  if (!single) throw std::logic_error("SpeciesConfig: not a single-sex species");
  return *single;
}

const TwoSexParams& SpeciesConfig::two_sex_params() const {
  if (!two_sex) throw std::logic_error("SpeciesConfig: not a two-sex species");
  return *two_sex;
}

SpeciesConfig build_species(const SpeciesScalars& scalars, const std::vector<PerAgeRow>& rows) {
  auto make_params = [&scalars](const std::vector<PerAgeRow>& sex_rows) {
    AgeClassParams p;
    p.max_age = scalars.max_age;
    p.alpha = scalars.alpha;
    p.beta = scalars.beta;
    p.plus_group = scalars.plus_group;
    p.lambda_min = scalars.lambda_min;
    p.lambda_max = scalars.lambda_max;
    const auto n = static_cast<std::size_t>(scalars.max_age);
    p.natural_mortality.assign(n, scalars.natural_mortality);
    p.weight_gr.resize(n);
    p.maturity.resize(n);
    p.fishing_mortality.resize(n);
    for (const auto& row : sex_rows) {
      const auto a = static_cast<std::size_t>(row.age - 1);
      p.weight_gr[a] = row.weight_gr;
      p.maturity[a] = row.maturity;
      p.fishing_mortality[a] = row.fishing_mortality;
    }
    p.validate();
    return p;
  };

  SpeciesConfig cfg;
  cfg.sexes = scalars.sexes;
  if (scalars.sexes == 1) {
    cfg.single = make_params(rows);
    return cfg;
  }
  std::vector<PerAgeRow> male_rows, female_rows;
  for (const auto& row : rows) (row.sex == 0 ? male_rows : female_rows).push_back(row);
  TwoSexParams tp;
  tp.male = make_params(male_rows);
  tp.female = make_params(female_rows);
  tp.validate();
  cfg.two_sex = tp;
  return cfg;
}

SpeciesConfig parse_species(std::string_view scalars_text, std::string_view per_age_text) {
  const SpeciesScalars scalars = parse_scalars(scalars_text);
  const auto rows = parse_per_age(per_age_text, scalars.sexes, scalars.max_age);
  return build_species(scalars, rows);
}

SpeciesConfig load_species(const std::string& scalars_path, const std::string& per_age_path) {
  return parse_species(read_text_file(scalars_path), read_text_file(per_age_path));
}

ObservedSeries parse_series(std::string_view text, ObservedSeries::Kind kind) {
  auto lines = numbered_lines(text);
  if (lines.empty()) throw ParseError(0, "empty series file");
  if (std::string(trim(lines.front().second)) != "year,value_tons") {
    throw ParseError(lines.front().first, "expected header 'year,value_tons'");
  }
  ObservedSeries series;
  series.kind = kind;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto [number, raw] = lines[i];
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != 2) throw ParseError(number, "expected 2 fields");
    int year = parse_int(fields[0], number, "year");
    double value = parse_double(fields[1], number, "value_tons");
    if (!series.rows.empty() && year <= series.rows.back().first) {
      throw ParseError(number, "years must be strictly increasing");
    }
    if (!(value >= 0.0)) throw ParseError(number, "value_tons must be >= 0");
    series.rows.emplace_back(year, value);
  }
  return series;
}

std::string write_scalars(const SpeciesScalars& s) {
  std::string out;
  out += "A = " + std::to_string(s.max_age) + "\n";
  out += "alpha = " + format_full(s.alpha) + "\n";
  out += "beta = " + format_full(s.beta) + "\n";
  out += "M = " + format_full(s.natural_mortality) + "\n";
  out += std::string("pi = ") + (s.plus_group ? "1" : "0") + "\n";
  out += "lambda_min = " + format_full(s.lambda_min) + "\n";
  out += "lambda_max = " + format_full(s.lambda_max) + "\n";
  out += "sexes = " + std::to_string(s.sexes) + "\n";
  return out;
}

std::string write_per_age(const std::vector<PerAgeRow>& rows, int sexes) {
  std::string out = sexes == 2 ? "sex,age,weight_gr,maturity,fishing_mortality\n"
                               : "age,weight_gr,maturity,fishing_mortality\n";
  for (const auto& row : rows) {
    if (sexes == 2) out += row.sex == 0 ? "male," : "female,";
    out += std::to_string(row.age) + "," + format_full(row.weight_gr) + "," +
           format_full(row.maturity) + "," + format_full(row.fishing_mortality) + "\n";
  }
  return out;
}

std::string write_series(const ObservedSeries& series) {
  std::string out = "year,value_tons\n";
  for (const auto& [year, value] : series.rows) {
    out += std::to_string(year) + "," + format_full(value) + "\n";
  }
  return out;
}

std::string format_sig6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string write_report(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::string out;
  for (const auto& [key, value] : rows) {
    out += key;
    out += ',';
    out += value;
    out += '\n';
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> threshold_report_rows(const ThresholdReport& r) {
  std::vector<std::pair<std::string, std::string>> rows;
  rows.emplace_back("max_yield_tons", std::to_string(std::llround(r.max_yield_tons)));
  rows.emplace_back("max_ssb_tons", std::to_string(std::llround(r.max_ssb_tons)));
  rows.emplace_back("phi_g", format_sig6(r.phi_g));
  rows.emplace_back("contraction_valid", r.contraction_valid ? "1" : "0");
  rows.emplace_back("max_yield_tons_full", format_full(r.max_yield_tons));
  rows.emplace_back("max_ssb_tons_full", format_full(r.max_ssb_tons));
  rows.emplace_back("phi_g_full", format_full(r.phi_g));
  if (!r.convention.empty()) rows.emplace_back("convention", r.convention);
  return rows;
}

std::string write_table_tsv(const std::vector<std::string>& header,
                            const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += '\t';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += '\t';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

namespace {

const char* conclusion_name(Conclusion c) {
  switch (c) {
    case Conclusion::InKernel:
      return "InKernel";
    case Conclusion::NotInKernel:
      return "NotInKernel";
    default:
      return "Unknown";
  }
}

}  // namespace

std::string write_grid_tsv(const KernelGrid& grid) {
  std::vector<std::string> header = {"x", "y", "conclusion"};
  std::vector<std::vector<std::string>> rows;
  const int ny = grid.rows();
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < grid.resolution; ++ix) {
      const Conclusion c = grid.cells[static_cast<std::size_t>(iy) * grid.resolution + ix];
      rows.push_back({format_sig6(grid.x_coord(ix)),
                      grid.plane.axis_y ? format_sig6(grid.y_coord(iy)) : std::string("-"),
                      conclusion_name(c)});
    }
  }
  return write_table_tsv(header, rows);
}

std::string write_trajectory_tsv(const std::vector<TrajectoryRecord>& records) {
  std::vector<std::string> header = {"step", "lambda"};
  const std::size_t dim = records.empty() ? 0 : records.front().state.size();
  for (std::size_t a = 1; a <= dim; ++a) header.push_back("n" + std::to_string(a));
  header.emplace_back("ssb_tons");
  header.emplace_back("yield_tons");

  std::vector<std::vector<std::string>> rows;
  for (const auto& rec : records) {
    std::vector<std::string> row;
    row.push_back(std::to_string(rec.step));
    row.push_back(format_sig6(rec.lambda));
    for (double v : rec.state) row.push_back(format_sig6(v));
    row.push_back(format_sig6(rec.ssb_tons));
    row.push_back(format_sig6(rec.yield_tons));
    rows.push_back(std::move(row));
  }
  return write_table_tsv(header, rows);
}

namespace {

struct Frame {
  double width = 860, height = 480;
  double left = 70, right = 20, top = 40, bottom = 50;
  double plot_w() const { return width - left - right; }
  double plot_h() const { return height - top - bottom; }
};

std::string svg_header(const Frame& f) {
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\""
     << f.height << "\" viewBox=\"0 0 " << f.width << " " << f.height << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return os.str();
}

}  // namespace

std::string render_series_svg(const std::string& title,
                              const std::vector<std::pair<double, double>>& points,
                              std::optional<double> threshold) {
  Frame f;
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  if (!points.empty()) {
    x_min = x_max = points.front().first;
    y_min = 0.0;
    y_max = points.front().second;
    for (const auto& [x, y] : points) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_max = std::max(y_max, y);
    }
  }
  if (threshold) y_max = std::max(y_max, *threshold);
  if (x_max == x_min) x_max = x_min + 1;
  if (y_max == y_min) y_max = y_min + 1;
  y_max *= 1.05;

  auto sx = [&](double x) { return f.left + (x - x_min) / (x_max - x_min) * f.plot_w(); };
  auto sy = [&](double y) { return f.top + (1.0 - (y - y_min) / (y_max - y_min)) * f.plot_h(); };

  std::string out = svg_header(f);
  std::ostringstream os;
  os << "<text x=\"" << f.left << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
     << title << "</text>\n";
  os << "<rect x=\"" << f.left << "\" y=\"" << f.top << "\" width=\"" << f.plot_w()
     << "\" height=\"" << f.plot_h() << "\" fill=\"none\" stroke=\"#333\"/>\n";
  if (!points.empty()) {
    os << "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : points) os << format_sig6(sx(x)) << ',' << format_sig6(sy(y)) << ' ';
    os << "\"/>\n";
    for (const auto& [x, y] : points) {
      os << "<circle cx=\"" << format_sig6(sx(x)) << "\" cy=\"" << format_sig6(sy(y))
         << "\" r=\"3\" fill=\"#1f6fb2\"/>\n";
    }
  }
  if (threshold) {
    os << "<line x1=\"" << f.left << "\" y1=\"" << format_sig6(sy(*threshold)) << "\" x2=\""
       << f.left + f.plot_w() << "\" y2=\"" << format_sig6(sy(*threshold))
       << "\" stroke=\"#c1121f\" stroke-width=\"2\" stroke-dasharray=\"6,4\"/>\n";
    os << "<text x=\"" << f.left + 6 << "\" y=\"" << format_sig6(sy(*threshold) - 6)
       << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#c1121f\">threshold "
       << format_sig6(*threshold) << "</text>\n";
  }
  os << "<text x=\"" << f.left << "\" y=\"" << f.height - 16
     << "\" font-family=\"sans-serif\" font-size=\"12\">" << format_sig6(x_min) << "</text>\n";
  os << "<text x=\"" << f.left + f.plot_w() - 40 << "\" y=\"" << f.height - 16
     << "\" font-family=\"sans-serif\" font-size=\"12\">" << format_sig6(x_max) << "</text>\n";
  os << "<text x=\"8\" y=\"" << f.top + 12
     << "\" font-family=\"sans-serif\" font-size=\"12\">" << format_sig6(y_max / 1.05)
     << "</text>\n";
  out += os.str();
  out += "</svg>\n";
  return out;
}

std::string render_grid_svg(const KernelGrid& grid) {
  Frame f;
  const int ny = grid.rows();
  const double cw = f.plot_w() / grid.resolution;
  const double ch = f.plot_h() / ny;
  std::string out = svg_header(f);
  std::ostringstream os;
  os << "<text x=\"" << f.left
     << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">kernel estimate slice"
     << "</text>\n";
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < grid.resolution; ++ix) {
      const Conclusion c = grid.cells[static_cast<std::size_t>(iy) * grid.resolution + ix];
      const char* fill = c == Conclusion::InKernel      ? "#2b8a3e"
                         : c == Conclusion::NotInKernel ? "#c1121f"
                                                        : "#e9c46a";
      // SVG y grows downward; larger state coordinates render higher.
      const double px = f.left + ix * cw;
      const double py = f.top + (ny - 1 - iy) * ch;
      os << "<rect x=\"" << format_sig6(px) << "\" y=\"" << format_sig6(py) << "\" width=\""
         << format_sig6(cw + 0.5) << "\" height=\"" << format_sig6(ch + 0.5) << "\" fill=\"" << fill
         << "\"/>\n";
    }
  }
  os << "<rect x=\"" << f.left << "\" y=\"" << f.top << "\" width=\"" << f.plot_w()
     << "\" height=\"" << f.plot_h() << "\" fill=\"none\" stroke=\"#333\"/>\n";
  os << "<text x=\"" << f.left << "\" y=\"" << f.height - 16
     << "\" font-family=\"sans-serif\" font-size=\"12\">x: [" << format_sig6(grid.plane.x_lo)
     << ", " << format_sig6(grid.plane.x_hi) << "]";
  if (grid.plane.axis_y) {
    os << "  y: [" << format_sig6(grid.plane.y_lo) << ", " << format_sig6(grid.plane.y_hi) << "]";
  }
  os << "</text>\n";
  out += os.str();
  out += "</svg>\n";
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace viakern
