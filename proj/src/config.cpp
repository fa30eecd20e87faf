#include "kan3/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <type_traits>
#include <variant>
#include <vector>

namespace kan3 {

namespace {

using Member = std::variant<double ExperimentConfig::*, int ExperimentConfig::*, long ExperimentConfig::*,
                            std::uint64_t ExperimentConfig::*, std::string ExperimentConfig::*,
                            std::array<long, 4> ExperimentConfig::*>;

struct Field {
  const char* key;
  Member member;
};

using C = ExperimentConfig;

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      {"experiment", &C::experiment},
      {"matrix", &C::matrix},
      {"t", &C::t},
      {"n0", &C::n0},
      {"epsilon", &C::epsilon},
      {"theta0", &C::theta0},
      {"center_scale", &C::center_scale},
      {"seed", &C::seed},
      {"threads", &C::threads},
      {"out", &C::out},
      {"layout.box_area_fraction", &C::layout_box_area_fraction},
      {"layout.plateau", &C::layout_plateau},
      {"layout.chart_half", &C::layout_chart_half},
      {"layout.quadrature_n", &C::layout_quadrature_n},
      {"verify.quadrature_n", &C::verify_quadrature_n},
      {"verify.theta_n", &C::verify_theta_n},
      {"blender.samples", &C::blender_samples},
      {"blender.max_iter", &C::blender_max_iter},
      {"blender.consistency_samples", &C::consistency_samples},
      {"basin.nx", &C::grid_nx},
      {"basin.ny", &C::grid_ny},
      {"basin.nth", &C::grid_nth},
      {"basin.samples", &C::grid_samples},
      {"basin.n", &C::iterations},
      {"basin.tail", &C::tail},
      {"basin.delta", &C::delta},
      {"basin.coarse_nx", &C::coarse_nx},
      {"basin.coarse_ny", &C::coarse_ny},
      {"basin.coarse_nth", &C::coarse_nth},
      {"lyapunov.n", &C::lyapunov_n},
      {"gibbs.n", &C::gibbs_n},
      {"gibbs.n_short", &C::gibbs_n_short},
      {"gibbs.samples", &C::gibbs_samples},
      {"gibbs.u_length", &C::gibbs_u_length},
      {"coverage.depth", &C::coverage_depth},
      {"coverage.nx", &C::coverage_nx},
      {"coverage.ny", &C::coverage_ny},
      {"coverage.nth", &C::coverage_nth},
      {"coverage.L", &C::coverage_L},
      {"coverage.budget", &C::coverage_budget},
      {"mixing.N", &C::mixing_N},
      {"mixing.samples", &C::mixing_samples},
      {"mixing.flip_samples", &C::mixing_flip_samples},
      {"perturb.eta", &C::perturb_eta},
      {"perturb.torus", &C::perturb_torus},
      {"perturb.depth", &C::perturb_depth},
      {"perturb.tol", &C::perturb_tol},
  };
  return f;
}

const Field* find_field(const std::string& key) {
  for (const auto& f : fields())
    if (key == f.key) return &f;
  return nullptr;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Thrown internally with an offset into the value text; converted by the caller.
struct BadValue {
  std::string what;
  std::size_t offset = 0;
};

template <class T>
T parse_integer(const std::string& v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw BadValue{"expected an integer, got '" + v + "'", 0};
  return out;
}

double parse_real(const std::string& v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    throw BadValue{"expected a number, got '" + v + "'", 0};
  return out;
}

std::string parse_string(const std::string& v, bool require_quotes) {
  if (v.empty() || v.front() != '"') {
    if (require_quotes) throw BadValue{"expected a quoted string", 0};
    return v;
  }
  std::string out;
  for (std::size_t i = 1; i < v.size(); ++i) {
    char c = v[i];
    if (c == '\\' && i + 1 < v.size()) {
      out.push_back(v[++i]);
    } else if (c == '"') {
      if (i + 1 != v.size()) throw BadValue{"trailing characters after string", i + 1};
      return out;
    } else {
      out.push_back(c);
    }
  }
  throw BadValue{"unterminated string", v.size()};
}

std::array<long, 4> parse_matrix(const std::string& v) {
  if (v.size() < 2 || v.front() != '[' || v.back() != ']') throw BadValue{"expected [a, b, c, d]", 0};
  std::array<long, 4> m{};
  std::size_t pos = 1, k = 0;
  while (pos < v.size() - 1) {
    std::size_t comma = v.find(',', pos);
    if (comma == std::string::npos || comma > v.size() - 1) comma = v.size() - 1;
    std::string item = trim(v.substr(pos, comma - pos));
    if (k >= 4) throw BadValue{"matrix needs exactly 4 entries", pos};
    try {
      m[k++] = parse_integer<long>(item);
    } catch (BadValue& b) {
      b.offset = pos;
      throw;
    }
    pos = comma + 1;
  }
  if (k != 4) throw BadValue{"matrix needs exactly 4 entries", 0};
  return m;
}

void assign(ExperimentConfig& c, const Field& f, const std::string& v, bool strict) {
  std::visit(
      [&](auto mp) {
        using T = std::decay_t<decltype(c.*mp)>;
        if constexpr (std::is_same_v<T, double>) c.*mp = parse_real(v);
        else if constexpr (std::is_same_v<T, std::string>) c.*mp = parse_string(v, strict);
        else if constexpr (std::is_same_v<T, std::array<long, 4>>) c.*mp = parse_matrix(v);
        else c.*mp = parse_integer<T>(v);
      },
      f.member);
}

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string format(const ExperimentConfig& c, const Field& f) {
  return std::visit(
      [&](auto mp) -> std::string {
        using T = std::decay_t<decltype(c.*mp)>;
        const T& v = c.*mp;
        if constexpr (std::is_same_v<T, double>) {
          return format_real(v);
        } else if constexpr (std::is_same_v<T, std::string>) {
          std::string s = "\"";
          for (char ch : v) {
            if (ch == '"' || ch == '\\') s.push_back('\\');
            s.push_back(ch);
          }
          return s + "\"";
        } else if constexpr (std::is_same_v<T, std::array<long, 4>>) {
          return "[" + std::to_string(v[0]) + ", " + std::to_string(v[1]) + ", " + std::to_string(v[2]) + ", " +
                 std::to_string(v[3]) + "]";
        } else {
          return std::to_string(v);
        }
      },
      f.member);
}

void require(bool ok, const char* field, const std::string& rule) {
  if (!ok) throw Error(ErrorKind::RangeError, std::string(field) + " must be " + rule, field);
}

const std::set<std::string>& experiments() {
  static const std::set<std::string> e = {"verify",   "blender", "basin",  "lyapunov",
                                          "gibbs",    "coverage", "mixing", "perturb"};
  return e;
}

}  // namespace

void validate(const ExperimentConfig& c) {
  for (long e : c.matrix) require(std::labs(e) <= 1000, "matrix", "entries within [-1000, 1000]");
  require(c.t > 0.0 && c.t <= 0.5, "t", "in (0, 0.5]");
  require(c.n0 >= 1 && c.n0 <= 12, "n0", "in [1, 12]");
  require(c.epsilon > 0.0 && c.epsilon < 0.5, "epsilon", "in (0, 0.5)");
  require(c.theta0 > 0.0 && c.theta0 < 0.5, "theta0", "in (0, 0.5)");
  require(c.center_scale > 0.0 && c.center_scale <= 1e-3, "center_scale", "in (0, 1e-3]");
  require(experiments().count(c.experiment) == 1, "experiment", "one of verify|blender|basin|lyapunov|gibbs|coverage|mixing|perturb");
  require(c.threads >= 0 && c.threads <= 1024, "threads", "in [0, 1024]");
  require(!c.out.empty(), "out", "nonempty");
  require(c.layout_box_area_fraction > 0.0 && c.layout_box_area_fraction <= 1.0, "layout.box_area_fraction", "in (0, 1]");
  require(c.layout_plateau > 0.0 && c.layout_plateau < 1.0, "layout.plateau", "in (0, 1)");
  require(c.layout_chart_half > 0.0 && c.layout_chart_half <= 100.0, "layout.chart_half", "in (0, 100]");
  require(c.layout_quadrature_n >= 16 && c.layout_quadrature_n <= 16384, "layout.quadrature_n", "in [16, 16384]");
  require(c.verify_quadrature_n >= 16 && c.verify_quadrature_n <= 8192, "verify.quadrature_n", "in [16, 8192]");
  require(c.verify_theta_n >= 3 && c.verify_theta_n <= 1001, "verify.theta_n", "in [3, 1001]");
  require(c.blender_samples >= 1 && c.blender_samples <= 10000000, "blender.samples", "in [1, 1e7]");
  require(c.blender_max_iter >= 1 && c.blender_max_iter <= 10000, "blender.max_iter", "in [1, 10000]");
  require(c.consistency_samples >= 1 && c.consistency_samples <= 10000000, "blender.consistency_samples", "in [1, 1e7]");
  require(c.grid_nx >= 1 && c.grid_nx <= 4096, "basin.nx", "in [1, 4096]");
  require(c.grid_ny >= 1 && c.grid_ny <= 4096, "basin.ny", "in [1, 4096]");
  require(c.grid_nth >= 1 && c.grid_nth <= 4096, "basin.nth", "in [1, 4096]");
  require(c.grid_samples >= 1 && c.grid_samples <= 1024, "basin.samples", "in [1, 1024]");
  require(c.iterations >= 1 && c.iterations <= 100000000, "basin.n", "in [1, 1e8]");
  require(c.tail >= 1 && c.tail <= c.iterations, "basin.tail", "in [1, basin.n]");
  require(c.delta > 0.0 && c.delta < 0.5, "basin.delta", "in (0, 0.5)");
  require(c.coarse_nx >= 1 && c.coarse_nx <= 1024, "basin.coarse_nx", "in [1, 1024]");
  require(c.coarse_ny >= 1 && c.coarse_ny <= 1024, "basin.coarse_ny", "in [1, 1024]");
  require(c.coarse_nth >= 1 && c.coarse_nth <= 1024, "basin.coarse_nth", "in [1, 1024]");
  require(c.lyapunov_n >= 1 && c.lyapunov_n <= 10000000000L, "lyapunov.n", "in [1, 1e10]");
  require(c.gibbs_n >= 1 && c.gibbs_n <= 10000000, "gibbs.n", "in [1, 1e7]");
  require(c.gibbs_n_short >= 1 && c.gibbs_n_short <= c.gibbs_n, "gibbs.n_short", "in [1, gibbs.n]");
  require(c.gibbs_samples >= 2 && c.gibbs_samples <= 10000000, "gibbs.samples", "in [2, 1e7]");
  require(c.gibbs_u_length > 0.0 && c.gibbs_u_length <= 1.0, "gibbs.u_length", "in (0, 1]");
  require(c.coverage_depth >= 0 && c.coverage_depth <= 64, "coverage.depth", "in [0, 64]");
  require(c.coverage_nx >= 1 && c.coverage_nx <= 1024, "coverage.nx", "in [1, 1024]");
  require(c.coverage_ny >= 1 && c.coverage_ny <= 1024, "coverage.ny", "in [1, 1024]");
  require(c.coverage_nth >= 1 && c.coverage_nth <= 1024, "coverage.nth", "in [1, 1024]");
  require(c.coverage_L >= 0.0 && c.coverage_L <= 0.01, "coverage.L", "in [0, 0.01]");
  require(c.coverage_budget >= 1 && c.coverage_budget <= 1000000000, "coverage.budget", "in [1, 1e9]");
  require(c.mixing_N >= 1 && c.mixing_N <= 10000, "mixing.N", "in [1, 10000]");
  require(c.mixing_samples >= 1 && c.mixing_samples <= 100000000, "mixing.samples", "in [1, 1e8]");
  require(c.mixing_flip_samples >= 1 && c.mixing_flip_samples <= 100000000, "mixing.flip_samples", "in [1, 1e8]");
  require(c.perturb_eta >= 0.0 && c.perturb_eta < 0.5, "perturb.eta", "in [0, 0.5)");
  require(c.perturb_torus == 0 || c.perturb_torus == 1, "perturb.torus", "0 or 1");
  require(c.perturb_depth >= 1 && c.perturb_depth <= 1000, "perturb.depth", "in [1, 1000]");
  require(c.perturb_tol > 0.0 && c.perturb_tol < 1.0, "perturb.tol", "in (0, 1)");
}

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
  const Field* f = find_field(key);
  if (!f) throw Error(ErrorKind::UnknownKey, "unknown key '" + key + "'", key);
  try {
    assign(c, *f, trim(value), false);
  } catch (const BadValue& b) {
    throw Error(ErrorKind::ParseError, key + ": " + b.what, 1, static_cast<int>(b.offset) + 1);
  }
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    // Strip a comment that is not inside a string.
    bool quoted = false;
    std::string line;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      char ch = raw[i];
      if (ch == '"' && (i == 0 || raw[i - 1] != '\\')) quoted = !quoted;
      if (ch == '#' && !quoted) break;
      line.push_back(ch);
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t lead = line.find_first_not_of(" \t");
    if (lead == std::string::npos) continue;
    const int col0 = static_cast<int>(lead) + 1;

    if (line[lead] == '[') {
      std::size_t close = line.find(']', lead);
      if (close == std::string::npos || !trim(line.substr(close + 1)).empty())
        throw Error(ErrorKind::ParseError, "malformed section header", line_no, col0);
      section = trim(line.substr(lead + 1, close - lead - 1));
      if (section.empty()) throw Error(ErrorKind::ParseError, "empty section name", line_no, col0 + 1);
      continue;
    }

    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::ParseError, "expected 'key = value'", line_no, col0);
    std::string key = trim(line.substr(0, eq));
    if (key.empty() || !std::all_of(key.begin(), key.end(), [](char ch) {
          return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.';
        }))
      throw Error(ErrorKind::ParseError, "invalid key '" + key + "'", line_no, col0);
    std::string full = section.empty() ? key : section + "." + key;

    std::size_t vstart = line.find_first_not_of(" \t", eq + 1);
    if (vstart == std::string::npos)
      throw Error(ErrorKind::ParseError, "missing value for '" + full + "'", line_no, static_cast<int>(eq) + 2);
    std::string value = trim(line.substr(vstart));

    const Field* f = find_field(full);
    if (!f) throw Error(ErrorKind::UnknownKey, "unknown key '" + full + "'", full);
    if (!seen.insert(full).second)
      throw Error(ErrorKind::ParseError, "duplicate key '" + full + "'", line_no, col0);
    try {
      assign(c, *f, value, true);
    } catch (const BadValue& b) {
      throw Error(ErrorKind::ParseError, full + ": " + b.what, line_no, static_cast<int>(vstart + b.offset) + 1);
    }
  }
  validate(c);
  return c;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string print_config(const ExperimentConfig& c) {
  std::string out;
  for (const auto& f : fields()) out += std::string(f.key) + " = " + format(c, f) + "\n";
  return out;
}

}  // namespace kan3
