#include "plap/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "plap/error.hpp"

namespace plap {

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::solve: return "solve";
    case Mode::corollary_sweep: return "corollary_sweep";
    case Mode::bounds_only: return "bounds_only";
    case Mode::verify: return "verify";
  }
  return "?";
}

std::string format_number(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

namespace {

struct Entry {
  std::string value;
  bool quoted;
  std::size_t line;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_number(const std::string& key, const Entry& e) {
  if (e.quoted) throw ConfigError(key, e.line, "expected a number, got a quoted string");
  double x = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc{} || ptr != last || !std::isfinite(x))
    throw ConfigError(key, e.line, "'" + e.value + "' is not a finite number");
  return x;
}

bool to_bool(const std::string& key, const Entry& e) {
  if (!e.quoted && e.value == "true") return true;
  if (!e.quoted && e.value == "false") return false;
  throw ConfigError(key, e.line, "expected true or false");
}

std::vector<double> to_list(const std::string& key, const Entry& e) {
  std::vector<double> out;
  if (e.quoted) throw ConfigError(key, e.line, "expected a comma-separated list of numbers");
  std::string_view rest = e.value;
  if (trim(rest).empty()) return out;
  while (true) {
    const auto comma = rest.find(',');
    const std::string item(trim(rest.substr(0, comma)));
    if (item.empty()) throw ConfigError(key, e.line, "empty list item");
    out.push_back(to_number(key, Entry{item, false, e.line}));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return out;
}

const std::set<std::string, std::less<>> kKnown = {
    "T",         "N",         "p",         "f",          "g",
    "h",         "delta",     "tail_asserted",           "positivity_asserted",
    "positivity_x_max",       "alpha_min", "alpha_max",  "alpha_n",
    "solve_tol", "cert_tol",  "mode",      "sweep.hbar", "sweep.profile",
};

expr::UnaryFunction compile(const std::string& key, const Entry& e, const char* var,
                            const expr::Bindings& params) {
  if (!e.quoted) throw ConfigError(key, e.line, "expressions must be quoted");
  try {
    return expr::UnaryFunction::compile(e.value, var, params);
  } catch (const Error& err) {
    throw ConfigError(key, e.line, err.what());
  }
}

}  // namespace

ExponentField ProblemConfig::exponent_field() const {
  return ExponentField::from_function(grid(), [this](double t) { return p(t); });
}

PeriodicSample ProblemConfig::h_sample() const {
  return PeriodicSample::from_function(grid(), [this](double t) { return h(t); });
}

std::vector<std::string> ProblemConfig::echo() const {
  std::vector<std::string> out;
  auto num = [&](const char* k, double v) { out.push_back(std::string(k) + " = " + format_number(v)); };
  auto str = [&](const char* k, const std::string& v) { out.push_back(std::string(k) + " = \"" + v + "\""); };
  auto flag = [&](const char* k, bool v) { out.push_back(std::string(k) + " = " + (v ? "true" : "false")); };
  num("T", T);
  out.push_back("N = " + std::to_string(N));
  str("p", p_src);
  str("f", f_src);
  str("g", g_src);
  str("h", h_src);
  for (const auto& [k, v] : params) num(("param." + k).c_str(), v);
  if (delta) num("delta", *delta);
  else out.push_back("delta = (unset)");
  flag("tail_asserted", tail_asserted);
  flag("positivity_asserted", positivity_asserted);
  num("positivity_x_max", positivity_x_max);
  num("alpha_min", alpha_search.x_min);
  num("alpha_max", alpha_search.x_max);
  out.push_back("alpha_n = " + std::to_string(alpha_search.n));
  num("solve_tol", solve_tol);
  num("cert_tol", cert_tol);
  out.push_back("mode = " + std::string(to_string(mode)));
  if (!sweep_hbar.empty()) {
    std::string list;
    for (std::size_t i = 0; i < sweep_hbar.size(); ++i)
      list += (i ? ", " : "") + format_number(sweep_hbar[i]);
    out.push_back("sweep.hbar = " + list);
  }
  str("sweep.profile", sweep_profile_src);
  return out;
}

namespace {

using LineOf = std::function<std::size_t(const std::string&)>;

void validate(const ProblemConfig& cfg, const LineOf& line_of) {
  auto fail = [&](const std::string& key, const std::string& msg) {
    throw ConfigError(key, line_of(key), msg);
  };
  if (!(cfg.T > 0.0)) fail("T", "period must be positive");
  if (cfg.N < Grid::min_intervals) fail("N", "need at least 16 intervals");
  try {
    (void)cfg.exponent_field();
  } catch (const std::invalid_argument& e) {
    fail("p", e.what());
  } catch (const Error& e) {
    fail("p", e.what());
  }
  try {
    const auto h = cfg.h_sample();
    for (double x : h.values())
      if (!std::isfinite(x)) fail("h", "h is not finite on the grid");
  } catch (const ClosureError& e) {
    fail("h", std::string("h(0) != h(T): ") + e.what());
  } catch (const EvalError& e) {
    fail("h", e.what());
  }
  if (!(cfg.solve_tol > 0.0)) fail("solve_tol", "must be positive");
  if (!(cfg.cert_tol > 0.0)) fail("cert_tol", "must be positive");
  if (cfg.delta && !(*cfg.delta > 0.0)) fail("delta", "must be positive");
  const auto& a = cfg.alpha_search;
  if (!(a.x_min > 0.0)) fail("alpha_min", "must be positive");
  if (!(a.x_max > a.x_min)) fail("alpha_max", "must exceed alpha_min");
  if (a.n < 2) fail("alpha_n", "must be at least 2");
  if (!(cfg.positivity_x_max > 0.0)) fail("positivity_x_max", "must be positive");
}

}  // namespace

void validate_config(const ProblemConfig& cfg) {
  validate(cfg, [](const std::string&) { return std::size_t{0}; });
}

ProblemConfig parse_config(std::string_view text) {
  std::map<std::string, Entry, std::less<>> entries;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    // Strip a comment that is not inside quotes.
    bool in_quotes = false;
    std::size_t cut = raw.size();
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '"') in_quotes = !in_quotes;
      if (raw[i] == '#' && !in_quotes) {
        cut = i;
        break;
      }
    }
    const std::string_view line = trim(std::string_view(raw).substr(0, cut));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("", lineno, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("", lineno, "missing key");
    if (!kKnown.count(key) && key.rfind("param.", 0) != 0)
      throw ConfigError(key, lineno, "unknown key");
    if (entries.count(key)) throw ConfigError(key, lineno, "duplicate key");
    Entry e{"", false, lineno};
    if (!value.empty() && value.front() == '"') {
      if (value.size() < 2 || value.back() != '"')
        throw ConfigError(key, lineno, "unterminated string");
      e.value = std::string(value.substr(1, value.size() - 2));
      e.quoted = true;
    } else {
      if (value.empty()) throw ConfigError(key, lineno, "missing value");
      e.value = std::string(value);
    }
    entries.emplace(key, std::move(e));
  }

  ProblemConfig cfg;
  for (const auto& [key, e] : entries) {
    if (key.rfind("param.", 0) == 0) {
      const std::string name = key.substr(6);
      if (name.empty()) throw ConfigError(key, e.line, "missing parameter name");
      const bool ident = std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_';
      if (!ident) throw ConfigError(key, e.line, "parameter names must be identifiers");
      if (name == "t" || name == "x" || name == "pi")
        throw ConfigError(key, e.line, "parameter name is reserved");
      cfg.params[name] = to_number(key, e);
    }
  }

  auto need = [&](const char* key) -> const Entry& {
    auto it = entries.find(key);
    if (it == entries.end()) throw ConfigError(key, 0, "missing required key");
    return it->second;
  };
  auto find = [&](const char* key) -> const Entry* {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };

  cfg.T = to_number("T", need("T"));
  {
    const Entry& e = need("N");
    const double n = to_number("N", e);
    if (n != std::floor(n) || n < 0 || n > 1e8) throw ConfigError("N", e.line, "must be an integer");
    cfg.N = static_cast<std::size_t>(n);
  }
  const Entry& ep = need("p");
  const Entry& ef = need("f");
  const Entry& eg = need("g");
  const Entry& eh = need("h");
  cfg.p = compile("p", ep, "t", cfg.params);
  cfg.f = compile("f", ef, "x", cfg.params);
  cfg.g = compile("g", eg, "x", cfg.params);
  cfg.h = compile("h", eh, "t", cfg.params);
  cfg.p_src = ep.value;
  cfg.f_src = ef.value;
  cfg.g_src = eg.value;
  cfg.h_src = eh.value;

  if (auto e = find("delta")) cfg.delta = to_number("delta", *e);
  if (auto e = find("tail_asserted")) cfg.tail_asserted = to_bool("tail_asserted", *e);
  if (auto e = find("positivity_asserted")) cfg.positivity_asserted = to_bool("positivity_asserted", *e);
  if (auto e = find("positivity_x_max")) cfg.positivity_x_max = to_number("positivity_x_max", *e);
  if (auto e = find("alpha_min")) cfg.alpha_search.x_min = to_number("alpha_min", *e);
  if (auto e = find("alpha_max")) cfg.alpha_search.x_max = to_number("alpha_max", *e);
  if (auto e = find("alpha_n")) {
    const double n = to_number("alpha_n", *e);
    if (n != std::floor(n) || n < 2 || n > 1e7) throw ConfigError("alpha_n", e->line, "must be an integer >= 2");
    cfg.alpha_search.n = static_cast<int>(n);
  }
  if (auto e = find("solve_tol")) cfg.solve_tol = to_number("solve_tol", *e);
  if (auto e = find("cert_tol")) cfg.cert_tol = to_number("cert_tol", *e);
  if (auto e = find("mode")) {
    if (e->quoted) throw ConfigError("mode", e->line, "mode is a bare word");
    if (e->value == "solve") cfg.mode = Mode::solve;
    else if (e->value == "corollary_sweep") cfg.mode = Mode::corollary_sweep;
    else if (e->value == "bounds_only") cfg.mode = Mode::bounds_only;
    else if (e->value == "verify") cfg.mode = Mode::verify;
    else throw ConfigError("mode", e->line, "unknown mode '" + e->value + "'");
  }
  if (auto e = find("sweep.hbar")) cfg.sweep_hbar = to_list("sweep.hbar", *e);
  if (auto e = find("sweep.profile")) cfg.sweep_profile_src = e->value;
  {
    const Entry* e = find("sweep.profile");
    cfg.sweep_profile = compile("sweep.profile", e ? *e : Entry{"0", true, 0}, "t", cfg.params);
  }

  validate(cfg, [&](const std::string& key) {
    auto it = entries.find(key);
    return it == entries.end() ? std::size_t{0} : it->second.line;
  });
  return cfg;
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ProblemConfig with_mean_forcing(const ProblemConfig& cfg, double hbar) {
  ProblemConfig out = cfg;
  out.h_src = format_number(hbar) + " + (" + cfg.sweep_profile_src + ")";
  out.h = expr::UnaryFunction::compile(out.h_src, "t", cfg.params);
  return out;
}

}  // namespace plap
