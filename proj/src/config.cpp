#include "roadfield/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <istream>
#include <sstream>

#include "roadfield/util.hpp"

namespace roadfield {

namespace {

[[noreturn]] void fail(int line, const std::string& why) {
  throw ConfigError(line > 0 ? "config line " + std::to_string(line) + ": " + why
                             : why);
}

bool is_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Cuts a trailing # comment, honoring quoted strings.
std::string strip_comment(const std::string& s, int line) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
        if (i >= s.size()) fail(line, "dangling escape in string");
      } else if (c == '"') {
        in_string = false;
      }
    } else if (c == '"') {
      in_string = true;
    } else if (c == '#') {
      return s.substr(0, i);
    }
  }
  if (in_string) fail(line, "unterminated string");
  return s;
}

// Parses one scalar or array from text[pos...]; advances pos past it.
TomlValue parse_value(const std::string& text, std::size_t& pos, int line,
                      bool allow_array);

TomlValue parse_scalar(const std::string& text, std::size_t& pos, int line) {
  TomlValue v;
  v.line = line;
  if (pos >= text.size()) fail(line, "missing value");
  if (text[pos] == '"') {
    v.kind = TomlValue::Kind::String;
    ++pos;
    for (; pos < text.size(); ++pos) {
      const char c = text[pos];
      if (c == '\\') {
        ++pos;
        if (pos >= text.size()) fail(line, "dangling escape in string");
        const char e = text[pos];
        if (e == '"' || e == '\\')
          v.text += e;
        else
          fail(line, std::string("unsupported escape \\") + e);
      } else if (c == '"') {
        ++pos;
        return v;
      } else {
        v.text += c;
      }
    }
    fail(line, "unterminated string");
  }
  std::size_t end = pos;
  while (end < text.size() && text[end] != ',' && text[end] != ']' &&
         !std::isspace(static_cast<unsigned char>(text[end])))
    ++end;
  const std::string token = text.substr(pos, end - pos);
  if (token.empty()) fail(line, "missing value");
  pos = end;
  if (token == "true" || token == "false") {
    v.kind = TomlValue::Kind::Boolean;
    v.boolean = token == "true";
    return v;
  }
  char* num_end = nullptr;
  const double num = std::strtod(token.c_str(), &num_end);
  if (num_end != token.c_str() + token.size())
    fail(line, "'" + token + "' is not a number, boolean, or quoted string");
  v.kind = TomlValue::Kind::Number;
  v.number = num;
  return v;
}

void skip_space(const std::string& text, std::size_t& pos) {
  while (pos < text.size() &&
         std::isspace(static_cast<unsigned char>(text[pos])))
    ++pos;
}

TomlValue parse_value(const std::string& text, std::size_t& pos, int line,
                      bool allow_array) {
  skip_space(text, pos);
  if (pos < text.size() && text[pos] == '[') {
    if (!allow_array) fail(line, "nested arrays are not supported");
    TomlValue v;
    v.kind = TomlValue::Kind::Array;
    v.line = line;
    ++pos;
    skip_space(text, pos);
    if (pos < text.size() && text[pos] == ']') {
      ++pos;
      return v;
    }
    for (;;) {
      v.items.push_back(parse_value(text, pos, line, false));
      skip_space(text, pos);
      if (pos >= text.size()) fail(line, "unterminated array");
      if (text[pos] == ',') {
        ++pos;
        skip_space(text, pos);
        continue;
      }
      if (text[pos] == ']') {
        ++pos;
        return v;
      }
      fail(line, "expected ',' or ']' in array");
    }
  }
  return parse_scalar(text, pos, line);
}

const char* kind_name(TomlValue::Kind k) {
  switch (k) {
    case TomlValue::Kind::Number:
      return "number";
    case TomlValue::Kind::Boolean:
      return "boolean";
    case TomlValue::Kind::String:
      return "string";
    case TomlValue::Kind::Array:
      return "array";
  }
  return "?";
}

[[noreturn]] void type_error(const std::string& key, const TomlValue& v,
                             const char* want) {
  fail(v.line, "key " + key + " expects a " + want + ", got a " +
                   kind_name(v.kind));
}

double as_number(const std::string& key, const TomlValue& v) {
  if (v.kind != TomlValue::Kind::Number) type_error(key, v, "number");
  return v.number;
}

bool as_bool(const std::string& key, const TomlValue& v) {
  if (v.kind != TomlValue::Kind::Boolean) type_error(key, v, "boolean");
  return v.boolean;
}

std::string as_string(const std::string& key, const TomlValue& v) {
  if (v.kind != TomlValue::Kind::String) type_error(key, v, "string");
  return v.text;
}

long long as_integer(const std::string& key, const TomlValue& v) {
  const double n = as_number(key, v);
  if (!std::isfinite(n) || n != std::floor(n) || std::abs(n) > 1e15)
    fail(v.line, "key " + key + " expects an integer, got " + fmt17(n));
  return static_cast<long long>(n);
}

// `command.values` accepts either the range string or an explicit numeric
// array; arrays normalize to the comma-list form parse_range understands.
std::string as_values(const std::string& key, const TomlValue& v) {
  if (v.kind == TomlValue::Kind::String) return v.text;
  if (v.kind == TomlValue::Kind::Array) {
    std::string out;
    for (const TomlValue& item : v.items) {
      if (item.kind != TomlValue::Kind::Number)
        type_error(key, item, "number");
      out += (out.empty() ? "" : ",") + fmt17(item.number);
    }
    return out;
  }
  type_error(key, v, "string or number array");
}

std::vector<std::string> as_string_list(const std::string& key,
                                        const TomlValue& v) {
  if (v.kind == TomlValue::Kind::String) return {v.text};
  if (v.kind != TomlValue::Kind::Array) type_error(key, v, "string array");
  std::vector<std::string> out;
  for (const TomlValue& item : v.items) out.push_back(as_string(key, item));
  return out;
}

using Handler = std::function<void(RunConfig&, const std::string&,
                                   const TomlValue&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table = [] {
    std::map<std::string, Handler> t;
    const auto num = [&t](const char* key, double RunConfig::*field) {
      t[key] = [field](RunConfig& c, const std::string& k, const TomlValue& v) {
        c.*field = as_number(k, v);
      };
    };
    const auto text = [&t](const char* key, std::string RunConfig::*field) {
      t[key] = [field](RunConfig& c, const std::string& k, const TomlValue& v) {
        c.*field = as_string(k, v);
      };
    };
    const auto flag = [&t](const char* key, bool RunConfig::*field) {
      t[key] = [field](RunConfig& c, const std::string& k, const TomlValue& v) {
        c.*field = as_bool(k, v);
      };
    };
    const auto count = [&t](const char* key, int RunConfig::*field) {
      t[key] = [field](RunConfig& c, const std::string& k, const TomlValue& v) {
        c.*field = static_cast<int>(as_integer(k, v));
      };
    };

    t["parameters.D"] = [](RunConfig& c, const std::string& k,
                           const TomlValue& v) { c.params.D = as_number(k, v); };
    t["parameters.d"] = [](RunConfig& c, const std::string& k,
                           const TomlValue& v) { c.params.d = as_number(k, v); };
    t["parameters.mu"] = [](RunConfig& c, const std::string& k,
                            const TomlValue& v) {
      c.params.mu = as_number(k, v);
    };
    t["parameters.nu"] = [](RunConfig& c, const std::string& k,
                            const TomlValue& v) {
      c.params.nu = as_number(k, v);
    };
    t["parameters.c"] = [](RunConfig& c, const std::string& k,
                           const TomlValue& v) { c.params.c = as_number(k, v); };
    t["parameters.strict_exchange"] = [](RunConfig& c, const std::string& k,
                                         const TomlValue& v) {
      c.params.strict_exchange = as_bool(k, v);
    };

    text("niche.kind", &RunConfig::niche_kind);
    num("niche.L", &RunConfig::niche_L);
    text("niche.table", &RunConfig::niche_table);
    num("niche.m0", &RunConfig::niche_m0);
    flag("niche.homogeneous", &RunConfig::niche_homogeneous);
    flag("niche.clamp", &RunConfig::niche_clamp);

    num("numerics.h", &RunConfig::h);
    num("numerics.X0", &RunConfig::X0);
    num("numerics.growth", &RunConfig::growth);
    num("numerics.stop_tol", &RunConfig::stop_tol);
    count("numerics.max_steps", &RunConfig::max_steps);
    num("numerics.max_x", &RunConfig::max_x);
    num("numerics.eigen_tol", &RunConfig::eigen_tol);
    num("numerics.dt", &RunConfig::dt);
    num("numerics.horizon", &RunConfig::horizon);
    num("numerics.steady_tol", &RunConfig::steady_tol);
    num("numerics.speed_tol", &RunConfig::speed_tol);
    num("numerics.threshold_tol", &RunConfig::threshold_tol);
    num("numerics.d_max", &RunConfig::d_max);
    count("numerics.scan_points", &RunConfig::scan_points);
    num("numerics.X", &RunConfig::X);

    text("command.name", &RunConfig::command);
    text("command.axis", &RunConfig::axis);
    t["command.values"] = [](RunConfig& c, const std::string& k,
                             const TomlValue& v) {
      c.values = as_values(k, v);
    };
    num("command.robin_nu", &RunConfig::robin_nu);
    flag("command.with_verdicts", &RunConfig::with_verdicts);
    t["command.check"] = [](RunConfig& c, const std::string& k,
                            const TomlValue& v) {
      c.checks = as_string_list(k, v);
    };
    count("command.frame_stride", &RunConfig::frame_stride);
    count("command.jobs", &RunConfig::jobs);
    t["command.seed"] = [](RunConfig& c, const std::string& k,
                           const TomlValue& v) {
      const long long s = as_integer(k, v);
      if (s < 0) fail(v.line, "key " + k + " expects a nonnegative integer");
      c.seed = static_cast<std::uint64_t>(s);
    };

    text("output.dir", &RunConfig::out_dir);
    return t;
  }();
  return table;
}

}  // namespace

ConfigMap parse_toml(std::istream& in) {
  ConfigMap map;
  std::string section;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::string line = trim(strip_comment(raw, line_no));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "expected [section]");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(line_no, "empty section name");
      for (const char c : section)
        if (!is_key_char(c))
          fail(line_no, "bad section name '" + section + "'");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(line_no, "empty key");
    for (const char c : key)
      if (!is_key_char(c)) fail(line_no, "bad key '" + key + "'");
    if (section.empty())
      fail(line_no, "key '" + key + "' appears before any [section]");
    std::size_t pos = eq + 1;
    const TomlValue value = parse_value(line, pos, line_no, true);
    skip_space(line, pos);
    if (pos != line.size()) fail(line_no, "trailing text after value");
    const std::string dotted = section + "." + key;
    if (!map.emplace(dotted, value).second)
      fail(line_no, "duplicate key " + dotted);
  }
  return map;
}

ConfigMap parse_toml_string(const std::string& text) {
  std::istringstream in(text);
  return parse_toml(in);
}

TomlValue parse_override_value(const std::string& text) {
  const std::string t = trim(text);
  try {
    std::size_t pos = 0;
    TomlValue v = parse_value(t, pos, 0, true);
    skip_space(t, pos);
    if (pos == t.size()) return v;
  } catch (const ConfigError&) {
    // fall through to the bare-string reading
  }
  TomlValue v;
  v.kind = TomlValue::Kind::String;
  v.text = t;
  return v;
}

void RunConfig::apply(const ConfigMap& map) {
  const auto& table = handlers();
  for (const auto& [key, value] : map) {
    const auto it = table.find(key);
    if (it == table.end())
      fail(value.line, "unknown key " + key);
    it->second(*this, key, value);
  }
}

void RunConfig::apply_override(const std::string& dotted_key,
                               const std::string& value) {
  const auto& table = handlers();
  const auto it = table.find(dotted_key);
  if (it == table.end()) throw ConfigError("unknown key " + dotted_key);
  it->second(*this, dotted_key, parse_override_value(value));
}

ExhaustionSchedule RunConfig::schedule() const {
  ExhaustionSchedule s;
  s.x0 = X0;
  s.growth = growth;
  s.stop_tol = stop_tol;
  s.max_steps = max_steps;
  s.spacing = h;
  s.max_x = max_x;
  s.eigen_tol = eigen_tol;
  return s;
}

NicheProfile RunConfig::make_niche() const {
  if (niche_kind.empty())
    throw ConfigError(
        "niche.kind is not set (expected radial_fl, constant, or tabulated)");
  if (niche_kind == "radial_fl") return NicheProfile::radial_fl(niche_L);
  if (niche_kind == "constant")
    return NicheProfile::constant(niche_m0, niche_homogeneous);
  if (niche_kind == "tabulated") {
    if (niche_table.empty())
      throw ConfigError("niche.table is not set (path to the x,y,m CSV)");
    return NicheProfile::tabulated_from_csv_file(niche_table, niche_clamp);
  }
  throw ConfigError("niche.kind '" + niche_kind +
                    "' is not one of radial_fl, constant, tabulated");
}

std::string RunConfig::to_toml() const {
  const auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    return out + "\"";
  };
  std::string out;
  out += "[parameters]\n";
  out += "D = " + fmt17(params.D) + "\n";
  out += "d = " + fmt17(params.d) + "\n";
  out += "mu = " + fmt17(params.mu) + "\n";
  out += "nu = " + fmt17(params.nu) + "\n";
  out += "c = " + fmt17(params.c) + "\n";
  out += std::string("strict_exchange = ") +
         (params.strict_exchange ? "true" : "false") + "\n";
  out += "\n[niche]\n";
  out += "kind = " + quote(niche_kind) + "\n";
  out += "L = " + fmt17(niche_L) + "\n";
  out += "table = " + quote(niche_table) + "\n";
  out += "m0 = " + fmt17(niche_m0) + "\n";
  out += std::string("homogeneous = ") + (niche_homogeneous ? "true" : "false") +
         "\n";
  out += std::string("clamp = ") + (niche_clamp ? "true" : "false") + "\n";
  out += "\n[numerics]\n";
  out += "h = " + fmt17(h) + "\n";
  out += "X0 = " + fmt17(X0) + "\n";
  out += "growth = " + fmt17(growth) + "\n";
  out += "stop_tol = " + fmt17(stop_tol) + "\n";
  out += "max_steps = " + std::to_string(max_steps) + "\n";
  out += "max_x = " + fmt17(max_x) + "\n";
  out += "eigen_tol = " + fmt17(eigen_tol) + "\n";
  out += "dt = " + fmt17(dt) + "\n";
  out += "horizon = " + fmt17(horizon) + "\n";
  out += "steady_tol = " + fmt17(steady_tol) + "\n";
  out += "speed_tol = " + fmt17(speed_tol) + "\n";
  out += "threshold_tol = " + fmt17(threshold_tol) + "\n";
  out += "d_max = " + fmt17(d_max) + "\n";
  out += "scan_points = " + std::to_string(scan_points) + "\n";
  out += "X = " + fmt17(X) + "\n";
  out += "\n[command]\n";
  out += "name = " + quote(command) + "\n";
  out += "axis = " + quote(axis) + "\n";
  out += "values = " + quote(values) + "\n";
  out += "robin_nu = " + fmt17(robin_nu) + "\n";
  out += std::string("with_verdicts = ") + (with_verdicts ? "true" : "false") +
         "\n";
  out += "check = [";
  for (std::size_t i = 0; i < checks.size(); ++i)
    out += (i ? ", " : "") + quote(checks[i]);
  out += "]\n";
  out += "frame_stride = " + std::to_string(frame_stride) + "\n";
  out += "jobs = " + std::to_string(jobs) + "\n";
  out += "seed = " + std::to_string(seed) + "\n";
  // no [output] section: the echo describes the run, not where it landed,
  // so identical runs into different directories stay byte-identical
  return out;
}

}  // namespace roadfield
