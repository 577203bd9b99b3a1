#include "mdkit/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mdkit {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_plain(std::string_view s) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw std::invalid_argument("not a number: '" + t + "'");
  }
  return v;
}

}  // namespace

double parse_number(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_plain(text);
  const double num = parse_plain(text.substr(0, slash));
  const double den = parse_plain(text.substr(slash + 1));
  if (den == 0.0) throw std::invalid_argument("division by zero in '" + std::string(text) + "'");
  return num / den;
}

std::vector<std::string> split_list(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  const std::string last = trim(cur);
  if (!last.empty() || !out.empty()) out.push_back(last);
  return out;
}

const std::vector<std::string>& Config::known_keys() {
  static const std::vector<std::string> keys = {
      "solver.kind",
      "preset.name",
      "grid.n",
      "grid.bounds",
      "md.epsilon",
      "md.delta",
      "md.splitting",
      "md.dealias",
      "md.init_v",
      "md.init_a",
      "md.gauge_warn_fraction",
      "time.dt",
      "time.t_final",
      "init.kind",
      "init.mode",
      "init.allow_aliased",
      "init.center",
      "init.width",
      "init.chi",
      "init.phase",
      "init.amplitude",
      "external.v",
      "external.v_strength",
      "external.a",
      "wkb.caustic_threshold",
      "wkb.cg_tolerance",
      "sp.self_potential",
      "output.dir",
      "output.dump_times",
      "output.csv_stride",
      "output.slice_x3",
      "runtime.threads",
  };
  return keys;
}

void Config::set(const std::string& key, const std::string& value) {
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
  values_[key] = value;
}

void Config::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  }
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

Config Config::parse(std::string_view text, std::string_view origin) {
  Config cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line.substr(0, line.find('#')));
    if (t.empty()) continue;
    try {
      cfg.set_assignment(t);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void Config::merge(const Config& other) {
  for (const auto& [k, v] : other.values_) values_[k] = v;
}

const std::string& Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing configuration key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key) const {
  try {
    return parse_number(get(key));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

long Config::get_int(const std::string& key) const {
  const double v = get_double(key);
  if (std::floor(v) != v) throw ConfigError("key '" + key + "': expected an integer");
  return static_cast<long>(v);
}

bool Config::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + v + "'");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(get(key))) {
    try {
      out.push_back(parse_number(item));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("key '" + key + "': " + e.what());
    }
  }
  return out;
}

std::array<double, 3> Config::get_vec3(const std::string& key) const {
  const auto v = get_doubles(key);
  if (v.size() != 3) throw ConfigError("key '" + key + "': expected three comma-separated numbers");
  return {v[0], v[1], v[2]};
}

std::string Config::to_text() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

}  // namespace mdkit
