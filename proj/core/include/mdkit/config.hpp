#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mdkit {

/// Invalid configuration: unknown key, malformed value, inconsistent settings.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat "section.key = value" text. Blank lines and lines starting with '#'
/// are ignored. Only keys from known_keys() are accepted.
class Config {
 public:
  static Config parse(std::string_view text, std::string_view origin = "<string>");
  static Config load(const std::filesystem::path& path);
  static const std::vector<std::string>& known_keys();

  /// Accepts "key=value"; used for command-line overrides.
  void set_assignment(std::string_view assignment);
  void set(const std::string& key, const std::string& value);
  /// Entries of `other` replace ours.
  void merge(const Config& other);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  long get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::array<double, 3> get_vec3(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return values_; }
  /// Sorted "key = value" lines; parse(to_text()) reproduces the config.
  std::string to_text() const;

 private:
  std::map<std::string, std::string> values_;
};

/// Parses "0.25", "1/128", "-3e-2" (a single '/' divides two numbers).
double parse_number(std::string_view text);
std::vector<std::string> split_list(std::string_view text, char sep = ',');

}  // namespace mdkit
