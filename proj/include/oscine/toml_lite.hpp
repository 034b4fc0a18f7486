#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace oscine {

/// Strict subset of TOML covering the experiment configs: top-level and
/// [table] sections, key = value with string / bool / integer / float /
/// flat arrays of numbers, and # comments. Keys flatten to "table.key".
class TomlLite {
 public:
  using Value = std::variant<std::string, bool, double, std::vector<double>>;

  static TomlLite parse_file(const std::string& path);
  static TomlLite parse_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, Value>& values() const { return values_; }

  double get_number(const std::string& key, double fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_array(const std::string& key,
                                const std::vector<double>& fallback) const;

  /// Applies a "key=value" override (the --set flag syntax).
  void set_override(const std::string& assignment);

 private:
  std::map<std::string, Value> values_;
};

}  // namespace oscine
