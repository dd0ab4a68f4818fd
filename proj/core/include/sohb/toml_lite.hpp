#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sohb {

/// Flat TOML subset: `key = value` lines with strings, numbers, booleans
/// and numeric arrays, plus # comments. Section headers are rejected; the
/// simulation config format is intentionally flat.
class TomlTable {
 public:
  static TomlTable parse(const std::string& text);
  static TomlTable parse_file(const std::string& path);

  bool contains(const std::string& key) const;

  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_double_array(const std::string& key) const;

  const std::map<std::string, std::string>& raw() const { return raw_; }

 private:
  const std::string& fetch(const std::string& key) const;
  std::map<std::string, std::string> raw_;  // key -> raw value text
};

}  // namespace sohb
