#include "sohb/toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "sohb/errors.hpp"

namespace sohb {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

/// Strips a trailing comment, respecting quoted strings.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

double parse_double(const std::string& key, const std::string& raw) {
  try {
    std::size_t used = 0;
    const double v = std::stod(raw, &used);
    if (trim(raw.substr(used)).empty()) return v;
  } catch (...) {
  }
  throw ConfigError("config key '" + key + "': expected a number, got '" + raw + "'");
}

}  // namespace

TomlTable TomlTable::parse(const std::string& text) {
  TomlTable t;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": tables are not supported; use flat keys");
    }
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
    }
    if (t.raw_.count(key)) {
      throw ConfigError("config: duplicate key '" + key + "'");
    }
    t.raw_[key] = value;
  }
  return t;
}

TomlTable TomlTable::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool TomlTable::contains(const std::string& key) const { return raw_.count(key) > 0; }

const std::string& TomlTable::fetch(const std::string& key) const {
  auto it = raw_.find(key);
  if (it == raw_.end()) throw ConfigError("config: missing required key '" + key + "'");
  return it->second;
}

double TomlTable::get_double(const std::string& key) const {
  return parse_double(key, fetch(key));
}

double TomlTable::get_double(const std::string& key, double fallback) const {
  return contains(key) ? get_double(key) : fallback;
}

std::int64_t TomlTable::get_int(const std::string& key) const {
  const std::string raw = fetch(key);
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
  if (ec != std::errc{} || p != raw.data() + raw.size()) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + raw + "'");
  }
  return v;
}

std::int64_t TomlTable::get_int(const std::string& key, std::int64_t fallback) const {
  return contains(key) ? get_int(key) : fallback;
}

std::string TomlTable::get_string(const std::string& key) const {
  std::string raw = fetch(key);
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
    return raw.substr(1, raw.size() - 2);
  }
  return raw;  // bare words tolerated
}

std::string TomlTable::get_string(const std::string& key, const std::string& fallback) const {
  return contains(key) ? get_string(key) : fallback;
}

bool TomlTable::get_bool(const std::string& key, bool fallback) const {
  if (!contains(key)) return fallback;
  const std::string raw = fetch(key);
  if (raw == "true") return true;
  if (raw == "false") return false;
  throw ConfigError("config key '" + key + "': expected true/false");
}

std::vector<double> TomlTable::get_double_array(const std::string& key) const {
  const std::string raw = fetch(key);
  if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']') {
    throw ConfigError("config key '" + key + "': expected [a, b, ...]");
  }
  std::vector<double> out;
  std::string body = raw.substr(1, raw.size() - 2);
  std::istringstream in(body);
  std::string item;
  while (std::getline(in, item, ',')) {
    const std::string v = trim(item);
    if (v.empty()) continue;
    out.push_back(parse_double(key, v));
  }
  return out;
}

}  // namespace sohb
