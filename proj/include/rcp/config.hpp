#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "rcp/error.hpp"

namespace rcp {

// Flat `key = value` settings; '#' starts a comment, blank lines are ignored.
class Config {
 public:
  static Config parse(std::istream& in, const std::string& origin = "config") {
    Config c;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const auto s = trim(line);
      if (s.empty()) continue;
      const auto eq = s.find('=');
      if (eq == std::string::npos) {
        throw InputError(origin + ":" + std::to_string(lineno) + ": expected `key = value`");
      }
      const auto key = trim(s.substr(0, eq));
      const auto value = trim(s.substr(eq + 1));
      if (key.empty()) throw InputError(origin + ":" + std::to_string(lineno) + ": empty key");
      c.values_[key] = value;
    }
    return c;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read config file " + path);
    return parse(in, path);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::optional<std::string> get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<double> get_double(const std::string& key) const {
    const auto v = get(key);
    if (!v) return std::nullopt;
    try {
      std::size_t used = 0;
      const double d = std::stod(*v, &used);
      if (used != v->size()) throw std::invalid_argument(*v);
      return d;
    } catch (const std::exception&) {
      throw InputError("config key " + key + ": not a number: " + *v);
    }
  }

  std::optional<std::uint64_t> get_uint(const std::string& key) const {
    const auto v = get(key);
    if (!v) return std::nullopt;
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || p != v->data() + v->size()) {
      throw InputError("config key " + key + ": not a nonnegative integer: " + *v);
    }
    return out;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
};

}  // namespace rcp
