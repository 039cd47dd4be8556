#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace gfsim {

/// Flat `key = value` text with `[section]` headers and `#` comments. Keys
/// are addressed as "section.key"; only keys declared in the schema are
/// accepted.
class Config {
 public:
  Config();  // defaults only

  static Config parse(std::istream& is);
  static Config load(const std::string& path);

  double real(const std::string& key) const;
  std::uint64_t integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::string text(const std::string& key) const;

  /// Overrides a value as if it came from a file line (line 0).
  void set(const std::string& key, const std::string& value);

  /// Canonical "section.key = value" lines in key order.
  std::string canonical() const;
  std::uint64_t hash() const;

  static const std::vector<std::pair<std::string, std::string>>& schema();

 private:
  void check(const std::string& key, const std::string& value, int line) const;

  std::map<std::string, std::string> values_;
};

}  // namespace gfsim
