#include "gfsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "gfsim/error.hpp"

namespace gfsim {

namespace {

enum class Kind { real, integer, flag, text };

struct Entry {
  const char* key;
  const char* value;
  Kind kind;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> e = {
      {"run.seed", "20240601", Kind::integer},
      {"run.workers", "1", Kind::integer},
      {"levy.delta", "0.05", Kind::real},
      {"levy.gaussian", "true", Kind::flag},
      {"levy.grid_step", "0.05", Kind::real},
      {"levy.rate_budget", "1e7", Kind::real},
      {"lamperti.kill_level", "-25", Kind::real},
      {"lamperti.levy_horizon", "1000", Kind::real},
      {"lamperti.max_doublings", "3", Kind::integer},
      {"lamperti.tol_abs", "1e-6", Kind::real},
      {"cellsystem.x_min", "0.02", Kind::real},
      {"cellsystem.max_cells", "10000000", Kind::integer},
      {"cellsystem.small_child_rate", "50", Kind::real},
      {"cellsystem.martingale_x_min", "0.05", Kind::real},
      {"spine.x0_floor", "1e-6", Kind::real},
      {"spine.resolve", "0.05", Kind::real},
      {"spine.table_size", "20000", Kind::integer},
      {"harness.n_trees", "10000", Kind::integer},
      {"harness.n_paths", "10000", Kind::integer},
      {"harness.n_exfunc", "100000", Kind::integer},
      {"harness.n_ks", "2000", Kind::integer},
      {"harness.n_envelope", "200", Kind::integer},
      {"harness.ks_level", "0.05", Kind::real},
  };
  return e;
}

const Entry* find(const std::string& key) {
  for (const auto& e : entries())
    if (key == e.key) return &e;
  return nullptr;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_real(const std::string& s, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_integer(const std::string& s, std::uint64_t& out) {
  auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

bool parse_flag(const std::string& s, bool& out) {
  if (s == "true" || s == "1" || s == "yes") return out = true, true;
  if (s == "false" || s == "0" || s == "no") return out = false, true;
  return false;
}

}  // namespace

Config::Config() {
  for (const auto& e : entries()) values_[e.key] = e.value;
}

const std::vector<std::pair<std::string, std::string>>& Config::schema() {
  static const std::vector<std::pair<std::string, std::string>> s = [] {
    std::vector<std::pair<std::string, std::string>> v;
    for (const auto& e : entries()) v.emplace_back(e.key, e.value);
    return v;
  }();
  return s;
}

void Config::check(const std::string& key, const std::string& value, int line) const {
  const Entry* e = find(key);
  if (!e) throw ConfigError(key, line, "unknown key");
  double r;
  std::uint64_t i;
  bool f;
  switch (e->kind) {
    case Kind::real:
      if (!parse_real(value, r)) throw ConfigError(key, line, "expected a real number, got '" + value + "'");
      break;
    case Kind::integer:
      if (!parse_integer(value, i))
        throw ConfigError(key, line, "expected a nonnegative integer, got '" + value + "'");
      break;
    case Kind::flag:
      if (!parse_flag(value, f)) throw ConfigError(key, line, "expected true or false, got '" + value + "'");
      break;
    case Kind::text:
      break;
  }
}

Config Config::parse(std::istream& is) {
  Config c;
  std::string raw, section;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    auto hash = raw.find('#');
    std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(s, line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw ConfigError(s, line, "empty section name");
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(s, line, "expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(key, line, "missing key");
    if (section.empty()) throw ConfigError(key, line, "key outside of a section");
    std::string full = section + "." + key;
    if (value.empty()) throw ConfigError(full, line, "missing value");
    c.check(full, value, line);
    c.values_[full] = value;
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError(path, 0, "cannot open config file");
  return parse(f);
}

void Config::set(const std::string& key, const std::string& value) {
  check(key, value, 0);
  values_[key] = value;
}

double Config::real(const std::string& key) const {
  double r = 0.0;
  parse_real(text(key), r);
  return r;
}

std::uint64_t Config::integer(const std::string& key) const {
  std::uint64_t i = 0;
  parse_integer(text(key), i);
  return i;
}

bool Config::flag(const std::string& key) const {
  bool f = false;
  parse_flag(text(key), f);
  return f;
}

std::string Config::text(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(key, 0, "unknown key");
  return it->second;
}

std::string Config::canonical() const {
  std::ostringstream os;
  for (const auto& [k, v] : values_) os << k << " = " << v << '\n';
  return os.str();
}

std::uint64_t Config::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace gfsim
