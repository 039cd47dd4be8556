#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gfsim/config.hpp"

namespace gfsim {

inline constexpr const char* kCsvSchema = "gfsim-csv/1";

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows{};

  void add(std::vector<std::string> row);
};

std::string fmt(double v);
std::string fmt(std::uint64_t v);
inline std::string fmt(bool b) { return b ? "true" : "false"; }

struct Report {
  std::string id;
  std::string anchor;
  std::optional<bool> pass;  // empty for report-only experiments
  std::vector<Table> tables;
  std::vector<std::string> notes;
};

struct RunManifest {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> versions;
  double delta = 0.0;
  double x_min = 0.0;
  double x0_floor = 0.0;
  double wall_seconds = 0.0;
};

struct RunContext {
  Config config;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  double scale = 1.0;                     // multiplies every replica count
  std::optional<std::uint64_t> replicas;  // overrides every replica count

  /// Replica count for a budget key of the harness section.
  std::uint64_t count(const std::string& key) const;
  /// Independent stream for one part of an experiment.
  std::uint64_t stream(const std::string& id, std::uint64_t part) const;
};

struct Experiment {
  std::string id;
  std::string anchor;
  std::function<Report(const RunContext&)> run;
};

const std::vector<Experiment>& experiments();
const Experiment& find_experiment(const std::string& id);

RunManifest make_manifest(const RunContext& ctx);
Report run_experiment(const std::string& id, const RunContext& ctx, RunManifest* manifest = nullptr);

/// CSV with `#` manifest lines (no wall time, so equal manifests give equal bytes).
void write_csv(std::ostream& os, const Report& r, const RunManifest& m);
void write_json(std::ostream& os, const Report& r, const RunManifest& m);
void write_manifest_json(std::ostream& os, const Report& r, const RunManifest& m);

}  // namespace gfsim
