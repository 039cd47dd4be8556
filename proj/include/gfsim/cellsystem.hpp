#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "gfsim/cumulant.hpp"
#include "gfsim/error.hpp"
#include "gfsim/lamperti.hpp"
#include "gfsim/levy.hpp"

namespace gfsim {

/// Ulam-Harris word; the root is the empty word.
struct CellLabel {
  std::vector<std::uint32_t> word;

  std::size_t generation() const { return word.size(); }
  CellLabel parent() const;
  CellLabel child(std::uint32_t k) const;
  std::string str() const;  // "r" for the root, otherwise "1.3.2"
  static CellLabel parse(const std::string& s);
  bool operator==(const CellLabel& o) const { return word == o.word; }
};

enum class Truncation { none, killed_below, generation_capped, horizon };

const char* truncation_name(Truncation t);

/// Where the mass of a cell that is not simulated further is placed in time.
enum class KillPlacement {
  at_height,    // at the time the cell is cut
  spine_delay,  // at that time plus size^{|α|} I', I' drawn from an absorption table
};

struct TruncationPolicy {
  double x_min = 1e-2;
  std::uint32_t max_generation = 64;  // cells of this generation are recorded, not grown
  std::uint64_t max_cells = 10'000'000;
  double horizon = std::numeric_limits<double>::infinity();
  SmallJumpPolicy jumps{};
  KillPlacement kill_placement = KillPlacement::at_height;
  /// Rate (per unit Lévy time) of sampled sub-cutoff children in the area
  /// profile; 0 disables the correction.
  double small_child_rate = 0.0;
};

struct CellRecord {
  std::int64_t parent = -1;  // index in CellTree::records, -1 for the root
  std::uint32_t ordinal = 0; // last letter of the label
  std::uint32_t generation = 0;
  double birth_time = 0.0;
  double birth_size = 0.0;
  bool grown = false;
  double lifetime = std::numeric_limits<double>::quiet_NaN();  // real time simulated (grown cells)
  Truncation truncation = Truncation::none;
  double end_size = 0.0;     // size when a grown cell was cut
  double end_mass = 0.0;     // end_size^{ω₋}: stands in for all later descendants
  double compensator = 0.0;  // expected ω₋-mass of sub-cutoff children along the simulated life
  std::uint64_t key = 0;
};

struct MassAtom {
  double time;   // cut + delay
  double mass;
  double cut;    // time the mass stopped being simulated
  double scale;  // size^{|α|} of the delay, 0 for KillPlacement::at_height
};

struct CellTree {
  double x = 1.0;
  double alpha = -0.5;
  double omega = 2.0;
  TruncationPolicy policy;
  std::uint64_t seed = 0;
  std::vector<CellRecord> records;
  std::vector<MassAtom> atoms;
  std::uint64_t events = 0;

  CellLabel label(std::size_t i) const;
};

class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, std::shared_ptr<const CellTree> partial)
      : Error(what), partial_(std::move(partial)) {}
  const CellTree& partial() const { return *partial_; }

 private:
  std::shared_ptr<const CellTree> partial_;
};

/// Shared, immutable state for growing many trees with the same law and policy.
class TreeSimulator {
 public:
  TreeSimulator(const GFParams& params, const TruncationPolicy& policy,
                std::shared_ptr<const AbsorptionTable> delays = nullptr);

  const GFParams& params() const { return params_; }
  const TruncationPolicy& policy() const { return policy_; }
  const LevyDriver& driver() const { return driver_; }
  double small_child_mass() const { return small_mass_; }
  double delay(double size, Rng& rng) const;
  double delay_scale(double size) const;

 private:
  GFParams params_;
  TruncationPolicy policy_;
  LevyDriver driver_;
  double small_mass_ = 0.0;
  std::shared_ptr<const AbsorptionTable> delays_;
};

CellTree grow_tree(const TreeSimulator& sim, double x, std::uint64_t seed);
/// Same law with a different horizon (used for rescaled subtrees).
CellTree grow_tree(const TreeSimulator& sim, double x, double horizon, std::uint64_t seed);
CellTree grow_tree(const GFParams& params, double x, const TruncationPolicy& policy, std::uint64_t seed,
                   std::shared_ptr<const AbsorptionTable> delays = nullptr);

/// M(n) = Σ_{|u|=n} χ_u(0)^{ω₋}, with cut cells standing in for their descendants.
double area_martingale(const CellTree& tree, std::uint32_t n);

struct AreaProfile {
  std::vector<double> breakpoints;
  std::vector<double> cumulative;
  double total = 0.0;           // 𝓜, including mass placed beyond the last breakpoint
  double time_bias_scale = 0.0; // x_min^{|α|}: spread of cut masses in time

  double at(double t) const;
};

AreaProfile area_profile(const CellTree& tree);

/// E[A(t) | tree]: each atom's random delay replaced by its distribution
/// function, delays.cdf((t - cut) / scale).
double expected_area(const CellTree& tree, double t, const AbsorptionTable& delays);

/// Independent A(t) from the Eve cell's children, each subtree regrown.
double markov_branching_resample(const TreeSimulator& sim, const CellTree& tree, double t, std::uint64_t seed);

/// One line per record: label birth_time birth_size lifetime|flag.
void write_tree(std::ostream& os, const CellTree& tree);
/// Reads the records written by write_tree (labels, times, sizes, flags).
std::vector<CellRecord> read_tree_records(std::istream& is);
void write_profile_csv(std::ostream& os, const AreaProfile& p);

}  // namespace gfsim
