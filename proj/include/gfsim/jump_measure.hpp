#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "gfsim/rng.hpp"

namespace gfsim {

enum class Side { negative, positive };
enum class SpineSign { minus, plus };

/// How ψ compensates jumps: h(y) = 1 - e^y everywhere, or only for y <= 1
/// (needed when e^y is not integrable at +infinity).
enum class Compensation { exponential, exponential_below_one };

/// A Lévy measure on ℝ\{0}, described per side in the variable u = |y| > 0.
/// Log-densities return -inf off the support.
struct JumpMeasureSpec {
  std::string name;
  std::vector<double> params;  // identifies the measure for caching
  std::function<double(double)> log_density_neg;  // u -> log density at y = -u
  std::function<double(double)> log_density_pos;  // u -> log density at y = +u
  double neg_lower = 0.0;  // support of the negative side is [neg_lower, neg_extent] in u
  double neg_extent = 0.0;
  double pos_lower = 0.0;
  double pos_extent = 0.0;
  double neg_decay = std::numeric_limits<double>::infinity();  // density ~ e^{-neg_decay u}, u -> inf
  double pos_decay = std::numeric_limits<double>::infinity();
  Compensation compensation = Compensation::exponential;

  bool has(Side s) const;
  double lower(Side s) const { return s == Side::negative ? neg_lower : pos_lower; }
  double extent(Side s) const { return s == Side::negative ? neg_extent : pos_extent; }
  double decay(Side s) const { return s == Side::negative ? neg_decay : pos_decay; }
  double log_density(Side s, double u) const;
  double density(Side s, double u) const;
  /// Density at y on ℝ\{0}.
  double density(double y) const;
  /// Λ((-inf, -x]) for x > 0.
  double neg_tail(double x) const;
  /// Λ([x, inf)) for x > 0.
  double pos_tail(double x) const;
  /// Finite upper integration limit for side s (extent, or decay truncation).
  double upper(Side s, double extra_growth = 0.0) const;
  std::uint64_t content_hash() const;
};

JumpMeasureSpec zero_measure();

/// Uniform density `mass / (b - a)` on [a, b] in y (a < b, both of one sign).
JumpMeasureSpec uniform_measure(double a, double b, double mass);

double stable_c_minus(double theta);
double stable_c_plus(double theta);

/// The larger-fragment representative of the jump measure of the cell process
/// for the stable-maps family.
JumpMeasureSpec canonical_lambda(double theta);

/// Jump measures of the tilted spine processes η⁻ / η⁺.
JumpMeasureSpec spine_measure(double theta, SpineSign sign);

/// The involution T(y) = log(1 - e^y) on (-inf, 0).
struct SplitMapping {
  static double apply(double y);
  static double abs_derivative(double y);
  /// Density of the push-forward of the negative part of Λ under T, at y < 0.
  static double pushforward_density(const JumpMeasureSpec& m, double y);
};

/// Piecewise-exact sampler from a density on [lo, hi] with log-spaced panels.
/// Panel choice uses the tabulated cumulative masses; the position inside a
/// panel is drawn by rejection against a uniform envelope, so the draws follow
/// the density exactly up to the panel-mass quadrature.
class PanelSampler {
 public:
  PanelSampler(std::function<double(double)> density, double lo, double hi, int panels = 1024);

  double total() const { return cumulative_.back(); }
  double lo() const { return nodes_.front(); }
  double hi() const { return nodes_.back(); }
  /// Mass of [lo, x].
  double mass_below(double x) const;
  double sample(Rng& rng) const;
  int panels() const { return static_cast<int>(nodes_.size()) - 1; }

 private:
  std::function<double(double)> density_;
  std::vector<double> nodes_;
  std::vector<double> cumulative_;
  std::vector<double> bound_;
  std::vector<double> squeeze_;  // below the density on the panel; skips most evaluations
  std::vector<int> guide_;       // guide_[k]: first panel reaching mass k / size * total
};

/// Sampler of |y| for jumps with |y| >= delta on one side. Tables are cached by
/// content hash of (measure, side, delta).
std::shared_ptr<const PanelSampler> jump_table(const JumpMeasureSpec& m, Side s, double delta);

/// Sampler for u in (0, delta) with density (1 - e^{-u})^omega times the
/// negative-side density: the mass distribution of sub-cutoff children.
std::shared_ptr<const PanelSampler> small_child_table(const JumpMeasureSpec& m, double delta, double omega);

/// Draw a jump y with |y| >= delta from side s.
double sample_jump(const JumpMeasureSpec& m, Side s, double delta, Rng& rng);

struct RegularVariationFit {
  double rho = 0.0;
  double index_estimate = 0.0;  // log-log regression over the whole grid
  double local_index = 0.0;     // slope between the two smallest grid points
  std::vector<std::pair<double, double>> slowly_varying_samples;  // (x, Λ̄(x) x^rho)
  std::vector<double> pi_minus_ratio;                              // tends to 1 as x -> 0
};

RegularVariationFit tail_equivalence_check(double theta, const std::vector<double>& x_grid);

}  // namespace gfsim
