#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "gfsim/cumulant.hpp"
#include "gfsim/jump_measure.hpp"
#include "gfsim/rng.hpp"

namespace gfsim {

/// Jumps with |y| < delta are not simulated. They are replaced by a drift
/// correction and, optionally, a Gaussian term with their variance.
struct SmallJumpPolicy {
  double delta = 1e-3;
  bool gaussian = false;
  double grid_step = 0.05;  // largest gap between path knots
  double rate_budget = 1e7;
  /// When set, the drift matches ψ at this exponent instead of the mean.
  std::optional<double> match_exponent;
};

enum class EventKind { jump, small_child, knot };

/// One step of a simulated Lévy path: the continuous part moves by `increment`
/// over `gap` units of time (linearly), then the event happens.
struct LevyEvent {
  double gap = 0.0;
  double increment = 0.0;
  EventKind kind = EventKind::knot;
  double jump = 0.0;  // EventKind::jump: y; EventKind::small_child: the sub-cutoff y < 0
};

/// Compound Poisson + drift (+ Gaussian) approximation of a Lévy process.
class LevyDriver {
 public:
  LevyDriver(const LevyTriplet& t, const SmallJumpPolicy& policy);

  /// Also emit sub-cutoff child events at `rate`, with y drawn from the
  /// distribution proportional to (1 - e^y)^omega Λ(dy) on (-delta, 0).
  void enable_small_children(double omega, double rate);

  LevyEvent next(Rng& rng) const;

  double drift() const { return drift_; }
  double sigma() const { return sigma_; }
  double rate_negative() const { return rate_neg_; }
  double rate_positive() const { return rate_pos_; }
  double small_child_rate() const { return rate_small_; }
  /// ∫_{|y|<delta} (1 - e^y)^omega Λ(dy) for the omega passed to enable_small_children.
  double small_child_mass() const { return small_mass_; }
  /// ∫_{|y|>=delta, y<0} (1 - e^y)^omega Λ(dy).
  double resolved_child_mass(double omega) const;
  /// Mean of the simulated process at time 1.
  double simulated_mean() const;
  /// log E exp(q X(1)) of the simulated process.
  double simulated_psi(double q) const;
  const SmallJumpPolicy& policy() const { return policy_; }
  const LevyTriplet& triplet() const { return triplet_; }

 private:
  LevyTriplet triplet_;
  SmallJumpPolicy policy_;
  double drift_ = 0.0;
  double sigma_ = 0.0;
  double rate_neg_ = 0.0;
  double rate_pos_ = 0.0;
  double rate_small_ = 0.0;
  double small_mass_ = 0.0;
  double knot_gap_ = 1.0;
  std::shared_ptr<const PanelSampler> neg_, pos_, small_;
};

struct PathSkeleton {
  double horizon = 0.0;
  double drift = 0.0;
  double sigma = 0.0;
  std::vector<double> times;       // jump times in (0, horizon]
  std::vector<double> jump_sizes;  // jump sizes at those times
  // Piecewise-linear geometry: the path is linear from (knot_times[i],
  // knot_after[i]) to (knot_times[i+1], knot_before[i+1]).
  std::vector<double> knot_times;
  std::vector<double> knot_before;
  std::vector<double> knot_after;

  double value(double t) const;
  double end_value() const { return knot_after.back(); }
};

PathSkeleton sample_path(const LevyTriplet& t, double horizon, const SmallJumpPolicy& policy, Rng& rng);
PathSkeleton sample_path(const LevyDriver& driver, double horizon, Rng& rng);

}  // namespace gfsim
