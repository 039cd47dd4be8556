#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gfsim/levy.hpp"
#include "gfsim/stats.hpp"

namespace gfsim {

/// ∫_0^len exp(a (level + slope s)) ds, exact.
inline double clock_integral(double a, double level, double slope, double len) {
  double z = a * slope * len;
  double phi = std::abs(z) < 1e-8 ? 1.0 + 0.5 * z : std::expm1(z) / z;
  return std::exp(a * level) * len * phi;
}

/// The s >= 0 with clock_integral(a, level, slope, s) = target, or +inf when
/// the integral stays below target for all s.
inline double clock_inverse(double a, double level, double slope, double target) {
  double scaled = target * std::exp(-a * level);
  double k = a * slope;
  if (std::abs(k * scaled) < 1e-12) return scaled * (1.0 - 0.5 * k * scaled);
  double arg = k * scaled;
  if (arg <= -1.0) return std::numeric_limits<double>::infinity();
  return std::log1p(arg) / k;
}

struct PssmpSegment {
  double t0, t1;      // real time
  double u0, u1;      // Lévy time
  double level;       // ξ(u0+)
  double slope;
};

/// X(t) = x exp(ξ(τ(t x^α))) on a piecewise-linear Lévy skeleton.
struct PssmpPath {
  std::vector<PssmpSegment> segments;
  double x = 1.0;
  double alpha = -0.5;
  bool absorbed = false;
  std::optional<double> absorption_time;
  bool start_approximated = false;  // started from a floor instead of 0

  double end_time() const { return segments.empty() ? 0.0 : segments.back().t1; }
  /// Value at real time t in [0, end_time()]; 0 after absorption.
  double value(double t) const;
  /// Lévy time τ corresponding to real time t.
  double levy_time(double t) const;
  /// Sizes |ΔX| of the negative jumps and their real times.
  std::vector<std::pair<double, double>> negative_jumps() const;
};

PssmpPath lamperti_forward(const PathSkeleton& skeleton, double x, double alpha);

struct AbsorptionResult {
  double value = 0.0;          // clock integral plus the expected remainder
  double partial = 0.0;        // clock integral over the simulated stretch
  double residual_bound = 0.0; // e^{|α| L} times the tail factor
  double end_level = 0.0;
  double levy_time = 0.0;
  bool complete = false;
};

/// Absorption time of the pssMp started at 1: ∫_0^inf exp(|α| ξ(s)) ds over a
/// finite skeleton, with tail_factor = E ∫_0^inf exp(|α| ξ') ds for a fresh copy.
AbsorptionResult absorption_time(const PathSkeleton& skeleton, double alpha, double tail_factor,
                                 double tol_abs = 1e-6);

struct HorizonPolicy {
  double kill_level = -25.0;   // stop once ξ falls below this level ...
  double levy_horizon = 1e3;   // ... or after this much Lévy time
  int max_doublings = 3;       // horizon extensions for unresolved paths
  double tol_abs = 1e-6;       // lowers the kill level until the residual bound is below this
};

/// Streams the driver until absorption is resolved (see HorizonPolicy).
AbsorptionResult simulate_absorption(const LevyDriver& driver, double alpha, double tail_factor,
                                     const HorizonPolicy& policy, Rng& rng);

/// E ∫_0^inf e^{|α| ξ} ds = 1 / -ψ(|α|) for the simulated process, or +inf.
double absorption_tail_factor(const LevyDriver& driver, double alpha);

struct ExpFunctionalEstimate {
  double power = 0.0;
  EstimateWithCI estimate;
  std::string horizon_policy;
  double residual_bound = 0.0;
  std::uint64_t unresolved = 0;
  bool divergence_warning = false;
  std::vector<double> batch_means;  // running estimate after each doubling batch
};

ExpFunctionalEstimate exp_functional_moment(const LevyTriplet& triplet, double alpha, double power,
                                            std::uint64_t n_replicas, std::uint64_t seed,
                                            const SmallJumpPolicy& jumps, const HorizonPolicy& horizon = {},
                                            unsigned workers = 1);

}  // namespace gfsim

namespace gfsim {

/// Sorted sample of absorption times I of a pssMp started at 1: an empirical
/// distribution function for P(I <= t) and a source of independent draws.
class AbsorptionTable {
 public:
  AbsorptionTable() = default;
  explicit AbsorptionTable(std::vector<double> samples);

  static AbsorptionTable build(const LevyTriplet& triplet, double alpha, const SmallJumpPolicy& jumps,
                               std::uint64_t n, std::uint64_t seed, const HorizonPolicy& horizon = {},
                               unsigned workers = 1);

  double cdf(double t) const;
  double draw(Rng& rng) const { return samples_[rng.index(samples_.size())]; }
  std::size_t size() const { return samples_.size(); }
  const std::vector<double>& samples() const { return samples_; }
  std::uint64_t unresolved() const { return unresolved_; }

 private:
  std::vector<double> samples_;
  std::uint64_t unresolved_ = 0;
};

}  // namespace gfsim
