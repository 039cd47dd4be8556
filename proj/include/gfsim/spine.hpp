#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "gfsim/cellsystem.hpp"
#include "gfsim/cumulant.hpp"
#include "gfsim/lamperti.hpp"
#include "gfsim/levy.hpp"
#include "gfsim/stats.hpp"

namespace gfsim {

/// Triplet of η⁻ (sign = minus) or η⁺ (plus), with the drift fixed so that the
/// mean equals κ′_θ(ω±); the Laplace exponent is then κ_θ(ω± + q).
LevyTriplet spine_triplet(double theta, SpineSign sign);

/// Largest |φ±(q) - κ_θ(ω± + q)| over five sample points.
double spine_tilt_deviation(double theta, SpineSign sign);

struct SpineConfig {
  SpineSign sign = SpineSign::minus;
  double theta = 1.5;
  double x = 1.0;           // 0 only for plus: start at x0_floor instead
  double x0_floor = 1e-4;
  double horizon = 10.0;    // real time (plus); minus paths run to absorption
  SmallJumpPolicy jumps{};
  HorizonPolicy absorption{};

  void validate() const;
};

/// A Y⁻ path run until absorption, or a Y⁺ path run to the horizon.
PssmpPath simulate_spine(const SpineConfig& config, Rng& rng);

/// Fraction of Y⁻ paths from 1 absorbed by time t, one entry per t, all t
/// evaluated on the same replicas.
std::vector<EstimateWithCI> prob_I_leq(const std::vector<double>& t, double theta, std::uint64_t n_replicas,
                                       std::uint64_t seed, const SmallJumpPolicy& jumps = {},
                                       const HorizonPolicy& horizon = {}, unsigned workers = 1);
EstimateWithCI prob_I_leq(double t, double theta, std::uint64_t n_replicas, std::uint64_t seed,
                          const SmallJumpPolicy& jumps = {}, const HorizonPolicy& horizon = {},
                          unsigned workers = 1);

/// Absorption-time table of Y⁻ from 1.
std::shared_ptr<const AbsorptionTable> spine_absorption_table(double theta, std::uint64_t n, std::uint64_t seed,
                                                              const SmallJumpPolicy& jumps = {},
                                                              const HorizonPolicy& horizon = {},
                                                              unsigned workers = 1);

/// Shared state for sampling A(t) under 𝒫₀⁺.
struct P0PlusPlan {
  double theta = 1.5;
  double x0_floor = 1e-4;
  /// Spine children of size >= resolve * t^{1/|α|} are grown as trees with
  /// that x_min; smaller ones contribute their conditional mean.
  double resolve = 0.05;
  SmallJumpPolicy spine_jumps{};
  TruncationPolicy tree{};  // x_min and horizon are set per call
  double small_child_rate = 50.0;
  std::shared_ptr<const AbsorptionTable> delays;  // I of Y⁻, also the F in the conditional means
};

class P0PlusSampler {
 public:
  explicit P0PlusSampler(const P0PlusPlan& plan);

  /// One sample of A(t) under 𝒫₀⁺ (Y⁺ started at x0_floor).
  double sample(double t, std::uint64_t key) const;
  const P0PlusPlan& plan() const { return plan_; }

 private:
  P0PlusPlan plan_;
  GFParams params_;
  LevyDriver spine_;
  std::shared_ptr<const TreeSimulator> sim_;
};

double area_under_P0plus(double t, const P0PlusSampler& sampler, Rng& rng);

}  // namespace gfsim
