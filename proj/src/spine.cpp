#include "gfsim/spine.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "gfsim/error.hpp"
#include "gfsim/parallel.hpp"

namespace gfsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double spine_omega(double theta, SpineSign sign) {
  StableFamily fam(theta);
  return sign == SpineSign::minus ? fam.omega_minus() : fam.omega_plus();
}

}  // namespace

LevyTriplet spine_triplet(double theta, SpineSign sign) {
  static std::mutex mu;
  static std::map<std::pair<double, int>, double> drifts;
  JumpMeasureSpec pi = spine_measure(theta, sign);
  auto key = std::make_pair(theta, static_cast<int>(sign));
  {
    std::lock_guard<std::mutex> lk(mu);
    auto it = drifts.find(key);
    if (it != drifts.end()) return LevyTriplet(it->second, 0.0, pi);
  }
  double omega = spine_omega(theta, sign);
  double b = kappa_theta_derivative(theta, omega) - psi_mean(LevyTriplet(0.0, 0.0, pi));
  std::lock_guard<std::mutex> lk(mu);
  drifts[key] = b;
  return LevyTriplet(b, 0.0, pi);
}

double spine_tilt_deviation(double theta, SpineSign sign) {
  static std::mutex mu;
  static std::map<std::pair<double, int>, double> cache;
  auto key = std::make_pair(theta, static_cast<int>(sign));
  {
    std::lock_guard<std::mutex> lk(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  LevyTriplet t = spine_triplet(theta, sign);
  double omega = spine_omega(theta, sign);
  double lo = theta - omega, hi = 2.0 * theta + 1.0 - omega;
  double worst = 0.0;
  for (int i = 1; i <= 5; ++i) {
    double q = lo + (hi - lo) * i / 6.0;
    worst = std::max(worst, std::abs(psi_eval(t, q) - kappa_theta_closed(theta, omega + q)));
  }
  std::lock_guard<std::mutex> lk(mu);
  cache[key] = worst;
  return worst;
}

void SpineConfig::validate() const {
  if (!(theta > 1.0 && theta <= 1.5)) throw DomainError("theta must lie in (1, 3/2]");
  if (!(x >= 0.0)) throw DomainError("start value must be nonnegative");
  if (sign == SpineSign::minus && !(x > 0.0)) throw DomainError("the minus spine needs a positive start");
  if (!(x0_floor > 0.0)) throw DomainError("x0_floor must be positive");
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  double dev = spine_tilt_deviation(theta, sign);
  if (!(dev < 1e-8)) throw DomainError("spine exponent does not match the tilted cumulant");
}

PssmpPath simulate_spine(const SpineConfig& cfg, Rng& rng) {
  cfg.validate();
  LevyDriver driver(spine_triplet(cfg.theta, cfg.sign), cfg.jumps);
  const double alpha = 1.0 - cfg.theta, a = -alpha;
  const bool floor_start = cfg.x == 0.0;
  const double x = floor_start ? cfg.x0_floor : cfg.x;
  const double scale = std::pow(x, a);

  PathSkeleton sk;
  sk.drift = driver.drift();
  sk.sigma = driver.sigma();
  sk.knot_times.push_back(0.0);
  sk.knot_before.push_back(0.0);
  sk.knot_after.push_back(0.0);
  double u = 0.0, xi = 0.0, clock = 0.0;
  double stop = cfg.absorption.kill_level;
  double tail = kInf;
  if (cfg.sign == SpineSign::minus) {
    tail = absorption_tail_factor(driver, alpha);
    if (std::isfinite(tail)) stop = std::min(stop, std::log(cfg.absorption.tol_abs / tail) / a);
  }
  const double budget = cfg.horizon / scale;
  const double guard = cfg.absorption.levy_horizon * std::ldexp(1.0, cfg.absorption.max_doublings);
  bool absorbed = false;
  for (;;) {
    LevyEvent e = driver.next(rng);
    double slope = e.increment / e.gap;
    double c = clock_integral(a, xi, slope, e.gap);
    if (cfg.sign == SpineSign::plus && clock + c >= budget) {
      double v = std::min(clock_inverse(a, xi, slope, budget - clock), e.gap);
      u += v;
      xi += slope * v;
      sk.knot_times.push_back(u);
      sk.knot_before.push_back(xi);
      sk.knot_after.push_back(xi);
      break;
    }
    clock += c;
    u += e.gap;
    xi += e.increment;
    double before = xi;
    if (e.kind == EventKind::jump) {
      xi += e.jump;
      sk.times.push_back(u);
      sk.jump_sizes.push_back(e.jump);
    }
    sk.knot_times.push_back(u);
    sk.knot_before.push_back(before);
    sk.knot_after.push_back(xi);
    if (cfg.sign == SpineSign::minus && xi < stop) {
      absorbed = true;
      break;
    }
    if (u > guard) break;
  }
  sk.horizon = u;
  PssmpPath p = lamperti_forward(sk, x, alpha);
  p.start_approximated = floor_start;
  if (absorbed) {
    p.absorbed = true;
    p.absorption_time = p.end_time() + scale * std::exp(a * xi) * tail;
  }
  return p;
}

std::shared_ptr<const AbsorptionTable> spine_absorption_table(double theta, std::uint64_t n, std::uint64_t seed,
                                                              const SmallJumpPolicy& jumps,
                                                              const HorizonPolicy& horizon, unsigned workers) {
  if (n == 0) throw DomainError("absorption table needs at least one replica");
  return std::make_shared<const AbsorptionTable>(AbsorptionTable::build(
      spine_triplet(theta, SpineSign::minus), 1.0 - theta, jumps, n, seed, horizon, workers));
}

std::vector<EstimateWithCI> prob_I_leq(const std::vector<double>& ts, double theta, std::uint64_t n,
                                       std::uint64_t seed, const SmallJumpPolicy& jumps,
                                       const HorizonPolicy& horizon, unsigned workers) {
  for (double t : ts)
    if (!(t > 0.0)) throw DomainError("prob_I_leq needs t > 0");
  auto table = spine_absorption_table(theta, n, seed, jumps, horizon, workers);
  std::vector<EstimateWithCI> out;
  for (double t : ts) {
    EstimateWithCI e;
    e.seed = seed;
    for (double v : table->samples()) e.add(v <= t ? 1.0 : 0.0);
    out.push_back(e);
  }
  return out;
}

EstimateWithCI prob_I_leq(double t, double theta, std::uint64_t n, std::uint64_t seed, const SmallJumpPolicy& jumps,
                          const HorizonPolicy& horizon, unsigned workers) {
  return prob_I_leq(std::vector<double>{t}, theta, n, seed, jumps, horizon, workers).front();
}

namespace {

TruncationPolicy unit_tree_policy(const P0PlusPlan& plan) {
  TruncationPolicy p = plan.tree;
  p.x_min = 1.0;
  p.kill_placement = KillPlacement::spine_delay;
  return p;
}

}  // namespace

P0PlusSampler::P0PlusSampler(const P0PlusPlan& plan)
    : plan_(plan),
      params_(StableFamily(plan.theta).params()),
      spine_(spine_triplet(plan.theta, SpineSign::plus), plan.spine_jumps) {
  if (!plan.delays) throw DomainError("the 𝒫₀⁺ sampler needs an absorption table");
  if (!(plan.resolve > 0.0)) throw DomainError("resolve must be positive");
  if (!(plan.x0_floor > 0.0)) throw DomainError("x0_floor must be positive");
  if (plan.small_child_rate > 0.0) spine_.enable_small_children(params_.omega_minus, plan.small_child_rate);
  sim_ = std::make_shared<const TreeSimulator>(params_, unit_tree_policy(plan), plan.delays);
}

double P0PlusSampler::sample(double t, std::uint64_t key) const {
  if (!(t > 0.0)) throw DomainError("area_under_P0plus needs t > 0");
  const double a = -params_.alpha, om = params_.omega_minus;
  const double cut = plan_.resolve * std::pow(t, 1.0 / a);
  const double cut_time = std::pow(cut, a);
  const double scale = std::pow(plan_.x0_floor, a);
  const double budget = t / scale;
  const double small_weight =
      spine_.small_child_rate() > 0.0 ? spine_.small_child_mass() / spine_.small_child_rate() : 0.0;
  const AbsorptionTable& F = *plan_.delays;
  Rng rng(key);
  double xi = 0.0, clock = 0.0, total = 0.0;
  std::uint64_t ordinal = 0;
  for (;;) {
    LevyEvent e = spine_.next(rng);
    double slope = e.increment / e.gap;
    double c = clock_integral(a, xi, slope, e.gap);
    if (clock + c >= budget) break;
    clock += c;
    xi += e.increment;
    if (e.kind == EventKind::knot) continue;
    if (e.kind == EventKind::jump && e.jump > 0.0) {
      xi += e.jump;
      continue;
    }
    double now = scale * clock;
    double size = plan_.x0_floor * std::exp(xi);
    double child = size * -std::expm1(e.jump);
    double left = t - now;
    if (e.kind == EventKind::small_child) {
      total += std::pow(size, om) * small_weight * F.cdf(left / std::pow(child, a));
      continue;
    }
    xi += e.jump;
    ++ordinal;
    if (child < cut) {
      total += std::pow(child, om) * F.cdf(left / std::pow(child, a));
    } else {
      CellTree sub = grow_tree(*sim_, child / cut, left / cut_time, derive_key(key, ordinal));
      total += std::pow(cut, om) * area_profile(sub).at(left / cut_time);
    }
  }
  return total;
}

double area_under_P0plus(double t, const P0PlusSampler& sampler, Rng& rng) {
  return sampler.sample(t, rng.key());
}

}  // namespace gfsim
