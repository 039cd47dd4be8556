#include "gfsim/levy.hpp"

#include <algorithm>
#include <cmath>

#include "gfsim/error.hpp"
#include "gfsim/quadrature.hpp"

namespace gfsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::shared_ptr<const PanelSampler> try_table(const JumpMeasureSpec& m, Side s, double delta) {
  if (!m.has(s) || m.upper(s) <= std::max(delta, m.lower(s))) return nullptr;
  return jump_table(m, s, delta);
}

// ∫ g(u) density(s, u) du over u in [a, upper(s, growth)].
template <class G>
double side_integral(const JumpMeasureSpec& m, Side s, double a, double growth, G g) {
  if (!m.has(s)) return 0.0;
  double lo = std::max(a, m.lower(s));
  double hi = m.upper(s, growth);
  if (!(hi > lo)) return 0.0;
  auto f = [&](double u) {
    double l = m.log_density(s, u);
    return l == -kInf ? 0.0 : g(u, l);
  };
  return integrate_log_panels(f, lo, hi).value;
}

// ∫_{|y| < delta} y^2 Λ(dy)
double small_jump_variance(const JumpMeasureSpec& m, double delta) {
  double v = 0.0;
  for (Side s : {Side::negative, Side::positive}) {
    if (!m.has(s) || m.lower(s) >= delta) continue;
    double top = std::min(delta, m.extent(s));
    auto f = [&](double u) {
      double l = m.log_density(s, u);
      return l == -kInf ? 0.0 : std::exp(2.0 * std::log(u) + l);
    };
    if (m.lower(s) > 0.0)
      v += integrate_log_panels(f, m.lower(s), top).value;
    else
      v += integrate_singular_at_zero(f, top).value;
  }
  return v;
}

}  // namespace

LevyDriver::LevyDriver(const LevyTriplet& t, const SmallJumpPolicy& policy) : triplet_(t), policy_(policy) {
  if (!(policy.delta > 0.0)) throw DomainError("jump cutoff delta must be positive");
  const auto& m = triplet_.jumps;
  neg_ = try_table(m, Side::negative, policy.delta);
  pos_ = try_table(m, Side::positive, policy.delta);
  rate_neg_ = neg_ ? neg_->total() : 0.0;
  rate_pos_ = pos_ ? pos_->total() : 0.0;
  if (rate_neg_ + rate_pos_ > policy.rate_budget)
    throw RateOverflowError("jump rate " + std::to_string(rate_neg_ + rate_pos_) + " exceeds the budget");
  double var = triplet_.gaussian_sigma2;
  if (policy.gaussian) var += small_jump_variance(m, policy.delta);
  sigma_ = std::sqrt(var);
  if (policy.match_exponent) {
    double q = *policy.match_exponent;
    double target = psi_eval(triplet_, q);
    drift_ = 0.0;
    drift_ = (target - simulated_psi(q)) / q;
  } else {
    double big = -side_integral(m, Side::negative, policy.delta, 0.0,
                                [](double u, double l) { return std::exp(std::log(u) + l); }) +
                 side_integral(m, Side::positive, policy.delta, 0.0,
                               [](double u, double l) { return std::exp(std::log(u) + l); });
    drift_ = psi_mean(triplet_) - big;
  }
  knot_gap_ = sigma_ > 0.0 ? policy.grid_step : std::max(policy.grid_step, 1.0);
}

void LevyDriver::enable_small_children(double omega, double rate) {
  const auto& m = triplet_.jumps;
  if (!m.has(Side::negative) || m.neg_lower >= policy_.delta || !(rate > 0.0)) {
    small_.reset();
    rate_small_ = 0.0;
    small_mass_ = 0.0;
    return;
  }
  small_ = small_child_table(m, policy_.delta, omega);
  small_mass_ = child_moment(m, omega, 0.0, policy_.delta);
  rate_small_ = rate;
}

double LevyDriver::resolved_child_mass(double omega) const {
  return child_moment(triplet_.jumps, omega, policy_.delta);
}

double LevyDriver::simulated_mean() const {
  const auto& m = triplet_.jumps;
  auto first = [](double u, double l) { return std::exp(std::log(u) + l); };
  return drift_ - side_integral(m, Side::negative, policy_.delta, 0.0, first) +
         side_integral(m, Side::positive, policy_.delta, 0.0, first);
}

double LevyDriver::simulated_psi(double q) const {
  const auto& m = triplet_.jumps;
  double v = drift_ * q + 0.5 * sigma_ * sigma_ * q * q;
  v += side_integral(m, Side::negative, policy_.delta, std::max(0.0, -q),
                     [q](double u, double l) { return std::exp(-q * u + l) - std::exp(l); });
  v += side_integral(m, Side::positive, policy_.delta, std::max(0.0, q),
                     [q](double u, double l) { return std::exp(q * u + l) - std::exp(l); });
  return v;
}

LevyEvent LevyDriver::next(Rng& rng) const {
  LevyEvent e;
  double total = rate_neg_ + rate_pos_ + rate_small_;
  double gap = total > 0.0 ? rng.exponential(total) : kInf;
  if (gap > knot_gap_) {
    e.gap = knot_gap_;
    e.kind = EventKind::knot;
  } else {
    e.gap = gap;
    double pick = rng.uniform() * total;
    if (pick < rate_neg_) {
      e.kind = EventKind::jump;
      e.jump = -neg_->sample(rng);
    } else if (pick < rate_neg_ + rate_pos_) {
      e.kind = EventKind::jump;
      e.jump = pos_->sample(rng);
    } else {
      e.kind = EventKind::small_child;
      e.jump = -small_->sample(rng);
    }
  }
  e.increment = drift_ * e.gap;
  if (sigma_ > 0.0) e.increment += sigma_ * std::sqrt(e.gap) * rng.normal();
  return e;
}

double PathSkeleton::value(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= horizon) return end_value();
  auto it = std::upper_bound(knot_times.begin(), knot_times.end(), t);
  std::size_t i = static_cast<std::size_t>(it - knot_times.begin()) - 1;
  double t0 = knot_times[i], t1 = knot_times[i + 1];
  double w = (t - t0) / (t1 - t0);
  return knot_after[i] + w * (knot_before[i + 1] - knot_after[i]);
}

PathSkeleton sample_path(const LevyDriver& driver, double horizon, Rng& rng) {
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  PathSkeleton p;
  p.horizon = horizon;
  p.drift = driver.drift();
  p.sigma = driver.sigma();
  p.knot_times.push_back(0.0);
  p.knot_before.push_back(0.0);
  p.knot_after.push_back(0.0);
  double t = 0.0, x = 0.0;
  for (;;) {
    LevyEvent e = driver.next(rng);
    if (t + e.gap >= horizon) {
      double rem = horizon - t;
      double inc = driver.drift() * rem;
      if (driver.sigma() > 0.0) inc += driver.sigma() * std::sqrt(rem) * rng.normal();
      x += inc;
      p.knot_times.push_back(horizon);
      p.knot_before.push_back(x);
      p.knot_after.push_back(x);
      break;
    }
    t += e.gap;
    x += e.increment;
    double before = x;
    if (e.kind == EventKind::jump) {
      x += e.jump;
      p.times.push_back(t);
      p.jump_sizes.push_back(e.jump);
    }
    p.knot_times.push_back(t);
    p.knot_before.push_back(before);
    p.knot_after.push_back(x);
  }
  return p;
}

PathSkeleton sample_path(const LevyTriplet& t, double horizon, const SmallJumpPolicy& policy, Rng& rng) {
  return sample_path(LevyDriver(t, policy), horizon, rng);
}

}  // namespace gfsim
