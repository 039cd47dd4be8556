#include "gfsim/lamperti.hpp"

#include <algorithm>
#include <sstream>

#include "gfsim/error.hpp"
#include "gfsim/parallel.hpp"

namespace gfsim {

double PssmpPath::levy_time(double t) const {
  if (segments.empty() || t <= 0.0) return 0.0;
  if (t >= end_time()) return segments.back().u1;
  auto it = std::upper_bound(segments.begin(), segments.end(), t,
                             [](double v, const PssmpSegment& s) { return v < s.t1; });
  const auto& s = *it;
  double a = std::abs(alpha);
  double v = clock_inverse(a, s.level, s.slope, (t - s.t0) / std::pow(x, a));
  return s.u0 + std::min(v, s.u1 - s.u0);
}

double PssmpPath::value(double t) const {
  if (absorbed && absorption_time && t >= *absorption_time) return 0.0;
  if (segments.empty()) return x;
  if (t <= 0.0) return x * std::exp(segments.front().level);
  if (t >= end_time()) {
    const auto& s = segments.back();
    return x * std::exp(s.level + s.slope * (s.u1 - s.u0));
  }
  auto it = std::upper_bound(segments.begin(), segments.end(), t,
                             [](double v, const PssmpSegment& s) { return v < s.t1; });
  const auto& s = *it;
  double a = std::abs(alpha);
  double v = std::min(clock_inverse(a, s.level, s.slope, (t - s.t0) / std::pow(x, a)), s.u1 - s.u0);
  return x * std::exp(s.level + s.slope * v);
}

std::vector<std::pair<double, double>> PssmpPath::negative_jumps() const {
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i + 1 < segments.size(); ++i) {
    const auto& s = segments[i];
    double end = s.level + s.slope * (s.u1 - s.u0);
    double next = segments[i + 1].level;
    if (next < end) out.emplace_back(s.t1, x * (std::exp(end) - std::exp(next)));
  }
  return out;
}

PssmpPath lamperti_forward(const PathSkeleton& sk, double x, double alpha) {
  if (!(x > 0.0)) throw DomainError("start value must be positive");
  if (!(alpha < 0.0)) throw DomainError("alpha must be negative");
  PssmpPath p;
  p.x = x;
  p.alpha = alpha;
  double a = -alpha, scale = std::pow(x, a), t = 0.0;
  for (std::size_t i = 0; i + 1 < sk.knot_times.size(); ++i) {
    double u0 = sk.knot_times[i], u1 = sk.knot_times[i + 1];
    double len = u1 - u0;
    if (!(len > 0.0)) continue;
    double level = sk.knot_after[i];
    double slope = (sk.knot_before[i + 1] - level) / len;
    double dt = scale * clock_integral(a, level, slope, len);
    p.segments.push_back({t, t + dt, u0, u1, level, slope});
    t += dt;
  }
  return p;
}

AbsorptionResult absorption_time(const PathSkeleton& sk, double alpha, double tail_factor, double tol_abs) {
  AbsorptionResult r;
  double a = -alpha;
  for (std::size_t i = 0; i + 1 < sk.knot_times.size(); ++i) {
    double len = sk.knot_times[i + 1] - sk.knot_times[i];
    if (!(len > 0.0)) continue;
    double level = sk.knot_after[i];
    r.partial += clock_integral(a, level, (sk.knot_before[i + 1] - level) / len, len);
  }
  r.end_level = sk.end_value();
  r.levy_time = sk.horizon;
  r.residual_bound = std::exp(a * r.end_level) * tail_factor;
  r.value = r.partial + (std::isfinite(tail_factor) ? r.residual_bound : 0.0);
  r.complete = r.residual_bound < tol_abs;
  return r;
}

double absorption_tail_factor(const LevyDriver& driver, double alpha) {
  double psi = driver.simulated_psi(-alpha);
  return psi < 0.0 ? 1.0 / -psi : std::numeric_limits<double>::infinity();
}

AbsorptionResult simulate_absorption(const LevyDriver& driver, double alpha, double tail_factor,
                                     const HorizonPolicy& policy, Rng& rng) {
  double a = -alpha;
  double stop = policy.kill_level;
  if (std::isfinite(tail_factor)) stop = std::min(stop, std::log(policy.tol_abs / tail_factor) / a);
  AbsorptionResult r;
  double u = 0.0, xi = 0.0, horizon = policy.levy_horizon;
  int doublings = 0;
  for (;;) {
    LevyEvent e = driver.next(rng);
    r.partial += clock_integral(a, xi, e.increment / e.gap, e.gap);
    u += e.gap;
    xi += e.increment;
    if (e.kind == EventKind::jump) xi += e.jump;
    if (xi < stop) {
      r.complete = true;
      break;
    }
    if (u >= horizon) {
      if (doublings >= policy.max_doublings) break;
      ++doublings;
      horizon *= 2.0;
    }
  }
  r.end_level = xi;
  r.levy_time = u;
  r.residual_bound = std::exp(a * xi) * tail_factor;
  r.value = r.partial + (std::isfinite(tail_factor) ? r.residual_bound : 0.0);
  if (!(r.residual_bound < policy.tol_abs)) r.complete = false;
  return r;
}

ExpFunctionalEstimate exp_functional_moment(const LevyTriplet& triplet, double alpha, double power,
                                            std::uint64_t n, std::uint64_t seed, const SmallJumpPolicy& jumps,
                                            const HorizonPolicy& horizon, unsigned workers) {
  LevyDriver driver(triplet, jumps);
  double tf = absorption_tail_factor(driver, alpha);
  struct Rep {
    double value;
    double residual;
    bool complete;
  };
  auto reps = parallel_map<Rep>(n, workers, [&](std::size_t i) {
    Rng rng(derive_key(seed, i));
    AbsorptionResult r = simulate_absorption(driver, alpha, tf, horizon, rng);
    return Rep{std::pow(r.value, power), r.residual_bound, r.complete};
  });
  ExpFunctionalEstimate out;
  out.power = power;
  std::ostringstream desc;
  desc << "kill_level=" << horizon.kill_level << " levy_horizon=" << horizon.levy_horizon
       << " max_doublings=" << horizon.max_doublings << " tol_abs=" << horizon.tol_abs;
  out.horizon_policy = desc.str();
  out.estimate.seed = seed;
  std::vector<double> batch_se;
  std::uint64_t next_check = std::min<std::uint64_t>(n, std::max<std::uint64_t>(1, n / 16));
  for (std::uint64_t i = 0; i < n; ++i) {
    out.estimate.add(reps[i].value);
    out.residual_bound = std::max(out.residual_bound, reps[i].residual);
    if (!reps[i].complete) ++out.unresolved;
    if (i + 1 == next_check) {
      out.batch_means.push_back(out.estimate.mean);
      batch_se.push_back(out.estimate.std_error());
      next_check = std::min<std::uint64_t>(n, 2 * next_check);
      if (i + 1 == n) next_check = n + 1;
    }
  }
  std::size_t k = out.batch_means.size();
  if (k >= 2) {
    double jump = std::abs(out.batch_means[k - 1] - out.batch_means[k - 2]);
    double scale = std::hypot(batch_se[k - 1], batch_se[k - 2]);
    out.divergence_warning = jump > 3.0 * scale;
  }
  return out;
}

}  // namespace gfsim

namespace gfsim {

AbsorptionTable::AbsorptionTable(std::vector<double> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) throw DomainError("absorption table needs samples");
  std::sort(samples_.begin(), samples_.end());
}

AbsorptionTable AbsorptionTable::build(const LevyTriplet& triplet, double alpha, const SmallJumpPolicy& jumps,
                                       std::uint64_t n, std::uint64_t seed, const HorizonPolicy& horizon,
                                       unsigned workers) {
  LevyDriver driver(triplet, jumps);
  double tf = absorption_tail_factor(driver, alpha);
  auto res = parallel_map<AbsorptionResult>(n, workers, [&](std::size_t i) {
    Rng rng(derive_key(seed, i));
    return simulate_absorption(driver, alpha, tf, horizon, rng);
  });
  std::vector<double> xs;
  xs.reserve(n);
  std::uint64_t bad = 0;
  for (const auto& r : res) {
    xs.push_back(r.value);
    if (!r.complete) ++bad;
  }
  AbsorptionTable t(std::move(xs));
  t.unresolved_ = bad;
  return t;
}

double AbsorptionTable::cdf(double t) const {
  auto it = std::upper_bound(samples_.begin(), samples_.end(), t);
  return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
}

}  // namespace gfsim
