#include "gfsim/cumulant.hpp"

#include <boost/math/special_functions/cos_pi.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/sin_pi.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "gfsim/error.hpp"
#include "gfsim/quadrature.hpp"

namespace gfsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// value * exp(logd) without forming inf * 0 near the singular end.
double times_density(double value, double logd) {
  if (value == 0.0 || logd == -kInf) return 0.0;
  return std::copysign(std::exp(std::log(std::abs(value)) + logd), value);
}

// Σ_{k>=2} s^k (q^k - q) / k!  for small |s|: e^{qs} - 1 - q(e^s - 1).
double psi_series(double s, double q) {
  double sum = 0.0, sk = s, qk = q, fact = 1.0;
  for (int k = 2; k <= 16; ++k) {
    sk *= s;
    qk *= q;
    fact *= k;
    sum += sk * (qk - q) / fact;
  }
  return sum;
}

bool series_ok(double u, double q) { return u * std::max(1.0, std::abs(q)) < 0.1; }

void check_local_power(const std::function<double(double)>& f, const char* what) {
  double u1 = 1e-12, u2 = 1e-10;
  double f1 = f(u1), f2 = f(u2);
  if (f1 <= 0.0 || f2 <= 0.0) return;
  double p = std::log(f2 / f1) / std::log(u2 / u1);
  if (p <= -1.0 + 1e-9) throw DivergenceError(std::string(what) + ": integrand not integrable at 0");
}

double neg_psi_integral(const JumpMeasureSpec& m, double q, double cutoff) {
  if (!m.has(Side::negative)) return 0.0;
  auto f = [&](double u) {
    double l = m.log_density(Side::negative, u);
    if (l == -kInf) return 0.0;
    double g = series_ok(u, q) ? psi_series(-u, q) : std::expm1(-q * u) - q * std::expm1(-u);
    return times_density(g, l);
  };
  double growth = std::max(0.0, -q);
  double top = m.upper(Side::negative, growth);
  std::vector<double> br;
  if (cutoff > 0.0) br.push_back(cutoff);
  if (m.neg_lower > 0.0) br.push_back(m.neg_lower);
  return integrate_half_line(f, top, m.neg_decay - growth, br).value;
}

double pos_psi_integral(const JumpMeasureSpec& m, double q, double cutoff) {
  if (!m.has(Side::positive)) return 0.0;
  bool below_one = m.compensation == Compensation::exponential_below_one;
  auto f = [&](double u) {
    double l = m.log_density(Side::positive, u);
    if (l == -kInf) return 0.0;
    if (below_one && u > 1.0) return std::exp(q * u + l) - std::exp(l);
    if (series_ok(u, q)) return times_density(psi_series(u, q), l);
    if (u < 1.0) return times_density(std::expm1(q * u) - q * std::expm1(u), l);
    return std::exp(q * u + l) - std::exp(l) - q * (std::exp(u + l) - std::exp(l));
  };
  double growth = std::max(q, below_one ? 0.0 : 1.0);
  if (!(m.pos_decay > growth)) throw DivergenceError(m.name + ": e^{qy} not integrable at +infinity");
  double top = m.upper(Side::positive, growth);
  std::vector<double> br;
  if (cutoff > 0.0) br.push_back(cutoff);
  if (m.pos_lower > 0.0) br.push_back(m.pos_lower);
  if (below_one) br.push_back(1.0);
  return integrate_half_line(f, top, m.pos_decay - growth, br).value;
}

double log1mexp(double u) { return std::log(-std::expm1(-u)); }

}  // namespace

LevyTriplet::LevyTriplet(double b, double sigma2, JumpMeasureSpec j)
    : drift_b(b), gaussian_sigma2(sigma2), jumps(std::move(j)) {
  if (!(sigma2 >= 0.0)) throw DomainError("gaussian_sigma2 must be nonnegative");
  for (Side s : {Side::negative, Side::positive}) {
    if (!jumps.has(s)) continue;
    auto f = [&](double u) { return times_density(u * u, jumps.log_density(s, u)); };
    check_local_power(f, "min(1, y^2) integrability");
    double top = std::min(1.0, jumps.extent(s));
    if (jumps.lower(s) > 0.0)
      integrate_log_panels(f, jumps.lower(s), std::max(top, jumps.lower(s)));
    else
      integrate_singular_at_zero(f, top);
  }
  if (jumps.has(Side::positive) && jumps.compensation == Compensation::exponential && !(jumps.pos_decay > 1.0))
    throw DomainError(jumps.name + ": e^y is not integrable on (1, inf); use exponential_below_one compensation");
}

double psi_eval(const LevyTriplet& t, double q, double cutoff) {
  if (q == 0.0) return 0.0;
  return t.drift_b * q + 0.5 * t.gaussian_sigma2 * q * q + neg_psi_integral(t.jumps, q, cutoff) +
         pos_psi_integral(t.jumps, q, cutoff);
}

double psi_mean(const LevyTriplet& t) {
  const auto& m = t.jumps;
  double mean = t.drift_b;
  if (m.has(Side::negative)) {
    // y + h(y) at y = -u: -u + 1 - e^{-u} = -(u + expm1(-u))
    auto f = [&](double u) {
      double g = u < 1e-3 ? -(u * u / 2 - u * u * u / 6 + u * u * u * u / 24) : -(u + std::expm1(-u));
      return times_density(g, m.log_density(Side::negative, u));
    };
    std::vector<double> br;
    if (m.neg_lower > 0.0) br.push_back(m.neg_lower);
    mean += integrate_half_line(f, m.upper(Side::negative), m.neg_decay, br).value;
  }
  if (m.has(Side::positive)) {
    bool below_one = m.compensation == Compensation::exponential_below_one;
    auto f = [&](double u) {
      double l = m.log_density(Side::positive, u);
      if (below_one && u > 1.0) return times_density(u, l);
      double g = u < 1e-3 ? -(u * u / 2 + u * u * u / 6 + u * u * u * u / 24) : u - std::expm1(u);
      return times_density(g, l);
    };
    double growth = below_one ? 0.0 : 1.0;
    std::vector<double> br;
    if (below_one) br.push_back(1.0);
    if (m.pos_lower > 0.0) br.push_back(m.pos_lower);
    mean += integrate_half_line(f, m.upper(Side::positive, growth), m.pos_decay - growth, br).value;
  }
  return mean;
}

double child_moment(const JumpMeasureSpec& m, double q, double above, double below) {
  if (!m.has(Side::negative)) return 0.0;
  auto f = [&](double u) {
    double l = m.log_density(Side::negative, u);
    return l == -kInf ? 0.0 : std::exp(q * log1mexp(u) + l);
  };
  double top = std::min(below, m.upper(Side::negative));
  double lo = std::max(above, m.neg_lower);
  if (!(top > lo)) return 0.0;
  if (lo > 0.0) {
    if (std::isfinite(m.neg_extent) || top < 1.0) return integrate_log_panels(f, lo, top).value;
    double v = integrate_log_panels(f, lo, std::max(lo, 1.0)).value;
    return v + integrate_half_line([&](double u) { return f(u + std::max(lo, 1.0)); },
                                   top - std::max(lo, 1.0), m.neg_decay, {})
                   .value;
  }
  check_local_power(f, "(1 - e^y)^q");
  return integrate_half_line(f, top, m.neg_decay, {}).value;
}

double kappa_eval(const LevyTriplet& t, double q, double cutoff) {
  if (!(q > 0.0)) throw DomainError("kappa requires q > 0");
  std::vector<double> br;
  double extra = 0.0;
  if (cutoff > 0.0 && t.jumps.has(Side::negative) && cutoff < t.jumps.upper(Side::negative))
    extra = child_moment(t.jumps, q, 0.0, cutoff) + child_moment(t.jumps, q, cutoff);
  else
    extra = child_moment(t.jumps, q);
  return psi_eval(t, q, cutoff) + extra;
}

double kappa_theta_closed(double theta, double q) {
  if (!(theta > 1.0 && theta <= 1.5)) throw DomainError("theta must lie in (1, 3/2]");
  if (!(q > theta && q < 2.0 * theta + 1.0)) throw DomainError("q outside (theta, 2 theta + 1)");
  return boost::math::cos_pi(q - theta) * std::tgamma(q - theta) * std::tgamma(1.0 + 2.0 * theta - q) / M_PI;
}

double kappa_theta_derivative(double theta, double q) {
  double k = kappa_theta_closed(theta, q);
  double g = std::tgamma(q - theta) * std::tgamma(1.0 + 2.0 * theta - q);
  return k * (boost::math::digamma(q - theta) - boost::math::digamma(1.0 + 2.0 * theta - q)) -
         boost::math::sin_pi(q - theta) * g;
}

CramerRoots find_roots(const std::function<double(double)>& kappa, std::pair<double, double> bracket, double tol) {
  auto [lo, hi] = bracket;
  if (!(lo < hi)) throw DomainError("empty bracket");
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = kappa(c), fd = kappa(d);
  while (b - a > 1e-10) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = kappa(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = kappa(d);
    }
  }
  CramerRoots r;
  r.minimizer = 0.5 * (a + b);
  double fmin = kappa(r.minimizer);
  if (!(fmin < 0.0)) throw NoSignChangeError("kappa has no negative value in the bracket");

  auto bisect = [&](double x0, double x1) {
    // kappa(x0) and kappa(x1) have opposite signs
    double f0 = kappa(x0);
    while (std::abs(x1 - x0) > tol) {
      double xm = 0.5 * (x0 + x1);
      double fm = kappa(xm);
      if (fm == 0.0) return xm;
      if ((fm < 0.0) == (f0 < 0.0)) {
        x0 = xm;
        f0 = fm;
      } else {
        x1 = xm;
      }
    }
    return 0.5 * (x0 + x1);
  };
  if (kappa(lo) > 0.0) r.omega_minus = bisect(r.minimizer, lo);
  if (kappa(hi) > 0.0) r.omega_plus = bisect(r.minimizer, hi);
  if (!r.omega_minus && !r.omega_plus) throw NoSignChangeError("kappa does not change sign in the bracket");

  const double h = 1e-5;
  auto deriv = [&](double x) { return (kappa(x + h) - kappa(x - h)) / (2 * h); };
  if (r.omega_minus && !(deriv(*r.omega_minus) < 0.0)) throw NoSignChangeError("kappa'(omega_-) is not negative");
  if (r.omega_plus && !(deriv(*r.omega_plus) > 0.0)) throw NoSignChangeError("kappa'(omega_+) is not positive");
  return r;
}

double calibrate_drift(const JumpMeasureSpec& jumps, double sigma2, double omega_minus) {
  LevyTriplet t(0.0, sigma2, jumps);
  return -kappa_eval(t, omega_minus) / omega_minus;
}

StableFamily::StableFamily(double th) : theta(th) {
  if (!(theta > 1.0 && theta <= 1.5)) throw DomainError("theta must lie in (1, 3/2]");
}

double StableFamily::kappa(double q) const { return kappa_theta_closed(theta, q); }

LevyTriplet StableFamily::triplet() const {
  static std::mutex mu;
  static std::map<double, double> drifts;
  JumpMeasureSpec lam = canonical_lambda(theta);
  double b;
  {
    std::lock_guard<std::mutex> lk(mu);
    auto it = drifts.find(theta);
    if (it != drifts.end()) return LevyTriplet(it->second, 0.0, lam);
  }
  b = calibrate_drift(lam, 0.0, omega_minus());
  std::lock_guard<std::mutex> lk(mu);
  drifts[theta] = b;
  return LevyTriplet(b, 0.0, lam);
}

GFParams StableFamily::params() const {
  GFParams p;
  p.alpha = alpha();
  p.triplet = triplet();
  p.omega_minus = omega_minus();
  p.omega_plus = omega_plus();
  p.rho = rho();
  return p;
}

void validate(const GFParams& p, double tol_root) {
  if (!(p.alpha < 0.0)) throw DomainError("alpha must be negative");
  if (!(p.omega_minus > 0.0 && p.omega_minus < p.omega_plus)) throw DomainError("need 0 < omega_- < omega_+");
  auto k = [&](double q) { return kappa_eval(p.triplet, q); };
  if (!(std::abs(k(p.omega_minus)) < tol_root)) throw DomainError("kappa(omega_-) is not zero");
  if (!(std::abs(k(p.omega_plus)) < tol_root)) throw DomainError("kappa(omega_+) is not zero");
  const double h = 1e-4;
  if (!(k(p.omega_minus + h) - k(p.omega_minus - h) < 0.0)) throw DomainError("kappa'(omega_-) >= 0");
  if (!(k(p.omega_plus + h) - k(p.omega_plus - h) > 0.0)) throw DomainError("kappa'(omega_+) <= 0");
  double lower = std::max(2.0 * p.omega_minus - p.omega_plus, -p.alpha);
  if (!(p.rho > lower && p.rho < p.omega_minus)) throw DomainError("rho violates the regular-variation window");
}

double kappa_domain_sup(const LevyTriplet& t, double q) {
  if (!t.jumps.has(Side::positive)) return kInf;
  return std::max(0.0, t.jumps.pos_decay - q);
}

std::pair<double, double> numeric_decay_bracket(const JumpMeasureSpec& m) {
  if (!m.has(Side::positive) || std::isfinite(m.pos_extent)) return {kInf, kInf};
  const double u1 = 50.0, u2 = 100.0;
  double l1 = m.log_density(Side::positive, u1), l2 = m.log_density(Side::positive, u2);
  if (l1 == -kInf || l2 == -kInf) return {kInf, kInf};
  // e^{r u} f(u) grows between u1 and u2 iff r > rate; bisect on r.
  auto grows = [&](double r) { return l2 + r * u2 >= l1 + r * u1; };
  double lo = 0.0, hi = 1.0;
  while (!grows(hi)) hi *= 2.0;
  while (hi - lo > 1e-9) {
    double mid = 0.5 * (lo + hi);
    (grows(mid) ? hi : lo) = mid;
  }
  return {lo, hi};
}

LogBoundExponents log_bound_exponents(const GFParams& p) {
  LogBoundExponents e;
  e.q_star = std::min(p.omega_plus - p.omega_minus, kappa_domain_sup(p.triplet, p.omega_plus));
  double a = std::abs(p.alpha);
  e.q0 = p.omega_minus * (1.0 / a + 1.0 / e.q_star + std::max(0.0, (a / p.rho) * (1.0 / e.q_star - 1.0 / a)));
  return e;
}

LogBoundExponents log_bound_exponents(const StableFamily& f) {
  GFParams p;
  p.alpha = f.alpha();
  p.omega_minus = f.omega_minus();
  p.omega_plus = f.omega_plus();
  p.rho = f.rho();
  LogBoundExponents e;
  e.q_star = f.theta - 0.5;
  double a = std::abs(p.alpha);
  e.q0 = p.omega_minus * (1.0 / a + 1.0 / e.q_star + std::max(0.0, (a / p.rho) * (1.0 / e.q_star - 1.0 / a)));
  return e;
}

bool upper_envelope_hypothesis(const GFParams& p) {
  double q = p.omega_plus + p.omega_minus + p.alpha;
  try {
    return std::isfinite(kappa_eval(p.triplet, q));
  } catch (const DivergenceError&) {
    return false;
  }
}

}  // namespace gfsim
