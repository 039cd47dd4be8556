#include "gfsim/jump_measure.hpp"

#include <boost/math/special_functions/sin_pi.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>

#include "gfsim/error.hpp"
#include "gfsim/quadrature.hpp"

namespace gfsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(1 - e^{-u}) for u > 0, accurate for small u.
double log_one_minus_exp_neg(double u) { return std::log(-std::expm1(-u)); }

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h) {
  auto p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

void check_theta(double theta) {
  if (!(theta > 1.0 && theta <= 1.5)) throw DomainError("theta must lie in (1, 3/2]");
}

}  // namespace

bool JumpMeasureSpec::has(Side s) const {
  const auto& f = s == Side::negative ? log_density_neg : log_density_pos;
  return static_cast<bool>(f) && extent(s) > lower(s);
}

double JumpMeasureSpec::log_density(Side s, double u) const {
  if (!has(s) || u <= 0.0 || u < lower(s) || u > extent(s)) return -kInf;
  return s == Side::negative ? log_density_neg(u) : log_density_pos(u);
}

double JumpMeasureSpec::density(Side s, double u) const {
  double l = log_density(s, u);
  return l == -kInf ? 0.0 : std::exp(l);
}

double JumpMeasureSpec::density(double y) const {
  if (y < 0.0) return density(Side::negative, -y);
  if (y > 0.0) return density(Side::positive, y);
  return 0.0;
}

double JumpMeasureSpec::upper(Side s, double extra_growth) const {
  double e = extent(s);
  double d = decay(s) - extra_growth;
  if (!(d > 0.0)) throw DivergenceError(name + ": exponential moment diverges at infinity");
  if (std::isfinite(e)) return e;
  return decay_truncation(d);
}

namespace {

double side_tail(const JumpMeasureSpec& m, Side s, double x) {
  if (!(x > 0.0)) throw DomainError("tail argument must be positive");
  if (!m.has(s)) return 0.0;
  double a = std::max(x, m.lower(s));
  double b = m.upper(s);
  if (a >= b) return 0.0;
  auto f = [&](double u) { return m.density(s, u); };
  return integrate_log_panels(f, a, b).value;
}

}  // namespace

double JumpMeasureSpec::neg_tail(double x) const { return side_tail(*this, Side::negative, x); }
double JumpMeasureSpec::pos_tail(double x) const { return side_tail(*this, Side::positive, x); }

std::uint64_t JumpMeasureSpec::content_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a(name.data(), name.size(), h);
  for (double p : params) h = fnv1a(&p, sizeof p, h);
  return h;
}

JumpMeasureSpec zero_measure() {
  JumpMeasureSpec m;
  m.name = "zero";
  return m;
}

JumpMeasureSpec uniform_measure(double a, double b, double mass) {
  if (!(a < b) || (a < 0.0) != (b <= 0.0) || !(mass > 0.0))
    throw DomainError("uniform_measure needs a < b on one side of 0 and positive mass");
  JumpMeasureSpec m;
  m.name = "uniform";
  m.params = {a, b, mass};
  double logd = std::log(mass / (b - a));
  auto f = [logd](double) { return logd; };
  if (b <= 0.0) {
    m.log_density_neg = f;
    m.neg_lower = -b;
    m.neg_extent = -a;
  } else {
    m.log_density_pos = f;
    m.pos_lower = a;
    m.pos_extent = b;
  }
  return m;
}

double stable_c_minus(double theta) { return std::tgamma(theta + 1.0) / M_PI; }

double stable_c_plus(double theta) { return stable_c_minus(theta) * boost::math::sin_pi(theta - 0.5); }

JumpMeasureSpec canonical_lambda(double theta) {
  check_theta(theta);
  JumpMeasureSpec m;
  m.name = "canonical_lambda";
  m.params = {theta};
  double lcm = std::log(stable_c_minus(theta));
  m.log_density_neg = [=](double u) { return lcm + theta * u - (theta + 1.0) * log_one_minus_exp_neg(u); };
  m.neg_extent = std::log(2.0);
  m.neg_decay = kInf;
  double cp = stable_c_plus(theta);
  if (cp > 0.0) {
    double lcp = std::log(cp);
    m.log_density_pos = [=](double u) {
      return lcp - (2.0 * theta + 1.0) * u - (theta + 1.0) * log_one_minus_exp_neg(u);
    };
    m.pos_extent = kInf;
    m.pos_decay = 2.0 * theta + 1.0;
  }
  return m;
}

JumpMeasureSpec spine_measure(double theta, SpineSign sign) {
  check_theta(theta);
  double tilt = sign == SpineSign::minus ? 0.5 : 1.5;
  JumpMeasureSpec m;
  m.name = sign == SpineSign::minus ? "spine_minus" : "spine_plus";
  m.params = {theta};
  double lcm = std::log(stable_c_minus(theta));
  m.log_density_neg = [=](double u) { return lcm - tilt * u - (theta + 1.0) * log_one_minus_exp_neg(u); };
  m.neg_extent = kInf;
  m.neg_decay = tilt;
  double cp = stable_c_plus(theta);
  if (cp > 0.0) {
    double lcp = std::log(cp);
    double rate = theta + 1.0 - tilt;
    m.log_density_pos = [=](double u) { return lcp - rate * u - (theta + 1.0) * log_one_minus_exp_neg(u); };
    m.pos_extent = kInf;
    m.pos_decay = rate;
    if (rate <= 1.0) m.compensation = Compensation::exponential_below_one;
  }
  return m;
}

double SplitMapping::apply(double y) {
  if (!(y < 0.0)) throw DomainError("split mapping is defined on (-inf, 0)");
  return std::log(-std::expm1(y));
}

double SplitMapping::abs_derivative(double y) {
  if (!(y < 0.0)) throw DomainError("split mapping is defined on (-inf, 0)");
  return std::exp(y) / -std::expm1(y);
}

double SplitMapping::pushforward_density(const JumpMeasureSpec& m, double y) {
  return m.density(apply(y)) * abs_derivative(y);
}

PanelSampler::PanelSampler(std::function<double(double)> density, double lo, double hi, int panels)
    : density_(std::move(density)) {
  if (!(lo > 0.0 && hi > lo) || panels < 1) throw EmptySupportError("sampler support is empty");
  nodes_.resize(panels + 1);
  double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i <= panels; ++i) nodes_[i] = std::exp(llo + (lhi - llo) * i / panels);
  nodes_.front() = lo;
  nodes_.back() = hi;
  cumulative_.assign(panels + 1, 0.0);
  bound_.assign(panels, 0.0);
  squeeze_.assign(panels, 0.0);
  for (int i = 0; i < panels; ++i) {
    double a = nodes_[i], b = nodes_[i + 1];
    cumulative_[i + 1] = cumulative_[i] + gauss_legendre(density_, a, b);
    double mx = 0.0, mn = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 8; ++k) {
      double v = density_(a + (b - a) * k / 8.0);
      mx = std::max(mx, v);
      mn = std::min(mn, v);
    }
    bound_[i] = 1.01 * mx;
    squeeze_[i] = 0.99 * mn;
  }
  if (!(total() > 0.0) || !std::isfinite(total())) throw EmptySupportError("sampler has no mass");
  const int g = 4 * panels;
  guide_.resize(g);
  int i = 0;
  for (int k = 0; k < g; ++k) {
    double level = total() * k / g;
    while (i + 1 < panels && cumulative_[i + 1] <= level) ++i;
    guide_[k] = i;
  }
}

double PanelSampler::mass_below(double x) const {
  if (x <= lo()) return 0.0;
  if (x >= hi()) return total();
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  return cumulative_[i] + gauss_legendre(density_, nodes_[i], x);
}

double PanelSampler::sample(Rng& rng) const {
  double w = rng.uniform();
  double target = w * total();
  std::size_t last = nodes_.size() - 2;
  std::size_t i = guide_[std::min(guide_.size() - 1, static_cast<std::size_t>(w * guide_.size()))];
  while (i < last && cumulative_[i + 1] <= target) ++i;
  double a = nodes_[i], b = nodes_[i + 1];
  for (;;) {
    double u = a + (b - a) * rng.uniform();
    double v = rng.uniform() * bound_[i];
    if (v <= squeeze_[i] || v <= density_(u)) return u;
  }
}

namespace {

std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::uint64_t, std::shared_ptr<const PanelSampler>>& cache() {
  static std::map<std::uint64_t, std::shared_ptr<const PanelSampler>> c;
  return c;
}

template <class Build>
std::shared_ptr<const PanelSampler> cached(std::uint64_t key, Build build) {
  {
    std::lock_guard<std::mutex> lk(cache_mutex());
    auto it = cache().find(key);
    if (it != cache().end()) return it->second;
  }
  auto table = build();
  std::lock_guard<std::mutex> lk(cache_mutex());
  return cache().emplace(key, std::move(table)).first->second;
}

}  // namespace

std::shared_ptr<const PanelSampler> jump_table(const JumpMeasureSpec& m, Side s, double delta) {
  if (!m.has(s)) throw EmptySupportError(m.name + ": no jumps on requested side");
  std::uint64_t key = m.content_hash();
  int tag = s == Side::negative ? 1 : 2;
  key = fnv1a(&tag, sizeof tag, key);
  key = fnv1a(&delta, sizeof delta, key);
  return cached(key, [&] {
    double lo = std::max(delta, m.lower(s));
    double hi = m.upper(s);
    if (!(hi > lo)) throw EmptySupportError(m.name + ": no mass above the cutoff");
    JumpMeasureSpec copy = m;
    return std::make_shared<const PanelSampler>([copy, s](double u) { return copy.density(s, u); }, lo, hi);
  });
}

std::shared_ptr<const PanelSampler> small_child_table(const JumpMeasureSpec& m, double delta, double omega) {
  std::uint64_t key = m.content_hash();
  int tag = 3;
  key = fnv1a(&tag, sizeof tag, key);
  key = fnv1a(&delta, sizeof delta, key);
  key = fnv1a(&omega, sizeof omega, key);
  return cached(key, [&] {
    double lo = std::max(delta * 1e-20, m.neg_lower);
    double hi = std::min(delta, m.neg_extent);
    if (!(hi > lo) || !m.has(Side::negative)) throw EmptySupportError(m.name + ": no sub-cutoff negative jumps");
    JumpMeasureSpec copy = m;
    return std::make_shared<const PanelSampler>(
        [copy, omega](double u) {
          double l = copy.log_density(Side::negative, u);
          return l == -kInf ? 0.0 : std::exp(omega * log_one_minus_exp_neg(u) + l);
        },
        lo, hi);
  });
}

double sample_jump(const JumpMeasureSpec& m, Side s, double delta, Rng& rng) {
  double u = jump_table(m, s, delta)->sample(rng);
  return s == Side::negative ? -u : u;
}

RegularVariationFit tail_equivalence_check(double theta, const std::vector<double>& x_grid) {
  JumpMeasureSpec lam = canonical_lambda(theta);
  JumpMeasureSpec pim = spine_measure(theta, SpineSign::minus);
  double rho = theta, om = theta + 0.5;
  RegularVariationFit fit;
  fit.rho = rho;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double x : x_grid) {
    if (!(x > 0.0 && x < 1.0)) throw DomainError("tail grid points must lie in (0, 1)");
    double tail = lam.neg_tail(x);
    fit.slowly_varying_samples.emplace_back(x, tail * std::pow(x, rho));
    double pi_tail = pim.neg_tail(-std::log(x));
    fit.pi_minus_ratio.push_back(pi_tail / (tail * std::pow(x, om) * rho / (om - rho)));
    double lx = std::log(x), ly = std::log(tail);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double n = static_cast<double>(x_grid.size());
  if (n >= 2) {
    fit.index_estimate = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    std::size_t lo = 0, next = 1;
    for (std::size_t i = 1; i < x_grid.size(); ++i)
      if (x_grid[i] < x_grid[lo]) lo = i;
    if (lo == next) next = 0;
    for (std::size_t i = 0; i < x_grid.size(); ++i)
      if (i != lo && x_grid[i] < x_grid[next]) next = i;
    double a = x_grid[lo], b = x_grid[next];
    fit.local_index = std::log(lam.neg_tail(b) / lam.neg_tail(a)) / std::log(b / a);
  }
  return fit;
}

}  // namespace gfsim
