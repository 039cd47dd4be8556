#include "gfsim/harness.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "json.hpp"

#include "gfsim/cellsystem.hpp"
#include "gfsim/cumulant.hpp"
#include "gfsim/error.hpp"
#include "gfsim/jump_measure.hpp"
#include "gfsim/lamperti.hpp"
#include "gfsim/parallel.hpp"
#include "gfsim/rng.hpp"
#include "gfsim/spine.hpp"
#include "gfsim/stats.hpp"

namespace gfsim {

void Table::add(std::vector<std::string> row) {
  if (row.size() != columns.size()) throw Error("table '" + name + "': row width does not match the header");
  rows.push_back(std::move(row));
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string fmt(std::uint64_t v) { return std::to_string(v); }

std::uint64_t RunContext::count(const std::string& key) const {
  if (replicas) return *replicas;
  double n = std::round(static_cast<double>(config.integer("harness." + key)) * scale);
  return std::max<std::uint64_t>(16, static_cast<std::uint64_t>(n));
}

std::uint64_t RunContext::stream(const std::string& id, std::uint64_t part) const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : id) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return derive_key(derive_key(seed, h), part);
}

namespace {

SmallJumpPolicy jumps_of(const Config& c) {
  SmallJumpPolicy j;
  j.delta = c.real("levy.delta");
  j.gaussian = c.flag("levy.gaussian");
  j.grid_step = c.real("levy.grid_step");
  j.rate_budget = c.real("levy.rate_budget");
  return j;
}

HorizonPolicy horizon_of(const Config& c) {
  HorizonPolicy h;
  h.kill_level = c.real("lamperti.kill_level");
  h.levy_horizon = c.real("lamperti.levy_horizon");
  h.max_doublings = static_cast<int>(c.integer("lamperti.max_doublings"));
  h.tol_abs = c.real("lamperti.tol_abs");
  return h;
}

const std::vector<double> kThetaGrid = {1.1, 1.25, 1.4, 1.5};

// ---------------------------------------------------------------- cumulant

Report cumulant_suite(const RunContext&) {
  Report r;
  Table t{"roots", {"case", "theta", "lower_root", "upper_root", "expected_lower", "expected_upper", "deviation", "pass"}};
  bool ok = true;
  for (double th : kThetaGrid) {
    auto k = [th](double q) { return kappa_theta_closed(th, q); };
    CramerRoots roots = find_roots(k, {th + 1e-9, 2.0 * th + 1.0 - 1e-9});
    double lo = roots.omega_minus.value_or(NAN), hi = roots.omega_plus.value_or(NAN);
    double dev = std::max(std::abs(lo - (th + 0.5)), std::abs(hi - (th + 1.5)));
    bool pass = dev <= 1e-9;
    ok = ok && pass;
    t.add({"kappa_theta", fmt(th), fmt(lo), fmt(hi), fmt(th + 0.5), fmt(th + 1.5), fmt(dev), fmt(pass)});
  }
  {
    CramerRoots roots = find_roots([](double q) { return q * q - 4.0; }, {-1.0, 3.0});
    bool pass = !roots.omega_minus && roots.omega_plus && std::abs(*roots.omega_plus - 2.0) <= 1e-9;
    ok = ok && pass;
    double hi = roots.omega_plus.value_or(NAN);
    t.add({"q^2-4 on [-1,3]", "nan", fmt(roots.omega_minus.value_or(NAN)), fmt(hi), "nan", "2",
           fmt(std::abs(hi - 2.0)), fmt(pass)});
  }
  Table d{"derivative", {"theta", "q", "kappa_prime", "expected", "deviation", "pass"}};
  double kp = kappa_theta_derivative(1.5, 2.0), want = -std::sqrt(M_PI);
  bool pass = std::abs(kp - want) <= 1e-6;
  ok = ok && pass;
  d.add({"1.5", "2", fmt(kp), fmt(want), fmt(std::abs(kp - want)), fmt(pass)});
  r.tables = {t, d};
  r.pass = ok;
  return r;
}

Report calibration(const RunContext&) {
  Report r;
  Table t{"closure", {"kind", "theta", "q", "value", "reference", "deviation", "pass"}};
  bool ok = true;
  for (double th : kThetaGrid) {
    StableFamily fam(th);
    LevyTriplet trip = fam.triplet();
    for (int i = 1; i <= 10; ++i) {
      double q = th + (th + 1.0) * i / 11.0;
      double v = kappa_eval(trip, q), ref = kappa_theta_closed(th, q);
      bool pass = std::abs(v - ref) <= 1e-6;
      ok = ok && pass;
      t.add({"kappa", fmt(th), fmt(q), fmt(v), fmt(ref), fmt(std::abs(v - ref)), fmt(pass)});
    }
    for (SpineSign s : {SpineSign::minus, SpineSign::plus}) {
      double dev = spine_tilt_deviation(th, s);
      bool pass = dev <= 1e-8;
      ok = ok && pass;
      t.add({s == SpineSign::minus ? "phi_minus" : "phi_plus", fmt(th), "nan", "nan", "nan", fmt(dev), fmt(pass)});
    }
  }
  r.tables = {t};
  r.pass = ok;
  return r;
}

// ---------------------------------------------------------- trees and areas

Report martingale(const RunContext& ctx) {
  Report r;
  Table t{"martingale", {"theta", "x", "n", "trees", "mean", "stderr", "target", "z", "pass"}};
  const std::uint64_t n = ctx.count("n_trees");
  bool ok = true;
  std::uint64_t part = 0;
  for (double th : {1.25, 1.5}) {
    StableFamily fam(th);
    TruncationPolicy pol;
    pol.x_min = ctx.config.real("cellsystem.martingale_x_min");
    pol.max_generation = 3;
    pol.max_cells = ctx.config.integer("cellsystem.max_cells");
    pol.jumps = jumps_of(ctx.config);
    pol.jumps.match_exponent = fam.omega_minus();
    TreeSimulator sim(fam.params(), pol);
    for (double x : {0.5, 1.0, 2.0}) {
      std::uint64_t seed = ctx.stream("exp_martingale", part++);
      auto ms = parallel_map<std::array<double, 3>>(n, ctx.workers, [&](std::size_t i) {
        CellTree tree = grow_tree(sim, x, derive_key(seed, i));
        return std::array<double, 3>{area_martingale(tree, 1), area_martingale(tree, 2), area_martingale(tree, 3)};
      });
      double target = std::pow(x, fam.omega_minus());
      for (int g = 0; g < 3; ++g) {
        EstimateWithCI e;
        e.seed = seed;
        for (const auto& m : ms) e.add(m[g]);
        double z = (e.mean - target) / e.std_error();
        bool pass = std::abs(z) <= 3.0;
        ok = ok && pass;
        t.add({fmt(th), fmt(x), std::to_string(g + 1), fmt(n), fmt(e.mean), fmt(e.std_error()), fmt(target), fmt(z),
               fmt(pass)});
      }
    }
  }
  r.tables = {t};
  r.pass = ok;
  return r;
}

struct AreaSetup {
  std::shared_ptr<const AbsorptionTable> delays;
  std::shared_ptr<const TreeSimulator> sim;
};

AreaSetup area_setup(const RunContext& ctx, double theta, double horizon, std::uint64_t table_seed) {
  StableFamily fam(theta);
  AreaSetup s;
  std::uint64_t size = ctx.replicas ? std::max<std::uint64_t>(*ctx.replicas, 1000)
                                    : std::max<std::uint64_t>(1000, ctx.config.integer("spine.table_size"));
  s.delays = spine_absorption_table(theta, size, table_seed, jumps_of(ctx.config), horizon_of(ctx.config), ctx.workers);
  TruncationPolicy pol;
  pol.x_min = ctx.config.real("cellsystem.x_min");
  pol.max_cells = ctx.config.integer("cellsystem.max_cells");
  pol.horizon = horizon;
  pol.jumps = jumps_of(ctx.config);
  pol.jumps.match_exponent = fam.omega_minus();
  pol.kill_placement = KillPlacement::spine_delay;
  pol.small_child_rate = ctx.config.real("cellsystem.small_child_rate");
  s.sim = std::make_shared<const TreeSimulator>(fam.params(), pol, s.delays);
  return s;
}

struct AreaSamples {
  std::vector<EstimateWithCI> sampled;   // A(t)
  std::vector<EstimateWithCI> expected;  // E[A(t) | tree]
};

AreaSamples area_samples(const RunContext& ctx, const AreaSetup& s, double x, const std::vector<double>& ts,
                         std::uint64_t n, std::uint64_t seed) {
  const std::size_t k = ts.size();
  auto vals = parallel_map<std::vector<double>>(n, ctx.workers, [&](std::size_t i) {
    CellTree tree = grow_tree(*s.sim, x, derive_key(seed, i));
    AreaProfile p = area_profile(tree);
    std::vector<double> v(2 * k);
    for (std::size_t j = 0; j < k; ++j) {
      v[j] = p.at(ts[j]);
      v[k + j] = expected_area(tree, ts[j], *s.delays);
    }
    return v;
  });
  AreaSamples out;
  out.sampled.resize(k);
  out.expected.resize(k);
  for (std::size_t j = 0; j < k; ++j) out.sampled[j].seed = out.expected[j].seed = seed;
  for (const auto& v : vals)
    for (std::size_t j = 0; j < k; ++j) {
      out.sampled[j].add(v[j]);
      out.expected[j].add(v[k + j]);
    }
  return out;
}

Report area_oracle(const RunContext& ctx) {
  Report r;
  const double theta = 1.5;
  const std::vector<double> ts = {0.05, 0.1, 0.2};
  const std::uint64_t n_trees = ctx.count("n_trees"), n_paths = ctx.count("n_paths");
  AreaSetup s = area_setup(ctx, theta, ts.back(), ctx.stream("exp_area_oracle", 0));
  AreaSamples a = area_samples(ctx, s, 1.0, ts, n_trees, ctx.stream("exp_area_oracle", 1));
  auto table = spine_absorption_table(theta, n_paths, ctx.stream("exp_area_oracle", 2), jumps_of(ctx.config),
                                      horizon_of(ctx.config), ctx.workers);
  Table t{"oracle",
          {"t", "trees", "area_mean", "area_lo95", "area_hi95", "area_conditional_mean", "area_conditional_stderr",
           "paths", "prob_I_leq", "prob_lo95", "prob_hi95", "overlap"}};
  bool ok = true;
  for (std::size_t j = 0; j < ts.size(); ++j) {
    BinomialEstimate b;
    b.n = table->size();
    for (double v : table->samples()) b.k += v <= ts[j] ? 1 : 0;
    auto [lo, hi] = b.wilson();
    bool overlap = intervals_overlap(a.sampled[j].lo95(), a.sampled[j].hi95(), lo, hi);
    ok = ok && overlap;
    t.add({fmt(ts[j]), fmt(n_trees), fmt(a.sampled[j].mean), fmt(a.sampled[j].lo95()), fmt(a.sampled[j].hi95()),
           fmt(a.expected[j].mean), fmt(a.expected[j].std_error()), fmt(b.n), fmt(b.p()), fmt(lo), fmt(hi),
           fmt(overlap)});
  }
  r.tables = {t};
  r.pass = ok;
  return r;
}

Report exp_functional(const RunContext& ctx) {
  Report r;
  const double theta = 1.5, alpha = 1.0 - theta;
  const std::uint64_t n = ctx.count("n_exfunc");
  LevyTriplet trip = spine_triplet(theta, SpineSign::minus);
  SmallJumpPolicy jumps = jumps_of(ctx.config);
  ExpFunctionalEstimate e = exp_functional_moment(trip, alpha, -1.0, n, ctx.stream("exp_exp_functional", 0), jumps,
                                                  horizon_of(ctx.config), ctx.workers);
  double target = std::sqrt(M_PI) / 2.0;
  double drift_route = std::abs(alpha) * std::abs(kappa_theta_derivative(theta, theta + 0.5));
  double simulated_route = std::abs(alpha) * std::abs(LevyDriver(trip, jumps).simulated_mean());
  double z = (e.estimate.mean - target) / e.estimate.std_error();
  Table t{"inverse_moment", {"route", "n", "value", "stderr", "target", "z", "pass"}};
  bool pass = std::abs(z) <= 3.0;
  t.add({"mean_of_1/I", fmt(n), fmt(e.estimate.mean), fmt(e.estimate.std_error()), fmt(target), fmt(z), fmt(pass)});
  t.add({"|alpha|*|kappa'(omega_minus)|", "0", fmt(drift_route), "0", fmt(target),
         "nan", fmt(std::abs(drift_route - target) <= 1e-9)});
  t.add({"|alpha|*|simulated mean|", "0", fmt(simulated_route), "0", fmt(target), "nan",
         fmt(std::abs(simulated_route - target) <= 1e-6)});
  Table b{"batches", {"replicas", "running_mean"}};
  std::uint64_t m = std::min<std::uint64_t>(n, std::max<std::uint64_t>(1, n / 16));
  for (double v : e.batch_means) {
    b.add({fmt(m), fmt(v)});
    m = std::min<std::uint64_t>(n, 2 * m);
  }
  r.tables = {t, b};
  r.notes.push_back("horizon policy: " + e.horizon_policy);
  r.notes.push_back("unresolved paths: " + std::to_string(e.unresolved));
  r.notes.push_back("largest residual bound: " + fmt(e.residual_bound));
  if (e.divergence_warning) r.notes.push_back("warning: last two batch means differ by more than 3 standard errors");
  r.notes.push_back("1/I has tail of order s^-2: the variance diverges logarithmically, the standard error is indicative");
  r.pass = pass;
  return r;
}

double theorem_constant(const RunContext& ctx, double theta, double x) {
  if (theta == 1.5) return 0.375 * x;
  StableFamily fam(theta);
  double c_minus = std::tgamma(theta + 1.0) / M_PI;
  double power = -1.0 / (2.0 * (theta - 1.0));
  ExpFunctionalEstimate e =
      exp_functional_moment(spine_triplet(theta, SpineSign::minus), fam.alpha(), power, ctx.count("n_paths"),
                            ctx.stream("exp_theorem_area", 9), jumps_of(ctx.config), horizon_of(ctx.config),
                            ctx.workers);
  return 2.0 * (theta - 1.0) / (theta - 0.5) * c_minus * e.estimate.mean * x;
}

Report theorem_area(const RunContext& ctx) {
  Report r;
  const double theta = 1.5, x = 1.0;
  const std::vector<double> eps = {0.2, 0.1, 0.05};
  const std::uint64_t n = ctx.count("n_trees");
  const double expo = -(theta - 0.5) / (theta - 1.0);
  AreaSetup s = area_setup(ctx, theta, eps.front(), ctx.stream("exp_theorem_area", 0));
  AreaSamples a = area_samples(ctx, s, x, eps, n, ctx.stream("exp_theorem_area", 1));
  double target = theorem_constant(ctx, theta, x);
  Table t{"trend",
          {"eps", "trees", "scaled_mean", "scaled_stderr", "scaled_conditional_mean", "scaled_conditional_stderr",
           "target", "relative_gap"}};
  std::vector<double> val, se;
  for (std::size_t j = 0; j < eps.size(); ++j) {
    double f = std::pow(eps[j], expo);
    val.push_back(f * a.sampled[j].mean);
    se.push_back(f * a.sampled[j].std_error());
    t.add({fmt(eps[j]), fmt(n), fmt(val.back()), fmt(se.back()), fmt(f * a.expected[j].mean),
           fmt(f * a.expected[j].std_error()), fmt(target), fmt(std::abs(val.back() - target) / target)});
  }
  bool strict = true, tolerant = true;
  for (std::size_t j = 0; j + 1 < val.size(); ++j) {
    double d0 = std::abs(val[j] - target), d1 = std::abs(val[j + 1] - target);
    strict = strict && d1 <= d0;
    tolerant = tolerant && d1 <= d0 + 2.0 * std::hypot(se[j], se[j + 1]);
  }
  bool final_ok = std::abs(val.back() - target) <= 0.2 * target;
  Table c{"checks", {"check", "value"}};
  c.add({"strictly_monotone_distance", fmt(strict)});
  c.add({"monotone_within_2se", fmt(tolerant)});
  c.add({"final_within_20pct", fmt(final_ok)});
  r.tables = {t, c};
  r.notes.push_back("the 20% band is an engineering budget: the limit has no stated rate");
  r.pass = tolerant && final_ok;
  return r;
}

// ------------------------------------------------------------------ 𝒫₀⁺

P0PlusPlan p0_plan(const RunContext& ctx, double theta, double x0_floor, std::uint64_t table_seed) {
  StableFamily fam(theta);
  P0PlusPlan plan;
  plan.theta = theta;
  plan.x0_floor = x0_floor;
  plan.resolve = ctx.config.real("spine.resolve");
  plan.spine_jumps = jumps_of(ctx.config);
  plan.tree.jumps = jumps_of(ctx.config);
  plan.tree.jumps.match_exponent = fam.omega_minus();
  plan.tree.max_cells = ctx.config.integer("cellsystem.max_cells");
  plan.small_child_rate = ctx.config.real("cellsystem.small_child_rate");
  plan.tree.small_child_rate = plan.small_child_rate;
  std::uint64_t size = ctx.replicas ? std::max<std::uint64_t>(*ctx.replicas, 1000)
                                    : std::max<std::uint64_t>(1000, ctx.config.integer("spine.table_size"));
  plan.delays =
      spine_absorption_table(theta, size, table_seed, jumps_of(ctx.config), horizon_of(ctx.config), ctx.workers);
  return plan;
}

std::vector<double> p0_samples(const RunContext& ctx, const P0PlusSampler& s, double t, std::uint64_t n,
                               std::uint64_t seed) {
  return parallel_map<double>(n, ctx.workers, [&](std::size_t i) { return s.sample(t, derive_key(seed, i)); });
}

std::vector<double> scaled(const std::vector<double>& a, double t, double expo) {
  std::vector<double> out(a.size());
  double f = std::pow(t, expo);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = f * a[i];
  return out;
}

Report stationarity(const RunContext& ctx) {
  Report r;
  const double theta = 1.5;
  StableFamily fam(theta);
  const double t1 = 0.5, t2 = 1.0;
  const double expo = fam.omega_minus() / fam.alpha();
  const std::uint64_t n = ctx.count("n_ks");
  const double level = ctx.config.real("harness.ks_level");
  const double x0 = ctx.config.real("spine.x0_floor");
  P0PlusPlan plan = p0_plan(ctx, theta, x0, ctx.stream("exp_stationarity", 0));
  P0PlusSampler s(plan);
  auto a1 = p0_samples(ctx, s, t1, n, ctx.stream("exp_stationarity", 1));
  auto a2 = p0_samples(ctx, s, t2, n, ctx.stream("exp_stationarity", 2));
  KsResult main = ks_two_sample(scaled(a1, t1, expo), scaled(a2, t2, expo), level);
  const double wrong = (fam.omega_minus() + 0.5) / fam.alpha();
  KsResult control = ks_two_sample(scaled(a1, t1, wrong), scaled(a2, t2, wrong), level);

  P0PlusPlan half = plan;
  half.x0_floor = 0.5 * x0;
  P0PlusSampler sh(half);
  auto h1 = p0_samples(ctx, sh, t1, n, ctx.stream("exp_stationarity", 3));
  auto h2 = p0_samples(ctx, sh, t2, n, ctx.stream("exp_stationarity", 4));
  KsResult halved = ks_two_sample(scaled(h1, t1, expo), scaled(h2, t2, expo), level);

  Table t{"ks", {"test", "x0_floor", "exponent", "n", "statistic", "critical", "p_value", "rejected"}};
  t.add({"stationarity", fmt(x0), fmt(expo), fmt(n), fmt(main.statistic), fmt(main.critical), fmt(main.p_value),
         fmt(main.rejected)});
  t.add({"negative_control", fmt(x0), fmt(wrong), fmt(n), fmt(control.statistic), fmt(control.critical),
         fmt(control.p_value), fmt(control.rejected)});
  t.add({"x0_floor_halved", fmt(0.5 * x0), fmt(expo), fmt(n), fmt(halved.statistic), fmt(halved.critical),
         fmt(halved.p_value), fmt(halved.rejected)});
  Table m{"samples", {"t", "n", "scaled_mean", "scaled_stderr"}};
  for (auto [tt, v] : {std::pair{t1, &a1}, std::pair{t2, &a2}}) {
    EstimateWithCI e = estimate_of(scaled(*v, tt, expo));
    m.add({fmt(tt), fmt(n), fmt(e.mean), fmt(e.std_error())});
  }
  double noise = main.critical;
  double shift = std::abs(halved.statistic - main.statistic);
  r.notes.push_back("x0_floor sensitivity: |D(x0/2) - D(x0)| = " + fmt(shift) + " against the 5% KS scale " +
                    fmt(noise) + (shift < noise ? " (below)" : " (not below)"));
  r.tables = {t, m};
  r.pass = !main.rejected && control.rejected;
  return r;
}

Report log_bounds(const RunContext& ctx) {
  Report r;
  Table e{"exponents", {"theta", "q_star", "q0", "hypothesis_point", "kappa_at_point", "domain_edge", "hypothesis"}};
  bool ok = true;
  for (double th : {1.05, 1.1, 1.25, 1.4, 1.5}) {
    StableFamily fam(th);
    LogBoundExponents b = log_bound_exponents(fam);
    double point = fam.omega_plus() + fam.omega_minus() + fam.alpha();
    bool hyp = upper_envelope_hypothesis(fam.params());
    ok = ok && hyp;
    double at_point = INFINITY;
    try {
      at_point = kappa_eval(fam.triplet(), point);
    } catch (const DivergenceError&) {
    }
    e.add({fmt(th), fmt(b.q_star), fmt(b.q0), fmt(point), fmt(at_point), fmt(kappa_domain_sup(fam.triplet(), 0.0)),
           fmt(hyp)});
    if (th == 1.5) ok = ok && b.q0 == 6.0 && b.q_star == 1.0;
  }
  const double theta = 1.5, slack = 0.1;
  StableFamily fam(theta);
  LogBoundExponents b = log_bound_exponents(fam);
  const double expo = fam.omega_minus() / fam.alpha();
  const std::vector<double> ts = {0.0625, 0.125, 0.25, 0.5, 2.0, 4.0, 8.0};
  const std::uint64_t n = ctx.count("n_envelope");
  P0PlusSampler s(p0_plan(ctx, theta, ctx.config.real("spine.x0_floor"), ctx.stream("exp_log_bounds", 0)));
  std::uint64_t seed = ctx.stream("exp_log_bounds", 1);
  auto traj = parallel_map<std::vector<double>>(n, ctx.workers, [&](std::size_t i) {
    std::vector<double> v;
    for (double t : ts) v.push_back(s.sample(t, derive_key(seed, i)));
    return v;
  });
  Table env{"envelope",
            {"t", "upper_min", "upper_max", "lower_min", "lower_max"}};
  Table rep{"trajectories", {"replica", "t", "upper", "lower"}};
  for (std::size_t j = 0; j < ts.size(); ++j) {
    double L = std::abs(std::log(ts[j]));
    double fu = std::pow(L, -1.0 - slack) * std::pow(ts[j], expo), fl = std::pow(L, b.q0) * std::pow(ts[j], expo);
    double umin = INFINITY, umax = -INFINITY, lmin = INFINITY, lmax = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
      double u = fu * traj[i][j], l = fl * traj[i][j];
      umin = std::min(umin, u);
      umax = std::max(umax, u);
      lmin = std::min(lmin, l);
      lmax = std::max(lmax, l);
      rep.add({fmt(static_cast<std::uint64_t>(i)), fmt(ts[j]), fmt(u), fmt(l)});
    }
    env.add({fmt(ts[j]), fmt(umin), fmt(umax), fmt(lmin), fmt(lmax)});
  }
  r.tables = {e, env, rep};
  r.notes.push_back("trajectories reuse one spine per replica; subtrees are resolved at the scale of each t");
  r.notes.push_back("envelope columns are descriptive: almost-sure limits are not decided by finite samples");
  r.pass = ok;
  return r;
}

Report tail_equivalence(const RunContext& ctx) {
  Report r;
  const std::vector<double> grid = {1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
  Table t{"regular_variation", {"theta", "rho", "index_estimate", "x", "slowly_varying", "pi_minus_ratio"}};
  Table f{"fit", {"theta", "index_estimate", "local_index", "target", "ratio_at_smallest_x", "pass"}};
  bool ok = true;
  for (double th : kThetaGrid) {
    RegularVariationFit fit = tail_equivalence_check(th, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      t.add({fmt(th), fmt(fit.rho), fmt(fit.index_estimate), fmt(fit.slowly_varying_samples[i].first),
             fmt(fit.slowly_varying_samples[i].second), fmt(fit.pi_minus_ratio[i])});
    bool pass = std::abs(fit.local_index + th) <= 0.05 && std::abs(fit.pi_minus_ratio.front() - 1.0) <= 0.05;
    ok = ok && pass;
    f.add({fmt(th), fmt(fit.index_estimate), fmt(fit.local_index), fmt(-th), fmt(fit.pi_minus_ratio.front()),
           fmt(pass)});
  }
  const std::vector<double> ts = {0.4, 0.2, 0.1, 0.05};
  auto probs = prob_I_leq(ts, 1.5, ctx.count("n_paths"), ctx.stream("exp_tail_equivalence", 0), jumps_of(ctx.config),
                          horizon_of(ctx.config), ctx.workers);
  Table s{"small_t_slope", {"t", "prob_I_leq", "stderr", "local_slope", "expected_slope"}};
  for (std::size_t j = 0; j < ts.size(); ++j) {
    double slope = NAN;
    if (j > 0 && probs[j].mean > 0.0 && probs[j - 1].mean > 0.0)
      slope = std::log(probs[j - 1].mean / probs[j].mean) / std::log(ts[j - 1] / ts[j]);
    s.add({fmt(ts[j]), fmt(probs[j].mean), fmt(probs[j].std_error()), fmt(slope), "2"});
  }
  r.tables = {f, t, s};
  r.notes.push_back("index_estimate spans x up to 0.1 where the slowly varying factor is far from its limit; "
                    "the pass test uses local_index");
  r.pass = ok;
  return r;
}

}  // namespace

const std::vector<Experiment>& experiments() {
  static const std::vector<Experiment> list = {
      {"exp_cumulant_suite", "Cramér roots of the stable-map cumulant and its slope at the lower root",
       cumulant_suite},
      {"exp_calibration", "quadrature cumulant of the canonical triplet against the closed form; spine tilts",
       calibration},
      {"exp_martingale", "intrinsic area martingale M(n) has constant mean x^omega_minus", martingale},
      {"exp_area_oracle", "expected area at time t equals the minus-spine absorption probability P(I <= t)",
       area_oracle},
      {"exp_exp_functional", "E(1/I) for the minus spine equals |alpha| times the absolute spine mean",
       exp_functional},
      {"exp_theorem_area", "small-time area asymptotics with limiting constant 3x/8 at theta = 3/2", theorem_area},
      {"exp_stationarity", "law of t^(omega_minus/alpha) A(t) under the plus spine from 0 is free of t",
       stationarity},
      {"exp_log_bounds", "logarithmic envelopes of the rescaled area; q0 = 6 at theta = 3/2", log_bounds},
      {"exp_tail_equivalence", "regular variation of the jump tail and of the minus-spine jump tail",
       tail_equivalence},
  };
  return list;
}

const Experiment& find_experiment(const std::string& id) {
  for (const auto& e : experiments())
    if (e.id == id) return e;
  throw DomainError("unknown experiment '" + id + "'");
}

RunManifest make_manifest(const RunContext& ctx) {
  RunManifest m;
  m.config_hash = ctx.config.hash();
  m.seed = ctx.seed;
  m.versions = {{"cumulant", "1.0"}, {"levy", "1.0"}, {"lamperti", "1.0"},
                {"cellsystem", "1.0"}, {"spine", "1.0"}, {"harness", "1.0"}};
  m.delta = ctx.config.real("levy.delta");
  m.x_min = ctx.config.real("cellsystem.x_min");
  m.x0_floor = ctx.config.real("spine.x0_floor");
  return m;
}

Report run_experiment(const std::string& id, const RunContext& ctx, RunManifest* manifest) {
  const Experiment& e = find_experiment(id);
  auto t0 = std::chrono::steady_clock::now();
  Report r = e.run(ctx);
  r.id = e.id;
  r.anchor = e.anchor;
  if (manifest) {
    *manifest = make_manifest(ctx);
    manifest->wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  return r;
}

namespace {

std::string hex(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_csv(std::ostream& os, const Report& r, const RunManifest& m) {
  os << "# schema: " << kCsvSchema << '\n';
  os << "# experiment: " << r.id << '\n';
  os << "# anchor: " << r.anchor << '\n';
  os << "# seed: " << m.seed << '\n';
  os << "# config_hash: " << hex(m.config_hash) << '\n';
  os << "# delta: " << fmt(m.delta) << '\n';
  os << "# x_min: " << fmt(m.x_min) << '\n';
  os << "# x0_floor: " << fmt(m.x0_floor) << '\n';
  for (const auto& [k, v] : m.versions) os << "# version " << k << ": " << v << '\n';
  os << "# pass: " << (r.pass ? fmt(*r.pass) : std::string("n/a")) << '\n';
  for (const auto& n : r.notes) os << "# note: " << n << '\n';
  for (const auto& t : r.tables) {
    os << "# table: " << t.name << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_field(t.columns[i]);
    os << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
      os << '\n';
    }
  }
}

namespace {

nlohmann::ordered_json manifest_json(const RunManifest& m, bool with_time) {
  nlohmann::ordered_json j;
  j["config_hash"] = hex(m.config_hash);
  j["seed"] = m.seed;
  j["versions"] = m.versions;
  j["delta"] = m.delta;
  j["x_min"] = m.x_min;
  j["x0_floor"] = m.x0_floor;
  if (with_time) j["wall_seconds"] = m.wall_seconds;
  return j;
}

}  // namespace

void write_json(std::ostream& os, const Report& r, const RunManifest& m) {
  nlohmann::ordered_json j;
  j["schema"] = kCsvSchema;
  j["experiment"] = r.id;
  j["anchor"] = r.anchor;
  j["pass"] = r.pass ? nlohmann::ordered_json(*r.pass) : nlohmann::ordered_json(nullptr);
  j["manifest"] = manifest_json(m, false);
  j["notes"] = r.notes;
  for (const auto& t : r.tables) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
      nlohmann::ordered_json o;
      for (std::size_t i = 0; i < row.size(); ++i) o[t.columns[i]] = row[i];
      rows.push_back(o);
    }
    j["tables"][t.name] = rows;
  }
  os << j.dump(2) << '\n';
}

void write_manifest_json(std::ostream& os, const Report& r, const RunManifest& m) {
  nlohmann::ordered_json j = manifest_json(m, true);
  j["experiment"] = r.id;
  os << j.dump(2) << '\n';
}

}  // namespace gfsim
