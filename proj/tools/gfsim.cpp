#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gfsim/cellsystem.hpp"
#include "gfsim/config.hpp"
#include "gfsim/cumulant.hpp"
#include "gfsim/error.hpp"
#include "gfsim/harness.hpp"
#include "gfsim/lamperti.hpp"
#include "gfsim/levy.hpp"
#include "gfsim/parallel.hpp"
#include "gfsim/rng.hpp"
#include "gfsim/spine.hpp"

using namespace gfsim;

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::uint64_t> replicas;
  std::string format = "csv";
  unsigned workers = 0;
  double theta = 1.5;
  double q = 2.5;
  double x = 1.0;
  double t = 0.1;
  double horizon = 1.0;
  double power = -1.0;
  std::string sign = "minus";
  std::string experiment;
};

SmallJumpPolicy jumps_of(const Config& c) {
  SmallJumpPolicy j;
  j.delta = c.real("levy.delta");
  j.gaussian = c.flag("levy.gaussian");
  j.grid_step = c.real("levy.grid_step");
  j.rate_budget = c.real("levy.rate_budget");
  return j;
}

RunContext context(const Options& o) {
  RunContext ctx;
  ctx.config = o.config_path.empty() ? Config() : Config::load(o.config_path);
  if (const char* env = std::getenv("GFSIM_SEED")) ctx.config.set("run.seed", env);
  if (o.seed) ctx.config.set("run.seed", std::to_string(*o.seed));
  ctx.seed = ctx.config.integer("run.seed");
  ctx.workers = o.workers ? o.workers : static_cast<unsigned>(std::max<std::uint64_t>(1, ctx.config.integer("run.workers")));
  ctx.replicas = o.replicas;
  return ctx;
}

/// Writes to --out (a directory for verify, a file otherwise) or stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error("cannot open " + path);
    }
  }
  std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

int cmd_kappa(const Options& o) {
  double v = kappa_theta_closed(o.theta, o.q);
  std::cout << std::setprecision(6) << v << '\n';
  return 0;
}

int cmd_sample_path(const Options& o, const RunContext& ctx) {
  StableFamily fam(o.theta);
  Rng rng(derive_key(ctx.seed, 1));
  PathSkeleton p = sample_path(fam.triplet(), o.horizon, jumps_of(ctx.config), rng);
  Sink s(o.out);
  s.os() << "# seed: " << ctx.seed << "\nlevy_time,before,after\n" << std::setprecision(17);
  for (std::size_t i = 0; i < p.knot_times.size(); ++i)
    s.os() << p.knot_times[i] << ',' << p.knot_before[i] << ',' << p.knot_after[i] << '\n';
  return 0;
}

TruncationPolicy tree_policy(const RunContext& ctx, double omega) {
  TruncationPolicy pol;
  pol.x_min = ctx.config.real("cellsystem.x_min");
  pol.max_cells = ctx.config.integer("cellsystem.max_cells");
  pol.jumps = jumps_of(ctx.config);
  pol.jumps.match_exponent = omega;
  return pol;
}

int cmd_grow_tree(const Options& o, const RunContext& ctx) {
  StableFamily fam(o.theta);
  CellTree tree = grow_tree(fam.params(), o.x, tree_policy(ctx, fam.omega_minus()), ctx.seed);
  Sink s(o.out);
  write_tree(s.os(), tree);
  return 0;
}

int cmd_area(const Options& o, const RunContext& ctx) {
  StableFamily fam(o.theta);
  std::uint64_t n = o.replicas.value_or(1000);
  auto delays = spine_absorption_table(o.theta, ctx.config.integer("spine.table_size"), derive_key(ctx.seed, 1),
                                       jumps_of(ctx.config), {}, ctx.workers);
  TruncationPolicy pol = tree_policy(ctx, fam.omega_minus());
  pol.horizon = o.t;
  pol.kill_placement = KillPlacement::spine_delay;
  pol.small_child_rate = ctx.config.real("cellsystem.small_child_rate");
  TreeSimulator sim(fam.params(), pol, delays);
  std::uint64_t seed = derive_key(ctx.seed, 2);
  auto a = parallel_map<double>(n, ctx.workers, [&](std::size_t i) {
    return area_profile(grow_tree(sim, o.x, derive_key(seed, i))).at(o.t);
  });
  EstimateWithCI e = estimate_of(a, ctx.seed);
  Sink s(o.out);
  s.os() << "# seed: " << ctx.seed << "\ntheta,x,t,n,mean,stderr\n"
         << fmt(o.theta) << ',' << fmt(o.x) << ',' << fmt(o.t) << ',' << n << ',' << fmt(e.mean) << ','
         << fmt(e.std_error()) << '\n';
  return 0;
}

int cmd_spine(const Options& o, const RunContext& ctx) {
  SpineConfig cfg;
  if (o.sign != "minus" && o.sign != "plus") throw ConfigError("sign", 0, "expected minus or plus");
  cfg.sign = o.sign == "minus" ? SpineSign::minus : SpineSign::plus;
  cfg.theta = o.theta;
  cfg.x = o.x;
  cfg.horizon = o.horizon;
  cfg.x0_floor = ctx.config.real("spine.x0_floor");
  cfg.jumps = jumps_of(ctx.config);
  Rng rng(derive_key(ctx.seed, 1));
  PssmpPath p = simulate_spine(cfg, rng);
  Sink s(o.out);
  s.os() << "# seed: " << ctx.seed << "\n# absorbed: " << (p.absorbed ? "true" : "false")
         << "\n# start_approximated: " << (p.start_approximated ? "true" : "false") << '\n';
  if (p.absorption_time) s.os() << "# absorption_time: " << fmt(*p.absorption_time) << '\n';
  s.os() << "t0,t1,value0,value1\n" << std::setprecision(17);
  for (const auto& seg : p.segments)
    s.os() << seg.t0 << ',' << seg.t1 << ',' << p.x * std::exp(seg.level) << ','
           << p.x * std::exp(seg.level + seg.slope * (seg.u1 - seg.u0)) << '\n';
  return 0;
}

int cmd_exfunc(const Options& o, const RunContext& ctx) {
  std::uint64_t n = o.replicas.value_or(10000);
  HorizonPolicy h;
  h.tol_abs = ctx.config.real("lamperti.tol_abs");
  ExpFunctionalEstimate e = exp_functional_moment(spine_triplet(o.theta, SpineSign::minus), 1.0 - o.theta, o.power, n,
                                                  ctx.seed, jumps_of(ctx.config), h, ctx.workers);
  Sink s(o.out);
  s.os() << "# seed: " << ctx.seed << "\n# " << e.horizon_policy << "\ntheta,power,n,mean,stderr,unresolved,warning\n"
         << fmt(o.theta) << ',' << fmt(o.power) << ',' << n << ',' << fmt(e.estimate.mean) << ','
         << fmt(e.estimate.std_error()) << ',' << e.unresolved << ',' << (e.divergence_warning ? "true" : "false")
         << '\n';
  return 0;
}

int cmd_verify(const Options& o, const RunContext& ctx) {
  RunManifest m;
  Report r = run_experiment(o.experiment, ctx, &m);
  std::ostringstream body;
  if (o.format == "json")
    write_json(body, r, m);
  else
    write_csv(body, r, m);
  if (o.out.empty()) {
    std::cout << body.str();
  } else {
    std::filesystem::create_directories(o.out);
    std::string stem = (std::filesystem::path(o.out) / r.id).string();
    std::ofstream(stem + (o.format == "json" ? ".json" : ".csv")) << body.str();
    std::ofstream mf(stem + ".manifest.json");
    write_manifest_json(mf, r, m);
    std::cerr << r.id << ": " << (r.pass ? (*r.pass ? "PASS" : "FAIL") : "REPORT") << '\n';
  }
  return r.pass.value_or(true) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gfsim: self-similar growth-fragmentation simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config_path, "config file (key = value with [sections])");
  app.add_option("--seed", o.seed, "master seed (overrides GFSIM_SEED and the config)");
  app.add_option("--out", o.out, "output file, or directory for verify");
  app.add_option("--replicas", o.replicas, "replica count");
  app.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--workers", o.workers, "worker threads");
  app.add_option("--theta", o.theta, "stable-map parameter in (1, 3/2]");

  auto* kappa = app.add_subcommand("kappa", "closed-form cumulant kappa_theta(q)");
  kappa->add_option("--q", o.q, "argument");
  auto* path = app.add_subcommand("sample-path", "Levy skeleton of the cell process");
  path->add_option("--horizon", o.horizon, "Levy time horizon");
  auto* tree = app.add_subcommand("grow-tree", "grow one truncated cell system");
  tree->add_option("--x", o.x, "start size");
  auto* area = app.add_subcommand("area", "Monte Carlo mean of A(t) under P_x");
  area->add_option("--x", o.x, "start size");
  area->add_option("--t", o.t, "time");
  auto* spine = app.add_subcommand("spine", "one spine path");
  spine->add_option("--sign", o.sign, "minus or plus");
  spine->add_option("--x", o.x, "start size (0 allowed for plus)");
  spine->add_option("--horizon", o.horizon, "real-time horizon (plus)");
  auto* exfunc = app.add_subcommand("exfunc", "moment E(I^power) for the minus spine");
  exfunc->add_option("--power", o.power, "power");
  auto* verify = app.add_subcommand("verify", "run a registered experiment");
  verify->add_option("experiment", o.experiment, "experiment id")->required();
  auto* list = app.add_subcommand("list", "list registered experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    if (*list) {
      for (const auto& e : experiments()) std::cout << e.id << '\t' << e.anchor << '\n';
      return 0;
    }
    if (*kappa) return cmd_kappa(o);
    RunContext ctx = context(o);
    if (*path) return cmd_sample_path(o, ctx);
    if (*tree) return cmd_grow_tree(o, ctx);
    if (*area) return cmd_area(o, ctx);
    if (*spine) return cmd_spine(o, ctx);
    if (*exfunc) return cmd_exfunc(o, ctx);
    if (*verify) return cmd_verify(o, ctx);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
