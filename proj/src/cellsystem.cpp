#include "gfsim/cellsystem.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>

namespace gfsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

CellLabel CellLabel::parent() const {
  if (word.empty()) throw DomainError("the root has no parent");
  CellLabel p{word};
  p.word.pop_back();
  return p;
}

CellLabel CellLabel::child(std::uint32_t k) const {
  CellLabel c{word};
  c.word.push_back(k);
  return c;
}

std::string CellLabel::str() const {
  if (word.empty()) return "r";
  std::string s;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) s += '.';
    s += std::to_string(word[i]);
  }
  return s;
}

CellLabel CellLabel::parse(const std::string& s) {
  CellLabel l;
  if (s == "r") return l;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, '.')) l.word.push_back(static_cast<std::uint32_t>(std::stoul(part)));
  return l;
}

CellLabel CellTree::label(std::size_t i) const {
  CellLabel l;
  for (std::int64_t k = static_cast<std::int64_t>(i); records[k].parent >= 0; k = records[k].parent)
    l.word.push_back(records[k].ordinal);
  std::reverse(l.word.begin(), l.word.end());
  return l;
}

const char* truncation_name(Truncation t) {
  switch (t) {
    case Truncation::none: return "none";
    case Truncation::killed_below: return "killed_below";
    case Truncation::generation_capped: return "generation_capped";
    case Truncation::horizon: return "horizon";
  }
  return "?";
}

TreeSimulator::TreeSimulator(const GFParams& params, const TruncationPolicy& policy,
                             std::shared_ptr<const AbsorptionTable> delays)
    : params_(params), policy_(policy), driver_(params.triplet, policy.jumps), delays_(std::move(delays)) {
  if (!(policy.x_min > 0.0)) throw DomainError("x_min must be positive");
  if (policy.max_generation < 1) throw DomainError("max_generation must be at least 1");
  if (policy.kill_placement == KillPlacement::spine_delay && !delays_)
    throw DomainError("spine_delay placement needs an absorption table");
  const auto& m = params.triplet.jumps;
  if (m.has(Side::negative) && m.neg_lower < policy.jumps.delta)
    small_mass_ = child_moment(m, params.omega_minus, 0.0, policy.jumps.delta);
  if (policy.small_child_rate > 0.0) driver_.enable_small_children(params.omega_minus, policy.small_child_rate);
}

double TreeSimulator::delay_scale(double size) const {
  return policy_.kill_placement == KillPlacement::at_height ? 0.0 : std::pow(size, -params_.alpha);
}

double TreeSimulator::delay(double size, Rng& rng) const {
  if (policy_.kill_placement == KillPlacement::at_height) return 0.0;
  return delay_scale(size) * delays_->draw(rng);
}

namespace {

struct Grower {
  const TreeSimulator& sim;
  CellTree& tree;
  double horizon;
  std::priority_queue<std::pair<double, std::size_t>, std::vector<std::pair<double, std::size_t>>,
                      std::greater<>>
      queue;

  void place(double cut, double size, double mass, Rng& rng) {
    double d = sim.delay(size, rng);
    tree.atoms.push_back({cut + d, mass, cut, sim.delay_scale(size)});
  }

  void add_stub(std::size_t parent, std::uint32_t ordinal, double birth, double size, Truncation why, Rng& rng) {
    const auto& pol = sim.policy();
    CellRecord c;
    c.ordinal = ordinal;
    c.generation = tree.records[parent].generation + 1;
    c.parent = static_cast<std::int64_t>(parent);
    c.birth_time = birth;
    c.birth_size = size;
    c.key = derive_key(tree.records[parent].key, ordinal);
    c.truncation = why;
    if (why == Truncation::none) {
      c.grown = true;
      queue.emplace(birth, tree.records.size());
    } else {
      place(birth, size, std::pow(size, tree.omega), rng);
    }
    tree.records.push_back(std::move(c));
    if (tree.records.size() > pol.max_cells)
      throw BudgetExceeded("cell budget of " + std::to_string(pol.max_cells) + " exceeded",
                           std::make_shared<const CellTree>(tree));
  }

  void grow(std::size_t idx) {
    const auto& pol = sim.policy();
    const LevyDriver& drv = sim.driver();
    const double a = -tree.alpha, om = tree.omega;
    const double s = tree.records[idx].birth_size;
    const double b = tree.records[idx].birth_time;
    const std::uint32_t gen = tree.records[idx].generation;
    Rng rng(tree.records[idx].key);
    const double scale = std::pow(s, a);
    const double kill = std::log(pol.x_min / s);
    const double budget = std::isfinite(horizon) ? (horizon - b) / scale : kInf;
    const double small_weight = drv.small_child_rate() > 0.0 ? drv.small_child_mass() / drv.small_child_rate() : 0.0;
    const double mass0 = std::pow(s, om);
    double xi = 0.0, clock = 0.0, comp = 0.0, u = 0.0;
    std::uint32_t ordinal = 0;
    Truncation why = Truncation::none;
    double end_size = 0.0;
    for (;;) {
      LevyEvent e = drv.next(rng);
      ++tree.events;
      double slope = e.increment / e.gap;
      double next = xi + e.increment;
      double c_full = clock_integral(a, xi, slope, e.gap);
      double v_kill = next < kill ? (kill - xi) / slope : kInf;
      double v_hor = clock + c_full >= budget ? clock_inverse(a, xi, slope, budget - clock) : kInf;
      if (std::isfinite(v_kill) || std::isfinite(v_hor)) {
        double v = std::min(v_kill, v_hor);
        comp += mass0 * sim.small_child_mass() * clock_integral(om, xi, slope, v);
        clock += clock_integral(a, xi, slope, v);
        xi += slope * v;
        if (v_kill <= v_hor) {
          why = Truncation::killed_below;
          end_size = pol.x_min;
        } else {
          why = Truncation::horizon;
          end_size = s * std::exp(xi);
        }
        break;
      }
      comp += mass0 * sim.small_child_mass() * clock_integral(om, xi, slope, e.gap);
      clock += c_full;
      u += e.gap;
      xi = next;
      if (u > 1e6) throw Error("cell exceeded the Levy-time guard; check the drift of the cell process");
      if (e.kind == EventKind::knot) continue;
      double now = b + scale * clock;
      double size = s * std::exp(xi);
      if (e.kind == EventKind::small_child) {
        double child = size * -std::expm1(e.jump);
        place(now, child, std::pow(size, om) * small_weight, rng);
        continue;
      }
      xi += e.jump;
      if (e.jump > 0.0) continue;
      double child = size * -std::expm1(e.jump);
      Truncation cw = Truncation::none;
      if (child < pol.x_min)
        cw = Truncation::killed_below;
      else if (gen + 1 >= pol.max_generation)
        cw = Truncation::generation_capped;
      add_stub(idx, ++ordinal, now, child, cw, rng);
      if (xi < kill) {
        why = Truncation::killed_below;
        end_size = s * std::exp(xi);
        break;
      }
    }
    auto& r = tree.records[idx];
    r.lifetime = scale * clock;
    r.truncation = why;
    r.end_size = end_size;
    r.end_mass = std::pow(end_size, om);
    r.compensator = comp;
    if (why == Truncation::horizon)
      tree.atoms.push_back({kInf, r.end_mass, kInf, 0.0});
    else
      place(b + r.lifetime, end_size, r.end_mass, rng);
  }
};

}  // namespace

CellTree grow_tree(const TreeSimulator& sim, double x, double horizon, std::uint64_t seed) {
  if (!(x > 0.0)) throw DomainError("start size must be positive");
  CellTree tree;
  tree.x = x;
  tree.alpha = sim.params().alpha;
  tree.omega = sim.params().omega_minus;
  tree.policy = sim.policy();
  tree.policy.horizon = horizon;
  tree.seed = seed;
  CellRecord root;
  root.birth_size = x;
  root.key = derive_key(seed, 0x726f6f74ULL);
  Grower g{sim, tree, horizon, {}};
  if (x < sim.policy().x_min) {
    Rng rng(root.key);
    root.truncation = Truncation::killed_below;
    tree.records.push_back(root);
    double d = sim.delay(x, rng);
    tree.atoms.push_back({d, std::pow(x, tree.omega), 0.0, sim.delay_scale(x)});
    return tree;
  }
  root.grown = true;
  tree.records.push_back(root);
  g.queue.emplace(0.0, 0);
  while (!g.queue.empty()) {
    std::size_t idx = g.queue.top().second;
    g.queue.pop();
    g.grow(idx);
  }
  return tree;
}

CellTree grow_tree(const TreeSimulator& sim, double x, std::uint64_t seed) {
  return grow_tree(sim, x, sim.policy().horizon, seed);
}

CellTree grow_tree(const GFParams& params, double x, const TruncationPolicy& policy, std::uint64_t seed,
                   std::shared_ptr<const AbsorptionTable> delays) {
  TreeSimulator sim(params, policy, std::move(delays));
  return grow_tree(sim, x, seed);
}

double area_martingale(const CellTree& tree, std::uint32_t n) {
  if (n > tree.policy.max_generation) throw DomainError("generation beyond the tree's max_generation");
  double m = 0.0;
  for (const auto& r : tree.records) {
    std::size_t g = r.generation;
    double birth = std::pow(r.birth_size, tree.omega);
    if (g == n) {
      m += birth;
    } else if (g < n) {
      if (!r.grown) {
        m += birth;
      } else {
        m += r.end_mass;
        m += r.compensator;
      }
    }
  }
  return m;
}

double AreaProfile::at(double t) const {
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
  if (it == breakpoints.begin()) return 0.0;
  return cumulative[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
}

AreaProfile area_profile(const CellTree& tree) {
  std::vector<MassAtom> atoms = tree.atoms;
  std::sort(atoms.begin(), atoms.end(), [](const MassAtom& a, const MassAtom& b) { return a.time < b.time; });
  AreaProfile p;
  double acc = 0.0;
  for (const auto& a : atoms) {
    acc += a.mass;
    if (!std::isfinite(a.time)) continue;
    if (!p.breakpoints.empty() && p.breakpoints.back() == a.time) {
      p.cumulative.back() = acc;
    } else {
      p.breakpoints.push_back(a.time);
      p.cumulative.push_back(acc);
    }
  }
  p.total = acc;
  p.time_bias_scale = std::pow(tree.policy.x_min, -tree.alpha);
  return p;
}

double expected_area(const CellTree& tree, double t, const AbsorptionTable& delays) {
  double total = 0.0;
  for (const auto& a : tree.atoms) {
    if (!(a.cut <= t)) continue;
    total += a.scale > 0.0 ? a.mass * delays.cdf((t - a.cut) / a.scale) : a.mass;
  }
  return total;
}

double markov_branching_resample(const TreeSimulator& sim, const CellTree& tree, double t, std::uint64_t seed) {
  double total = 0.0;
  Rng rng(derive_key(seed, 0));
  for (std::size_t i = 1; i < tree.records.size(); ++i) {
    const auto& r = tree.records[i];
    if (r.parent != 0 || r.birth_time > t) continue;
    std::uint64_t sub = derive_key(seed, i);
    if (r.birth_size < sim.policy().x_min || r.truncation == Truncation::generation_capped) {
      if (r.birth_time + sim.delay(r.birth_size, rng) <= t) total += std::pow(r.birth_size, tree.omega);
      continue;
    }
    CellTree fresh = grow_tree(sim, r.birth_size, t - r.birth_time, sub);
    total += area_profile(fresh).at(t - r.birth_time);
  }
  return total;
}

void write_tree(std::ostream& os, const CellTree& tree) {
  os << "# gfsim-tree v1\n";
  os << "# x=" << std::setprecision(17) << tree.x << " alpha=" << tree.alpha << " omega=" << tree.omega
     << " seed=" << tree.seed << " x_min=" << tree.policy.x_min << "\n";
  os << "# label birth_time birth_size lifetime|flag\n";
  for (std::size_t i = 0; i < tree.records.size(); ++i) {
    const auto& r = tree.records[i];
    os << tree.label(i).str() << ' ' << std::setprecision(17) << r.birth_time << ' ' << r.birth_size << ' ';
    if (r.grown && r.truncation == Truncation::killed_below)
      os << r.lifetime;
    else
      os << truncation_name(r.truncation);
    if (r.grown && r.truncation == Truncation::horizon) os << ':' << r.lifetime;
    os << '\n';
  }
}

std::vector<CellRecord> read_tree_records(std::istream& is) {
  std::vector<CellRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string label, life;
    CellRecord r;
    ss >> label >> r.birth_time >> r.birth_size >> life;
    CellLabel l = CellLabel::parse(label);
    r.generation = static_cast<std::uint32_t>(l.generation());
    r.ordinal = l.word.empty() ? 0 : l.word.back();
    if (life == "killed_below") {
      r.truncation = Truncation::killed_below;
    } else if (life == "generation_capped") {
      r.truncation = Truncation::generation_capped;
    } else if (life.rfind("horizon", 0) == 0) {
      r.grown = true;
      r.truncation = Truncation::horizon;
      if (life.size() > 8) r.lifetime = std::stod(life.substr(8));
    } else {
      r.grown = true;
      r.truncation = Truncation::killed_below;
      r.lifetime = std::stod(life);
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_profile_csv(std::ostream& os, const AreaProfile& p) {
  os << "t,A\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < p.breakpoints.size(); ++i) os << p.breakpoints[i] << ',' << p.cumulative[i] << '\n';
}

}  // namespace gfsim
