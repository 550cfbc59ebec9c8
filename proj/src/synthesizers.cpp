#include "assouad/synthesizers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "assouad/errors.hpp"
#include "assouad/estimators.hpp"

namespace assouad {

namespace {

constexpr int kLeft = -1, kRight = 1;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

// Side of the parent a boundary child sits on.
int side_of(const KrsTree& t, int v) {
  const KrsNode& n = t.nodes[v];
  const KrsNode& par = t.nodes[n.parent];
  return (n.left - par.left) <= (par.right - n.right) ? kLeft : kRight;
}

int boundary_child(const KrsTree& t, int v, int side) {
  const KrsNode& n = t.nodes[v];
  for (int c = n.first_child; c < n.first_child + n.child_count; ++c)
    if (t.nodes[c].cls == ChildClass::Boundary && side_of(t, c) == side) return c;
  return -1;
}

// Neighbour of v on the given side at the same level, if adjacent (gap <= c s^k).
int adjacent_node(const KrsTree& t, int v, int side) {
  const KrsNode& n = t.nodes[v];
  const int u = v + side;
  if (u < t.level_begin[n.level] || u >= t.level_begin[n.level + 1]) return -1;
  const KrsNode& m = t.nodes[u];
  const Rational gap = side == kLeft ? Rational(n.left - m.right) : Rational(m.left - n.right);
  return gap <= t.params.c * t.scale(n.level) ? u : -1;
}

bool interior(ChildClass c) { return c == ChildClass::Interior || c == ChildClass::DistinguishedInterior; }

int distinguished_child(const KrsTree& t, int v) {
  const KrsNode& n = t.nodes[v];
  for (int c = n.first_child; c < n.first_child + n.child_count; ++c)
    if (t.nodes[c].cls == ChildClass::DistinguishedInterior) return c;
  return -1;
}

double estimate_set(const KrsTree& t, EstimateKind kind) {
  if (!t.set) throw DomainError("tree carries no set descriptor; pass the dimension estimate explicitly");
  return set_dimension(*t.set, kind, default_window(*t.set, 12)).value;
}

int max_children(const KrsTree& t) {
  int m = 1;
  for (const auto& n : t.nodes) m = std::max(m, n.child_count);
  return m;
}

std::vector<std::string> words_of(const KrsTree& t, const std::vector<int>& nodes) {
  std::vector<std::string> out;
  for (int v : nodes) out.push_back(t.word(v));
  return out;
}

int count_splits(const KrsTree& t, const std::vector<int>& nodes) {
  int s = 0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) s += t.splits(nodes[i]) ? 1 : 0;
  return s;
}

struct BoundaryChain {
  std::vector<int> nodes;     // start node first
  std::vector<int> adjacent;  // adjacent boundary chain, its start first (may be empty)
};

// One-sided boundary chain from v of exactly `len` steps, or empty.
std::vector<int> chain_from(const KrsTree& t, int v, int side, int len) {
  std::vector<int> out{v};
  for (int i = 0; i < len; ++i) {
    const int c = boundary_child(t, out.back(), side);
    if (c < 0) return {};
    out.push_back(c);
  }
  return out;
}

// The adjacent boundary path: from the neighbour of the start on the path's
// side, following boundary children that face the path while they stay adjacent.
std::vector<int> adjacent_chain(const KrsTree& t, const std::vector<int>& path, int side) {
  const int w = adjacent_node(t, path.front(), side);
  if (w < 0) return {};
  std::vector<int> out{w};
  for (std::size_t i = 1; i < path.size(); ++i) {
    const int c = boundary_child(t, out.back(), -side);
    if (c < 0 || adjacent_node(t, path[i], side) != c) break;
    out.push_back(c);
  }
  return out;
}

// True when v or one of its ancestors is marked.
bool under_marked(const KrsTree& t, const std::vector<char>& marked, int v) {
  for (; v >= 0; v = t.nodes[v].parent)
    if (marked[v]) return true;
  return false;
}

// Marks the weighted part of a path (everything after its start).
void mark(std::vector<char>& marked, const std::vector<int>& nodes) {
  for (std::size_t i = 1; i < nodes.size(); ++i) marked[nodes[i]] = 1;
}

// Smallest start level >= n_min, then smallest word, left side first; starts
// inside the subtree of an earlier path are skipped so rungs stay disjoint.
std::optional<std::pair<BoundaryChain, int>> find_boundary_path(const KrsTree& t, int n_min, int len,
                                                                const std::vector<char>& marked) {
  for (int level = std::max(0, n_min); level + len <= t.depth(); ++level)
    for (int v = t.level_begin[level]; v < t.level_begin[level + 1]; ++v)
      for (int side : {kLeft, kRight}) {
        if (under_marked(t, marked, v)) continue;
        auto nodes = chain_from(t, v, side, len);
        if (nodes.empty()) continue;
        BoundaryChain bc;
        bc.nodes = std::move(nodes);
        bc.adjacent = adjacent_chain(t, bc.nodes, side);
        return std::make_pair(std::move(bc), side);
      }
  return std::nullopt;
}

// Path from a node at level >= n_min of exactly `len` steps maximizing the
// number of splitting intervals; ties go to the smallest word.
std::vector<int> best_splitting_path(const KrsTree& t, int n_min, int len, const std::vector<char>& marked) {
  for (int level = std::max(0, n_min); level + len <= t.depth(); ++level) {
    std::map<std::pair<int, int>, int> memo;  // (node, steps) -> best splits, -1 if unreachable
    std::function<int(int, int)> best = [&](int v, int steps) -> int {
      if (steps == 0) return 0;
      auto key = std::make_pair(v, steps);
      if (auto it = memo.find(key); it != memo.end()) return it->second;
      const KrsNode& n = t.nodes[v];
      int b = -1;
      for (int c = n.first_child; c < n.first_child + n.child_count; ++c) {
        const int r = best(c, steps - 1);
        if (r >= 0) b = std::max(b, r + (t.splits(v) ? 1 : 0));
      }
      memo[key] = b;
      return b;
    };
    int top = -1, start = -1;
    for (int v = t.level_begin[level]; v < t.level_begin[level + 1]; ++v) {
      if (under_marked(t, marked, v)) continue;
      const int b = best(v, len);
      if (b > top) top = b, start = v;
    }
    if (start < 0) continue;
    std::vector<int> path{start};
    for (int steps = len; steps > 0; --steps) {
      const int v = path.back();
      const KrsNode& n = t.nodes[v];
      const int need = best(v, steps) - (t.splits(v) ? 1 : 0);
      for (int c = n.first_child; c < n.first_child + n.child_count; ++c)
        if (best(c, steps - 1) == need) {
          path.push_back(c);
          break;
        }
    }
    return path;
  }
  return {};
}

// Rung plan: minimal lengths l_j = j, strictly separated, slack to rung 1,
// final rungs truncated at the tree depth.
struct Rung {
  int n_min, length;
};

std::vector<Rung> plan_ladder(int depth, int start, int rungs, int separation) {
  int footprint = 0;
  for (int j = 1; j <= rungs; ++j) footprint += j + (j > 1 ? separation : 0);
  const int slack = std::max(0, depth - start - footprint);
  std::vector<Rung> out;
  int n = start;
  for (int j = 1; j <= rungs; ++j) {
    int len = j + (j == 1 ? slack : 0);
    len = std::min(len, depth - n);
    if (len < 1) break;
    out.push_back({n, len});
    n += len + separation;
  }
  return out;
}

void record_range(SynthesisManifest& mf, const KrsTree& t, const std::vector<Rational>& w) {
  bool first = true;
  for (std::size_t v = 0; v < w.size(); ++v) {
    if (t.nodes[v].parent < 0) continue;
    if (first || w[v] < mf.min_weight) mf.min_weight = w[v];
    if (first || w[v] > mf.max_weight) mf.max_weight = w[v];
    first = false;
  }
}

WeightedMeasure finish(std::shared_ptr<const KrsTree> tree, const std::vector<Rational>& w, const std::string& label) {
  auto m = assign_weights(std::move(tree), [&](const KrsTree&, int v) { return w[v]; });
  m.label = label;
  return m;
}

// s^x rounded to a common dyadic grid, so sums of masses keep small denominators.
enum class Round { Nearest, Down, Up };

// Down/Up step one grid cell past the double value, so the result lands on the
// requested side of the exact power despite rounding in exp/log.
Rational weight_power(const Rational& s, double x, Round mode = Round::Nearest) {
  const double v = std::exp(x * log_of(s));
  if (!(v > 0) || !std::isfinite(v)) throw DomainError("weight s^" + fmt(x) + " is not representable");
  const double scaled = std::ldexp(v, 40);
  const double grid = mode == Round::Down ? std::floor(scaled) - 1 : mode == Round::Up ? std::ceil(scaled) + 1
                                                                                       : std::nearbyint(scaled);
  mpz_class num;
  mpz_set_d(num.get_mpz_t(), grid);
  if (num <= 0) throw DomainError("weight s^" + fmt(x) + " underflows the 2^-40 grid");
  mpz_class den = 1;
  den <<= 40;
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational root_weight(const KrsTree& t) { return Rational(1, t.level_size(0)); }

}  // namespace

CalibrationResult calibrate_s(const SetDescriptor& desc, const Rational& epsilon, double dim_lower, double dim_upper,
                              const CalibrateOptions& options) {
  if (epsilon <= 0) throw DomainError("calibration needs epsilon > 0");
  const double eps = to_double(epsilon);
  std::string deepest = "no grid value produced a tree";
  for (const auto& s : options.grid) {
    KrsParams params;
    params.s = s;
    params.max_level = options.depth;
    std::shared_ptr<const KrsTree> tree;
    try {
      params.validate();
      tree = std::make_shared<const KrsTree>(build_tree(desc, params));
    } catch (const ConstructionError& e) {
      deepest = "s=" + to_string(s) + ": " + e.what();
      continue;
    } catch (const DomainError& e) {
      deepest = "s=" + to_string(s) + ": " + e.what();
      continue;
    }
    const double ls = -log_of(s);
    const double lo = std::exp(ls * (dim_lower - eps)), hi = std::exp(ls * (dim_upper + eps));
    std::vector<LevelEvidence> ev;
    for (int k = 0; k < tree->depth(); ++k) {
      LevelEvidence e;
      e.level = k;
      e.min_children = 1 << 30;
      for (int v = tree->level_begin[k]; v < tree->level_begin[k + 1]; ++v) {
        e.min_children = std::min(e.min_children, tree->nodes[v].child_count);
        e.max_children = std::max(e.max_children, tree->nodes[v].child_count);
      }
      e.lower_bound = lo;
      e.upper_bound = hi;
      // A lower bound below 1 is vacuous: every node has a child.
      e.ok = (lo <= 1 || e.min_children >= lo - 1e-12) && e.max_children <= hi + 1e-12;
      ev.push_back(e);
    }
    int k_star = static_cast<int>(ev.size());
    while (k_star > 0 && ev[k_star - 1].ok) --k_star;
    if (k_star <= options.max_k_star && k_star < static_cast<int>(ev.size())) {
      CalibrationResult r;
      r.s_star = s;
      r.k_star = k_star;
      r.evidence = std::move(ev);
      r.tree = std::move(tree);
      return r;
    }
    const auto& bad = ev[std::max(0, k_star - 1)];
    deepest = "s=" + to_string(s) + ": level " + std::to_string(bad.level) + " has child counts [" +
              std::to_string(bad.min_children) + ", " + std::to_string(bad.max_children) + "] outside [" +
              fmt(lo) + ", " + fmt(hi) + "]";
  }
  throw CalibrationError("no s on the grid satisfies the child-count bounds; deepest violation: " + deepest);
}

SynthesisResult synthesize_upper(std::shared_ptr<const KrsTree> tree, std::optional<Rational> D,
                                 const Rational& epsilon, const UpperOptions& options) {
  if (!tree) throw DomainError("synthesize_upper needs a tree");
  const KrsTree& t = *tree;
  if (t.depth() < options.min_depth)
    throw DomainError("tree depth " + std::to_string(t.depth()) + " is below the minimum " +
                      std::to_string(options.min_depth));
  if (epsilon <= 0) throw DomainError("epsilon must be positive");
  const double dim_upper = options.dim_upper ? *options.dim_upper : estimate_set(t, EstimateKind::UpperSet);
  if (D && to_double(*D) <= dim_upper)
    throw DomainError("D must exceed upper Assouad estimate (" + fmt(to_double(*D)) + " <= " + fmt(dim_upper) + ")");

  const Rational& s = t.params.s;
  SynthesisResult out;
  SynthesisManifest& mf = out.manifest;
  mf.s = s;
  mf.epsilon = epsilon;
  mf.dim_upper_estimate = dim_upper;
  if (D) mf.D = to_double(*D);

  const int rungs = D ? options.ladder : options.ladder_inf;
  const int start = D ? options.start_level : options.start_level_inf;
  const auto plan = plan_ladder(t.depth(), start, rungs, options.separation);
  std::vector<double> Dj;
  for (std::size_t j = 0; j < plan.size(); ++j) {
    if (D) Dj.push_back(to_double(*D));
    else if (j < options.D_sequence.size()) Dj.push_back(options.D_sequence[j]);
    else Dj.push_back(dim_upper + static_cast<double>(j + 1));
  }
  if (!D) mf.D_ladder = Dj;

  // Strategy A: one-sided boundary paths for every rung.
  std::vector<BoundaryChain> chains;
  if (!options.force_zeta) {
    std::vector<char> marked(t.nodes.size(), 0);
    int n_min = start;
    for (std::size_t j = 0; j < plan.size(); ++j) {
      const int need = std::max(plan[j].n_min, n_min);
      auto found = find_boundary_path(t, need, plan[j].length, marked);
      if (!found) {
        chains.clear();
        break;
      }
      const int end = t.nodes[found->first.nodes.back()].level;
      mark(marked, found->first.nodes);
      mark(marked, found->first.adjacent);
      chains.push_back(std::move(found->first));
      n_min = end + options.separation;
    }
    if (chains.size() != plan.size()) chains.clear();
  }

  std::vector<Rational> w(t.nodes.size());
  std::vector<Rational> fixed(t.nodes.size(), Rational(-1));  // explicit path weights
  if (!chains.empty() && !plan.empty()) {
    mf.strategy = "longbdy";
    std::optional<Rational> p;
    if (D) {
      const Rational a = weight_power(s, to_double(*D));
      p = weight_power(s, to_double(*D) - to_double(epsilon));
      if (!(a < *p)) throw CalibrationError("weights need a = s^D < p = s^(D-eps); increase epsilon");
      const int maxN = max_children(t);
      if (*p * maxN > 1)
        throw CalibrationError("p = s^(D-eps) = " + fmt(to_double(*p)) + " exceeds 1/max N_w = 1/" +
                               std::to_string(maxN) + "; the child-count bounds fail for this s (use calibrate_s)");
      mf.a = a;
      mf.p = p;
    }
    for (std::size_t j = 0; j < chains.size(); ++j) {
      const Rational aj = D ? *mf.a : weight_power(s, Dj[j]);
      for (std::size_t i = 1; i < chains[j].nodes.size(); ++i) fixed[chains[j].nodes[i]] = aj;
      for (std::size_t i = 1; i < chains[j].adjacent.size(); ++i) fixed[chains[j].adjacent[i]] = aj;
      PathManifest pm;
      pm.rung = static_cast<int>(j + 1);
      pm.role = "boundary";
      pm.words = words_of(t, chains[j].nodes);
      pm.start_level = t.nodes[chains[j].nodes.front()].level;
      pm.length = static_cast<int>(chains[j].nodes.size()) - 1;
      pm.splits = count_splits(t, chains[j].nodes);
      pm.weight = aj;
      pm.exponent = Dj[j];
      mf.paths.push_back(pm);
      if (chains[j].adjacent.size() > 1) {
        pm.role = "adjacent";
        pm.words = words_of(t, chains[j].adjacent);
        pm.start_level = t.nodes[chains[j].adjacent.front()].level;
        pm.length = static_cast<int>(chains[j].adjacent.size()) - 1;
        pm.splits = count_splits(t, chains[j].adjacent);
        mf.paths.push_back(pm);
      }
    }
    for (int v = 0; v < t.level_size(0); ++v) w[v] = root_weight(t);
    for (const auto& n : t.nodes) {
      if (n.child_count == 0) continue;
      const int b = n.first_child, e = n.first_child + n.child_count;
      if (D) {
        // Fixed children keep a, other non-distinguished children get p, the
        // distinguished child takes the residual.
        Rational used = 0;
        int dist = -1;
        for (int c = b; c < e; ++c) {
          if (fixed[c] >= 0) w[c] = fixed[c];
          else if (t.nodes[c].cls == ChildClass::DistinguishedInterior) dist = c;
          else w[c] = *p;
          if (c != dist) used += w[c];
        }
        w[dist] = 1 - used;
      } else {
        Rational used = 0;
        int free_count = 0;
        for (int c = b; c < e; ++c) {
          if (fixed[c] >= 0) used += (w[c] = fixed[c]);
          else ++free_count;
        }
        if (free_count == 0) throw CalibrationError("a path interval is an only child; no room for its residual");
        const Rational share = (1 - used) / free_count;
        for (int c = b; c < e; ++c)
          if (fixed[c] < 0) w[c] = share;
      }
    }
  } else {
    // Strategy B: splitting paths weighted through the proportionality constant.
    mf.strategy = "zeta";
    const ZetaEstimate z = zeta_estimate(t);
    if (z.zeta_hat <= 0) throw DomainError("no admissible paths at depth: the proportionality estimate is 0");
    const double zeta = to_double(z.zeta_hat);
    mf.zeta_hat = zeta;
    int n_min = start;
    std::vector<char> marked(t.nodes.size(), 0);
    std::vector<std::vector<int>> paths;
    for (std::size_t j = 0; j < plan.size(); ++j) {
      auto path = best_splitting_path(t, std::max(plan[j].n_min, n_min), plan[j].length, marked);
      if (path.empty()) break;
      mark(marked, path);
      n_min = t.nodes[path.back()].level + options.separation;
      paths.push_back(std::move(path));
    }
    if (paths.empty()) throw DomainError("no admissible paths at depth " + std::to_string(t.depth()));
    if (D) {
      mf.a = weight_power(s, to_double(*D) / zeta);
      mf.p = weight_power(s, to_double(*D) - to_double(epsilon));
    }
    for (std::size_t j = 0; j < paths.size(); ++j) {
      const Rational aj = D ? *mf.a : weight_power(s, Dj[j] / zeta);
      for (std::size_t i = 1; i < paths[j].size(); ++i) {
        const int v = paths[j][i];
        fixed[v] = t.nodes[t.nodes[v].parent].child_count == 1 ? Rational(1) : aj;
      }
      PathManifest pm;
      pm.rung = static_cast<int>(j + 1);
      pm.role = "special";
      pm.words = words_of(t, paths[j]);
      pm.start_level = t.nodes[paths[j].front()].level;
      pm.length = static_cast<int>(paths[j].size()) - 1;
      pm.splits = count_splits(t, paths[j]);
      pm.weight = aj;
      pm.exponent = Dj[j];
      mf.paths.push_back(pm);
    }
    for (int v = 0; v < t.level_size(0); ++v) w[v] = root_weight(t);
    for (const auto& n : t.nodes) {
      if (n.child_count == 0) continue;
      const int b = n.first_child, e = n.first_child + n.child_count;
      Rational used = 0;
      int free_count = 0;
      for (int c = b; c < e; ++c) {
        if (fixed[c] >= 0) used += (w[c] = fixed[c]);
        else ++free_count;
      }
      if (free_count == 0) continue;
      const Rational share = (1 - used) / free_count;
      for (int c = b; c < e; ++c)
        if (fixed[c] < 0) w[c] = share;
    }
  }
  record_range(mf, t, w);
  out.measure = finish(tree, w, mf.strategy + (D ? " D=" + fmt(to_double(*D)) : std::string(" D=inf")));
  if (D) out.measure.declared_min_weight = mf.a;
  return out;
}

std::vector<std::pair<std::string, bool>> lower_upper_inequalities(const Rational& s, const Rational& d,
                                                                   const Rational& epsilon) {
  const double sd = to_double(s), dd = to_double(d), e = to_double(epsilon);
  return {
      {"s^-eps - 2 s^d >= 1", std::pow(sd, -e) - 2 * std::pow(sd, dd) >= 1},
      {"s^eps + s^d < 1", std::pow(sd, e) + std::pow(sd, dd) < 1},
      {"s^-(d+eps) >= 3", std::pow(sd, -(dd + e)) >= 3},
  };
}

SynthesisResult synthesize_lower_upper(std::shared_ptr<const KrsTree> tree, const Rational& d, const Rational& D,
                                       const Rational& epsilon, const LowerUpperOptions& options) {
  if (!tree) throw DomainError("synthesize_lower_upper needs a tree");
  const KrsTree& t = *tree;
  if (d <= 0) throw DomainError("d must be positive");
  if (epsilon <= 0) throw DomainError("epsilon must be positive");
  const double dim_lower = options.dim_lower ? *options.dim_lower : estimate_set(t, EstimateKind::LowerSet);
  const double dim_upper = options.dim_upper ? *options.dim_upper : estimate_set(t, EstimateKind::UpperSet);
  const double dd = to_double(d), DD = to_double(D), e = to_double(epsilon);
  if (dd >= dim_lower)
    throw DomainError("d must lie below the lower Assouad estimate (" + fmt(dd) + " >= " + fmt(dim_lower) + ")");
  if (DD <= dim_upper)
    throw DomainError("D must exceed upper Assouad estimate (" + fmt(DD) + " <= " + fmt(dim_upper) + ")");
  if (e >= std::min(dim_lower - dd, DD - dim_upper) / 2)
    throw DomainError("epsilon must be below min(dim_L - d, D - dim_A)/2 = " +
                      fmt(std::min(dim_lower - dd, DD - dim_upper) / 2));
  for (const auto& n : t.nodes)
    if (n.child_count > 0 && n.child_count < 3)
      throw DomainError("node " + t.word(static_cast<int>(&n - t.nodes.data())) + " has " +
                        std::to_string(n.child_count) + " children; the scheme needs at least 3");

  const Rational& s = t.params.s;
  const Rational sd = weight_power(s, dd, Round::Down), sD = weight_power(s, DD, Round::Up), p = weight_power(s, DD - e);
  SynthesisResult out;
  SynthesisManifest& mf = out.manifest;
  mf.strategy = "lower_upper";
  mf.s = s;
  mf.epsilon = epsilon;
  mf.D = DD;
  mf.d = dd;
  mf.p = p;
  mf.dim_upper_estimate = dim_upper;
  mf.dim_lower_estimate = dim_lower;
  mf.inequalities = lower_upper_inequalities(s, d, epsilon);

  // Branch node: first node (level >= start_level) with two interior children
  // that both have descendants to the full depth.
  int branch = -1;
  for (int v = t.level_begin[std::min(options.start_level, t.depth())]; v < static_cast<int>(t.nodes.size()) && branch < 0;
       ++v) {
    const KrsNode& n = t.nodes[v];
    if (n.level + 1 >= t.depth()) break;
    int interiors = 0;
    for (int c = n.first_child; c < n.first_child + n.child_count; ++c) interiors += interior(t.nodes[c].cls) ? 1 : 0;
    if (interiors >= 2) branch = v;
  }
  if (branch < 0) throw DomainError("no node with two interior children above the last level");

  std::vector<Rational> fixed(t.nodes.size(), Rational(-1));
  std::vector<int> on_path(t.nodes.size(), 0);
  std::vector<int> starts;
  {
    const KrsNode& n = t.nodes[branch];
    for (int c = n.first_child; c < n.first_child + n.child_count && starts.size() < 2; ++c)
      if (interior(t.nodes[c].cls)) starts.push_back(c);
  }
  const Rational weights[2] = {sd, sD};
  const char* roles[2] = {"lower", "upper"};
  for (int i = 0; i < 2; ++i) {
    std::vector<int> path{branch, starts[i]};
    while (t.nodes[path.back()].child_count > 0) path.push_back(distinguished_child(t, path.back()));
    for (std::size_t k = 1; k < path.size(); ++k) {
      fixed[path[k]] = weights[i];
      on_path[path[k]] = 1;
    }
    PathManifest pm;
    pm.role = roles[i];
    pm.words = words_of(t, path);
    pm.start_level = t.nodes[branch].level;
    pm.length = static_cast<int>(path.size()) - 1;
    pm.splits = count_splits(t, path);
    pm.weight = weights[i];
    pm.exponent = i == 0 ? dd : DD;
    mf.paths.push_back(pm);
  }

  std::vector<Rational> w(t.nodes.size());
  for (int v = 0; v < t.level_size(0); ++v) w[v] = root_weight(t);
  for (const auto& n : t.nodes) {
    if (n.child_count == 0) continue;
    const int b = n.first_child, e2 = n.first_child + n.child_count;
    bool path_group = false;
    for (int c = b; c < e2; ++c) path_group = path_group || on_path[c];
    Rational used = 0;
    int free_count = 0;
    for (int c = b; c < e2; ++c) {
      if (fixed[c] >= 0) used += (w[c] = fixed[c]);
      else if (!path_group && t.nodes[c].cls == ChildClass::Boundary) used += (w[c] = p);
      else ++free_count;
    }
    if (free_count == 0) throw CalibrationError("sibling group of " + t.word(b) + " leaves no room for equal shares");
    const Rational share = (1 - used) / free_count;
    for (int c = b; c < e2; ++c)
      if (w[c] == 0) w[c] = share;
  }
  for (std::size_t v = 0; v < w.size(); ++v) {
    if (t.nodes[v].parent < 0) continue;
    if (w[v] < sD || w[v] > sd)
      throw CalibrationError("weight " + fmt(to_double(w[v])) + " of " + t.word(static_cast<int>(v)) +
                             " leaves [s^D, s^d] = [" + fmt(to_double(sD)) + ", " + fmt(to_double(sd)) +
                             "]; s is too large for (d, D, eps)");
  }
  record_range(mf, t, w);
  out.measure = finish(tree, w, "lower_upper d=" + fmt(dd) + " D=" + fmt(DD));
  return out;
}

Measure floor_lower_dimension(const Measure& m, const Rational& e) {
  Measure out = add_atom(m, e);
  std::visit([&](auto& mm) { mm.label = measure_label(m) + " + delta_" + to_string(e) + " (dim_L floor)"; }, out);
  return out;
}

std::pair<Rational, Rational> adjacent_cousin_ratio_range(const WeightedMeasure& m) {
  const KrsTree& t = *m.tree;
  Rational lo = 1, hi = 1;
  for (int k = 1; k <= t.depth(); ++k)
    for (int v = t.level_begin[k]; v + 1 < t.level_begin[k + 1]; ++v) {
      if (t.nodes[v].parent == t.nodes[v + 1].parent) continue;
      if (adjacent_node(t, v, kRight) != v + 1) continue;
      if (m.mass[v] == 0 || m.mass[v + 1] == 0) continue;
      Rational r = m.mass[v] / m.mass[v + 1];
      r.canonicalize();
      Rational inv = 1 / r;
      inv.canonicalize();
      lo = min_of(lo, min_of(r, inv));
      hi = max_of(hi, max_of(r, inv));
    }
  return {lo, hi};
}

}  // namespace assouad
