#include "assouad/krs.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "assouad/errors.hpp"

namespace assouad {

void KrsParams::validate() const {
  if (s <= 0 || s >= Rational(1, 3)) throw DomainError("KRS parameter s must lie in (0, 1/3), got " + to_string(s));
  if (c <= 0 || C < c) throw DomainError("KRS parameters need 0 < c <= C");
  if (max_level < 1) throw DomainError("KRS max_level must be >= 1");
}

std::string class_name(ChildClass c) {
  switch (c) {
    case ChildClass::Root: return "root";
    case ChildClass::Boundary: return "boundary";
    case ChildClass::Interior: return "interior";
    case ChildClass::DistinguishedInterior: return "distinguished";
  }
  return "?";
}

std::string KrsTree::word(int node) const {
  std::vector<int> idx;
  for (int v = node; v >= 0; v = nodes[v].parent) idx.push_back(nodes[v].index);
  std::string out;
  for (auto it = idx.rbegin(); it != idx.rend(); ++it) {
    if (!out.empty()) out += '.';
    out += std::to_string(*it);
  }
  return out;
}

Rational KrsTree::scale(int k) const { return int_power(params.s, static_cast<unsigned>(k)); }

namespace {

struct Group {
  Rational lo, hi;
  std::vector<Cell> cover;  // cells covering E ∩ [lo, hi]
};

// Splits E ∩ [lo, hi] into consecutive groups of diameter <= 3u/2, cutting at
// the largest complementary gap available in each window.
std::vector<Group> make_groups(const SetDescriptor& desc, const std::vector<Cell>& cells, const Rational& lo,
                               const Rational& hi, const Rational& u, const Resolution& res) {
  std::vector<Group> out;
  const Rational reach = u * 3 / 2;
  Rational cur = lo;
  for (;;) {
    if (hi - cur <= reach) {
      out.push_back({cur, hi, {}});
      break;
    }
    // Coarse-to-fine: the first non-empty threshold already holds the
    // largest gaps of the window.
    std::vector<Gap> gaps;
    Rational min_len = u;
    for (int attempt = 0; attempt < 8 && gaps.empty(); ++attempt, min_len /= 4) {
      for (auto& g : gaps_within(desc, cells, cur, cur + reach, min_len, res)) {
        if (g.left >= cur && g.left < hi) gaps.push_back(std::move(g));
      }
    }
    if (gaps.empty()) {
      throw ConstructionError("no complementary gap of E near " + std::to_string(cur.get_d()) +
                              " at scale " + std::to_string(u.get_d()) + "; try a smaller s");
    }
    const Rational target = cur + u;
    const Gap* best = &gaps.front();
    for (const auto& g : gaps) {
      const Rational len = g.right - g.left, best_len = best->right - best->left;
      if (len > best_len || (len == best_len && abs_of(g.left - target) < abs_of(best->left - target))) best = &g;
    }
    out.push_back({cur, best->left, {}});
    cur = best->right;
  }
  for (auto& g : out) g.cover = cover_cells(desc, cells, g.lo, g.hi, res);
  return out;
}

Rational pick_point(const SetDescriptor& desc, const std::vector<Cell>& cells, const Rational& lo, const Rational& hi,
                    const Resolution& res) {
  if (lo == hi) return lo;
  const Rational mid = (lo + hi) / 2;
  const Rational p = predecessor_within(desc, cells, mid, false, res)->value;
  const Rational q = successor_within(desc, cells, mid, false, res)->value;
  const Rational sp = min_of(p - lo, hi - p);
  const Rational sq = min_of(q - lo, hi - q);
  return sq > sp ? q : p;
}

struct Planned {
  Rational lo, hi, x;
  Rational need_l, need_r, want_l, want_r;
  Rational ext_l, ext_r;
};

// Turns the groups of one parent into child intervals. `room_l`/`room_r` are
// the space available outside the extreme groups (nullopt: unbounded).
std::vector<Planned> plan_children(const SetDescriptor& desc, const std::vector<Group>& groups, const Rational& u,
                                   const KrsParams& p, const std::optional<Rational>& room_l,
                                   const std::optional<Rational>& room_r) {
  const Rational margin = p.c * u;
  const Rational floor_ext = p.c * p.s * (1 + p.s / 2) * u;
  std::vector<Planned> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    Planned pl;
    pl.lo = g.lo;
    pl.hi = g.hi;
    pl.x = pick_point(desc, g.cover, g.lo, g.hi, p.resolution);
    pl.need_l = max_of(Rational(0), margin - (pl.x - g.lo));
    pl.need_r = max_of(Rational(0), margin - (g.hi - pl.x));
    pl.want_l = max_of(pl.need_l, floor_ext);
    pl.want_r = max_of(pl.need_r, floor_ext);
    out.push_back(std::move(pl));
  }
  auto outer = [&](const Rational& need, const Rational& want, const std::optional<Rational>& room) {
    if (!room) return want;
    if (need > *room) {
      throw ConstructionError("child margin does not fit inside its parent at scale " + std::to_string(u.get_d()) +
                              "; try a smaller s");
    }
    return min_of(want, *room);
  };
  out.front().ext_l = outer(out.front().need_l, out.front().want_l, room_l);
  out.back().ext_r = outer(out.back().need_r, out.back().want_r, room_r);
  for (std::size_t i = 1; i < out.size(); ++i) {
    Planned& a = out[i - 1];
    Planned& b = out[i];
    const Rational slack = (b.lo - a.hi) - a.need_r - b.need_l;
    if (slack <= 0) {
      throw ConstructionError("gap too narrow to separate children at scale " + std::to_string(u.get_d()) +
                              "; try a smaller s");
    }
    const Rational extra = slack * 7 / 16;
    a.ext_r = min_of(a.want_r, a.need_r + extra);
    b.ext_l = min_of(b.want_l, b.need_l + extra);
  }
  return out;
}

KrsNode make_node(const Planned& pl, int level, int index, int parent) {
  KrsNode n;
  n.parent = parent;
  n.level = level;
  n.index = index;
  n.left = pl.lo - pl.ext_l;
  n.right = pl.hi + pl.ext_r;
  n.hull_lo = pl.lo;
  n.hull_hi = pl.hi;
  n.point = pl.x;
  return n;
}

}  // namespace

KrsTree build_tree(const SetDescriptor& desc, const KrsParams& params) {
  params.validate();
  KrsTree tree;
  tree.params = params;
  tree.set = desc;

  std::vector<Rational> scale(params.max_level + 2);
  scale[0] = 1;
  for (std::size_t k = 1; k < scale.size(); ++k) scale[k] = scale[k - 1] * params.s;

  auto root_groups = make_groups(desc, root_cells(desc), desc.hull_lo(), desc.hull_hi(), scale[0], params.resolution);
  const auto roots = plan_children(desc, root_groups, scale[0], params, std::nullopt, std::nullopt);
  tree.level_begin.push_back(0);
  // Covers of the E-content of the current level, indexed from level_begin.
  std::vector<std::vector<Cell>> covers;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    tree.nodes.push_back(make_node(roots[i], 0, static_cast<int>(i), -1));
    covers.push_back(std::move(root_groups[i].cover));
  }

  for (int k = 0; k < params.max_level; ++k) {
    const int begin = tree.level_begin.back();
    const int end = static_cast<int>(tree.nodes.size());
    tree.level_begin.push_back(end);
    const Rational& u = scale[k + 1];
    const Rational boundary_margin = params.c * u;
    std::vector<std::vector<Cell>> next_covers;
    for (int v = begin; v < end; ++v) {
      const KrsNode parent = tree.nodes[v];  // copy: nodes may reallocate below
      auto groups = make_groups(desc, covers[v - begin], parent.hull_lo, parent.hull_hi, u, params.resolution);
      const auto planned = plan_children(desc, groups, u, params, parent.hull_lo - parent.left,
                                         parent.right - parent.hull_hi);
      const int first = static_cast<int>(tree.nodes.size());
      for (std::size_t i = 0; i < planned.size(); ++i) {
        KrsNode child = make_node(planned[i], k + 1, static_cast<int>(i), v);
        const bool boundary = min_of(child.left - parent.left, parent.right - child.right) < boundary_margin;
        const bool has_x = child.hull_lo <= parent.point && parent.point <= child.hull_hi;
        if (has_x && boundary) {
          throw ConstructionError("distinguished point of " + tree.word(v) +
                                  " falls in a boundary child; try a smaller s");
        }
        child.cls = has_x ? ChildClass::DistinguishedInterior : boundary ? ChildClass::Boundary : ChildClass::Interior;
        tree.nodes.push_back(std::move(child));
        next_covers.push_back(std::move(groups[i].cover));
      }
      tree.nodes[v].first_child = first;
      tree.nodes[v].child_count = static_cast<int>(planned.size());
      if (tree.nodes.size() > params.max_nodes) {
        throw CalibrationError("KRS tree exceeds the node budget of " + std::to_string(params.max_nodes) +
                               " at level " + std::to_string(k + 1) + "; reduce the depth");
      }
    }
    covers = std::move(next_covers);
  }
  tree.level_begin.push_back(static_cast<int>(tree.nodes.size()));
  return tree;
}

bool VerifyReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.pass; });
}

const PropertyCheck& VerifyReport::get(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw DomainError("no property check named " + name);
}

VerifyReport verify_properties(const KrsTree& tree) {
  if (tree.kind != KrsTree::Kind::Krs || !tree.set) throw DomainError("verify_properties needs a KRS tree");
  const SetDescriptor& desc = *tree.set;
  const KrsParams& p = tree.params;
  const Resolution& res = p.resolution;

  std::vector<PropertyCheck> checks;
  auto check = [&](const std::string& name) -> PropertyCheck& {
    for (auto& c : checks) {
      if (c.name == name) return c;
    }
    checks.push_back(PropertyCheck{name, true, 0, 0, {}});
    return checks.back();
  };
  auto record = [&](const std::string& name, bool ok, int node, const std::string& detail) {
    PropertyCheck& c = check(name);
    ++c.checked;
    if (!ok) {
      if (c.pass) c.counterexample = (node >= 0 ? tree.word(node) + ": " : std::string()) + detail;
      c.pass = false;
      ++c.failures;
    }
  };
  // Covers of each node's E-content keep the membership queries local.
  std::vector<std::vector<Cell>> cover(tree.nodes.size());
  for (int v = 0; v < static_cast<int>(tree.nodes.size()); ++v) {
    const KrsNode& n = tree.nodes[v];
    cover[v] = cover_cells(desc, n.parent < 0 ? root_cells(desc) : cover[n.parent], n.hull_lo, n.hull_hi, res);
  }
  int current = 0;
  auto in_set = [&](const Rational& x) { return resolved_member(desc, cover[current], x, res); };
  for (const char* name : {"length", "distinguished_margin", "hull_in_node", "at_least_one_child",
                           "children_nested_disjoint", "children_cover", "boundary_classification",
                           "boundary_count", "interior_child", "distinguished_child", "roots_cover", "adjacency"}) {
    check(name);
  }

  const int depth = tree.depth();
  const int root_count = tree.level_size(0);
  record("roots_cover",
         tree.nodes[0].hull_lo == desc.hull_lo() && tree.nodes[root_count - 1].hull_hi == desc.hull_hi(), -1,
         "roots do not reach the hull of E");

  for (int v = 0; v < static_cast<int>(tree.nodes.size()); ++v) {
    const KrsNode& n = tree.nodes[v];
    current = v;
    const Rational u = tree.scale(n.level);
    const Rational len = n.right - n.left;
    record("length", 2 * p.c * u <= len && len <= 2 * p.C * u, v,
           "length " + to_string(len) + " outside [2cs^k, 2Cs^k]");
    const bool margin_ok = n.point - n.left >= p.c * u && n.right - n.point >= p.c * u && in_set(n.point);
    record("distinguished_margin", margin_ok, v, "x_w = " + to_string(n.point) + " too close to the complement");
    record("hull_in_node", n.left <= n.hull_lo && n.hull_hi <= n.right && in_set(n.hull_lo) && in_set(n.hull_hi), v,
           "extreme points of E not inside the interval");

    if (n.level >= depth) continue;
    record("at_least_one_child", n.child_count >= 1, v, "no children");
    if (n.child_count < 1) continue;

    bool nested = true, covered = true, classes = true;
    int boundary = 0, interior = 0, distinguished = 0;
    bool distinguished_ok = true;
    const Rational margin = p.c * tree.scale(n.level + 1);
    for (int i = 0; i < n.child_count; ++i) {
      const KrsNode& ch = tree.nodes[n.first_child + i];
      nested = nested && n.left <= ch.left && ch.right <= n.right;
      if (i + 1 < n.child_count) {
        const KrsNode& next = tree.nodes[n.first_child + i + 1];
        nested = nested && ch.right < next.left;
        const auto succ = successor_within(desc, cover[v], ch.hull_hi, true, res);
        covered = covered && succ && succ->exact && succ->value == next.hull_lo;
      }
      const bool is_boundary = min_of(ch.left - n.left, n.right - ch.right) < margin;
      const bool has_x = ch.left <= n.point && n.point <= ch.right;
      if (is_boundary) ++boundary;
      if (!is_boundary) ++interior;
      if (ch.cls == ChildClass::DistinguishedInterior) {
        ++distinguished;
        distinguished_ok = distinguished_ok && has_x && !is_boundary;
      }
      const ChildClass expected = is_boundary ? ChildClass::Boundary
                                  : ch.cls == ChildClass::DistinguishedInterior ? ChildClass::DistinguishedInterior
                                                                                : ChildClass::Interior;
      classes = classes && ch.cls == expected;
    }
    const KrsNode& first = tree.nodes[n.first_child];
    const KrsNode& last = tree.nodes[n.first_child + n.child_count - 1];
    covered = covered && first.hull_lo == n.hull_lo && last.hull_hi == n.hull_hi;
    record("children_nested_disjoint", nested, v, "children overlap or leave the parent");
    record("children_cover", covered, v, "children miss points of E");
    record("boundary_classification", classes, v, "child classification disagrees with the boundary rule");
    record("boundary_count", boundary <= 2, v, std::to_string(boundary) + " boundary children");
    record("interior_child", interior >= 1, v, "no interior child");
    record("distinguished_child", distinguished == 1 && distinguished_ok, v,
           "x_w is not in exactly one interior child");
  }

  for (int k = 0; k <= depth; ++k) {
    const Rational margin = p.c * tree.scale(k);
    std::vector<char> foreign_left(tree.level_size(k), 0), foreign_right(tree.level_size(k), 0);
    for (int v = tree.level_begin[k]; v + 1 < tree.level_begin[k + 1]; ++v) {
      const KrsNode& a = tree.nodes[v];
      const KrsNode& b = tree.nodes[v + 1];
      if (b.left - a.right > margin) continue;
      if (a.parent != b.parent) {
        foreign_right[v - tree.level_begin[k]] = 1;
        foreign_left[v + 1 - tree.level_begin[k]] = 1;
      }
    }
    for (int i = 0; i < tree.level_size(k); ++i) {
      record("adjacency", !(foreign_left[i] && foreign_right[i]), tree.level_begin[k] + i,
             "adjacent to non-siblings on both sides");
    }
  }
  return VerifyReport{std::move(checks)};
}

namespace {

int child_of_class_count(const KrsTree& tree, int v, ChildClass cls) {
  int n = 0;
  for (int i = 0; i < tree.nodes[v].child_count; ++i) n += tree.nodes[tree.nodes[v].first_child + i].cls == cls;
  return n;
}

PathRecord make_record(const KrsTree& tree, std::vector<int> path) {
  PathRecord r;
  r.start_node = path.front();
  r.start_word = tree.word(path.front());
  r.start_level = tree.nodes[path.front()].level;
  r.length = static_cast<int>(path.size()) - 1;
  r.is_boundary_path = true;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i + 1 < path.size() && tree.splits(path[i])) ++r.split_count;
    if (i > 0 && tree.nodes[path[i]].cls != ChildClass::Boundary) r.is_boundary_path = false;
  }
  r.nodes = std::move(path);
  return r;
}

}  // namespace

std::vector<PathRecord> boundary_paths(const KrsTree& tree, int min_len) {
  std::vector<PathRecord> out;
  if (min_len > tree.depth()) return out;
  std::vector<int> path;
  std::function<void(int)> extend = [&](int v) {
    path.push_back(v);
    bool extended = false;
    const KrsNode& n = tree.nodes[v];
    for (int i = 0; i < n.child_count; ++i) {
      const int ch = n.first_child + i;
      if (tree.nodes[ch].cls != ChildClass::Boundary) continue;
      extended = true;
      extend(ch);
    }
    if (!extended && static_cast<int>(path.size()) - 1 >= std::max(min_len, 1)) out.push_back(make_record(tree, path));
    path.pop_back();
  };
  for (int v = 0; v < static_cast<int>(tree.nodes.size()); ++v) {
    if (tree.nodes[v].cls == ChildClass::Boundary) continue;
    if (child_of_class_count(tree, v, ChildClass::Boundary) == 0) continue;
    extend(v);
  }
  // Nodes are level-ordered, so the list is already sorted by start level and word.
  return out;
}

ZetaEstimate zeta_estimate(const KrsTree& tree) {
  const int depth = tree.depth();
  if (depth < 2) throw DomainError("zeta_estimate needs a tree of depth >= 2");
  const int count = static_cast<int>(tree.nodes.size());
  // best[v][L]: most splits over paths of length L from v (-1: no such path).
  std::vector<std::vector<int>> best(count), arg(count);
  for (int v = count - 1; v >= 0; --v) {
    const KrsNode& n = tree.nodes[v];
    const int span = depth - n.level;
    best[v].assign(span + 1, -1);
    arg[v].assign(span + 1, -1);
    best[v][0] = 0;
    const int own = tree.splits(v) ? 1 : 0;
    for (int i = 0; i < n.child_count; ++i) {
      const int ch = n.first_child + i;
      for (int L = 1; L <= span; ++L) {
        const int sub = best[ch][L - 1];
        if (sub >= 0 && sub + own > best[v][L]) {
          best[v][L] = sub + own;
          arg[v][L] = ch;
        }
      }
    }
  }

  ZetaEstimate out;
  out.depth_used = depth;
  for (int n = 1; 2 * n <= depth; ++n) {
    int bv = -1, bl = 0, bs = 0;
    for (int v = tree.level_begin[n]; v < count; ++v) {
      const int span = depth - tree.nodes[v].level;
      for (int L = n; L <= span; ++L) {
        const int sc = best[v][L];
        if (sc < 0) continue;
        if (bv < 0 || static_cast<long>(sc) * bl > static_cast<long>(bs) * L) {
          bv = v;
          bl = L;
          bs = sc;
        }
      }
    }
    if (bv < 0) break;
    std::vector<int> path{bv};
    for (int L = bl, v = bv; L > 0; --L) {
      v = arg[v][L];
      path.push_back(v);
    }
    ZetaEntry e;
    e.n = n;
    e.zeta = Rational(bs, bl);
    e.zeta.canonicalize();
    e.witness = make_record(tree, std::move(path));
    out.per_n.push_back(std::move(e));
  }
  if (out.per_n.empty()) throw DomainError("zeta_estimate: no admissible path; depth must be >= 2");
  out.zeta_hat = out.per_n.back().zeta;
  return out;
}

Rational zeta_brute_force(const KrsTree& tree, int n) {
  const int depth = tree.depth();
  Rational best = -1;
  std::vector<int> path;
  std::function<void(int)> walk = [&](int v) {
    path.push_back(v);
    const int L = static_cast<int>(path.size()) - 1;
    if (L >= n) {
      int splits = 0;
      for (int i = 0; i < L; ++i) splits += tree.splits(path[i]) ? 1 : 0;
      Rational r(splits, L);
      r.canonicalize();
      if (r > best) best = r;
    }
    for (int i = 0; i < tree.nodes[v].child_count; ++i) walk(tree.nodes[v].first_child + i);
    path.pop_back();
  };
  for (int v = tree.level_begin[std::min(n, depth)]; v < static_cast<int>(tree.nodes.size()); ++v) walk(v);
  if (best < 0) throw DomainError("no admissible path for n = " + std::to_string(n));
  return best;
}

std::string dump_tree(const KrsTree& tree) {
  std::ostringstream os;
  std::function<void(int)> visit = [&](int v) {
    const KrsNode& n = tree.nodes[v];
    os << n.level << '\t' << tree.word(v) << '\t' << to_string(n.left) << '\t' << to_string(n.right) << '\t'
       << to_string(n.point) << '\t' << class_name(n.cls) << '\n';
    for (int i = 0; i < n.child_count; ++i) visit(n.first_child + i);
  };
  for (int v = 0; v < tree.level_size(0); ++v) visit(v);
  return os.str();
}

}  // namespace assouad
