#include "assouad/measures.hpp"

#include <algorithm>
#include <cmath>

#include "assouad/errors.hpp"

namespace assouad {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_group(const KrsTree& tree, const std::vector<Rational>& weight, int first, int count) {
  Rational sum = 0;
  for (int i = 0; i < count; ++i) sum += weight[first + i];
  if (sum != 1) {
    const std::string where = tree.nodes[first].parent < 0 ? std::string("roots") : tree.word(tree.nodes[first].parent);
    throw NormalizationError("sibling weights under " + where + " sum to " + to_string(sum) + ", not 1");
  }
}

// prefix[i] = mass[0] + ... + mass[i-1]; sibling runs are contiguous, so a run's
// mass is one difference.
void index_masses(WeightedMeasure& m, const KrsTree& tree) {
  m.prefix.assign(m.mass.size() + 1, Rational(0));
  for (std::size_t v = 0; v < m.mass.size(); ++v) m.prefix[v + 1] = m.prefix[v] + m.mass[v];
  m.hull_approx.resize(2 * tree.nodes.size());
  for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
    m.hull_approx[2 * v] = tree.nodes[v].hull_lo.get_d();
    m.hull_approx[2 * v + 1] = tree.nodes[v].hull_hi.get_d();
  }
}

// Sign of a - b, decided in double precision unless the values are too close.
int fast_cmp(double ad, const Rational& a, double bd, const Rational& b) {
  const double gap = ad - bd, slack = 1e-12 * (std::fabs(ad) + std::fabs(bd)) + 1e-300;
  if (gap > slack) return 1;
  if (gap < -slack) return -1;
  return cmp(a, b);
}

}  // namespace

WeightedMeasure assign_weights(std::shared_ptr<const KrsTree> tree, const WeightRule& rule) {
  if (!tree || tree->nodes.empty()) throw DomainError("assign_weights needs a built tree");
  const auto& nodes = tree->nodes;
  WeightedMeasure m;
  m.weight.resize(nodes.size());
  m.mass.resize(nodes.size());
  for (int v = 0; v < static_cast<int>(nodes.size()); ++v) {
    Rational w = rule(*tree, v);
    if (w <= 0 || w > 1) throw DomainError("weight of " + tree->word(v) + " must lie in (0,1], got " + to_string(w));
    m.mass[v] = nodes[v].parent < 0 ? w : Rational(w * m.mass[nodes[v].parent]);
    m.weight[v] = std::move(w);
  }
  check_group(*tree, m.weight, 0, tree->level_size(0));
  for (const auto& n : nodes) {
    if (n.child_count > 0) check_group(*tree, m.weight, n.first_child, n.child_count);
  }
  index_masses(m, *tree);
  m.tree = std::move(tree);
  return m;
}

WeightedMeasure uniform_measure(std::shared_ptr<const KrsTree> tree) {
  auto m = assign_weights(std::move(tree), [](const KrsTree& t, int v) {
    const int parent = t.nodes[v].parent;
    return Rational(1, parent < 0 ? t.level_size(0) : t.nodes[parent].child_count);
  });
  m.label = "uniform";
  return m;
}

std::shared_ptr<const KrsTree> cantor_coding_tree(int depth) {
  if (depth < 1 || depth > 24) throw DomainError("coding tree depth must lie in [1, 24]");
  auto tree = std::make_shared<KrsTree>();
  tree->kind = KrsTree::Kind::Coding;
  tree->params.s = Rational(1, 3);
  tree->params.max_level = depth;
  tree->set = SetDescriptor::middle_third_cantor();
  KrsNode root;
  root.left = root.hull_lo = root.point = 0;
  root.right = root.hull_hi = 1;
  tree->nodes.push_back(root);
  tree->level_begin.push_back(0);
  for (int k = 0; k < depth; ++k) {
    const int begin = tree->level_begin.back();
    const int end = static_cast<int>(tree->nodes.size());
    tree->level_begin.push_back(end);
    for (int v = begin; v < end; ++v) {
      const Rational l = tree->nodes[v].left, r = tree->nodes[v].right;
      const Rational third = (r - l) / 3;
      tree->nodes[v].first_child = static_cast<int>(tree->nodes.size());
      tree->nodes[v].child_count = 2;
      for (int j = 0; j < 2; ++j) {
        KrsNode ch;
        ch.parent = v;
        ch.level = k + 1;
        ch.index = j;
        ch.cls = ChildClass::Interior;
        ch.left = ch.hull_lo = ch.point = j == 0 ? l : Rational(r - third);
        ch.right = ch.hull_hi = j == 0 ? Rational(l + third) : r;
        tree->nodes.push_back(std::move(ch));
      }
    }
  }
  tree->level_begin.push_back(static_cast<int>(tree->nodes.size()));
  return tree;
}

std::pair<WeightedMeasure, WeightedMeasure> cantor_example_pair(const Rational& p, int depth) {
  if (p <= 0 || p >= Rational(1, 2)) throw DomainError("the Cantor example needs 0 < p < 1/2");
  const auto tree = cantor_coding_tree(depth);
  // A node is on the spine of `digit` when every index along its word equals it.
  auto on_spine = [](const KrsTree& t, int v, int digit) {
    for (; t.nodes[v].parent >= 0; v = t.nodes[v].parent) {
      if (t.nodes[v].index != digit) return false;
    }
    return true;
  };
  auto rule_for = [&](int digit) {
    return [=](const KrsTree& t, int v) -> Rational {
      const int parent = t.nodes[v].parent;
      if (parent < 0) return 1;
      if (!on_spine(t, parent, digit)) return Rational(1, 2);
      return t.nodes[v].index == digit ? p : Rational(1 - p);
    };
  };
  auto mu = assign_weights(tree, rule_for(0));
  auto nu = assign_weights(tree, rule_for(1));
  mu.label = "example_mu";
  nu.label = "example_nu";
  return {std::move(mu), std::move(nu)};
}

WeightedMeasure sum_measures(const WeightedMeasure& mu, const WeightedMeasure& nu) {
  if (!mu.tree || !nu.tree) throw StructuralError("sum_measures needs measures on trees");
  if (mu.tree != nu.tree) {
    const auto& a = mu.tree->nodes;
    const auto& b = nu.tree->nodes;
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) {
      same = a[i].left == b[i].left && a[i].right == b[i].right && a[i].parent == b[i].parent;
    }
    if (!same) throw StructuralError("sum_measures: the measures live on different trees");
  }
  WeightedMeasure out;
  out.tree = mu.tree;
  out.mass.resize(mu.mass.size());
  out.weight.resize(mu.mass.size());
  for (std::size_t v = 0; v < mu.mass.size(); ++v) {
    out.mass[v] = mu.mass[v] + nu.mass[v];
    const int parent = out.tree->nodes[v].parent;
    const Rational base = parent < 0 ? Rational(mu.total_mass + nu.total_mass) : out.mass[parent];
    out.weight[v] = base == 0 ? Rational(0) : Rational(out.mass[v] / base);
  }
  out.atoms = mu.atoms;
  out.atoms.insert(out.atoms.end(), nu.atoms.begin(), nu.atoms.end());
  out.total_mass = mu.total_mass + nu.total_mass;
  index_masses(out, *out.tree);
  out.normalized = false;
  out.label = mu.label + "+" + nu.label;
  return out;
}

namespace {

Rational raw_mass(const MassProfile& profile, unsigned first, unsigned n) {
  return std::visit(Overloaded{[&](const GeometricMasses& g) { return int_power(g.ratio, n); },
                               [&](const TelescopingMasses&) { return Rational(1, static_cast<unsigned long>(n) * (n + 1)); },
                               [&](const InverseSquareMasses&) { return Rational(1, static_cast<unsigned long>(n) * n); },
                               [&](const ExplicitMasses& e) {
                                 const unsigned i = n - first;
                                 return i < e.masses.size() ? e.masses[i] : Rational(0);
                               }},
                    profile);
}

MassBracket raw_tail(const MassProfile& profile, unsigned first, unsigned N) {
  N = std::max(N, first);
  return std::visit(
      Overloaded{[&](const GeometricMasses& g) {
                   const Rational t = int_power(g.ratio, N) / (1 - g.ratio);
                   return MassBracket{t, t};
                 },
                 [&](const TelescopingMasses&) {
                   const Rational t(1, N);
                   return MassBracket{t, t};
                 },
                 [&](const InverseSquareMasses&) {
                   // Integral comparison: 1/N <= sum_{n >= N} 1/n^2 <= 1/(N-1).
                   if (N >= 2) return MassBracket{Rational(1, N), Rational(1, N - 1)};
                   return MassBracket{Rational(3, 2), Rational(2)};
                 },
                 [&](const ExplicitMasses& e) {
                   Rational t = 0;
                   for (std::size_t i = N - first; i < e.masses.size(); ++i) t += e.masses[i];
                   return MassBracket{t, t};
                 }},
      profile);
}

void fill_cache(DiscreteMeasure& m) {
  m.points.clear();
  m.masses.clear();
  m.cumulative.assign(1, Rational(0));
  for (unsigned n = m.first_index; n <= m.index_cap; ++n) {
    m.points.push_back(m.point(n));
    m.masses.push_back(m.scale * raw_mass(m.profile, m.first_index, n));
    m.cumulative.push_back(m.cumulative.back() + m.masses.back());
  }
}

void validate_profile(const MassProfile& profile, unsigned first) {
  std::visit(Overloaded{[](const GeometricMasses& g) {
                          if (g.ratio <= 0 || g.ratio >= 1) throw DomainError("geometric masses need ratio in (0,1)");
                        },
                        [&](const TelescopingMasses&) {
                          if (first < 1) throw DomainError("telescoping masses start at n = 1");
                        },
                        [&](const InverseSquareMasses&) {
                          if (first < 1) throw DomainError("inverse-square masses start at n = 1");
                        },
                        [](const ExplicitMasses& e) {
                          for (const auto& x : e.masses) {
                            if (x < 0) throw DomainError("masses must be nonnegative");
                          }
                        }},
             profile);
}

}  // namespace

Rational DiscreteMeasure::point(unsigned n) const {
  if (const auto* g = std::get_if<GeometricClosure>(&sequence.variant())) return int_power(g->q, n);
  const auto& d = std::get<DoubleExponential>(sequence.variant());
  mpz_class e;
  mpz_ui_pow_ui(e.get_mpz_t(), d.M, n);
  if (!e.fits_ulong_p() || e.get_ui() > (1UL << 26)) {
    throw PrecisionError("x_n = alpha^(M^n) too small to represent exactly for n = " + std::to_string(n), 0.0);
  }
  return int_power(d.alpha, static_cast<unsigned>(e.get_ui()));
}

Rational DiscreteMeasure::mass(unsigned n) const {
  if (n < first_index) return 0;
  return scale * raw_mass(profile, first_index, n);
}

MassBracket DiscreteMeasure::tail(unsigned N) const {
  MassBracket t = raw_tail(profile, first_index, N);
  return {scale * t.lo, scale * t.hi};
}

MassBracket DiscreteMeasure::total_mass() const {
  MassBracket t = tail(first_index);
  Rational extra = zero_mass;
  for (const auto& a : atoms) extra += a.mass;
  return {t.lo + extra, t.hi + extra};
}

DiscreteMeasure discrete_geometric(const Rational& q, const Rational& p, unsigned index_cap) {
  if (p <= 0 || p >= 1) throw DomainError("discrete_geometric needs p in (0,1)");
  DiscreteMeasure m{SetDescriptor::geometric(q), 0, GeometricMasses{p}};
  m.scale = 1 - p;  // sum_{n >= 0} p^n = 1/(1-p)
  m.index_cap = index_cap;
  m.label = "discrete_geometric";
  fill_cache(m);
  return m;
}

DiscreteMeasure double_exp_measure(const Rational& alpha, unsigned M, MassProfile profile, const Rational& zero_mass,
                                   unsigned index_cap) {
  if (zero_mass < 0) throw DomainError("p(0) must be nonnegative");
  if (index_cap < 1) throw DomainError("index cap must be >= 1");
  validate_profile(profile, 1);
  DiscreteMeasure m{SetDescriptor::double_exponential(alpha, M), 1, std::move(profile)};
  m.zero_mass = zero_mass;
  m.index_cap = index_cap;
  m.normalized = false;
  m.label = "double_exp";
  fill_cache(m);
  return m;
}

MassBracket ball_mass(const WeightedMeasure& m, const Rational& x, const Rational& R) {
  if (R <= 0) throw DomainError("ball_mass needs R > 0");
  if (m.prefix.size() != m.mass.size() + 1) throw StructuralError("weighted measure has no mass index");
  const KrsTree& tree = *m.tree;
  const Rational lo = x - R, hi = x + R;
  const double dlo = lo.get_d(), dhi = hi.get_d();
  MassBracket out{0, 0};
  // Only intervals straddling an edge of the ball are opened: at most two per level.
  std::vector<int> open, next;
  auto scan = [&](int b, int e) {
    int first = -1, last = -1;
    for (int v = b; v < e; ++v) {
      const KrsNode& n = tree.nodes[v];
      const double nlo = m.hull_approx[2 * v], nhi = m.hull_approx[2 * v + 1];
      if (fast_cmp(nhi, n.hull_hi, dlo, lo) <= 0 || fast_cmp(nlo, n.hull_lo, dhi, hi) >= 0) continue;
      if (fast_cmp(dlo, lo, nlo, n.hull_lo) < 0 && fast_cmp(nhi, n.hull_hi, dhi, hi) < 0) {
        if (first < 0) first = v;
        last = v;
      } else if (m.mass[v] != 0) {
        next.push_back(v);
      }
    }
    if (first >= 0) {
      const Rational run = m.prefix[last + 1] - m.prefix[first];
      out.lo += run;
      out.hi += run;
    }
  };
  scan(0, tree.level_size(0));
  while (!next.empty()) {
    open.swap(next);
    next.clear();
    for (int v : open) {
      const KrsNode& n = tree.nodes[v];
      if (n.child_count == 0) {
        out.hi += m.mass[v];  // partially covered leaf: anywhere in [0, mass]
        continue;
      }
      scan(n.first_child, n.first_child + n.child_count);
    }
  }
  for (const auto& a : m.atoms) {
    if (lo < a.point && a.point < hi) {
      out.lo += a.mass;
      out.hi += a.mass;
    }
  }
  return out;
}

MassBracket ball_mass(const DiscreteMeasure& m, const Rational& x, const Rational& R) {
  if (R <= 0) throw DomainError("ball_mass needs R > 0");
  const Rational lo = x - R, hi = x + R;
  MassBracket out{0, 0};
  // points are decreasing: [i0, i1) is the index range with lo < x_n < hi.
  const auto& pts = m.points;
  const auto i0 = std::partition_point(pts.begin(), pts.end(), [&](const Rational& p) { return p >= hi; }) - pts.begin();
  const auto i1 = std::partition_point(pts.begin(), pts.end(), [&](const Rational& p) { return p > lo; }) - pts.begin();
  if (i1 > i0) {
    const Rational s = m.cumulative[i1] - m.cumulative[i0];
    out.lo += s;
    out.hi += s;
  }
  const MassBracket t = m.tail(m.index_cap + 1);
  if (t.hi > 0) {
    const Rational top = m.point(m.index_cap + 1);  // tail points lie in (0, top]
    if (!(hi <= 0 || lo >= top)) {
      if (lo <= 0 && top < hi) {
        out.lo += t.lo;
        out.hi += t.hi;
      } else {
        out.hi += t.hi;
      }
    }
  }
  if (m.zero_mass > 0 && lo < 0 && 0 < hi) {
    out.lo += m.zero_mass;
    out.hi += m.zero_mass;
  }
  for (const auto& a : m.atoms) {
    if (lo < a.point && a.point < hi) {
      out.lo += a.mass;
      out.hi += a.mass;
    }
  }
  return out;
}

MassBracket ball_mass(const Measure& m, const Rational& x, const Rational& R, std::optional<Rational> tolerance) {
  MassBracket b = std::visit([&](const auto& mm) { return ball_mass(mm, x, R); }, m);
  if (tolerance && b.hi - b.lo > *tolerance) {
    const Rational w = b.hi - b.lo;
    throw PrecisionError("ball mass truncation bracket " + to_string(w) + " exceeds the tolerance", w.get_d());
  }
  return b;
}

Measure add_atom(const Measure& m, const Rational& e, const Rational& mass) {
  if (mass <= 0) throw DomainError("atom mass must be positive");
  return std::visit(
      Overloaded{[&](const WeightedMeasure& w) -> Measure {
                   const KrsTree& tree = *w.tree;
                   bool inside = tree.set && resolved_member(*tree.set, e, tree.params.resolution);
                   // e must also lie in a positive-mass leaf.
                   if (inside) {
                     inside = false;
                     for (int v = tree.level_begin[tree.depth()]; v < static_cast<int>(tree.nodes.size()); ++v) {
                       const KrsNode& n = tree.nodes[v];
                       if (w.mass[v] > 0 && n.hull_lo <= e && e <= n.hull_hi) inside = true;
                     }
                   }
                   if (!inside) throw DomainError("atom point " + to_string(e) + " is not in the support");
                   WeightedMeasure out = w;
                   out.atoms.push_back({e, mass});
                   out.total_mass += mass;
                   out.normalized = false;
                   out.label = w.label + "+atom";
                   return out;
                 },
                 [&](const DiscreteMeasure& d) -> Measure {
                   bool inside = (e == 0);  // 0 is the accumulation point of the support
                   for (std::size_t i = 0; i < d.points.size() && !inside; ++i) {
                     inside = d.points[i] == e && d.masses[i] > 0;
                   }
                   if (!inside) throw DomainError("atom point " + to_string(e) + " is not in the support");
                   DiscreteMeasure out = d;
                   out.atoms.push_back({e, mass});
                   out.normalized = false;
                   out.label = d.label + "+atom";
                   return out;
                 }},
      m);
}

std::optional<SetDescriptor> support_set(const Measure& m) {
  return std::visit(Overloaded{[](const WeightedMeasure& w) { return w.tree->set; },
                               [](const DiscreteMeasure& d) { return std::optional<SetDescriptor>(d.sequence); }},
                    m);
}

std::vector<Atom> measure_atoms(const Measure& m) {
  return std::visit(Overloaded{[](const WeightedMeasure& w) { return w.atoms; },
                               [](const DiscreteMeasure& d) {
                                 std::vector<Atom> out;
                                 if (d.zero_mass > 0) out.push_back({Rational(0), d.zero_mass});
                                 for (std::size_t i = 0; i < d.points.size(); ++i) {
                                   if (d.masses[i] > 0) out.push_back({d.points[i], d.masses[i]});
                                 }
                                 out.insert(out.end(), d.atoms.begin(), d.atoms.end());
                                 return out;
                               }},
                    m);
}

std::string measure_label(const Measure& m) {
  return std::visit([](const auto& mm) { return mm.label; }, m);
}

}  // namespace assouad
