#include <cmath>
#include <set>

#include "assouad/errors.hpp"
#include "assouad/synthesizers.hpp"
#include "doctest.h"

using namespace assouad;

namespace {

const double kLog2Log3 = std::log(2.0) / std::log(3.0);

std::shared_ptr<const KrsTree> cantor_tree(int depth) {
  KrsParams p;
  p.max_level = depth;
  return std::make_shared<const KrsTree>(build_tree(SetDescriptor::middle_third_cantor(), p));
}

UpperOptions cantor_upper() {
  UpperOptions o;
  o.dim_upper = kLog2Log3;
  return o;
}

LowerUpperOptions cantor_lower_upper() {
  LowerUpperOptions o;
  o.dim_lower = o.dim_upper = kLog2Log3;
  return o;
}

// Every sibling group (and the roots) sums to exactly 1; masses are products.
void check_exact_groups(const WeightedMeasure& m) {
  const KrsTree& t = *m.tree;
  Rational roots = 0;
  for (int v = 0; v < t.level_size(0); ++v) roots += m.weight[v];
  CHECK(roots == 1);
  for (std::size_t v = 0; v < t.nodes.size(); ++v) {
    const KrsNode& n = t.nodes[v];
    if (n.parent >= 0) CHECK(m.mass[v] == m.weight[v] * m.mass[n.parent]);
    if (n.child_count == 0) continue;
    Rational sum = 0;
    for (int c = n.first_child; c < n.first_child + n.child_count; ++c) sum += m.weight[c];
    CHECK(sum == 1);
  }
}

Rational min_child_weight(const WeightedMeasure& m) {
  Rational lo = 1;
  for (std::size_t v = 0; v < m.weight.size(); ++v)
    if (m.tree->nodes[v].parent >= 0 && m.weight[v] < lo) lo = m.weight[v];
  return lo;
}

bool descends_from(const KrsTree& t, int v, int ancestor) {
  for (; v >= 0; v = t.nodes[v].parent)
    if (v == ancestor) return true;
  return false;
}

int node_of(const KrsTree& t, const std::string& word) {
  for (int v = 0; v < static_cast<int>(t.nodes.size()); ++v)
    if (t.word(v) == word) return v;
  return -1;
}

}  // namespace

TEST_CASE("calibration accepts s = 1/9 on the Cantor set") {
  const auto r = calibrate_s(SetDescriptor::middle_third_cantor(), Rational(1, 5), kLog2Log3, kLog2Log3);
  CHECK(r.s_star == Rational(1, 9));
  CHECK(r.k_star == 0);
  for (const auto& e : r.evidence) {
    CHECK(e.min_children == 4);
    CHECK(e.max_children == 4);
    CHECK(e.lower_bound == doctest::Approx(std::pow(9.0, kLog2Log3 - 0.2)));
    CHECK(e.upper_bound == doctest::Approx(std::pow(9.0, kLog2Log3 + 0.2)));
    CHECK(e.ok);
  }
  REQUIRE(r.tree);
  CHECK(r.tree->params.s == Rational(1, 9));
}

TEST_CASE("calibration fails when no grid value meets the bounds") {
  // Dimension estimates of 1 ask for about s^-1 children per node.
  CHECK_THROWS_AS(calibrate_s(SetDescriptor::middle_third_cantor(), Rational(1, 100), 1.0, 1.0), CalibrationError);
  CHECK_THROWS_AS(calibrate_s(SetDescriptor::middle_third_cantor(), Rational(0), 0.5, 0.5), DomainError);
}

TEST_CASE("boundary-path scheme: exact groups, minimum weight a, sibling weight p") {
  const auto tree = cantor_tree(5);
  const Rational D(6, 5), eps(1, 4);
  const auto r = synthesize_upper(tree, D, eps, cantor_upper());
  const auto& mf = r.manifest;
  CHECK(mf.strategy == "longbdy");
  REQUIRE(mf.a);
  REQUIRE(mf.p);
  CHECK(to_double(*mf.a) == doctest::Approx(std::pow(9.0, -1.2)).epsilon(1e-9));
  CHECK(to_double(*mf.p) == doctest::Approx(std::pow(9.0, -0.95)).epsilon(1e-9));
  check_exact_groups(r.measure);
  CHECK(min_child_weight(r.measure) == *mf.a);
  CHECK(mf.min_weight == *mf.a);
  REQUIRE(r.measure.declared_min_weight);
  CHECK(*r.measure.declared_min_weight == *mf.a);

  // One rung, from level 1 to the bottom, leftmost chain.
  REQUIRE(mf.paths.size() >= 1);
  const auto& path = mf.paths.front();
  CHECK(path.role == "boundary");
  CHECK(path.start_level == 1);
  CHECK(path.length == 4);
  CHECK(path.weight == *mf.a);

  // Off the path: non-distinguished children carry p, the distinguished one the rest.
  const KrsTree& t = *tree;
  std::set<int> on_path;
  for (std::size_t i = 1; i < path.words.size(); ++i) on_path.insert(node_of(t, path.words[i]));
  for (std::size_t v = t.level_size(0); v < t.nodes.size(); ++v) {
    if (on_path.count(static_cast<int>(v))) {
      CHECK(r.measure.weight[v] == *mf.a);
    } else if (t.nodes[v].cls != ChildClass::DistinguishedInterior) {
      CHECK(r.measure.weight[v] == *mf.p);
    } else {
      CHECK(r.measure.weight[v] >= *mf.p);
    }
  }
}

TEST_CASE("adjacent cousins stay within [a, 1/a]") {
  // Two maps of ratio 49/100 leave gaps of 2%: intervals of different parents
  // come within c s^k of each other.
  const auto thin = SetDescriptor::cantor_ifs({{Rational(49, 100), Rational(0)}, {Rational(49, 100), Rational(51, 100)}});
  KrsParams p;
  p.max_level = 3;
  const auto tree = std::make_shared<const KrsTree>(build_tree(thin, p));
  UpperOptions o;
  o.dim_upper = std::log(2.0) / std::log(100.0 / 49.0);
  const auto r = synthesize_upper(tree, Rational(8, 5), Rational(3, 10), o);
  REQUIRE(r.manifest.a);
  const Rational a = *r.manifest.a;
  const auto [lo, hi] = adjacent_cousin_ratio_range(r.measure);
  CHECK(lo < 1);  // adjacency is exercised
  CHECK(lo >= a);
  CHECK(hi <= 1 / a);
  check_exact_groups(r.measure);

  // The middle-third set has no adjacent cousins at s = 1/9.
  const auto c = synthesize_upper(cantor_tree(4), Rational(6, 5), Rational(1, 4), cantor_upper());
  const auto range = adjacent_cousin_ratio_range(c.measure);
  CHECK(range.first == 1);
  CHECK(range.second == 1);
}

TEST_CASE("upper synthesis preconditions") {
  const auto tree = cantor_tree(4);
  CHECK_THROWS_AS(synthesize_upper(tree, Rational(1, 2), Rational(1, 10), cantor_upper()), DomainError);
  // p = 9^-(0.6) > 1/4 = 1/max N_w
  CHECK_THROWS_AS(synthesize_upper(tree, Rational(7, 10), Rational(1, 10), cantor_upper()), CalibrationError);
  UpperOptions deep = cantor_upper();
  deep.min_depth = 6;
  CHECK_THROWS_AS(synthesize_upper(tree, Rational(2), Rational(1, 10), deep), DomainError);
  CHECK_THROWS_AS(synthesize_upper(tree, Rational(2), Rational(0), cantor_upper()), DomainError);
}

TEST_CASE("infinite target: a ladder of rungs in disjoint subtrees") {
  const auto tree = cantor_tree(8);
  const KrsTree& t = *tree;
  const auto r = synthesize_upper(tree, std::nullopt, Rational(1, 10), cantor_upper());
  const auto& mf = r.manifest;
  CHECK(mf.strategy == "longbdy");
  CHECK_FALSE(mf.D);
  REQUIRE(mf.D_ladder.size() == 3);
  std::vector<const PathManifest*> rungs;
  for (const auto& pm : mf.paths)
    if (pm.role == "boundary") rungs.push_back(&pm);
  REQUIRE(rungs.size() == 3);
  for (int j = 0; j < 3; ++j) {
    CHECK(mf.D_ladder[j] == doctest::Approx(kLog2Log3 + j + 1));
    CHECK(rungs[j]->length == j + 1);
    CHECK(to_double(rungs[j]->weight) == doctest::Approx(std::pow(9.0, -mf.D_ladder[j])).epsilon(1e-9));
    if (j > 0) {
      CHECK(rungs[j]->start_level > rungs[j - 1]->start_level + rungs[j - 1]->length);
      CHECK(rungs[j]->weight < rungs[j - 1]->weight);
      // The new start lies outside the weighted part of every earlier rung.
      const int start = node_of(t, rungs[j]->words.front());
      for (int i = 0; i < j; ++i)
        for (std::size_t k = 1; k < rungs[i]->words.size(); ++k)
          CHECK_FALSE(descends_from(t, start, node_of(t, rungs[i]->words[k])));
    }
  }
  CHECK(rungs.back()->start_level + rungs.back()->length == t.depth());
  check_exact_groups(r.measure);
  CHECK(mf.min_weight == rungs.back()->weight);
}

TEST_CASE("proportionality scheme weights splitting path intervals") {
  const auto tree = cantor_tree(5);
  UpperOptions o = cantor_upper();
  o.force_zeta = true;
  const auto r = synthesize_upper(tree, Rational(3, 2), Rational(1, 4), o);
  const auto& mf = r.manifest;
  CHECK(mf.strategy == "zeta");
  REQUIRE(mf.zeta_hat);
  CHECK(*mf.zeta_hat == doctest::Approx(1.0));  // every Cantor interval splits
  REQUIRE(mf.a);
  CHECK(to_double(*mf.a) == doctest::Approx(std::pow(9.0, -1.5 / *mf.zeta_hat)).epsilon(1e-9));
  REQUIRE(mf.paths.size() == 1);
  CHECK(mf.paths[0].role == "special");
  CHECK(mf.paths[0].splits == mf.paths[0].length);
  check_exact_groups(r.measure);
  CHECK(min_child_weight(r.measure) == *mf.a);
}

TEST_CASE("joint scheme keeps every weight in [s^D, s^d]") {
  const auto tree = cantor_tree(5);
  const Rational d(3, 10), D(3, 2), eps(1, 10);
  const auto r = synthesize_lower_upper(tree, d, D, eps, cantor_lower_upper());
  const auto& mf = r.manifest;
  CHECK(mf.strategy == "lower_upper");
  REQUIRE(mf.paths.size() == 2);
  CHECK(mf.paths[0].role == "lower");
  CHECK(mf.paths[1].role == "upper");
  const Rational sd = mf.paths[0].weight, sD = mf.paths[1].weight;
  CHECK(to_double(sd) == doctest::Approx(std::pow(9.0, -0.3)).epsilon(1e-9));
  CHECK(to_double(sD) == doctest::Approx(std::pow(9.0, -1.5)).epsilon(1e-9));
  check_exact_groups(r.measure);
  for (std::size_t v = tree->level_size(0); v < tree->nodes.size(); ++v) {
    CHECK(r.measure.weight[v] >= sD);
    CHECK(r.measure.weight[v] <= sd);
  }
  CHECK(mf.min_weight == sD);
  CHECK(mf.max_weight == sd);
  // Both paths run to the last level through distinguished children.
  CHECK(mf.paths[0].start_level + mf.paths[0].length == tree->depth());
  CHECK(mf.paths[1].start_level + mf.paths[1].length == tree->depth());
  REQUIRE(mf.inequalities.size() == 3);
  for (const auto& [name, ok] : mf.inequalities) CHECK_FALSE(ok);  // s = 1/9 is far too large for them
}

TEST_CASE("joint scheme s-conditions hold for small s") {
  const auto checks = lower_upper_inequalities(Rational(1, 10000), Rational(3, 10), Rational(1, 20));
  REQUIRE(checks.size() == 3);
  for (const auto& [name, ok] : checks) CHECK_MESSAGE(ok, name);
}

TEST_CASE("joint scheme preconditions") {
  const auto tree = cantor_tree(4);
  const auto o = cantor_lower_upper();
  CHECK_THROWS_AS(synthesize_lower_upper(tree, Rational(7, 10), Rational(3, 2), Rational(1, 20), o), DomainError);
  CHECK_THROWS_AS(synthesize_lower_upper(tree, Rational(3, 10), Rational(1, 2), Rational(1, 20), o), DomainError);
  CHECK_THROWS_AS(synthesize_lower_upper(tree, Rational(3, 10), Rational(3, 2), Rational(1, 5), o), DomainError);
  // The binary coding tree has nodes with two children.
  CHECK_THROWS_AS(synthesize_lower_upper(cantor_coding_tree(4), Rational(3, 10), Rational(3, 2), Rational(1, 10), o),
                  DomainError);
  // With d and D close together the equal shares of untouched groups exceed s^d.
  CHECK_THROWS_AS(synthesize_lower_upper(tree, Rational(3, 5), Rational(7, 10), Rational(1, 100), o),
                  CalibrationError);
}

TEST_CASE("lower-dimension floor adds a unit atom") {
  const auto tree = cantor_tree(4);
  const Measure mu = uniform_measure(tree);
  const Measure floored = floor_lower_dimension(mu, Rational(0));
  const auto atoms = measure_atoms(floored);
  REQUIRE(atoms.size() == 1);
  CHECK(atoms[0].point == 0);
  CHECK(atoms[0].mass == 1);
  CHECK(measure_label(floored).find("floor") != std::string::npos);
  const auto& wm = std::get<WeightedMeasure>(floored);
  CHECK(wm.total_mass == 2);
}
