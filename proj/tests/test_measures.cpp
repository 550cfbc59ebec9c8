#include <random>

#include "assouad/errors.hpp"
#include "assouad/measures.hpp"
#include "doctest.h"

using namespace assouad;

namespace {

Rational frac(long n, long d) {
  Rational q(n, d);
  q.canonicalize();
  return q;
}

std::vector<int> digits_of(const KrsTree& t, int v) {
  std::vector<int> out;
  for (; t.nodes[v].parent >= 0; v = t.nodes[v].parent) out.insert(out.begin(), t.nodes[v].index);
  return out;
}

// Closed form of the example measure: p^n on 0^n, p^n (1-p) 2^-k on 0^n 1 sigma.
Rational example_mass(const std::vector<int>& w, const Rational& p) {
  std::size_t n = 0;
  while (n < w.size() && w[n] == 0) ++n;
  if (n == w.size()) return int_power(p, static_cast<unsigned>(n));
  const unsigned k = static_cast<unsigned>(w.size() - n - 1);
  return int_power(p, static_cast<unsigned>(n)) * (1 - p) * int_power(Rational(1, 2), k);
}

// Level-by-level oracle for a weighted measure: sum of leaf masses fully inside
// the open ball, plus partially covered leaves as slack.
MassBracket leaf_oracle(const WeightedMeasure& m, const Rational& x, const Rational& R) {
  const KrsTree& t = *m.tree;
  MassBracket b{0, 0};
  for (int v = t.level_begin[t.depth()]; v < static_cast<int>(t.nodes.size()); ++v) {
    const KrsNode& n = t.nodes[v];
    if (x - R < n.hull_lo && n.hull_hi < x + R) {
      b.lo += m.mass[v];
      b.hi += m.mass[v];
    } else if (n.hull_hi > x - R && n.hull_lo < x + R) {
      b.hi += m.mass[v];
    }
  }
  return b;
}

}  // namespace

TEST_CASE("uniform cantor measure on the coding tree") {
  const auto m = uniform_measure(cantor_coding_tree(6));
  for (int v = 0; v < static_cast<int>(m.mass.size()); ++v) {
    CHECK(m.mass[v] == int_power(Rational(1, 2), m.tree->nodes[v].level));
  }
  const auto b = ball_mass(m, 0, Rational(1, 3) + Rational(1, 100));
  CHECK(b.exact());
  CHECK(b.lo == Rational(1, 2));
  CHECK(ball_mass(m, Rational(1, 2), 2).lo == 1);
}

TEST_CASE("weight rule validation") {
  const auto tree = cantor_coding_tree(2);
  CHECK_THROWS_AS(assign_weights(tree, [](const KrsTree&, int v) { return v == 0 ? Rational(1) : Rational(1, 3); }),
                  NormalizationError);
  CHECK_THROWS_AS(assign_weights(tree, [](const KrsTree& t, int v) {
                    return t.nodes[v].parent < 0 ? Rational(1) : Rational(t.nodes[v].index == 0 ? 1 : 0);
                  }),
                  DomainError);
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    // Random rational splits: weight k/n for the left child, (n-k)/n for the right.
    const long n = 2 + static_cast<long>(rng() % 50);
    const long k = 1 + static_cast<long>(rng() % (n - 1));
    const auto m = assign_weights(tree, [&](const KrsTree& t, int v) {
      if (t.nodes[v].parent < 0) return Rational(1);
      return t.nodes[v].index == 0 ? frac(k, n) : frac(n - k, n);
    });
    Rational level2 = 0;
    for (int v = tree->level_begin[2]; v < tree->level_begin[3]; ++v) level2 += m.mass[v];
    CHECK(level2 == 1);
  }
}

TEST_CASE("cantor example pair") {
  const Rational p = frac(2, 5);
  const auto [mu, nu] = cantor_example_pair(p, 8);
  const KrsTree& t = *mu.tree;
  auto node = [&](std::vector<int> w) {
    int v = 0;
    for (int d : w) v = t.nodes[v].first_child + d;
    return v;
  };
  CHECK(mu.mass[node({0, 0})] == frac(4, 25));
  CHECK(mu.mass[node({0, 1})] == frac(6, 25));
  CHECK(mu.mass[node({0, 1, 1})] == frac(3, 25));
  CHECK(mu.mass[node({0})] + mu.mass[node({1})] == 1);
  for (int k = 0; k <= t.depth(); ++k) {
    Rational total = 0;
    for (int v = t.level_begin[k]; v < t.level_begin[k + 1]; ++v) total += mu.mass[v];
    CHECK(total == 1);
  }
  const auto sum = sum_measures(mu, nu);
  CHECK(sum.total_mass == 2);
  CHECK_FALSE(sum.normalized);
  CHECK(sum.mass[node({0})] == 1);
  for (int v = 0; v < static_cast<int>(t.nodes.size()); ++v) {
    const auto w = digits_of(t, v);
    CHECK(mu.mass[v] == example_mass(w, p));
    std::vector<int> flipped(w);
    for (int& d : flipped) d = 1 - d;
    CHECK(nu.mass[v] == example_mass(flipped, p));
    // Each of mu, nu is at most 2(1-p) 2^-|w|, so the sum is O(2^-|w|) with constant 4(1-p).
    const Rational scale = int_power(Rational(1, 2), t.nodes[v].level);
    CHECK(mu.mass[v] <= 2 * (1 - p) * scale + (t.nodes[v].level == 0 ? 1 : 0));
    CHECK(sum.mass[v] <= 4 * (1 - p) * scale);
  }
  CHECK_THROWS_AS(cantor_example_pair(Rational(1, 2), 4), DomainError);
  const auto other = uniform_measure(cantor_coding_tree(3));
  CHECK_THROWS_AS(sum_measures(mu, other), StructuralError);
}

TEST_CASE("ball mass agrees with the leaf oracle and is monotone") {
  const auto [mu, nu] = cantor_example_pair(frac(1, 3), 7);
  std::mt19937 rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const Rational x = frac(static_cast<long>(rng() % 730), 729);
    const Rational R1 = frac(1 + static_cast<long>(rng() % 400), 1000);
    const Rational R2 = R1 + frac(static_cast<long>(rng() % 100), 1000);
    const auto a = ball_mass(mu, x, R1);
    const auto o = leaf_oracle(mu, x, R1);
    CHECK(a.lo >= o.lo);
    CHECK(a.hi <= o.hi);
    CHECK(a.lo <= a.hi);
    const auto b = ball_mass(mu, x, R2);
    CHECK(b.hi >= a.lo);
    CHECK(b.lo >= a.lo);
  }
}

TEST_CASE("discrete geometric measure") {
  const auto m = discrete_geometric(Rational(1, 2), Rational(1, 4));
  CHECK(m.tail(1).lo / m.tail(2).lo == 4);
  CHECK(m.total_mass().lo == 1);
  const auto b = ball_mass(m, Rational(1, 2), Rational(1, 8));
  CHECK(b.exact());
  CHECK(b.lo == m.mass(1));
  CHECK(m.mass(1) == Rational(3, 16));
  // Point-scan oracle over the cached points.
  std::mt19937 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Rational x = frac(static_cast<long>(rng() % 1025), 1024);
    const Rational R = frac(1 + static_cast<long>(rng() % 512), 2048);
    Rational scan = 0;
    for (unsigned n = 0; n <= m.index_cap; ++n) {
      if (abs_of(m.point(n) - x) < R) scan += m.mass(n);
    }
    if (x < R) scan += m.tail(m.index_cap + 1).lo;  // the ball swallows every point past the cap
    const auto got = ball_mass(m, x, R);
    CHECK(got.lo == scan);
  }
  CHECK_THROWS_AS(discrete_geometric(Rational(1, 2), Rational(1)), DomainError);
}

TEST_CASE("double exponential measures") {
  const auto g = double_exp_measure(Rational(1, 2), 2, GeometricMasses{Rational(1, 2)});
  for (unsigned N = 1; N < 12; ++N) {
    CHECK(g.tail(N).lo == int_power(Rational(1, 2), N - 1));
    CHECK(g.tail(N).lo / g.tail(N + 1).lo == 2);
  }
  const auto single = double_exp_measure(Rational(1, 2), 2, ExplicitMasses{{Rational(1)}});
  CHECK(single.tail(2).hi == 0);
  CHECK(ball_mass(single, Rational(1, 4), Rational(1, 100)).lo == 1);

  const auto tele = double_exp_measure(Rational(1, 2), 2, TelescopingMasses{});
  CHECK(tele.tail(7).lo == Rational(1, 7));
  const auto inv = double_exp_measure(Rational(1, 2), 2, InverseSquareMasses{});
  for (unsigned N = 2; N < 6; ++N) {
    Rational partial = 0;
    for (unsigned n = N; n < N + 2000; ++n) partial += Rational(1, static_cast<unsigned long>(n) * n);
    const auto t = inv.tail(N);
    CHECK(partial <= t.hi);
    CHECK(partial + Rational(1, N + 1999) >= t.lo);
  }
  // The ball around 0 swallows the truncated tail with an exact bracket.
  const auto b = ball_mass(g, 0, Rational(1, 1000));
  CHECK(b.lo == g.tail(g.index_cap + 1).lo + g.mass(10) + g.mass(9) + g.mass(8) + g.mass(7) + g.mass(6) + g.mass(5) + g.mass(4));
  const auto atom = double_exp_measure(Rational(1, 2), 2, GeometricMasses{Rational(1, 2)}, Rational(1, 3));
  CHECK(ball_mass(atom, 0, Rational(1, 10)).lo - ball_mass(g, 0, Rational(1, 10)).lo == Rational(1, 3));
}

TEST_CASE("atoms") {
  const Measure base = uniform_measure(cantor_coding_tree(5));
  const Measure with = add_atom(base, 0);
  const auto& w = std::get<WeightedMeasure>(with);
  CHECK(w.total_mass == 2);
  CHECK_FALSE(w.normalized);
  for (int k = 1; k < 10; ++k) CHECK(ball_mass(with, 0, int_power(Rational(1, 3), k)).lo >= 1);
  CHECK_THROWS_AS(add_atom(base, Rational(1, 2)), DomainError);
  CHECK(measure_atoms(with).size() == 1);
}
