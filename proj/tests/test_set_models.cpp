#include <random>

#include "assouad/errors.hpp"
#include "assouad/set_models.hpp"
#include "doctest.h"

using namespace assouad;

namespace {

Rational frac(long n, long d) {
  Rational q(n, d);
  q.canonicalize();
  return q;
}

// Level-n triadic intervals of the middle-third set, built by digit expansion.
std::vector<std::pair<Rational, Rational>> triadic_intervals(int n) {
  std::vector<std::pair<Rational, Rational>> out;
  const Rational len = int_power(Rational(1, 3), n);
  for (long mask = 0; mask < (1L << n); ++mask) {
    Rational left = 0;
    for (int d = 0; d < n; ++d) {
      if (mask & (1L << (n - 1 - d))) left += 2 * int_power(Rational(1, 3), d + 1);
    }
    out.emplace_back(left, left + len);
  }
  return out;
}

// Minimal cover of sorted points by closed intervals of length r, by DP over prefixes.
long cover_oracle(const std::vector<Rational>& pts, const Rational& r) {
  std::vector<long> f(pts.size() + 1, 0);
  for (std::size_t i = 1; i <= pts.size(); ++i) {
    f[i] = static_cast<long>(i);
    for (std::size_t j = 0; j < i; ++j) {
      if (pts[i - 1] - pts[j] <= r) f[i] = std::min(f[i], f[j] + 1);
    }
  }
  return f[pts.size()];
}

}  // namespace

TEST_CASE("descriptor validation") {
  CHECK_THROWS_AS(SetDescriptor::geometric(Rational(1)), DomainError);
  CHECK_THROWS_AS(SetDescriptor::double_exponential(Rational(1, 2), 1), DomainError);
  CHECK_THROWS_AS(SetDescriptor::cantor_ifs({{Rational(1, 2), 0}, {Rational(1, 2), Rational(1, 2)}}), DomainError);
  CHECK_THROWS_AS(SetDescriptor::points({Rational(3, 2)}), DomainError);
  CHECK_THROWS_AS(
      SetDescriptor::finite_union({SetDescriptor::middle_third_cantor(), SetDescriptor::points({Rational(1, 2)})}),
      DomainError);
  const auto c = SetDescriptor::middle_third_cantor();
  CHECK(c.hull_lo() == 0);
  CHECK(c.hull_hi() == 1);
  CHECK(SetDescriptor::double_exponential(Rational(1, 2), 2).hull_hi() == Rational(1, 4));
}

TEST_CASE("cantor cells match triadic intervals") {
  const auto c = SetDescriptor::middle_third_cantor();
  std::vector<Cell> level = root_cells(c);
  for (int n = 1; n <= 5; ++n) {
    std::vector<Cell> next;
    for (const auto& cell : level) {
      for (auto& k : child_cells(c, cell)) next.push_back(k);
    }
    level = next;
    const auto oracle = triadic_intervals(n);
    REQUIRE(level.size() == oracle.size());
    for (std::size_t i = 0; i < level.size(); ++i) {
      CHECK(level[i].left == oracle[i].first);
      CHECK(level[i].right == oracle[i].second);
    }
  }
}

TEST_CASE("cantor distance and covering") {
  const auto c = SetDescriptor::middle_third_cantor();
  const auto d = distance_to_set(c, Rational(1, 2));
  CHECK(d.value == Rational(1, 6));
  CHECK(d.error_bound == 0);
  // 1/4 = 0.0202..._3 lies in C but is no cell endpoint: only a bracket is available.
  const auto q = distance_to_set(c, Rational(1, 4));
  CHECK(q.capped);
  CHECK(q.value - q.error_bound <= 0);
  CHECK(q.value <= int_power(Rational(1, 3), 48));
  CHECK(covering_count(c, 0, 1, Rational(1, 9)).count == 4);
  CHECK(covering_count(c, Rational(1, 2), Rational(1, 2), Rational(1, 3)).count == 2);

  // Brute-force oracle: any interval of length 3^-n covers at most two level-n
  // intervals of the set, and the greedy count equals the level-n count.
  for (int n = 1; n <= 6; ++n) {
    const Rational r = int_power(Rational(1, 3), n);
    CHECK(covering_count(c, Rational(1, 2), Rational(3, 5), r).count == (1L << n));
  }
}

TEST_CASE("successor and predecessor") {
  const auto c = SetDescriptor::middle_third_cantor();
  CHECK(successor(c, Rational(1, 3), true)->value == Rational(2, 3));
  CHECK(successor(c, Rational(1, 3), false)->value == Rational(1, 3));
  CHECK(predecessor(c, Rational(2, 3), true)->value == Rational(1, 3));
  CHECK_FALSE(successor(c, 1, true).has_value());

  const auto g = SetDescriptor::geometric(Rational(1, 2));
  CHECK(successor(g, Rational(3, 10), false)->value == Rational(1, 2));
  CHECK(predecessor(g, Rational(3, 10), false)->value == Rational(1, 4));
  CHECK(predecessor(g, 0, false)->value == 0);
  CHECK(successor(g, Rational(1), false)->value == 1);

  // 0 is a limit from the right: the infimum of E ∩ (0,1] is not resolved exactly.
  const auto q = successor(g, 0, true);
  REQUIRE(q);
  CHECK_FALSE(q->exact);
  CHECK(q->bound == 0);
  CHECK(q->value > 0);
}

TEST_CASE("double exponential cap") {
  const auto e = SetDescriptor::double_exponential(Rational(1, 2), 2);
  Resolution res;
  res.max_index = 3;
  // Points 1/4, 1/16, 1/256 are resolved; below that only a bracket remains.
  CHECK(successor(e, Rational(1, 100), false, res)->value == Rational(1, 16));
  const auto d = distance_to_set(e, Rational(1, 1000), res);
  CHECK(d.value == Rational(1, 1000));
  CHECK(d.error_bound == Rational(1, 1000));
  CHECK(d.capped);
  CHECK_THROWS_AS(distance_to_set(e, Rational(1, 1000), res, Rational(1, 10000)), PrecisionError);
}

TEST_CASE("finite point covering agrees with DP oracle") {
  std::mt19937 rng(12345);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Rational> pts;
    const int n = 1 + static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) pts.push_back(frac(static_cast<long>(rng() % 1000), 1000));
    const auto desc = SetDescriptor::points(pts);
    const auto& sorted = std::get<FinitePoints>(desc.variant()).points;
    const Rational x = frac(static_cast<long>(rng() % 1000), 1000);
    const Rational R = frac(1 + static_cast<long>(rng() % 500), 1000);
    const Rational r = frac(1 + static_cast<long>(rng() % 200), 1000);
    std::vector<Rational> inside;
    for (const auto& p : sorted) {
      if (abs_of(p - x) < R) inside.push_back(p);
    }
    INFO("x=" << to_string(x) << " R=" << to_string(R) << " r=" << to_string(r) << " n=" << inside.size());
    CHECK(covering_count(desc, x, R, r).count == cover_oracle(inside, r));
  }
}

TEST_CASE("gaps and nets") {
  const auto c = SetDescriptor::middle_third_cantor();
  const auto gl = gap_structure(c, Rational(1, 9));
  REQUIRE(gl.gaps.size() == 3);
  CHECK(gl.gaps[0].left == Rational(1, 9));
  CHECK(gl.gaps[1].left == Rational(1, 3));
  CHECK(gl.gaps[1].right == Rational(2, 3));
  CHECK(gl.gaps[2].right == Rational(8, 9));

  const Rational delta(1, 27);
  const auto net = sample_net(c, delta);
  CHECK(net.size() == 8);
  // Property: every point of a finer net is within delta of the coarse net.
  for (const auto& y : sample_net(c, Rational(1, 243))) {
    Rational best = 1;
    for (const auto& p : net) best = min_of(best, abs_of(p - y));
    CHECK(best <= delta);
  }

  const auto g = SetDescriptor::geometric(Rational(1, 2));
  const auto gg = gap_structure(g, Rational(1, 8));
  REQUIRE(gg.gaps.size() == 3);
  CHECK(gg.gaps[2].left == Rational(1, 2));
  CHECK(gg.gaps[0].left == Rational(1, 8));

  const auto half = SetDescriptor::cantor_ifs({{Rational(1, 6), 0}, {Rational(1, 6), Rational(1, 3)}});
  const auto u = SetDescriptor::finite_union({SetDescriptor::points({Rational(9, 10)}), half});
  CHECK(u.hull_lo() == 0);
  CHECK(u.hull_hi() == Rational(9, 10));
  CHECK(successor(u, Rational(1, 2), true)->value == Rational(9, 10));
  CHECK(distance_to_set(u, Rational(1, 4)).value == Rational(1, 12));
  CHECK_THROWS_AS(
      SetDescriptor::finite_union({SetDescriptor::points({Rational(1, 2)}), SetDescriptor::middle_third_cantor()}),
      DomainError);
}
