#include <cmath>
#include <random>
#include <sstream>

#include "assouad/errors.hpp"
#include "assouad/estimators.hpp"
#include "doctest.h"

using namespace assouad;

namespace {

const double kLog2Log3 = std::log(2.0) / std::log(3.0);

// Greedy cover built from plain successor queries, one point at a time.
long successor_greedy(const SetDescriptor& d, const Rational& x, const Rational& R, const Rational& r,
                      const Resolution& res) {
  auto first = successor(d, x - R, true, res);
  if (!first || first->value >= x + R) return 0;
  long count = 1;
  Rational start = first->value;
  for (;;) {
    auto next = successor(d, start + r, true, res);
    if (!next || next->value >= x + R) return count;
    start = next->value;
    ++count;
  }
}

// Mass of the open ball from leaves alone; nullopt when a leaf straddles the boundary.
std::optional<Rational> leaf_mass(const WeightedMeasure& m, const Rational& x, const Rational& R) {
  const KrsTree& t = *m.tree;
  Rational total = 0;
  for (int v = t.level_begin[t.depth()]; v < static_cast<int>(t.nodes.size()); ++v) {
    const KrsNode& n = t.nodes[v];
    const bool in = x - R < n.hull_lo && n.hull_hi < x + R;
    const bool out = n.hull_hi <= x - R || n.hull_lo >= x + R;
    if (in) total += m.mass[v];
    else if (!out && m.mass[v] > 0) return std::nullopt;
  }
  return total;
}

}  // namespace

TEST_CASE("cell-walk covering count agrees with the point-by-point greedy") {
  std::mt19937 rng(7);
  const Resolution res{20, 6};
  const std::vector<SetDescriptor> sets = {SetDescriptor::middle_third_cantor(), SetDescriptor::geometric(Rational(1, 3)),
                                           SetDescriptor::double_exponential(Rational(1, 2), 2)};
  for (const auto& d : sets) {
    for (int trial = 0; trial < 60; ++trial) {
      const Rational x(static_cast<long>(rng() % 729), 729);
      Rational R(1 + static_cast<long>(rng() % 81), 243), r(1 + static_cast<long>(rng() % 27), 2187);
      R.canonicalize();
      r.canonicalize();
      const auto c = covering_count(d, x, R, r, res);
      if (c.capped) continue;
      CHECK(c.count == successor_greedy(d, x, R, r, res));
    }
  }
}

TEST_CASE("Cantor covering counts are powers of two at triadic scales") {
  const auto C = SetDescriptor::middle_third_cantor();
  for (unsigned j = 1; j <= 4; ++j)
    for (unsigned k = j; k <= 9; ++k) {
      const auto c = covering_count(C, 0, int_power(Rational(1, 3), j), int_power(Rational(1, 3), k));
      CHECK(c.count == (1L << (k - j)));
    }
}

TEST_CASE("Cantor set dimensions") {
  const auto C = SetDescriptor::middle_third_cantor();
  const auto w = default_window(C, 10);
  const auto up = set_dimension(C, EstimateKind::UpperSet, w);
  const auto lo = set_dimension(C, EstimateKind::LowerSet, w);
  const auto box = set_dimension(C, EstimateKind::BoxCounting, w);
  CHECK(up.value == doctest::Approx(kLog2Log3).epsilon(0.01));
  CHECK(lo.value == doctest::Approx(kLog2Log3).epsilon(0.01));
  CHECK(box.value == doctest::Approx(kLog2Log3).epsilon(0.01));
  CHECK_FALSE(up.infinite);
  CHECK(lo.value <= box.value + 1e-9);
  CHECK(box.value <= up.value + 1e-9);
  for (const auto& sp : up.slope_series) CHECK(std::isfinite(sp.slope));
  CHECK(up.samples > 0);
  CHECK(up.witness.R > up.witness.r);
}

TEST_CASE("geometric set has upper dimension near zero") {
  const auto G = SetDescriptor::geometric(Rational(1, 2));
  const auto est = set_dimension(G, EstimateKind::UpperSet, default_window(G));
  CHECK(est.value < 0.1);
  CHECK_FALSE(est.infinite);
}

TEST_CASE("measure scan extremes match an exhaustive leaf oracle") {
  const auto [mu, nu] = cantor_example_pair(Rational(2, 5), 7);
  (void)nu;
  ScaleWindow w = default_window(Measure{mu});
  const auto est = measure_dimension(mu, EstimateKind::UpperMeasure, w);
  const auto low = measure_dimension(mu, EstimateKind::LowerMeasure, w);

  const KrsTree& t = *mu.tree;
  std::vector<Rational> anchors;
  for (const auto& n : t.nodes) anchors.push_back(n.point);
  for (const auto& sp : est.slope_series) {
    double hi = -1e300, lo = 1e300;
    for (const auto& x : anchors)
      for (int j = w.j_min; j <= w.j_max; ++j) {
        const int k = j + sp.gap;
        if (k > w.max_level) continue;
        const auto big = leaf_mass(mu, x, w.R_factor * int_power(w.base, j));
        const auto small = leaf_mass(mu, x, w.r_factor * int_power(w.base, k));
        if (!big || !small) continue;
        const double q = std::log(big->get_d()) - std::log(small->get_d());
        hi = std::max(hi, q);
        lo = std::min(lo, q);
      }
    CHECK(sp.extreme == doctest::Approx(hi).epsilon(1e-9));
    for (const auto& lp : low.slope_series)
      if (lp.gap == sp.gap) CHECK(lp.extreme == doctest::Approx(lo).epsilon(1e-9));
  }
}

TEST_CASE("example measures: mu is thick, mu + nu is not") {
  const Rational p(2, 5);
  const auto [mu, nu] = cantor_example_pair(p, 10);
  const double target = std::fabs(std::log(0.4)) / std::log(3.0);
  const Measure m = mu;
  const auto w = default_window(m);
  CHECK(measure_dimension(m, EstimateKind::UpperMeasure, w).value == doctest::Approx(target).epsilon(0.02));
  const auto sum = measure_dimension(Measure{sum_measures(mu, nu)}, EstimateKind::UpperMeasure, w);
  CHECK(std::fabs(sum.value - kLog2Log3) < 0.05);
}

TEST_CASE("uniform Cantor measure: equal upper and lower, doubling, uniformly perfect") {
  const Measure u = uniform_measure(cantor_coding_tree(9));
  const auto w = default_window(u);
  const auto up = measure_dimension(u, EstimateKind::UpperMeasure, w);
  const auto lo = measure_dimension(u, EstimateKind::LowerMeasure, w);
  CHECK(up.value == doctest::Approx(kLog2Log3).epsilon(0.01));
  CHECK(lo.value == doctest::Approx(kLog2Log3).epsilon(0.01));
  const auto d = doubling_check(u, w);
  CHECK_FALSE(d.infinite);
  CHECK(std::isfinite(d.constant));
  const auto perf = uniform_perfectness_check(u, Rational(1, 3), w);
  CHECK(perf.constant > 0);
  CHECK(perf.constant <= 1);

  // Support-dimension bound on the measure.
  const auto supp = measure_dimension(u, EstimateKind::UpperSet, default_window(*support_set(u), 9));
  CHECK(supp.value <= up.value + 0.02);
}

TEST_CASE("an atom at a non-isolated point floors dim_L and blows up dim_A") {
  const Measure u = uniform_measure(cantor_coding_tree(10));
  const Measure ua = add_atom(u, 0);
  const auto w = default_window(ua);
  CHECK(measure_dimension(ua, EstimateKind::LowerMeasure, w).value < 0.05);
  const auto up = measure_dimension(ua, EstimateKind::UpperMeasure, w);
  CHECK(up.infinite);
  CHECK(std::isinf(up.value));
  CHECK(doubling_check(ua, w).infinite);
}

TEST_CASE("discrete measures on sequences") {
  const Measure g = discrete_geometric(Rational(1, 2), Rational(1, 4));
  CHECK(measure_dimension(g, EstimateKind::UpperMeasure, default_window(g)).value ==
        doctest::Approx(2.0).epsilon(0.01));

  const Measure de = double_exp_measure(Rational(1, 2), 2, GeometricMasses{Rational(1, 2)});
  const auto e = measure_dimension(de, EstimateKind::UpperMeasure, default_window(de));
  CHECK(e.value < 0.1);
  CHECK_FALSE(e.infinite);

  const Measure tele = double_exp_measure(Rational(1, 2), 2, TelescopingMasses{});
  const auto t = measure_dimension(tele, EstimateKind::UpperMeasure, default_window(tele));
  CHECK(t.infinite);
  REQUIRE(t.window_slopes.size() == 3);
  CHECK(t.window_slopes[0] < t.window_slopes[1]);
  CHECK(t.window_slopes[1] < t.window_slopes[2]);
}

TEST_CASE("classifier cases") {
  const auto seq = [](MassProfile p, Rational zero = 0) {
    return double_exp_measure(Rational(1, 2), 2, std::move(p), zero);
  };
  {
    const auto c = proposition_classify(seq(GeometricMasses{Rational(1, 2)}, Rational(1, 4)));
    CHECK(c.which == PropositionCase::NonDoublingAtom);
    CHECK(c.infinite);
  }
  {
    const auto c = proposition_classify(seq(GeometricMasses{Rational(1, 2)}));
    CHECK(c.which == PropositionCase::CaseIII);
    CHECK(c.lambda == 2);
    CHECK(c.Lambda == 2);
    CHECK_FALSE(c.infinite);
  }
  {
    const auto c = proposition_classify(seq(TelescopingMasses{}));
    CHECK(c.which == PropositionCase::CaseI);
    CHECK(c.infinite);
    // t_n / t_{n+1} = (n+1)/n exactly.
    CHECK(c.ratios[2].first == Rational(4, 3));
  }
  {
    const auto c = proposition_classify(seq(InverseSquareMasses{}));
    CHECK(c.which == PropositionCase::CaseI);
  }
  {
    const auto c = proposition_classify(seq(GeometricMasses{Rational(1, 16)}));
    CHECK(c.which == PropositionCase::CaseII);
    CHECK(c.lambda == 16);
  }
  ClassifyOptions shortrange;
  shortrange.last = 2;
  CHECK_THROWS_AS(proposition_classify(seq(TelescopingMasses{}), shortrange), InconclusiveError);
  ClassifyOptions mid;
  mid.last = 30;
  CHECK_THROWS_AS(proposition_classify(seq(InverseSquareMasses{}), mid), InconclusiveError);
  CHECK_THROWS_AS(proposition_classify(seq(ExplicitMasses{{Rational(1)}})), DomainError);
}

TEST_CASE("window validation and empty perfectness scan") {
  ScaleWindow w;
  w.j_min = 0;
  CHECK_THROWS_AS(w.validate(), DomainError);
  w = ScaleWindow{};
  w.base = 2;
  CHECK_THROWS_AS(w.validate(), DomainError);
  const Measure u = uniform_measure(cantor_coding_tree(6));
  ScaleWindow tiny = default_window(u);
  tiny.R_max = Rational(1, 1000000);
  CHECK_THROWS_AS(uniform_perfectness_check(u, Rational(1, 2), tiny), DomainError);
}

TEST_CASE("estimates are bit-identical across thread counts") {
  const auto [mu, nu] = cantor_example_pair(Rational(2, 5), 8);
  (void)nu;
  const Measure m = mu;
  ScaleWindow w = default_window(m);
  w.threads = 1;
  const auto a = measure_dimension(m, EstimateKind::UpperMeasure, w);
  w.threads = 3;
  const auto b = measure_dimension(m, EstimateKind::UpperMeasure, w);
  CHECK(a.value == b.value);
  CHECK(a.witness.x == b.witness.x);
  CHECK(a.witness.R == b.witness.R);
  REQUIRE(a.slope_series.size() == b.slope_series.size());
  for (std::size_t i = 0; i < a.slope_series.size(); ++i) CHECK(a.slope_series[i].extreme == b.slope_series[i].extreme);
}

TEST_CASE("sample csv dump") {
  const Measure u = uniform_measure(cantor_coding_tree(5));
  const auto csv = sample_csv(u, EstimateKind::UpperMeasure, default_window(u));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "kind,x,R,r,quantity,log_ratio_slope");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.rfind("upper_measure,", 0) == 0);
  }
  CHECK(rows > 0);
}
