#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "assouad/krs.hpp"
#include "assouad/rational.hpp"

namespace assouad {

struct Atom {
  Rational point;
  Rational mass;
};

/// Exact mass enclosure; `lo == hi` when no truncation was involved.
struct MassBracket {
  Rational lo, hi;
  bool exact() const { return lo == hi; }
};

/// Measure given by sibling weights on a tree: mu(child) = weight(child) * mu(parent).
struct WeightedMeasure {
  std::shared_ptr<const KrsTree> tree;
  std::vector<Rational> weight;  // per node; roots carry their share of the root mass
  std::vector<Rational> mass;    // per node, cumulative products
  std::vector<Rational> prefix;  // prefix sums of mass in storage order
  std::vector<double> hull_approx;  // hull_lo, hull_hi per node, for fast comparisons
  std::vector<Atom> atoms;       // point masses added on top (mixtures)
  Rational total_mass{1};
  bool normalized = true;
  std::optional<Rational> declared_min_weight;
  std::string label;
};

using WeightRule = std::function<Rational(const KrsTree&, int node)>;

/// Applies `rule` to every node (roots included) and checks every sibling
/// group sums to exactly 1.
WeightedMeasure assign_weights(std::shared_ptr<const KrsTree> tree, const WeightRule& rule);
WeightedMeasure uniform_measure(std::shared_ptr<const KrsTree> tree);

/// Standard binary coding tree of the middle-third Cantor set: node w is the
/// triadic interval I_w, children I_w0 (left) and I_w1 (right).
std::shared_ptr<const KrsTree> cantor_coding_tree(int depth);

/// The pair (mu, nu) of the two-sided Cantor example on the coding tree.
std::pair<WeightedMeasure, WeightedMeasure> cantor_example_pair(const Rational& p, int depth);

/// Node-wise sum; both measures must live on the same tree.
WeightedMeasure sum_measures(const WeightedMeasure& mu, const WeightedMeasure& nu);

// Mass profiles p(n) for discrete measures.
struct GeometricMasses {
  Rational ratio;  // p(n) = ratio^n
};
struct TelescopingMasses {};  // p(n) = 1/(n(n+1)), so t_N = 1/N
struct InverseSquareMasses {};  // p(n) = 1/n^2, tails only bracketed
struct ExplicitMasses {
  std::vector<Rational> masses;  // p(first), p(first+1), ...; zero beyond
};
using MassProfile = std::variant<GeometricMasses, TelescopingMasses, InverseSquareMasses, ExplicitMasses>;

/// mu = p(0) delta_0 + scale * sum_{n >= first} p(n) delta_{x_n} (+ extra atoms).
/// Points past `index_cap` are kept only as a tail mass bracketed on [0, x_cap].
struct DiscreteMeasure {
  DiscreteMeasure(SetDescriptor seq, unsigned first, MassProfile prof)
      : sequence(std::move(seq)), first_index(first), profile(std::move(prof)) {}

  SetDescriptor sequence;  // geometric or double_exponential
  unsigned first_index = 0;
  MassProfile profile;
  Rational zero_mass;
  Rational scale{1};
  unsigned index_cap = 0;
  std::vector<Atom> atoms;
  bool normalized = true;
  std::string label;

  // Cached x_n, scaled p(n) and prefix sums for first_index <= n <= index_cap.
  std::vector<Rational> points;
  std::vector<Rational> masses;
  std::vector<Rational> cumulative;  // cumulative[i] = masses[0] + ... + masses[i-1]

  Rational point(unsigned n) const;
  /// Scaled p(n).
  Rational mass(unsigned n) const;
  /// Scaled t_N = sum_{n >= N} p(n), bracketed when no closed form exists.
  MassBracket tail(unsigned N) const;
  MassBracket total_mass() const;
};

DiscreteMeasure discrete_geometric(const Rational& q, const Rational& p, unsigned index_cap = 200);
DiscreteMeasure double_exp_measure(const Rational& alpha, unsigned M, MassProfile profile,
                                   const Rational& zero_mass = 0, unsigned index_cap = 10);

using Measure = std::variant<WeightedMeasure, DiscreteMeasure>;

/// mu(B(x,R)) for the open ball. Throws PrecisionError when a tolerance is
/// given and the truncation bracket is wider.
MassBracket ball_mass(const Measure& m, const Rational& x, const Rational& R,
                      std::optional<Rational> tolerance = std::nullopt);
MassBracket ball_mass(const WeightedMeasure& m, const Rational& x, const Rational& R);
MassBracket ball_mass(const DiscreteMeasure& m, const Rational& x, const Rational& R);

/// mu + delta_e, recorded as a mixture (total mass grows, no renormalisation).
Measure add_atom(const Measure& m, const Rational& e, const Rational& mass = 1);

/// Set underlying the measure's support, when it is known symbolically.
std::optional<SetDescriptor> support_set(const Measure& m);
/// Atoms (positive point masses) of the measure, including p(0) at 0.
std::vector<Atom> measure_atoms(const Measure& m);
std::string measure_label(const Measure& m);

}  // namespace assouad
