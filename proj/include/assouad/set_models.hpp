#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "assouad/rational.hpp"

namespace assouad {

/// Orientation-preserving similarity y -> ratio * y + offset.
struct AffineMap {
  Rational ratio;
  Rational offset;
};

class SetDescriptor;

struct CantorIfs {
  std::vector<AffineMap> maps;  // sorted by offset, images pairwise disjoint
  Rational hull_lo, hull_hi;    // attractor hull, fixed points of the extreme maps
  // Cached for cell refinement: child i of a cell [l, r] is
  // [l + t*shift_i, l + t*shift_i + t*span_i] with t = (r - l) * inv_width.
  std::vector<Rational> shift, span;
  Rational inv_width;
};

/// Closure of {q^n : n >= 0}, i.e. {1, q, q^2, ...} together with 0.
struct GeometricClosure {
  Rational q;
};

/// {alpha^(M^n) : n >= 1} together with 0.
struct DoubleExponential {
  Rational alpha;
  unsigned M;
};

struct FinitePoints {
  std::vector<Rational> points;  // sorted, unique
};

struct FiniteUnion {
  std::vector<SetDescriptor> parts;  // pairwise disjoint hulls, sorted by hull
};

/// Symbolic compact subset of [0,1]. Construction goes through the named
/// factories, which enforce the variant invariants (strong separation for
/// IFS, decreasing point sequences, disjoint union parts).
class SetDescriptor {
 public:
  using Variant = std::variant<CantorIfs, GeometricClosure, DoubleExponential, FinitePoints, FiniteUnion>;

  static SetDescriptor cantor_ifs(std::vector<AffineMap> maps);
  static SetDescriptor middle_third_cantor();
  static SetDescriptor geometric(Rational q);
  static SetDescriptor double_exponential(Rational alpha, unsigned M);
  static SetDescriptor points(std::vector<Rational> pts);
  static SetDescriptor finite_union(std::vector<SetDescriptor> parts);

  const Variant& variant() const { return v_; }
  Rational hull_lo() const;
  Rational hull_hi() const;
  std::string kind_name() const;

 private:
  explicit SetDescriptor(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

/// Truncation caps for queries on infinite sets. `max_depth` bounds cell
/// refinement, `max_index` bounds the double-exponential point index.
struct Resolution {
  int max_depth = 48;
  unsigned max_index = 10;
};

/// A piece of the canonical cell hierarchy of a descriptor: a closed
/// interval whose endpoints both lie in E. Siblings are disjoint and the
/// gaps between consecutive siblings contain no point of E.
struct Cell {
  enum class Kind : std::uint8_t { Point, Cylinder, Tail };
  Rational left, right;
  Kind kind = Kind::Point;
  unsigned index = 0;  // tail: cell is [0, x_index]
  int part = -1;       // union part, -1 when not a union
  int depth = 0;
  bool is_point() const { return left == right; }
};

std::vector<Cell> root_cells(const SetDescriptor& desc);
/// Children of a cell, left to right; empty when the cell is a point or
/// refinement is capped by `res`.
std::vector<Cell> child_cells(const SetDescriptor& desc, const Cell& cell, const Resolution& res = {});

/// Result of an extremal-point query under truncation. `value` is always a
/// genuine point of E; the true infimum/supremum lies between `bound` and
/// `value` (equal when `exact`).
struct PointQuery {
  Rational value;
  Rational bound;
  bool exact = true;
};

/// inf(E ∩ (y, ∞)) if strict, inf(E ∩ [y, ∞)) otherwise.
std::optional<PointQuery> successor(const SetDescriptor& desc, const Rational& y, bool strict, const Resolution& res = {});
/// sup(E ∩ (-∞, y)) if strict, sup(E ∩ (-∞, y]) otherwise.
std::optional<PointQuery> predecessor(const SetDescriptor& desc, const Rational& y, bool strict, const Resolution& res = {});

struct DistanceResult {
  Rational value;        // distance to the nearest resolved point of E
  Rational error_bound;  // true distance lies in [value - error_bound, value]
  bool capped = false;
};

DistanceResult distance_to_set(const SetDescriptor& desc, const Rational& x, const Resolution& res = {},
                               std::optional<Rational> tolerance = std::nullopt);

struct CoveringResult {
  long count = 0;
  bool capped = false;
};

/// Minimal number of sets of diameter <= r covering E ∩ B(x,R), B open.
CoveringResult covering_count(const SetDescriptor& desc, const Rational& x, const Rational& R, const Rational& r,
                              const Resolution& res = {});

struct Gap {
  Rational left, right;
};

struct GapList {
  std::vector<Gap> gaps;
  Rational resolution_floor;
};

GapList gap_structure(const SetDescriptor& desc, const Rational& min_gap, const Resolution& res = {});

/// Gaps of length >= min_len whose left endpoint lies in [a, b], sorted.
std::vector<Gap> gaps_in(const SetDescriptor& desc, const Rational& a, const Rational& b, const Rational& min_len,
                         const Resolution& res = {});

std::vector<Rational> sample_net(const SetDescriptor& desc, const Rational& delta, const Resolution& res = {});

/// Cells of length <= max_len (or capped) that meet [a, b], left to right.
std::vector<Cell> cells_in(const SetDescriptor& desc, const Rational& a, const Rational& b, const Rational& max_len,
                           const Resolution& res = {});

// Localized variants: the search starts from `cells` (for instance a cover of
// a sub-interval from cover_cells) instead of the root cells.
std::optional<PointQuery> successor_within(const SetDescriptor& desc, const std::vector<Cell>& cells, const Rational& y,
                                          bool strict, const Resolution& res = {});
std::optional<PointQuery> predecessor_within(const SetDescriptor& desc, const std::vector<Cell>& cells,
                                            const Rational& y, bool strict, const Resolution& res = {});
std::vector<Gap> gaps_within(const SetDescriptor& desc, const std::vector<Cell>& cells, const Rational& a,
                             const Rational& b, const Rational& min_len, const Resolution& res = {});

/// Cells covering E ∩ [lo, hi] with nothing outside it (capped cells may
/// stick out), refined from `cells`, left to right.
std::vector<Cell> cover_cells(const SetDescriptor& desc, const std::vector<Cell>& cells, const Rational& lo,
                              const Rational& hi, const Resolution& res = {});

/// True when x is a point of E that the cell hierarchy resolves exactly
/// (x is an endpoint of some cell within the caps).
bool resolved_member(const SetDescriptor& desc, const std::vector<Cell>& cells, const Rational& x,
                     const Resolution& res = {});
bool resolved_member(const SetDescriptor& desc, const Rational& x, const Resolution& res = {});

}  // namespace assouad
