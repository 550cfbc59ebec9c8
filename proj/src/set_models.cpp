#include "assouad/set_models.hpp"

#include <algorithm>
#include <functional>

#include "assouad/errors.hpp"

namespace assouad {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Rational apply(const AffineMap& m, const Rational& y) { return m.ratio * y + m.offset; }

Rational double_exp_point(const DoubleExponential& d, unsigned n) {
  unsigned long e = 1;
  for (unsigned i = 0; i < n; ++i) e *= d.M;
  return int_power(d.alpha, static_cast<unsigned>(e));
}

Rational tail_point(const SetDescriptor::Variant& v, unsigned index) {
  if (const auto* g = std::get_if<GeometricClosure>(&v)) return int_power(g->q, index);
  return double_exp_point(std::get<DoubleExponential>(v), index);
}

const SetDescriptor& part_of(const SetDescriptor& desc, const Cell& cell) {
  if (cell.part < 0) return desc;
  return std::get<FiniteUnion>(desc.variant()).parts.at(static_cast<std::size_t>(cell.part));
}

}  // namespace

SetDescriptor SetDescriptor::cantor_ifs(std::vector<AffineMap> maps) {
  if (maps.empty()) throw DomainError("cantor_ifs needs at least one map");
  Rational ratio_sum = 0;
  for (const auto& m : maps) {
    if (m.ratio <= 0 || m.ratio >= 1) throw DomainError("IFS ratio must lie in (0,1), got " + to_string(m.ratio));
    if (m.offset < 0 || m.offset >= 1) throw DomainError("IFS offset must lie in [0,1), got " + to_string(m.offset));
    ratio_sum += m.ratio;
  }
  if (ratio_sum >= 1) throw DomainError("IFS ratios must sum to less than 1 (strong separation)");
  std::sort(maps.begin(), maps.end(), [](const AffineMap& a, const AffineMap& b) { return a.offset < b.offset; });

  // With positive ratios the hull endpoints are the extreme fixed points.
  CantorIfs ifs;
  bool first = true;
  for (const auto& m : maps) {
    const Rational fixed = m.offset / (1 - m.ratio);
    if (first || fixed < ifs.hull_lo) ifs.hull_lo = fixed;
    if (first || fixed > ifs.hull_hi) ifs.hull_hi = fixed;
    first = false;
  }
  if (ifs.hull_lo < 0 || ifs.hull_hi > 1) throw DomainError("IFS attractor leaves [0,1]");
  for (std::size_t i = 1; i < maps.size(); ++i) {
    if (!(apply(maps[i - 1], ifs.hull_hi) < apply(maps[i], ifs.hull_lo))) {
      throw DomainError("IFS images overlap; strong separation required");
    }
  }
  ifs.maps = std::move(maps);
  const Rational width = ifs.hull_hi - ifs.hull_lo;
  ifs.inv_width = width == 0 ? Rational(0) : Rational(1 / width);
  for (const auto& m : ifs.maps) {
    ifs.shift.push_back(apply(m, ifs.hull_lo) - ifs.hull_lo);
    ifs.span.push_back(m.ratio * width);
  }
  return SetDescriptor(std::move(ifs));
}

SetDescriptor SetDescriptor::middle_third_cantor() {
  return cantor_ifs({{Rational(1, 3), Rational(0)}, {Rational(1, 3), Rational(2, 3)}});
}

SetDescriptor SetDescriptor::geometric(Rational q) {
  if (q <= 0 || q >= 1) throw DomainError("geometric set needs q in (0,1)");
  return SetDescriptor(GeometricClosure{std::move(q)});
}

SetDescriptor SetDescriptor::double_exponential(Rational alpha, unsigned M) {
  if (alpha <= 0 || alpha >= 1) throw DomainError("double-exponential set needs alpha in (0,1)");
  if (M < 2) throw DomainError("double-exponential set needs integer M > 1");
  return SetDescriptor(DoubleExponential{std::move(alpha), M});
}

SetDescriptor SetDescriptor::points(std::vector<Rational> pts) {
  if (pts.empty()) throw DomainError("point set must be nonempty");
  for (const auto& p : pts) {
    if (p < 0 || p > 1) throw DomainError("points must lie in [0,1], got " + to_string(p));
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return SetDescriptor(FinitePoints{std::move(pts)});
}

SetDescriptor SetDescriptor::finite_union(std::vector<SetDescriptor> parts) {
  if (parts.empty()) throw DomainError("union needs at least one part");
  std::sort(parts.begin(), parts.end(),
            [](const SetDescriptor& a, const SetDescriptor& b) { return a.hull_lo() < b.hull_lo(); });
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (!(parts[i - 1].hull_hi() < parts[i].hull_lo())) {
      throw DomainError("union parts must have pairwise disjoint hulls");
    }
  }
  return SetDescriptor(FiniteUnion{std::move(parts)});
}

Rational SetDescriptor::hull_lo() const {
  return std::visit(Overloaded{[](const CantorIfs& c) { return c.hull_lo; },
                               [](const GeometricClosure&) { return Rational(0); },
                               [](const DoubleExponential&) { return Rational(0); },
                               [](const FinitePoints& p) { return p.points.front(); },
                               [](const FiniteUnion& u) { return u.parts.front().hull_lo(); }},
                    v_);
}

Rational SetDescriptor::hull_hi() const {
  return std::visit(Overloaded{[](const CantorIfs& c) { return c.hull_hi; },
                               [](const GeometricClosure&) { return Rational(1); },
                               [](const DoubleExponential& d) { return double_exp_point(d, 1); },
                               [](const FinitePoints& p) { return p.points.back(); },
                               [](const FiniteUnion& u) { return u.parts.back().hull_hi(); }},
                    v_);
}

std::string SetDescriptor::kind_name() const {
  return std::visit(Overloaded{[](const CantorIfs&) { return std::string("cantor_ifs"); },
                               [](const GeometricClosure&) { return std::string("geometric"); },
                               [](const DoubleExponential&) { return std::string("double_exp"); },
                               [](const FinitePoints&) { return std::string("points"); },
                               [](const FiniteUnion&) { return std::string("union"); }},
                    v_);
}

std::vector<Cell> root_cells(const SetDescriptor& desc) {
  std::vector<Cell> out;
  std::visit(Overloaded{[&](const CantorIfs& c) {
                          Cell cell{c.hull_lo, c.hull_hi, c.hull_lo == c.hull_hi ? Cell::Kind::Point : Cell::Kind::Cylinder};
                          out.push_back(std::move(cell));
                        },
                        [&](const GeometricClosure&) { out.push_back(Cell{0, 1, Cell::Kind::Tail, 0}); },
                        [&](const DoubleExponential& d) {
                          out.push_back(Cell{0, double_exp_point(d, 1), Cell::Kind::Tail, 1});
                        },
                        [&](const FinitePoints& p) {
                          for (const auto& x : p.points) out.push_back(Cell{x, x, Cell::Kind::Point});
                        },
                        [&](const FiniteUnion& u) {
                          for (std::size_t i = 0; i < u.parts.size(); ++i) {
                            for (auto cell : root_cells(u.parts[i])) {
                              cell.part = static_cast<int>(i);
                              out.push_back(std::move(cell));
                            }
                          }
                        }},
             desc.variant());
  return out;
}

std::vector<Cell> child_cells(const SetDescriptor& desc, const Cell& cell, const Resolution& res) {
  std::vector<Cell> out;
  if (cell.is_point() || cell.depth >= res.max_depth) return out;
  const SetDescriptor& d = part_of(desc, cell);
  const int depth = cell.depth + 1;
  switch (cell.kind) {
    case Cell::Kind::Point:
      return out;
    case Cell::Kind::Cylinder: {
      const auto& ifs = std::get<CantorIfs>(d.variant());
      const Rational t = (cell.right - cell.left) * ifs.inv_width;
      out.reserve(ifs.maps.size());
      for (std::size_t i = 0; i < ifs.maps.size(); ++i) {
        Cell c;
        c.left = cell.left + t * ifs.shift[i];
        c.right = c.left + t * ifs.span[i];
        c.kind = Cell::Kind::Cylinder;
        c.part = cell.part;
        c.depth = depth;
        out.push_back(std::move(c));
      }
      return out;
    }
    case Cell::Kind::Tail: {
      if (std::holds_alternative<DoubleExponential>(d.variant()) && cell.index + 1 > res.max_index) return out;
      Cell tail{0, tail_point(d.variant(), cell.index + 1), Cell::Kind::Tail, cell.index + 1, cell.part, depth};
      Cell point{cell.right, cell.right, Cell::Kind::Point, cell.index, cell.part, depth};
      out.push_back(std::move(tail));
      out.push_back(std::move(point));
      return out;
    }
  }
  return out;
}

namespace {

std::optional<PointQuery> succ_in(const SetDescriptor& desc, const std::vector<Cell>& cells, const Rational& y,
                                  bool strict, const Resolution& res) {
  for (const auto& c : cells) {
    if (c.right < y || (strict && c.right == y)) continue;
    if (c.left > y || (!strict && c.left == y)) return PointQuery{c.left, c.left, true};
    if (!strict && c.right == y) return PointQuery{y, y, true};
    const auto kids = child_cells(desc, c, res);
    if (kids.empty()) return PointQuery{c.right, y, false};
    if (auto r = succ_in(desc, kids, y, strict, res)) return r;
  }
  return std::nullopt;
}

std::optional<PointQuery> pred_in(const SetDescriptor& desc, const std::vector<Cell>& cells, const Rational& y,
                                  bool strict, const Resolution& res) {
  for (auto it = cells.rbegin(); it != cells.rend(); ++it) {
    const auto& c = *it;
    if (c.left > y || (strict && c.left == y)) continue;
    if (c.right < y || (!strict && c.right == y)) return PointQuery{c.right, c.right, true};
    if (!strict && c.left == y) return PointQuery{y, y, true};
    const auto kids = child_cells(desc, c, res);
    if (kids.empty()) return PointQuery{c.left, y, false};
    if (auto r = pred_in(desc, kids, y, strict, res)) return r;
  }
  return std::nullopt;
}

}  // namespace

std::optional<PointQuery> successor_within(const SetDescriptor& desc, const std::vector<Cell>& cells, const Rational& y,
                                          bool strict, const Resolution& res) {
  return succ_in(desc, cells, y, strict, res);
}

std::optional<PointQuery> predecessor_within(const SetDescriptor& desc, const std::vector<Cell>& cells,
                                            const Rational& y, bool strict, const Resolution& res) {
  return pred_in(desc, cells, y, strict, res);
}

std::optional<PointQuery> successor(const SetDescriptor& desc, const Rational& y, bool strict, const Resolution& res) {
  return succ_in(desc, root_cells(desc), y, strict, res);
}

std::optional<PointQuery> predecessor(const SetDescriptor& desc, const Rational& y, bool strict,
                                      const Resolution& res) {
  return pred_in(desc, root_cells(desc), y, strict, res);
}

DistanceResult distance_to_set(const SetDescriptor& desc, const Rational& x, const Resolution& res,
                               std::optional<Rational> tolerance) {
  if (x < 0 || x > 1) throw DomainError("distance_to_set needs x in [0,1]");
  const auto pred = predecessor(desc, x, false, res);
  const auto succ = successor(desc, x, false, res);
  DistanceResult out;
  bool have = false;
  Rational lower;
  if (pred) {
    out.value = x - pred->value;
    lower = x - pred->bound;
    out.capped = !pred->exact;
    have = true;
  }
  if (succ) {
    const Rational v = succ->value - x;
    const Rational lo = succ->bound - x;
    if (!have || v < out.value) out.value = v;
    if (!have || lo < lower) lower = lo;
    out.capped = out.capped || !succ->exact;
    have = true;
  }
  out.error_bound = out.value - lower;
  if (tolerance && out.error_bound > *tolerance) {
    throw PrecisionError("distance_to_set unresolved at depth cap; achievable bound " + to_string(out.error_bound),
                         out.error_bound.get_d());
  }
  return out;
}

CoveringResult covering_count(const SetDescriptor& desc, const Rational& x, const Rational& R, const Rational& r,
                              const Resolution& res) {
  if (R <= 0 || r <= 0) throw DomainError("covering_count needs R > 0 and r > 0");
  const Rational lo = x - R, hi = x + R;
  CoveringResult out;
  // Greedy left to right: a piece starts at the first uncovered point of E
  // and covers [start, start + r]. Whole cells of diameter <= r are taken in
  // one step instead of point by point.
  bool started = false;
  Rational end;
  auto open_piece = [&](const Rational& start) {
    ++out.count;
    started = true;
    end = start + r;
  };
  std::function<bool(const std::vector<Cell>&)> walk = [&](const std::vector<Cell>& cells) {
    for (const auto& c : cells) {
      if (c.right <= lo) continue;
      if (c.left >= hi) return false;
      if (started && c.right <= end) continue;
      const bool inside = lo < c.left && c.right < hi;
      const bool fresh = !started || c.left > end;
      if (inside && fresh && c.right - c.left <= r) {
        open_piece(c.left);
        continue;
      }
      if (c.is_point()) {
        if (fresh) open_piece(c.left);  // lo < c.left < hi here
        continue;
      }
      auto kids = child_cells(desc, c, res);
      if (kids.empty()) {
        // Refinement capped: count as if E filled the cell.
        out.capped = true;
        Rational from = max_of(c.left, lo);
        if (!fresh) from = end;
        if (fresh) open_piece(from);
        const Rational stop = min_of(c.right, hi);
        while (end < stop) open_piece(end);
        continue;
      }
      if (!walk(kids)) return false;
    }
    return true;
  };
  walk(root_cells(desc));
  return out;
}

std::vector<Gap> gaps_in(const SetDescriptor& desc, const Rational& a, const Rational& b, const Rational& min_len,
                         const Resolution& res) {
  return gaps_within(desc, root_cells(desc), a, b, min_len, res);
}

std::vector<Gap> gaps_within(const SetDescriptor& desc, const std::vector<Cell>& cells, const Rational& a,
                             const Rational& b, const Rational& min_len, const Resolution& res) {
  std::vector<Gap> out;
  std::function<void(const std::vector<Cell>&)> walk = [&](const std::vector<Cell>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) {
        const Rational& g1 = cells[i - 1].right;
        const Rational& g2 = cells[i].left;
        if (g1 >= a && g1 <= b && g2 - g1 >= min_len) out.push_back(Gap{g1, g2});
      }
      const Cell& c = cells[i];
      if (c.right - c.left >= min_len && c.left <= b && c.right > a) walk(child_cells(desc, c, res));
    }
  };
  walk(cells);
  return out;
}

GapList gap_structure(const SetDescriptor& desc, const Rational& min_gap, const Resolution& res) {
  if (min_gap <= 0) throw DomainError("gap_structure needs min_gap > 0");
  GapList out;
  out.gaps = gaps_in(desc, desc.hull_lo(), desc.hull_hi(), min_gap, res);
  out.resolution_floor = min_gap;
  return out;
}

std::vector<Rational> sample_net(const SetDescriptor& desc, const Rational& delta, const Resolution& res) {
  if (delta <= 0) throw DomainError("sample_net needs delta > 0");
  std::vector<Rational> out;
  std::function<void(const std::vector<Cell>&)> walk = [&](const std::vector<Cell>& cells) {
    for (const auto& c : cells) {
      if (c.right - c.left <= delta) {
        out.push_back(c.left);
        continue;
      }
      const auto kids = child_cells(desc, c, res);
      if (kids.empty()) {
        const Rational width = c.right - c.left;
        throw PrecisionError("sample_net cannot reach delta " + to_string(delta) + " within the depth cap; cell width " +
                                 to_string(width),
                             width.get_d());
      }
      walk(kids);
    }
  };
  walk(root_cells(desc));
  return out;
}

std::vector<Cell> cells_in(const SetDescriptor& desc, const Rational& a, const Rational& b, const Rational& max_len,
                           const Resolution& res) {
  std::vector<Cell> out;
  std::function<void(const std::vector<Cell>&)> walk = [&](const std::vector<Cell>& cells) {
    for (const auto& c : cells) {
      if (c.right < a || c.left > b) continue;
      if (c.right - c.left <= max_len) {
        out.push_back(c);
        continue;
      }
      auto kids = child_cells(desc, c, res);
      if (kids.empty()) {
        out.push_back(c);
        continue;
      }
      walk(kids);
    }
  };
  walk(root_cells(desc));
  return out;
}

std::vector<Cell> cover_cells(const SetDescriptor& desc, const std::vector<Cell>& cells, const Rational& lo,
                              const Rational& hi, const Resolution& res) {
  std::vector<Cell> out;
  std::function<void(const std::vector<Cell>&)> walk = [&](const std::vector<Cell>& level) {
    for (const auto& c : level) {
      if (c.right < lo || c.left > hi) continue;
      if (lo <= c.left && c.right <= hi) {
        out.push_back(c);
        continue;
      }
      auto kids = child_cells(desc, c, res);
      if (kids.empty()) {
        out.push_back(c);  // capped: keep the whole cell
        continue;
      }
      walk(kids);
    }
  };
  walk(cells);
  return out;
}

bool resolved_member(const SetDescriptor& desc, const std::vector<Cell>& cells, const Rational& x,
                     const Resolution& res) {
  for (const auto& c : cells) {
    if (x < c.left || x > c.right) continue;
    if (x == c.left || x == c.right) return true;
    return resolved_member(desc, child_cells(desc, c, res), x, res);
  }
  return false;
}

bool resolved_member(const SetDescriptor& desc, const Rational& x, const Resolution& res) {
  return resolved_member(desc, root_cells(desc), x, res);
}

}  // namespace assouad
