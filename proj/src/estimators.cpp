#include "assouad/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "assouad/errors.hpp"

namespace assouad {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_upper(EstimateKind k) { return k == EstimateKind::UpperSet || k == EstimateKind::UpperMeasure; }

// Runs body(i) for i in [0, n) on up to `threads` workers. Each index writes
// only its own slot, so results do not depend on the thread count.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<Rational> dedup(std::vector<Rational> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

Rational radius(const Rational& factor, const Rational& base, int level) {
  return factor * int_power(base, static_cast<unsigned>(level));
}

// Log of the exact mass, or NaN when the bracket is too wide or empty.
double log_mass(const Measure& m, const Rational& x, const Rational& R, double tol) {
  const MassBracket b = ball_mass(m, x, R);
  if (b.hi <= 0) return kNaN;
  if (!b.exact()) {
    if (b.lo <= 0) return kNaN;
    const double width = to_double((b.hi - b.lo) / b.hi);
    if (width > tol) return kNaN;
  }
  return log_of(b.hi);
}

std::vector<Rational> measure_anchors(const Measure& m, const ScaleWindow& w) {
  std::vector<Rational> out = w.extra_anchors;
  for (const auto& a : measure_atoms(m)) out.push_back(a.point);
  if (const auto* wm = std::get_if<WeightedMeasure>(&m)) {
    const KrsTree& t = *wm->tree;
    int top = w.anchor_level >= 0 ? w.anchor_level : t.depth();
    top = std::min(top, t.depth());
    for (int i = 0; i < t.level_begin[top + 1]; ++i)
      if (wm->mass[i] > 0) out.push_back(t.nodes[i].point);
  } else {
    const auto& dm = std::get<DiscreteMeasure>(m);
    for (std::size_t i = 0; i < dm.points.size(); ++i)
      if (dm.masses[i] > 0) out.push_back(dm.points[i]);
    if (dm.zero_mass > 0 || dm.tail(dm.index_cap + 1).hi > 0) out.push_back(0);
  }
  return dedup(out);
}

// One grid sample of log Q for anchor a at (j, k); NaN when skipped.
struct Grid {
  int j_min, j_max, k_max;
  int nj() const { return j_max - j_min + 1; }
  int nk() const { return k_max + 1; }
};

struct ScanResult {
  std::vector<Rational> anchors;
  Grid grid;
  std::vector<std::vector<double>> q;  // per anchor, index (j - j_min) * nk + k
};

DimensionEstimate reduce_scan(const ScanResult& scan, EstimateKind kind, const ScaleWindow& w) {
  const bool upper = is_upper(kind);
  const double log_factor = log_of(w.R_factor / w.r_factor);
  const double log_step = -log_of(w.base);
  const Grid& g = scan.grid;
  auto better = [&](double a, double b) { return upper ? a > b : a < b; };

  DimensionEstimate est;
  est.kind = kind;
  est.window = w;
  struct Best {
    double q = kNaN;
    std::size_t a = 0;
    int j = 0;
  };
  // Deepest r level with any resolved sample; deeper levels only hold skips.
  int k_eff = g.j_min + w.min_gap;
  for (std::size_t a = 0; a < scan.anchors.size(); ++a)
    for (int j = g.j_min; j <= g.j_max; ++j)
      for (int k = std::max(k_eff + 1, j + w.min_gap); k <= g.k_max; ++k)
        if (!std::isnan(scan.q[a][(j - g.j_min) * g.nk() + k])) k_eff = k;
  const int max_gap = k_eff - g.j_min;
  std::vector<Best> best(std::max(0, g.k_max - g.j_min + 1));
  for (std::size_t a = 0; a < scan.anchors.size(); ++a) {
    for (int j = g.j_min; j <= g.j_max; ++j) {
      for (int k = j + w.min_gap; k <= g.k_max; ++k) {
        const double v = scan.q[a][(j - g.j_min) * g.nk() + k];
        if (std::isnan(v)) {
          ++est.skipped;
          continue;
        }
        ++est.samples;
        Best& b = best[k - j];
        if (std::isnan(b.q) || better(v, b.q)) b = {v, a, j};
      }
    }
  }
  std::vector<int> gaps;
  for (int m = w.min_gap; m <= max_gap; ++m) {
    if (std::isnan(best[m].q)) continue;
    const double lr = log_factor + m * log_step;
    est.slope_series.push_back({m, lr, best[m].q, best[m].q / lr});
    gaps.push_back(m);
  }
  if (gaps.empty()) throw PrecisionError("no scale pair survived the precision filter", w.bracket_tolerance);

  // The secant compares two gaps over the same R levels, j in [j_min, j_min + h],
  // so both extremes see the same configurations and the constant cancels.
  const int h = (max_gap - w.min_gap) / 4;
  const int m_hi = max_gap - h;
  const int j_top = std::min(g.j_max, g.j_min + h);
  auto common = [&](int m, Best& out) {
    for (std::size_t a = 0; a < scan.anchors.size(); ++a)
      for (int j = g.j_min; j <= j_top; ++j) {
        if (j + m > k_eff) continue;
        const double v = scan.q[a][(j - g.j_min) * g.nk() + j + m];
        if (!std::isnan(v) && (std::isnan(out.q) || better(v, out.q))) out = {v, a, j};
      }
  };
  std::vector<Best> cb(m_hi + 1);
  std::vector<int> cgaps;
  for (int m = w.min_gap; m <= m_hi; ++m) {
    common(m, cb[m]);
    if (!std::isnan(cb[m].q)) cgaps.push_back(m);
  }
  auto lr_of = [&](int m) { return log_factor + m * log_step; };
  int top = gaps.back(), bottom = gaps.back();
  double e_top = best[top].q, e_bottom = e_top;
  Best wb = best[top];
  if (cgaps.size() >= 2) {
    top = cgaps.back();
    const int target = (cgaps.front() + top) / 2;
    bottom = cgaps.front();
    for (int m : cgaps)
      if (m != top && std::abs(m - target) < std::abs(bottom - target)) bottom = m;
    e_top = cb[top].q;
    e_bottom = cb[bottom].q;
    wb = cb[top];
  }
  est.value = top == bottom ? e_top / lr_of(top) : (e_top - e_bottom) / (lr_of(top) - lr_of(bottom));
  est.value = std::max(0.0, est.value);
  est.fit_constant = std::exp(e_top - est.value * lr_of(top));
  est.witness = {scan.anchors[wb.a], radius(w.R_factor, w.base, wb.j), radius(w.r_factor, w.base, wb.j + top),
                 e_top, e_top / lr_of(top)};

  // Extremal slope at the smallest gap within consecutive depth windows.
  const int windows = std::max(1, std::min(w.windows, g.nj()));
  const double lr0 = log_factor + w.min_gap * log_step;
  for (int wi = 0; wi < windows; ++wi) {
    const int j0 = g.j_min + wi * g.nj() / windows;
    const int j1 = g.j_min + (wi + 1) * g.nj() / windows - 1;
    double e = kNaN;
    for (std::size_t a = 0; a < scan.anchors.size(); ++a)
      for (int j = j0; j <= j1; ++j) {
        const int k = j + w.min_gap;
        if (k > g.k_max) continue;
        const double v = scan.q[a][(j - g.j_min) * g.nk() + k];
        if (!std::isnan(v) && (std::isnan(e) || better(v, e))) e = v;
      }
    if (!std::isnan(e)) est.window_slopes.push_back(e / lr0);
  }
  if (upper) {
    bool trend = est.window_slopes.size() >= 3;
    for (std::size_t i = 1; trend && i < est.window_slopes.size(); ++i)
      trend = est.window_slopes[i] - est.window_slopes[i - 1] >= w.trend_step;
    bool capped = false;
    for (const auto& sp : est.slope_series) capped = capped || sp.slope > w.slope_cap;
    for (double s : est.window_slopes) capped = capped || s > w.slope_cap;
    if (trend || capped) {
      est.infinite = true;
      est.value = std::numeric_limits<double>::infinity();
    }
  }
  return est;
}

Grid make_grid(const ScaleWindow& w) { return {w.j_min, w.j_max, w.max_level}; }

bool R_allowed(const ScaleWindow& w, const Rational& R) { return !w.R_max || R <= *w.R_max; }

ScanResult scan_measure(const Measure& m, const ScaleWindow& w) {
  ScanResult scan;
  scan.anchors = measure_anchors(m, w);
  scan.grid = make_grid(w);
  const Grid g = scan.grid;
  std::vector<std::optional<Rational>> big_r(g.nj());
  std::vector<Rational> small_r(g.nk());
  for (int j = g.j_min; j <= g.j_max; ++j) {
    const Rational R = radius(w.R_factor, w.base, j);
    if (R_allowed(w, R)) big_r[j - g.j_min] = R;
  }
  for (int k = g.j_min + w.min_gap; k <= g.k_max; ++k) small_r[k] = radius(w.r_factor, w.base, k);
  scan.q.assign(scan.anchors.size(), std::vector<double>(static_cast<std::size_t>(g.nj()) * g.nk(), kNaN));
  parallel_for(scan.anchors.size(), w.threads, [&](std::size_t a) {
    const Rational& x = scan.anchors[a];
    std::vector<double> big(g.nj(), kNaN), small(g.nk(), kNaN);
    for (int j = g.j_min; j <= g.j_max; ++j)
      if (big_r[j - g.j_min]) big[j - g.j_min] = log_mass(m, x, *big_r[j - g.j_min], w.bracket_tolerance);
    for (int k = g.j_min + w.min_gap; k <= g.k_max; ++k) small[k] = log_mass(m, x, small_r[k], w.bracket_tolerance);
    for (int j = g.j_min; j <= g.j_max; ++j)
      for (int k = j + w.min_gap; k <= g.k_max; ++k) scan.q[a][(j - g.j_min) * g.nk() + k] = big[j - g.j_min] - small[k];
  });
  return scan;
}

ScanResult scan_set(const SetDescriptor& desc, const ScaleWindow& w) {
  ScanResult scan;
  auto anchors = sample_net(desc, w.delta, w.resolution);
  anchors.insert(anchors.end(), w.extra_anchors.begin(), w.extra_anchors.end());
  scan.anchors = dedup(anchors);
  scan.grid = make_grid(w);
  const Grid g = scan.grid;
  scan.q.assign(scan.anchors.size(), std::vector<double>(static_cast<std::size_t>(g.nj()) * g.nk(), kNaN));
  parallel_for(scan.anchors.size(), w.threads, [&](std::size_t a) {
    const Rational& x = scan.anchors[a];
    for (int j = g.j_min; j <= g.j_max; ++j) {
      const Rational R = radius(w.R_factor, w.base, j);
      if (!R_allowed(w, R)) continue;
      for (int k = j + w.min_gap; k <= g.k_max; ++k) {
        const auto c = covering_count(desc, x, R, radius(w.r_factor, w.base, k), w.resolution);
        if (!c.capped && c.count > 0) scan.q[a][(j - g.j_min) * g.nk() + k] = std::log(static_cast<double>(c.count));
      }
    }
  });
  return scan;
}

DimensionEstimate box_counting(const SetDescriptor& desc, const ScaleWindow& w) {
  const Rational lo = desc.hull_lo(), hi = desc.hull_hi();
  const Rational centre = (lo + hi) / 2;
  const Rational R = (hi - lo) / 2 + 1;
  DimensionEstimate est;
  est.kind = EstimateKind::BoxCounting;
  est.window = w;
  for (int k = w.j_min + w.min_gap; k <= w.max_level; ++k) {
    const Rational r = radius(w.r_factor, w.base, k);
    const auto c = covering_count(desc, centre, R, r, w.resolution);
    if (c.capped || c.count == 0) {
      ++est.skipped;
      continue;
    }
    ++est.samples;
    const double lr = -log_of(r);
    const double q = std::log(static_cast<double>(c.count));
    est.slope_series.push_back({k, lr, q, lr > 0 ? q / lr : 0.0});
  }
  if (est.slope_series.empty()) throw PrecisionError("no box-counting scale resolved", 0);
  const auto& last = est.slope_series.back();
  if (est.slope_series.size() == 1) {
    est.value = last.slope;
  } else {
    const auto& mid = est.slope_series[est.slope_series.size() / 2 - (est.slope_series.size() % 2 == 0 ? 1 : 0)];
    est.value = (last.extreme - mid.extreme) / (last.log_ratio - mid.log_ratio);
  }
  est.value = std::max(0.0, est.value);
  est.fit_constant = std::exp(last.extreme - est.value * last.log_ratio);
  est.witness = {centre, R, radius(w.r_factor, w.base, last.gap), last.extreme, last.slope};
  return est;
}

}  // namespace

void ScaleWindow::validate() const {
  if (base <= 0 || base >= 1) throw DomainError("window base must lie in (0,1)");
  if (R_factor <= 0 || r_factor <= 0) throw DomainError("window radius factors must be positive");
  if (j_min < 1 || j_max < j_min) throw DomainError("window needs 1 <= j_min <= j_max");
  if (min_gap < 0) throw DomainError("window min_gap must be >= 0");
  if (max_level < j_min + min_gap) throw DomainError("window max_level below the first admissible r");
  if (delta <= 0) throw DomainError("window delta must be positive");
  if (windows < 1) throw DomainError("window count must be >= 1");
  if (min_gap == 0 && R_factor <= r_factor) throw DomainError("ratio floor: R/r must exceed 1 at the smallest gap");
}

std::string kind_name(EstimateKind k) {
  switch (k) {
    case EstimateKind::UpperSet: return "upper_set";
    case EstimateKind::LowerSet: return "lower_set";
    case EstimateKind::UpperMeasure: return "upper_measure";
    case EstimateKind::LowerMeasure: return "lower_measure";
    case EstimateKind::BoxCounting: return "box_counting";
  }
  return "?";
}

std::string case_name(PropositionCase c) {
  switch (c) {
    case PropositionCase::NonDoublingAtom: return "NonDoublingAtom";
    case PropositionCase::CaseI: return "CaseI";
    case PropositionCase::CaseII: return "CaseII";
    case PropositionCase::CaseIII: return "CaseIII";
  }
  return "?";
}

ScaleWindow default_window(const SetDescriptor& desc, int depth) {
  ScaleWindow w;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CantorIfs>) {
          Rational b = v.maps.front().ratio;
          for (const auto& m : v.maps) b = min_of(b, m.ratio);
          w.base = b;
          w.j_min = 1;
          w.j_max = depth - 1;
          w.max_level = depth;
          w.delta = int_power(b, 4) * (v.hull_hi - v.hull_lo);
        } else if constexpr (std::is_same_v<T, GeometricClosure>) {
          w.base = Rational(1, 2);
          w.j_min = 1;
          w.j_max = 40;
          w.max_level = 100;
          w.delta = int_power(v.q, 12);
          w.resolution.max_depth = 160;
        } else if constexpr (std::is_same_v<T, DoubleExponential>) {
          w.base = Rational(1, 2);
          w.j_min = 1;
          w.j_max = 130;
          w.max_level = 190;
          w.delta = int_power(Rational(1, 2), 200);
        } else {
          w.base = Rational(1, 2);
          w.j_min = 1;
          w.j_max = 20;
          w.max_level = 40;
          w.delta = int_power(Rational(1, 2), 12);
        }
      },
      desc.variant());
  return w;
}

ScaleWindow default_window(const Measure& m) {
  ScaleWindow w;
  if (const auto* wm = std::get_if<WeightedMeasure>(&m)) {
    const KrsTree& t = *wm->tree;
    if (t.kind == KrsTree::Kind::Coding) {
      w.base = Rational(1, 3);
      w.R_factor = w.r_factor = Rational(3, 2);
    } else {
      w.base = t.params.s;
      w.R_factor = 2 * t.params.C;
      w.r_factor = 2 * t.params.c;
    }
    w.j_min = 1;  // j = 0 balls swallow the whole support
    w.j_max = std::max(1, t.depth() - 1);
    w.max_level = std::max(1, t.depth());
    if (t.kind == KrsTree::Kind::Krs && t.depth() >= 4) {
      // r balls at the leaf level mostly cut leaves and get skipped; the few
      // survivors bias the deepest gaps, so stop one level short.
      w.max_level = t.depth() - 1;
      w.j_max = t.depth() - 2;
    }
    return w;
  }
  const auto& dm = std::get<DiscreteMeasure>(m);
  w.base = Rational(1, 2);
  if (std::holds_alternative<DoubleExponential>(dm.sequence.variant())) {
    w.j_min = 1;
    w.j_max = 130;
    w.max_level = 190;
  } else {
    // Keep r above the last resolved point x_cap so the tail stays inside small balls.
    const double levels = -log_of(dm.point(dm.index_cap)) / std::log(2.0);
    w.max_level = std::max(4, std::min(100, static_cast<int>(levels) - 2));
    w.j_min = 1;
    w.j_max = std::max(1, w.max_level * 2 / 5);
  }
  return w;
}

DimensionEstimate set_dimension(const SetDescriptor& desc, EstimateKind kind, const ScaleWindow& window) {
  window.validate();
  if (kind == EstimateKind::BoxCounting) return box_counting(desc, window);
  if (kind != EstimateKind::UpperSet && kind != EstimateKind::LowerSet)
    throw DomainError("set_dimension takes upper_set, lower_set or box_counting");
  return reduce_scan(scan_set(desc, window), kind, window);
}

DimensionEstimate measure_dimension(const Measure& m, EstimateKind kind, const ScaleWindow& window) {
  window.validate();
  if (kind == EstimateKind::UpperSet || kind == EstimateKind::LowerSet || kind == EstimateKind::BoxCounting) {
    const auto supp = support_set(m);
    if (!supp) throw DomainError("measure support is not available symbolically");
    return set_dimension(*supp, kind, window);
  }
  return reduce_scan(scan_measure(m, window), kind, window);
}

std::string sample_csv(const Measure& m, EstimateKind kind, const ScaleWindow& w) {
  w.validate();
  const ScanResult scan = scan_measure(m, w);
  const double log_factor = log_of(w.R_factor / w.r_factor);
  const double log_step = -log_of(w.base);
  std::ostringstream os;
  os << "kind,x,R,r,quantity,log_ratio_slope\n";
  char buf[256];
  const Grid& g = scan.grid;
  for (std::size_t a = 0; a < scan.anchors.size(); ++a)
    for (int j = g.j_min; j <= g.j_max; ++j)
      for (int k = j + w.min_gap; k <= g.k_max; ++k) {
        const double q = scan.q[a][(j - g.j_min) * g.nk() + k];
        if (std::isnan(q)) continue;
        const double lr = log_factor + (k - j) * log_step;
        std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g\n", kind_name(kind).c_str(),
                      to_double(scan.anchors[a]), to_double(radius(w.R_factor, w.base, j)),
                      to_double(radius(w.r_factor, w.base, k)), q, q / lr);
        os << buf;
      }
  return os.str();
}

DoublingResult doubling_check(const Measure& m, const ScaleWindow& w) {
  w.validate();
  const auto anchors = measure_anchors(m, w);
  const int nj = w.j_max - w.j_min + 1;
  // R runs over R_factor * base^j * 2^-i, a base-2 grid between consecutive levels.
  const int sub = std::max(1, static_cast<int>(std::ceil(-log_of(w.base) / std::log(2.0) - 1e-9)));
  auto R_at = [&](int j, int i) -> Rational { return radius(w.R_factor, w.base, j) / int_power(Rational(2), i); };
  std::vector<std::vector<double>> q(anchors.size(), std::vector<double>(nj * sub, kNaN));
  parallel_for(anchors.size(), w.threads, [&](std::size_t a) {
    for (int j = w.j_min; j <= w.j_max; ++j)
      for (int i = 0; i < sub; ++i) {
        const Rational R = R_at(j, i);
        if (!R_allowed(w, R)) continue;
        const double big = log_mass(m, anchors[a], R, w.bracket_tolerance);
        const double small = log_mass(m, anchors[a], R / 2, w.bracket_tolerance);
        q[a][(j - w.j_min) * sub + i] = big - small;
      }
  });
  DoublingResult out;
  double best = kNaN;
  const int windows = std::max(1, std::min(w.windows, nj));
  for (int wi = 0; wi < windows; ++wi) {
    const int j0 = wi * nj / windows, j1 = (wi + 1) * nj / windows;
    double e = kNaN;
    for (std::size_t a = 0; a < anchors.size(); ++a)
      for (int j = j0; j < j1; ++j)
        for (int i = 0; i < sub; ++i) {
          const double v = q[a][j * sub + i];
          if (std::isnan(v)) continue;
          if (std::isnan(e) || v > e) e = v;
          if (std::isnan(best) || v > best) {
            best = v;
            const Rational R = R_at(j + w.j_min, i);
            out.witness = {anchors[a], R, R / 2, v, v / std::log(2.0)};
          }
        }
    if (!std::isnan(e)) out.window_log_constants.push_back(e);
  }
  if (std::isnan(best)) throw PrecisionError("no doubling sample survived the precision filter", w.bracket_tolerance);
  out.constant = std::exp(best);
  const double step = w.trend_step * std::log(2.0);
  // A ratio jump can straddle a window edge through the base-2 sub-grid, so
  // windows only need to be non-decreasing with an overall rise.
  const auto& wl = out.window_log_constants;
  bool trend = wl.size() >= 3 && wl.back() - wl.front() >= step * static_cast<double>(wl.size() - 1);
  for (std::size_t i = 1; trend && i < wl.size(); ++i) trend = wl[i] >= wl[i - 1];
  out.infinite = trend || best > w.slope_cap * std::log(2.0);
  if (out.infinite) out.constant = std::numeric_limits<double>::infinity();
  return out;
}

PerfectnessResult uniform_perfectness_check(const Measure& m, const Rational& tau, const ScaleWindow& w) {
  w.validate();
  if (tau <= 0 || tau >= 1) throw DomainError("uniform perfectness needs tau in (0,1)");
  const auto supp = support_set(m);
  Rational diam = 1;
  if (supp) diam = supp->hull_hi() - supp->hull_lo();
  const Rational R_cap = diam / (2 * tau);
  const auto anchors = measure_anchors(m, w);
  const int nj = w.j_max - w.j_min + 1;
  std::vector<std::vector<double>> q(anchors.size(), std::vector<double>(nj, kNaN));
  parallel_for(anchors.size(), w.threads, [&](std::size_t a) {
    for (int j = w.j_min; j <= w.j_max; ++j) {
      const Rational R = radius(w.R_factor, w.base, j);
      if (R > R_cap || !R_allowed(w, R)) continue;
      q[a][j - w.j_min] = log_mass(m, anchors[a], tau * R, w.bracket_tolerance) -
                          log_mass(m, anchors[a], R, w.bracket_tolerance);
    }
  });
  PerfectnessResult out;
  double worst = kNaN;
  for (std::size_t a = 0; a < anchors.size(); ++a)
    for (int j = 0; j < nj; ++j) {
      const double v = q[a][j];
      if (std::isnan(v)) continue;
      ++out.samples;
      if (std::isnan(worst) || v < worst) {
        worst = v;
        const Rational R = radius(w.R_factor, w.base, j + w.j_min);
        out.witness = {anchors[a], R, tau * R, v, 0};
      }
    }
  if (out.samples == 0) throw DomainError("uniform perfectness scan is empty: no admissible (x, R) in the window");
  out.constant = std::exp(worst);
  return out;
}

PropositionClassification proposition_classify(const DiscreteMeasure& m, const ClassifyOptions& options) {
  PropositionClassification out;
  out.options = options;
  if (m.zero_mass > 0) {
    out.which = PropositionCase::NonDoublingAtom;
    out.infinite = true;
    return out;
  }
  const unsigned first = std::max(options.first, m.first_index);
  if (options.last < first + 3) throw InconclusiveError("audit range too short for a classification");
  std::vector<MassBracket> t;
  for (unsigned n = first; n <= options.last + 1; ++n) {
    t.push_back(m.tail(n));
    if (t.back().hi <= 0) throw DomainError("measure has finite support; the sequence hypotheses do not hold");
  }
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (t[i + 1].lo <= 0) throw InconclusiveError("tail bracket touches zero at n = " + std::to_string(first + i + 1));
    Rational lo = t[i].lo / t[i + 1].hi, hi = t[i].hi / t[i + 1].lo;
    lo.canonicalize();
    hi.canonicalize();
    out.ratios.emplace_back(lo, hi);
  }
  out.lambda = out.ratios.front().first;
  out.Lambda = out.ratios.front().second;
  for (const auto& [lo, hi] : out.ratios) {
    out.lambda = min_of(out.lambda, lo);
    out.Lambda = max_of(out.Lambda, hi);
  }
  const double end_hi = to_double(out.ratios.back().second);
  double tail_max = 0;
  for (std::size_t i = out.ratios.size() / 2; i < out.ratios.size(); ++i)
    tail_max = std::max(tail_max, to_double(out.ratios[i].first));
  if (end_hi - 1 <= options.margin) {
    out.which = PropositionCase::CaseI;
    out.infinite = true;
  } else if (tail_max >= options.escape) {
    out.which = PropositionCase::CaseII;
    out.infinite = true;
  } else if (to_double(out.lambda) > 1 + options.margin && to_double(out.Lambda) < options.escape) {
    out.which = PropositionCase::CaseIII;
    out.infinite = false;
  } else {
    throw InconclusiveError("tail ratios fit none of the cases on n in [" + std::to_string(first) + ", " +
                            std::to_string(options.last) + "]");
  }
  return out;
}

}  // namespace assouad
