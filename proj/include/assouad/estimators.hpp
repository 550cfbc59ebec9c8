#pragma once

#include <optional>
#include <string>
#include <vector>

#include "assouad/measures.hpp"
#include "assouad/rational.hpp"
#include "assouad/set_models.hpp"

namespace assouad {

/// Geometric grid of scale pairs: R_j = R_factor * base^j for j in
/// [j_min, j_max], r_k = r_factor * base^k for k in [j + min_gap, max_level].
struct ScaleWindow {
  Rational base{1, 3};
  Rational R_factor{1};
  Rational r_factor{1};
  int j_min = 1;
  int j_max = 8;
  int max_level = 12;
  int min_gap = 1;
  std::optional<Rational> R_max;  // skip R above this cap
  Rational delta{1, 81};          // sample-net resolution for anchors
  int anchor_level = -1;          // tree anchors: node levels <= this (-1: all levels)
  std::vector<Rational> extra_anchors;
  Resolution resolution{};
  int windows = 3;               // depth windows for the infinity test
  double slope_cap = 50;         // a slope above this flags infinity
  double trend_step = 0.1;       // minimal per-window slope increase for the trend test
  double bracket_tolerance = 1e-9;  // relative width above which a mass bracket is skipped
  unsigned threads = 1;

  void validate() const;
};

enum class EstimateKind { UpperSet, LowerSet, UpperMeasure, LowerMeasure, BoxCounting };
std::string kind_name(EstimateKind k);

struct Sample {
  Rational x, R, r;
  double quantity = 0;  // log of the count or mass ratio
  double slope = 0;     // quantity / log(R/r)
};

struct SlopePoint {
  int gap = 0;           // k - j
  double log_ratio = 0;  // log(R/r)
  double extreme = 0;    // extremal log quantity at this gap
  double slope = 0;
};

struct DimensionEstimate {
  EstimateKind kind = EstimateKind::UpperSet;
  double value = 0;
  bool infinite = false;
  Sample witness;
  std::vector<SlopePoint> slope_series;
  std::vector<double> window_slopes;  // extremal slope at the minimal gap, per depth window
  double fit_constant = 1;
  long samples = 0;
  long skipped = 0;  // pairs dropped because a mass bracket was too wide
  ScaleWindow window;
};

/// Window suited to the descriptor's natural scales.
ScaleWindow default_window(const SetDescriptor& desc, int depth = 12);
/// Window matched to the measure's tree or point sequence.
ScaleWindow default_window(const Measure& m);

DimensionEstimate set_dimension(const SetDescriptor& desc, EstimateKind kind, const ScaleWindow& window);
DimensionEstimate measure_dimension(const Measure& m, EstimateKind kind, const ScaleWindow& window);

/// Optional per-sample dump rows `kind,x,R,r,quantity,log_ratio_slope`.
std::string sample_csv(const Measure& m, EstimateKind kind, const ScaleWindow& window);

struct DoublingResult {
  double constant = 1;  // sup mu(B(x,R)) / mu(B(x,R/2))
  bool infinite = false;
  std::vector<double> window_log_constants;
  Sample witness;
};

DoublingResult doubling_check(const Measure& m, const ScaleWindow& window);

struct PerfectnessResult {
  double constant = 1;  // inf mu(B(x,tau R)) / mu(B(x,R))
  Sample witness;
  long samples = 0;
};

PerfectnessResult uniform_perfectness_check(const Measure& m, const Rational& tau, const ScaleWindow& window);

enum class PropositionCase { NonDoublingAtom, CaseI, CaseII, CaseIII };
std::string case_name(PropositionCase c);

struct ClassifyOptions {
  unsigned first = 1;
  unsigned last = 64;
  double margin = 0.05;  // CaseI: end ratio within 1 + margin; CaseIII: lambda > 1 + margin
  double escape = 10;    // CaseII: ratio at or above this in the final half of the range
};

struct PropositionClassification {
  PropositionCase which = PropositionCase::CaseIII;
  Rational lambda, Lambda;  // inf / sup of t_n / t_{n+1} over the audited range
  bool infinite = false;    // verdict: dim_A is infinite (true) or zero (false)
  std::vector<std::pair<Rational, Rational>> ratios;  // bracket of t_n / t_{n+1}
  ClassifyOptions options;
};

PropositionClassification proposition_classify(const DiscreteMeasure& m, const ClassifyOptions& options = {});

}  // namespace assouad
