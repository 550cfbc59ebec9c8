#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "assouad/krs.hpp"
#include "assouad/measures.hpp"
#include "assouad/rational.hpp"

namespace assouad {

// --- calibration of s -------------------------------------------------------

struct LevelEvidence {
  int level = 0;
  int min_children = 0, max_children = 0;
  double lower_bound = 0, upper_bound = 0;  // s^-(dL - eps), s^-(dA + eps)
  bool ok = true;
};

struct CalibrationResult {
  Rational s_star;
  int k_star = 0;
  std::vector<LevelEvidence> evidence;
  std::shared_ptr<const KrsTree> tree;  // the accepted tree
};

struct CalibrateOptions {
  std::vector<Rational> grid{Rational(1, 4), Rational(1, 9), Rational(1, 16), Rational(1, 25)};
  int depth = 4;
  int max_k_star = 2;  // k_star may not exceed this level
};

/// First grid value of s whose tree meets s^-(dL-eps) <= N_w <= s^-(dA+eps)
/// on every level from some k_star <= max_k_star on.
CalibrationResult calibrate_s(const SetDescriptor& desc, const Rational& epsilon, double dim_lower, double dim_upper,
                              const CalibrateOptions& options = {});

// --- synthesis --------------------------------------------------------------

struct PathManifest {
  int rung = 0;                    // ladder index j (1-based); 0 for the lower/upper paths
  std::string role;                // "boundary", "adjacent", "special", "lower", "upper"
  std::vector<std::string> words;  // node words, start first
  int start_level = 0;
  int length = 0;
  int splits = 0;
  Rational weight;  // weight given to the path intervals after the start
  double exponent = 0;  // D_j (or d) the weight encodes
};

struct SynthesisManifest {
  std::string strategy;  // "longbdy", "zeta", "lower_upper"
  Rational s, epsilon;
  std::optional<Rational> a, p;  // a absent when the ladder uses per-rung weights
  std::optional<double> D;       // nullopt for D = infinity
  std::optional<double> d;
  double dim_upper_estimate = 0;
  std::optional<double> dim_lower_estimate;
  std::optional<double> zeta_hat;
  std::vector<double> D_ladder;
  std::vector<PathManifest> paths;
  Rational min_weight, max_weight;
  // Lower/upper scheme: the three s-inequalities (diagnostics).
  std::vector<std::pair<std::string, bool>> inequalities;
};

struct SynthesisResult {
  WeightedMeasure measure;
  SynthesisManifest manifest;
};

struct UpperOptions {
  std::optional<double> dim_upper;  // set estimate; computed from tree.set when absent
  int min_depth = 3;
  int ladder = 1;       // number of rungs for finite D
  int ladder_inf = 3;   // number of rungs for D = infinity
  int separation = 1;   // n_{j+1} >= end of P_j + separation
  int start_level = 1;      // first level a path may start at
  int start_level_inf = 0;  // the same for the D = infinity ladder
  std::vector<double> D_sequence;  // D_j for D = infinity; default dim_upper + j
  bool force_zeta = false;         // skip the boundary-path scheme
};

/// Measure on the tree's set with upper Assouad dimension D (D = nullopt
/// means infinity).
SynthesisResult synthesize_upper(std::shared_ptr<const KrsTree> tree, std::optional<Rational> D,
                                 const Rational& epsilon, const UpperOptions& options = {});

struct LowerUpperOptions {
  std::optional<double> dim_lower, dim_upper;  // set estimates; computed when absent
  int start_level = 0;  // the two interior paths branch at or below this level
};

/// Measure with lower dimension d and upper dimension D.
SynthesisResult synthesize_lower_upper(std::shared_ptr<const KrsTree> tree, const Rational& d, const Rational& D,
                                       const Rational& epsilon, const LowerUpperOptions& options = {});

/// The three s-conditions of the joint scheme at (s, d, eps).
std::vector<std::pair<std::string, bool>> lower_upper_inequalities(const Rational& s, const Rational& d,
                                                                   const Rational& epsilon);

/// mu + delta_e, flagged as a lower-dimension floor.
Measure floor_lower_dimension(const Measure& m, const Rational& e);

/// [min, max] of mu(I)/mu(J) over adjacent, non-sibling intervals of equal level.
std::pair<Rational, Rational> adjacent_cousin_ratio_range(const WeightedMeasure& m);

}  // namespace assouad
