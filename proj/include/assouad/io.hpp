#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "assouad/estimators.hpp"
#include "assouad/krs.hpp"
#include "assouad/measures.hpp"
#include "assouad/synthesizers.hpp"
#include "json.hpp"

namespace assouad::io {

// Insertion-ordered, so reports serialize byte-identically run to run.
using json = nlohmann::ordered_json;

/// "num/den" or "n" strings, decimal strings, or JSON integers.
Rational rational_from(const json& j);
json rational_to(const Rational& q);

json load_json_file(const std::string& path);
/// Writes to `path`, or to stdout when path is "-" or empty.
void write_text(const std::string& path, const std::string& text);

// --- set descriptors --------------------------------------------------------
//   {"type": "cantor_ifs", "maps": [{"ratio": "1/3", "offset": "0"}, ...]}
//   {"type": "cantor_ifs", "preset": "middle_third"}
//   {"type": "geometric", "q": "1/2"}
//   {"type": "double_exp", "alpha": "1/2", "M": 2}
//   {"type": "points", "points": ["0", "1/2"]}
//   {"type": "union", "parts": [<set>, ...]}
SetDescriptor set_from_json(const json& j);
json set_to_json(const SetDescriptor& d);

// --- trees ------------------------------------------------------------------
//   {"coding": "cantor", "depth": 9}
//   {"set": <set>, "s": "1/9", "c": "3/8", "C": "9/8", "depth": 8}
std::shared_ptr<const KrsTree> tree_from_json(const json& j);
KrsParams params_from_json(const json& j, int default_depth);
json params_to_json(const KrsParams& p);

// --- measures ---------------------------------------------------------------
//   {"kind": "weighted", "tree": <tree>, "rule": {"name": "uniform"}}
//   {"kind": "weighted", "tree": {"coding": "cantor", "depth": 12},
//    "rule": {"name": "example_mu" | "example_nu" | "example_sum", "p": "2/5"}}
//   {"kind": "weighted", "tree": <tree>, "rule": {"name": "upper", "D": "6/5" | "inf", "epsilon": "1/4"}}
//   {"kind": "weighted", "tree": <tree>,
//    "rule": {"name": "lower_upper", "d": "3/10", "D": "3/2", "epsilon": "1/10"}}
//   {"kind": "weighted", "tree": <tree>, "weights": ["1", "1/2", ...]}   (storage order)
//   {"kind": "discrete", "sequence": <geometric | double_exp set>,
//    "profile": {"type": "geometric", "ratio": "1/4"} | {"type": "telescoping"} |
//               {"type": "inverse_square"} | {"type": "explicit", "masses": [...]},
//    "zero_mass": "0", "index_cap": 10}
//   {"kind": "mixture", "base": <measure>, "atoms": [{"point": "0", "mass": "1"}]}
// Any measure may carry "atoms"; they are added on top (no renormalization).
Measure measure_from_json(const json& j);

/// The synthesis behind an "upper"/"lower_upper" rule, with its manifest.
SynthesisResult synthesis_from_json(const json& j);

// --- reports ----------------------------------------------------------------
json window_to_json(const ScaleWindow& w);
json estimate_to_json(const DimensionEstimate& e);
json doubling_to_json(const DoublingResult& d);
json perfectness_to_json(const PerfectnessResult& p);
json verify_to_json(const VerifyReport& r);
json manifest_to_json(const SynthesisManifest& m);
json calibration_to_json(const CalibrationResult& c);
json classification_to_json(const PropositionClassification& c);
json zeta_to_json(const ZetaEstimate& z);

/// Rows `x,R,mass_lo,mass_hi`, rationals as num/den.
std::string ball_mass_csv(const Measure& m, const std::vector<std::pair<Rational, Rational>>& queries);

/// Finite doubles as numbers; infinities and NaN as the strings "inf", "-inf", "nan".
json number(double x);

}  // namespace assouad::io
