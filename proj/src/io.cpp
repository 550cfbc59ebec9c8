#include "assouad/io.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "assouad/errors.hpp"

namespace assouad::io {

namespace {

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw DomainError(where + ": missing field '" + key + "'");
  return j.at(key);
}

std::string text_of(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_string()) throw DomainError(where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

long integer_of(const json& j, const char* key, const std::string& where) {
  const json& v = field(j, key, where);
  if (!v.is_number_integer()) throw DomainError(where + ": field '" + key + "' must be an integer");
  return v.get<long>();
}

template <class T>
T value_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

std::optional<double> optional_double(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) return std::nullopt;
  const json& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  return to_double(rational_from(v));
}

std::vector<Rational> rationals(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw DomainError(where + " must be an array");
  std::vector<Rational> out;
  for (const auto& v : arr) out.push_back(rational_from(v));
  return out;
}

json rationals_to(const std::vector<Rational>& v) {
  json out = json::array();
  for (const auto& q : v) out.push_back(rational_to(q));
  return out;
}

MassProfile profile_from(const json& j) {
  const std::string type = text_of(j, "type", "profile");
  if (type == "geometric") return GeometricMasses{rational_from(field(j, "ratio", "profile"))};
  if (type == "telescoping") return TelescopingMasses{};
  if (type == "inverse_square") return InverseSquareMasses{};
  if (type == "explicit") return ExplicitMasses{rationals(field(j, "masses", "profile"), "profile.masses")};
  throw DomainError("profile: unknown type '" + type + "'");
}

Measure add_atoms(Measure m, const json& j) {
  if (!j.contains("atoms")) return m;
  const json& atoms = j.at("atoms");
  if (!atoms.is_array()) throw DomainError("atoms must be an array");
  for (const auto& a : atoms) m = add_atom(m, rational_from(field(a, "point", "atom")),
                                           a.contains("mass") ? rational_from(a.at("mass")) : Rational(1));
  return m;
}

std::optional<Rational> target_D(const json& rule) {
  const json& v = field(rule, "D", "rule");
  if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity")) return std::nullopt;
  return rational_from(v);
}

Measure weighted_from(const json& j) {
  if (j.contains("weights")) {
    const auto tree = tree_from_json(field(j, "tree", "measure"));
    const auto w = rationals(j.at("weights"), "weights");
    if (w.size() != tree->nodes.size())
      throw DomainError("weights: expected " + std::to_string(tree->nodes.size()) + " entries, got " +
                        std::to_string(w.size()));
    auto m = assign_weights(tree, [&](const KrsTree&, int v) { return w[v]; });
    m.label = "explicit";
    return m;
  }
  const json& rule = field(j, "rule", "measure");
  const std::string name = text_of(rule, "name", "rule");
  if (name == "example_mu" || name == "example_nu" || name == "example_sum") {
    const json& t = field(j, "tree", "measure");
    const int depth = static_cast<int>(integer_of(t, "depth", "tree"));
    auto [mu, nu] = cantor_example_pair(rational_from(field(rule, "p", "rule")), depth);
    if (name == "example_mu") return mu;
    if (name == "example_nu") return nu;
    return sum_measures(mu, nu);
  }
  if (name == "uniform") return uniform_measure(tree_from_json(field(j, "tree", "measure")));
  if (name == "upper" || name == "lower_upper") return synthesis_from_json(j).measure;
  throw DomainError("rule: unknown name '" + name + "'");
}

Measure discrete_from(const json& j) {
  const SetDescriptor seq = set_from_json(field(j, "sequence", "measure"));
  const MassProfile profile = profile_from(field(j, "profile", "measure"));
  const Rational zero = j.contains("zero_mass") ? rational_from(j.at("zero_mass")) : Rational(0);
  if (const auto* g = std::get_if<GeometricClosure>(&seq.variant())) {
    const auto* gm = std::get_if<GeometricMasses>(&profile);
    if (!gm || zero != 0) throw DomainError("geometric sequences take a geometric profile and no zero_mass");
    return discrete_geometric(g->q, gm->ratio, static_cast<unsigned>(value_or<long>(j, "index_cap", 200)));
  }
  if (const auto* d = std::get_if<DoubleExponential>(&seq.variant()))
    return double_exp_measure(d->alpha, d->M, profile, zero,
                              static_cast<unsigned>(value_or<long>(j, "index_cap", 10)));
  throw DomainError("discrete measures need a geometric or double_exp sequence");
}

std::string fmt_exc(const std::exception& e) { return std::string("malformed input: ") + e.what(); }

}  // namespace

Rational rational_from(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw DomainError("expected a rational as \"num/den\" string or integer, got " + j.dump());
}

json rational_to(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return to_string(c);
}

json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write '" + path + "'");
  out << text;
}

SetDescriptor set_from_json(const json& j) {
  try {
    const std::string type = text_of(j, "type", "set");
    if (type == "cantor_ifs") {
      if (j.contains("preset")) {
        if (j.at("preset") != "middle_third") throw DomainError("set: unknown preset " + j.at("preset").dump());
        return SetDescriptor::middle_third_cantor();
      }
      std::vector<AffineMap> maps;
      for (const auto& m : field(j, "maps", "set"))
        maps.push_back({rational_from(field(m, "ratio", "map")), rational_from(field(m, "offset", "map"))});
      return SetDescriptor::cantor_ifs(std::move(maps));
    }
    if (type == "geometric") return SetDescriptor::geometric(rational_from(field(j, "q", "set")));
    if (type == "double_exp") {
      const long M = integer_of(j, "M", "set");
      if (M < 2) throw DomainError("set: M must be an integer >= 2");
      return SetDescriptor::double_exponential(rational_from(field(j, "alpha", "set")), static_cast<unsigned>(M));
    }
    if (type == "points") return SetDescriptor::points(rationals(field(j, "points", "set"), "points"));
    if (type == "union") {
      std::vector<SetDescriptor> parts;
      for (const auto& p : field(j, "parts", "set")) parts.push_back(set_from_json(p));
      return SetDescriptor::finite_union(std::move(parts));
    }
    throw DomainError("set: unknown type '" + type + "'");
  } catch (const json::exception& e) {
    throw DomainError(fmt_exc(e));
  }
}

json set_to_json(const SetDescriptor& d) {
  json j;
  j["type"] = d.kind_name();
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, CantorIfs>) {
          json maps = json::array();
          for (const auto& m : v.maps) maps.push_back({{"ratio", rational_to(m.ratio)}, {"offset", rational_to(m.offset)}});
          j["maps"] = maps;
        } else if constexpr (std::is_same_v<T, GeometricClosure>) {
          j["q"] = rational_to(v.q);
        } else if constexpr (std::is_same_v<T, DoubleExponential>) {
          j["alpha"] = rational_to(v.alpha);
          j["M"] = v.M;
        } else if constexpr (std::is_same_v<T, FinitePoints>) {
          j["points"] = rationals_to(v.points);
        } else {
          json parts = json::array();
          for (const auto& p : v.parts) parts.push_back(set_to_json(p));
          j["parts"] = parts;
        }
      },
      d.variant());
  return j;
}

KrsParams params_from_json(const json& j, int default_depth) {
  KrsParams p;
  if (j.contains("s")) p.s = rational_from(j.at("s"));
  if (j.contains("c")) p.c = rational_from(j.at("c"));
  if (j.contains("C")) p.C = rational_from(j.at("C"));
  p.max_level = static_cast<int>(value_or<long>(j, "depth", default_depth));
  if (j.contains("resolution")) {
    const json& r = j.at("resolution");
    p.resolution.max_depth = static_cast<int>(value_or<long>(r, "max_depth", p.resolution.max_depth));
    p.resolution.max_index = static_cast<unsigned>(value_or<long>(r, "max_index", p.resolution.max_index));
  }
  if (j.contains("max_nodes")) p.max_nodes = j.at("max_nodes").get<std::size_t>();
  p.validate();
  return p;
}

json params_to_json(const KrsParams& p) {
  return {{"s", rational_to(p.s)},
          {"c", rational_to(p.c)},
          {"C", rational_to(p.C)},
          {"depth", p.max_level},
          {"resolution", {{"max_depth", p.resolution.max_depth}, {"max_index", p.resolution.max_index}}},
          {"max_nodes", p.max_nodes}};
}

std::shared_ptr<const KrsTree> tree_from_json(const json& j) {
  try {
    if (j.contains("coding")) {
      if (j.at("coding") != "cantor") throw DomainError("tree: only the \"cantor\" coding tree exists");
      return cantor_coding_tree(static_cast<int>(integer_of(j, "depth", "tree")));
    }
    const SetDescriptor set = set_from_json(field(j, "set", "tree"));
    return std::make_shared<const KrsTree>(build_tree(set, params_from_json(j, 8)));
  } catch (const json::exception& e) {
    throw DomainError(fmt_exc(e));
  }
}

SynthesisResult synthesis_from_json(const json& j) {
  try {
    const json& rule = field(j, "rule", "measure");
    const std::string name = text_of(rule, "name", "rule");
    const auto tree = tree_from_json(field(j, "tree", "measure"));
    const Rational eps = rational_from(field(rule, "epsilon", "rule"));
    if (name == "upper") {
      UpperOptions o;
      o.dim_upper = optional_double(rule, "dim_upper");
      o.ladder = static_cast<int>(value_or<long>(rule, "ladder", o.ladder));
      o.ladder_inf = static_cast<int>(value_or<long>(rule, "ladder_inf", o.ladder_inf));
      o.start_level = static_cast<int>(value_or<long>(rule, "start_level", o.start_level));
      o.force_zeta = value_or<bool>(rule, "force_zeta", false);
      if (rule.contains("D_sequence")) o.D_sequence = rule.at("D_sequence").get<std::vector<double>>();
      return synthesize_upper(tree, target_D(rule), eps, o);
    }
    if (name == "lower_upper") {
      LowerUpperOptions o;
      o.dim_lower = optional_double(rule, "dim_lower");
      o.dim_upper = optional_double(rule, "dim_upper");
      const auto D = target_D(rule);
      if (!D) throw DomainError("the lower/upper scheme needs a finite D");
      return synthesize_lower_upper(tree, rational_from(field(rule, "d", "rule")), *D, eps, o);
    }
    throw DomainError("rule '" + name + "' is not a synthesis rule");
  } catch (const json::exception& e) {
    throw DomainError(fmt_exc(e));
  }
}

Measure measure_from_json(const json& j) {
  try {
    const json& body = j.contains("measure") && j.at("measure").is_object() ? j.at("measure") : j;
    const std::string kind = text_of(body, "kind", "measure");
    if (kind == "weighted") return add_atoms(weighted_from(body), body);
    if (kind == "discrete") return add_atoms(discrete_from(body), body);
    if (kind == "mixture") return add_atoms(measure_from_json(field(body, "base", "measure")), body);
    throw DomainError("measure: unknown kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw DomainError(fmt_exc(e));
  }
}

json window_to_json(const ScaleWindow& w) {
  json j = {{"base", rational_to(w.base)},
            {"R_factor", rational_to(w.R_factor)},
            {"r_factor", rational_to(w.r_factor)},
            {"j_min", w.j_min},
            {"j_max", w.j_max},
            {"max_level", w.max_level},
            {"min_gap", w.min_gap},
            {"R_max", w.R_max ? rational_to(*w.R_max) : json(nullptr)},
            {"delta", rational_to(w.delta)},
            {"anchor_level", w.anchor_level},
            {"extra_anchors", rationals_to(w.extra_anchors)},
            {"resolution", {{"max_depth", w.resolution.max_depth}, {"max_index", w.resolution.max_index}}},
            {"windows", w.windows},
            {"slope_cap", w.slope_cap},
            {"trend_step", w.trend_step},
            {"bracket_tolerance", w.bracket_tolerance}};
  return j;
}

namespace {
json sample_to_json(const Sample& s) {
  return {{"x", rational_to(s.x)},
          {"R", rational_to(s.R)},
          {"r", rational_to(s.r)},
          {"quantity", number(s.quantity)},
          {"slope", number(s.slope)}};
}
}  // namespace

json estimate_to_json(const DimensionEstimate& e) {
  json series = json::array();
  for (const auto& p : e.slope_series)
    series.push_back({{"gap", p.gap}, {"log_ratio", number(p.log_ratio)}, {"extreme", number(p.extreme)},
                      {"slope", number(p.slope)}});
  json windows = json::array();
  for (double s : e.window_slopes) windows.push_back(number(s));
  return {{"kind", kind_name(e.kind)},
          {"value", number(e.value)},
          {"infinite", e.infinite},
          {"witness", sample_to_json(e.witness)},
          {"slope_series", series},
          {"window_slopes", windows},
          {"fit_constant", number(e.fit_constant)},
          {"samples", e.samples},
          {"skipped", e.skipped},
          {"window", window_to_json(e.window)}};
}

json doubling_to_json(const DoublingResult& d) {
  json windows = json::array();
  for (double s : d.window_log_constants) windows.push_back(number(s));
  return {{"constant", number(d.constant)},
          {"infinite", d.infinite},
          {"window_log_constants", windows},
          {"witness", sample_to_json(d.witness)}};
}

json perfectness_to_json(const PerfectnessResult& p) {
  return {{"constant", number(p.constant)}, {"samples", p.samples}, {"witness", sample_to_json(p.witness)}};
}

json verify_to_json(const VerifyReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"pass", c.pass},
                      {"checked", c.checked},
                      {"failures", c.failures},
                      {"counterexample", c.counterexample}});
  return {{"all_pass", r.all_pass()}, {"checks", checks}};
}

json manifest_to_json(const SynthesisManifest& m) {
  json paths = json::array();
  for (const auto& p : m.paths)
    paths.push_back({{"rung", p.rung},
                     {"role", p.role},
                     {"start_level", p.start_level},
                     {"length", p.length},
                     {"splits", p.splits},
                     {"weight", rational_to(p.weight)},
                     {"exponent", number(p.exponent)},
                     {"words", p.words}});
  json ineq = json::array();
  for (const auto& [name, ok] : m.inequalities) ineq.push_back({{"condition", name}, {"holds", ok}});
  json ladder = json::array();
  for (double x : m.D_ladder) ladder.push_back(number(x));
  return {{"strategy", m.strategy},
          {"s", rational_to(m.s)},
          {"epsilon", rational_to(m.epsilon)},
          {"a", m.a ? rational_to(*m.a) : json(nullptr)},
          {"p", m.p ? rational_to(*m.p) : json(nullptr)},
          {"D", m.D ? number(*m.D) : json("inf")},
          {"d", m.d ? number(*m.d) : json(nullptr)},
          {"dim_upper_estimate", number(m.dim_upper_estimate)},
          {"dim_lower_estimate", m.dim_lower_estimate ? number(*m.dim_lower_estimate) : json(nullptr)},
          {"zeta_hat", m.zeta_hat ? number(*m.zeta_hat) : json(nullptr)},
          {"D_ladder", ladder},
          {"min_weight", rational_to(m.min_weight)},
          {"max_weight", rational_to(m.max_weight)},
          {"inequalities", ineq},
          {"paths", paths}};
}

json calibration_to_json(const CalibrationResult& c) {
  json ev = json::array();
  for (const auto& e : c.evidence)
    ev.push_back({{"level", e.level},
                  {"min_children", e.min_children},
                  {"max_children", e.max_children},
                  {"lower_bound", number(e.lower_bound)},
                  {"upper_bound", number(e.upper_bound)},
                  {"ok", e.ok}});
  return {{"s_star", rational_to(c.s_star)}, {"k_star", c.k_star}, {"evidence", ev}};
}

json classification_to_json(const PropositionClassification& c) {
  json ratios = json::array();
  for (const auto& [lo, hi] : c.ratios) ratios.push_back({rational_to(lo), rational_to(hi)});
  return {{"case", case_name(c.which)},
          {"verdict", c.infinite ? "infinite" : "zero"},
          {"lambda", rational_to(c.lambda)},
          {"Lambda", rational_to(c.Lambda)},
          {"range", {c.options.first, c.options.last}},
          {"margin", c.options.margin},
          {"escape", c.options.escape},
          {"ratios", ratios}};
}

json zeta_to_json(const ZetaEstimate& z) {
  json per = json::array();
  for (const auto& e : z.per_n)
    per.push_back({{"n", e.n},
                   {"zeta", rational_to(e.zeta)},
                   {"witness_start", e.witness.start_word},
                   {"witness_splits", e.witness.split_count}});
  return {{"zeta_hat", rational_to(z.zeta_hat)}, {"depth_used", z.depth_used}, {"per_n", per}};
}

std::string ball_mass_csv(const Measure& m, const std::vector<std::pair<Rational, Rational>>& queries) {
  std::ostringstream out;
  out << "x,R,mass_lo,mass_hi\n";
  for (const auto& [x, R] : queries) {
    const MassBracket b = ball_mass(m, x, R);
    out << to_string(x) << ',' << to_string(R) << ',' << to_string(b.lo) << ',' << to_string(b.hi) << '\n';
  }
  return out.str();
}

}  // namespace assouad::io
