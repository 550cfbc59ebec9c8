// Command-line front end: descriptors and measures in, JSON reports out.
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "assouad/acceptance.hpp"
#include "assouad/errors.hpp"
#include "assouad/estimators.hpp"
#include "assouad/io.hpp"
#include "assouad/krs.hpp"
#include "assouad/synthesizers.hpp"

using namespace assouad;
using io::json;

namespace {

struct Options {
  std::string set, measure, tree, out = "-";
  std::optional<int> depth;
  std::string s, epsilon, D, d, kind = "upper", fault;
  bool dump_csv = false, no_runtimes = false;
  std::optional<unsigned> threads;
  std::uint64_t seed = 0;
  std::vector<int> only;
  std::string fixtures;
};

unsigned thread_count(const Options& o) {
  if (o.threads) {
    if (*o.threads == 0) throw DomainError("--threads must be positive");
    return *o.threads;
  }
  if (const char* env = std::getenv("ASSOUAD_THREADS"); env && *env) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n <= 0) throw DomainError(std::string("ASSOUAD_THREADS must be a positive integer, got '") + env + "'");
    return static_cast<unsigned>(n);
  }
  return 1;
}

std::string csv_path(const Options& o) {
  if (o.out.empty() || o.out == "-") throw DomainError("--dump-csv needs --out PATH (the CSV goes to PATH.csv)");
  return o.out + ".csv";
}

void emit(const Options& o, json report) {
  io::write_text(o.out, report.dump(2) + "\n");
}

json base_config(const Options& o, const std::string& command) {
  json c = {{"command", command}, {"seed", o.seed}};
  if (!o.set.empty()) c["set_file"] = o.set;
  if (!o.measure.empty()) c["measure_file"] = o.measure;
  if (!o.tree.empty()) c["tree_file"] = o.tree;
  return c;
}

SetDescriptor require_set(const Options& o) {
  if (o.set.empty()) throw DomainError("--set FILE is required");
  return io::set_from_json(io::load_json_file(o.set));
}

Measure require_measure(const Options& o) {
  if (o.measure.empty()) throw DomainError("--measure FILE is required");
  return io::measure_from_json(io::load_json_file(o.measure));
}

// Tree spec from --tree, or from --set with --s / --depth.
json tree_spec(const Options& o, const std::string& default_s) {
  if (!o.tree.empty()) {
    json j = io::load_json_file(o.tree);
    if (o.depth) j["depth"] = *o.depth;
    if (!o.s.empty()) j["s"] = o.s;
    return j;
  }
  if (o.set.empty()) throw DomainError("--tree FILE or --set FILE is required");
  json j = {{"set", io::load_json_file(o.set)}, {"s", o.s.empty() ? default_s : o.s}, {"depth", o.depth.value_or(8)}};
  return j;
}

int set_dim(const Options& o) {
  const SetDescriptor set = require_set(o);
  ScaleWindow w = default_window(set, o.depth.value_or(12));
  w.threads = thread_count(o);
  EstimateKind kind;
  if (o.kind == "upper") kind = EstimateKind::UpperSet;
  else if (o.kind == "lower") kind = EstimateKind::LowerSet;
  else if (o.kind == "box") kind = EstimateKind::BoxCounting;
  else throw DomainError("--kind must be upper, lower or box for set-dim");
  const auto est = set_dimension(set, kind, w);
  json config = base_config(o, "set-dim");
  config["set"] = io::set_to_json(set);
  emit(o, {{"config", config}, {"estimate", io::estimate_to_json(est)}});
  if (o.dump_csv) {
    std::ostringstream csv;
    csv << "gap,log_ratio,extreme,slope\n";
    for (const auto& p : est.slope_series) csv << p.gap << ',' << p.log_ratio << ',' << p.extreme << ',' << p.slope << '\n';
    io::write_text(csv_path(o), csv.str());
  }
  return 0;
}

int build_or_verify(const Options& o, bool verify) {
  const json spec = tree_spec(o, "1/9");
  const auto tree = io::tree_from_json(spec);
  json levels = json::array();
  for (int k = 0; k <= tree->depth(); ++k) levels.push_back(tree->level_size(k));
  json config = base_config(o, verify ? "verify-tree" : "build-tree");
  config["tree"] = spec;
  config["params"] = io::params_to_json(tree->params);
  json report = {{"config", config}, {"nodes", tree->nodes.size()}, {"level_sizes", levels}};
  const auto v = verify_properties(*tree);
  report["verify"] = io::verify_to_json(v);
  if (!verify) report["zeta"] = io::zeta_to_json(zeta_estimate(*tree));
  emit(o, report);
  if (o.dump_csv) io::write_text(csv_path(o), "level\tword\tleft\tright\tpoint\tclass\n" + dump_tree(*tree));
  if (verify && !v.all_pass()) {
    for (const auto& c : v.checks)
      if (!c.pass) throw StructuralError("tree verification failed: " + c.name + ": " + c.counterexample);
  }
  return 0;
}

std::optional<Rational> parse_D(const std::string& text) {
  if (text == "inf" || text == "infinity") return std::nullopt;
  return parse_rational(text);
}

int synth(const Options& o) {
  if (o.D.empty()) throw DomainError("--D VAL|inf is required");
  const std::string eps_text = o.epsilon.empty() ? "1/10" : o.epsilon;
  const Rational eps = parse_rational(eps_text);
  json config = base_config(o, "synth");
  json spec;
  if (o.tree.empty() && o.s.empty() && !o.set.empty()) {
    // Calibrate s from the set's own dimension estimates.
    const SetDescriptor set = require_set(o);
    ScaleWindow w = default_window(set, 12);
    w.threads = thread_count(o);
    const double lo = set_dimension(set, EstimateKind::LowerSet, w).value;
    const double up = set_dimension(set, EstimateKind::UpperSet, w).value;
    const auto cal = calibrate_s(set, eps, lo, up);
    config["calibration"] = io::calibration_to_json(cal);
    Options with_s = o;
    with_s.s = to_string(cal.s_star);
    spec = tree_spec(with_s, "1/9");
  } else {
    spec = tree_spec(o, "1/9");
  }
  json rule = {{"name", o.d.empty() ? "upper" : "lower_upper"}, {"D", o.D}, {"epsilon", eps_text}};
  if (!o.d.empty()) rule["d"] = o.d;
  const json measure = {{"kind", "weighted"}, {"tree", spec}, {"rule", rule}};
  parse_D(o.D);  // reject malformed values before the tree is built
  const SynthesisResult r = io::synthesis_from_json(measure);
  config["tree"] = spec;
  config["params"] = io::params_to_json(r.measure.tree->params);
  emit(o, {{"config", config}, {"measure", measure}, {"manifest", io::manifest_to_json(r.manifest)}});
  if (o.dump_csv) {
    const KrsTree& t = *r.measure.tree;
    std::ostringstream csv;
    csv << "node,level,word,weight,mass\n";
    for (std::size_t v = 0; v < t.nodes.size(); ++v)
      csv << v << ',' << t.nodes[v].level << ',' << t.word(static_cast<int>(v)) << ',' << to_string(r.measure.weight[v])
          << ',' << to_string(r.measure.mass[v]) << '\n';
    io::write_text(csv_path(o), csv.str());
  }
  return 0;
}

int measure_dim(const Options& o) {
  const Measure m = require_measure(o);
  ScaleWindow w = default_window(m);
  w.threads = thread_count(o);
  json config = base_config(o, "measure-dim");
  config["label"] = measure_label(m);
  json report = {{"config", config}};
  EstimateKind kind = EstimateKind::UpperMeasure;
  if (o.kind == "upper" || o.kind == "all") report["upper"] = io::estimate_to_json(measure_dimension(m, kind, w));
  if (o.kind == "lower" || o.kind == "all") {
    kind = EstimateKind::LowerMeasure;
    report["lower"] = io::estimate_to_json(measure_dimension(m, kind, w));
  }
  if (o.kind == "doubling" || o.kind == "all") report["doubling"] = io::doubling_to_json(doubling_check(m, w));
  if (report.size() == 1) throw DomainError("--kind must be upper, lower, doubling or all for measure-dim");
  emit(o, report);
  if (o.dump_csv) io::write_text(csv_path(o), sample_csv(m, kind, w));
  return 0;
}

int classify(const Options& o) {
  const Measure m = require_measure(o);
  const auto* dm = std::get_if<DiscreteMeasure>(&m);
  if (!dm) throw DomainError("classify needs a discrete measure on a double-exponential sequence");
  ClassifyOptions opts;
  if (o.depth) {
    if (*o.depth < 1) throw DomainError("--depth must be positive");
    opts.last = static_cast<unsigned>(*o.depth);  // audited index range [1, depth]
  }
  const auto c = proposition_classify(*dm, opts);
  emit(o, {{"config", base_config(o, "classify")}, {"classification", io::classification_to_json(c)}});
  return 0;
}

int accept(const Options& o) {
  acceptance::Config cfg;
  cfg.threads = thread_count(o);
  cfg.seed = o.seed;
  cfg.only = o.only;
  cfg.fault = o.fault;
  cfg.fixtures = o.fixtures;
  cfg.record_runtimes = !o.no_runtimes;
  if (o.depth) cfg.krs_depth = *o.depth;
  const auto report = acceptance::run(cfg);
  std::cout << acceptance::to_lines(report) << std::flush;
  if (o.out != "-") io::write_text(o.out, acceptance::to_json(report, cfg).dump(2) + "\n");
  return report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assouad-type dimensions of sets and measures on the line"};
  app.require_subcommand(1, 1);
  Options o;

  const auto common = [&](CLI::App* c) {
    c->add_option("--out", o.out, "Report path ('-' for stdout)");
    c->add_option("--threads", o.threads, "Worker threads (fallback: ASSOUAD_THREADS)");
    c->add_option("--seed", o.seed, "Seed for randomized sampling");
    c->add_option("--depth", o.depth, "Tree or window depth");
  };
  const auto tree_inputs = [&](CLI::App* c) {
    c->add_option("--set", o.set, "Set descriptor JSON");
    c->add_option("--tree", o.tree, "Tree spec JSON");
    c->add_option("--s", o.s, "Scale ratio NUM/DEN");
    c->add_flag("--dump-csv", o.dump_csv, "Also write PATH.csv next to --out");
  };

  auto* set_dim_cmd = app.add_subcommand("set-dim", "Estimate a set dimension");
  common(set_dim_cmd);
  set_dim_cmd->add_option("--set", o.set, "Set descriptor JSON");
  set_dim_cmd->add_option("--kind", o.kind, "upper | lower | box");
  set_dim_cmd->add_flag("--dump-csv", o.dump_csv, "Also write the slope series to PATH.csv");

  auto* build_cmd = app.add_subcommand("build-tree", "Build a KRS tree and report its structure");
  common(build_cmd);
  tree_inputs(build_cmd);

  auto* verify_cmd = app.add_subcommand("verify-tree", "Verify the KRS properties of a tree");
  common(verify_cmd);
  tree_inputs(verify_cmd);

  auto* synth_cmd = app.add_subcommand("synth", "Synthesize a measure with prescribed dimensions");
  common(synth_cmd);
  tree_inputs(synth_cmd);
  synth_cmd->add_option("--epsilon", o.epsilon, "Slack NUM/DEN (default 1/10)");
  synth_cmd->add_option("--D", o.D, "Target upper dimension, or inf");
  synth_cmd->add_option("--d", o.d, "Target lower dimension (joint scheme)");

  auto* mdim_cmd = app.add_subcommand("measure-dim", "Estimate measure dimensions");
  common(mdim_cmd);
  mdim_cmd->add_option("--measure", o.measure, "Measure JSON (or a synth report)");
  mdim_cmd->add_option("--kind", o.kind, "upper | lower | doubling | all");
  mdim_cmd->add_flag("--dump-csv", o.dump_csv, "Also write per-sample rows to PATH.csv");

  auto* classify_cmd = app.add_subcommand("classify", "Classify a measure on a double-exponential sequence");
  common(classify_cmd);
  classify_cmd->add_option("--measure", o.measure, "Discrete measure JSON");

  auto* accept_cmd = app.add_subcommand("accept", "Run the acceptance suite");
  common(accept_cmd);
  accept_cmd->add_option("--only", o.only, "Criterion ids to run");
  accept_cmd->add_option("--fault", o.fault, "Inject a defect: weight-sum");
  accept_cmd->add_option("--fixtures", o.fixtures, "Fixture directory");
  accept_cmd->add_flag("--no-runtimes", o.no_runtimes, "Omit runtimes from the JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (o.dump_csv) csv_path(o);
    if (*set_dim_cmd) return set_dim(o);
    if (*build_cmd) return build_or_verify(o, false);
    if (*verify_cmd) return build_or_verify(o, true);
    if (*synth_cmd) return synth(o);
    if (*mdim_cmd) return measure_dim(o);
    if (*classify_cmd) return classify(o);
    if (*accept_cmd) return accept(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
