// JSON-string bridge; the Python package converts to and from dicts.
#include <pybind11/pybind11.h>
#include <pybind11/functional.h>
#include <pybind11/stl.h>

#include "assouad/acceptance.hpp"
#include "assouad/errors.hpp"
#include "assouad/estimators.hpp"
#include "assouad/io.hpp"
#include "assouad/krs.hpp"
#include "assouad/synthesizers.hpp"

namespace py = pybind11;
using namespace assouad;
using io::json;

namespace {

EstimateKind set_kind(const std::string& k) {
  if (k == "upper") return EstimateKind::UpperSet;
  if (k == "lower") return EstimateKind::LowerSet;
  if (k == "box") return EstimateKind::BoxCounting;
  throw DomainError("kind must be upper, lower or box");
}

std::string set_dimension_json(const std::string& set, const std::string& kind, int depth, unsigned threads) {
  const SetDescriptor d = io::set_from_json(json::parse(set));
  ScaleWindow w = default_window(d, depth);
  w.threads = threads;
  return io::estimate_to_json(set_dimension(d, set_kind(kind), w)).dump();
}

std::string measure_dimension_json(const std::string& measure, const std::string& kind, unsigned threads) {
  const Measure m = io::measure_from_json(json::parse(measure));
  ScaleWindow w = default_window(m);
  w.threads = threads;
  if (kind == "doubling") return io::doubling_to_json(doubling_check(m, w)).dump();
  if (kind != "upper" && kind != "lower") throw DomainError("kind must be upper, lower or doubling");
  const auto k = kind == "upper" ? EstimateKind::UpperMeasure : EstimateKind::LowerMeasure;
  return io::estimate_to_json(measure_dimension(m, k, w)).dump();
}

std::string tree_json(const std::string& spec) {
  const auto t = io::tree_from_json(json::parse(spec));
  json levels = json::array();
  for (int k = 0; k <= t->depth(); ++k) levels.push_back(t->level_size(k));
  return json{{"params", io::params_to_json(t->params)},
              {"nodes", t->nodes.size()},
              {"level_sizes", levels},
              {"verify", io::verify_to_json(verify_properties(*t))},
              {"zeta", io::zeta_to_json(zeta_estimate(*t))}}
      .dump();
}

std::string synthesize_json(const std::string& measure) {
  const auto r = io::synthesis_from_json(json::parse(measure));
  json weights = json::array();
  for (const auto& w : r.measure.weight) weights.push_back(io::rational_to(w));
  return json{{"manifest", io::manifest_to_json(r.manifest)}, {"weights", weights}}.dump();
}

std::string classify_json(const std::string& measure, unsigned last) {
  const Measure m = io::measure_from_json(json::parse(measure));
  const auto* dm = std::get_if<DiscreteMeasure>(&m);
  if (!dm) throw DomainError("classification needs a discrete measure");
  ClassifyOptions o;
  o.last = last;
  return io::classification_to_json(proposition_classify(*dm, o)).dump();
}

std::pair<std::string, std::string> ball_mass_str(const std::string& measure, const std::string& x,
                                                  const std::string& R) {
  const Measure m = io::measure_from_json(json::parse(measure));
  const auto b = ball_mass(m, parse_rational(x), parse_rational(R));
  return {to_string(b.lo), to_string(b.hi)};
}

std::string accept_json(const std::vector<int>& only, std::uint64_t seed, const std::string& fault,
                        const std::string& fixtures, bool record_runtimes) {
  acceptance::Config c;
  c.only = only;
  c.seed = seed;
  c.fault = fault;
  c.fixtures = fixtures;
  c.record_runtimes = record_runtimes;
  return acceptance::to_json(acceptance::run(c), c).dump();
}

// Malformed JSON text surfaces as a domain error like any other bad input.
template <class R, class... A>
std::function<R(A...)> guarded(R (*f)(A...)) {
  return [f](A... args) {
    try {
      return f(args...);
    } catch (const json::exception& e) {
      throw DomainError(std::string("malformed input: ") + e.what());
    }
  };
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Assouad-type dimension estimators, KRS trees and measure synthesis";

  static py::exception<Error> base(m, "AssouadError", PyExc_RuntimeError);
  static py::exception<DomainError> domain(m, "DomainError", base.ptr());
  static py::exception<PrecisionError> precision(m, "PrecisionError", base.ptr());
  static py::exception<CalibrationError> calibration(m, "CalibrationError", base.ptr());
  static py::exception<InconclusiveError> inconclusive(m, "InconclusiveError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const DomainError& e) {
      domain(e.what());
    } catch (const PrecisionError& e) {
      precision(e.what());
    } catch (const CalibrationError& e) {
      calibration(e.what());
    } catch (const InconclusiveError& e) {
      inconclusive(e.what());
    } catch (const Error& e) {
      base(e.what());
    }
  });

  m.def("set_dimension", guarded(set_dimension_json), py::arg("set"), py::arg("kind"), py::arg("depth"),
        py::arg("threads"));
  m.def("measure_dimension", guarded(measure_dimension_json), py::arg("measure"), py::arg("kind"),
        py::arg("threads"));
  m.def("build_tree", guarded(tree_json), py::arg("spec"));
  m.def("synthesize", guarded(synthesize_json), py::arg("measure"));
  m.def("classify", guarded(classify_json), py::arg("measure"), py::arg("last"));
  m.def("ball_mass", guarded(ball_mass_str), py::arg("measure"), py::arg("x"), py::arg("R"));
  m.def("accept", guarded(accept_json), py::arg("only"), py::arg("seed"), py::arg("fault"), py::arg("fixtures"),
        py::arg("record_runtimes"));
  m.def("default_fixtures_dir", &acceptance::default_fixtures_dir);
}
