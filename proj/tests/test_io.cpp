#include "assouad/errors.hpp"
#include "assouad/io.hpp"
#include "doctest.h"

using namespace assouad;
using io::json;

TEST_CASE("rationals round-trip through json") {
  CHECK(io::rational_from(json("3/6")) == Rational(1, 2));
  CHECK(io::rational_from(json(7)) == Rational(7));
  CHECK(io::rational_from(json("0.25")) == Rational(1, 4));
  CHECK(io::rational_to(Rational(4)) == json("4/1"));
  CHECK_THROWS_AS(io::rational_from(json(0.5)), DomainError);
  CHECK(io::number(1.0 / 0.0) == json("inf"));
}

TEST_CASE("set descriptors round-trip") {
  const char* docs[] = {
      R"({"type":"cantor_ifs","preset":"middle_third"})",
      R"({"type":"geometric","q":"1/2"})",
      R"({"type":"double_exp","alpha":"1/2","M":2})",
      R"({"type":"points","points":["0","1/2"]})",
      R"({"type":"union","parts":[{"type":"points","points":["3/4"]},{"type":"points","points":["1/4"]}]})",
  };
  for (const char* d : docs) {
    const SetDescriptor s = io::set_from_json(json::parse(d));
    const json once = io::set_to_json(s);
    CHECK(io::set_to_json(io::set_from_json(once)).dump() == once.dump());
  }
}

TEST_CASE("malformed inputs are domain errors") {
  CHECK_THROWS_AS(io::set_from_json(json::parse(R"({"type":"nope"})")), DomainError);
  CHECK_THROWS_AS(io::set_from_json(json::parse(R"({"q":"1/2"})")), DomainError);
  CHECK_THROWS_AS(io::set_from_json(json::parse(R"({"type":"double_exp","alpha":"1/2","M":1})")), DomainError);
  CHECK_THROWS_AS(io::measure_from_json(json::parse(R"({"kind":"weighted","rule":{"name":"uniform"}})")),
                  DomainError);
  CHECK_THROWS_AS(io::load_json_file("/nonexistent/x.json"), DomainError);
}

TEST_CASE("measures build from json and their csv masses are exact") {
  const Measure mu = io::measure_from_json(json::parse(
      R"({"kind":"weighted","tree":{"coding":"cantor","depth":6},"rule":{"name":"uniform"}})"));
  const std::string csv = io::ball_mass_csv(mu, {{Rational(0), Rational(1, 2)}});
  CHECK(csv.rfind("x,R,mass_lo,mass_hi\n", 0) == 0);
  CHECK(csv.find("0/1,1/2,1/2,1/2") != std::string::npos);

  const Measure g = io::measure_from_json(json::parse(
      R"({"kind":"discrete","sequence":{"type":"geometric","q":"1/2"},"profile":{"type":"geometric","ratio":"1/4"},
          "atoms":[{"point":"1/4","mass":"1"}]})"));
  CHECK(measure_atoms(g).back().point == Rational(1, 4));
}
