#include "assouad/acceptance.hpp"
#include "assouad/errors.hpp"
#include "doctest.h"

using namespace assouad;

TEST_CASE("acceptance reports are idempotent without runtimes") {
  acceptance::Config cfg;
  cfg.only = {9, 4};
  cfg.record_runtimes = false;
  const auto a = acceptance::to_json(acceptance::run(cfg), cfg).dump();
  const auto b = acceptance::to_json(acceptance::run(cfg), cfg).dump();
  CHECK(a == b);
  const auto r = acceptance::run(cfg);
  REQUIRE(r.criteria.size() == 2);
  CHECK(r.criteria[0].id == 4);  // sorted by id
  CHECK(r.all_pass());
}

TEST_CASE("an injected weight-sum defect fails only the property suite") {
  acceptance::Config cfg;
  cfg.only = {9, 10};
  cfg.fault = "weight-sum";
  const auto r = acceptance::run(cfg);
  REQUIRE(r.criteria.size() == 2);
  CHECK(r.criteria[0].pass);
  CHECK_FALSE(r.criteria[1].pass);
  const auto& sums = r.criteria[1].measured.at("sibling_sums");
  CHECK(sums.at("failures") == 1);
  CHECK(sums.at("first_failure").get<std::string>().find("sum") != std::string::npos);
  CHECK(r.criteria[1].measured.at("covering").at("pass") == true);
  CHECK(r.criteria[1].measured.at("determinism").at("pass") == true);

  cfg.fault = "bogus";
  CHECK_THROWS_AS(acceptance::run(cfg), DomainError);
}
