#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "assouad/io.hpp"

namespace assouad::acceptance {

struct Config {
  std::string fixtures;   // directory of bundled fixtures; empty: built-in default or $ASSOUAD_FIXTURES
  unsigned threads = 1;
  std::uint64_t seed = 0;
  int krs_depth = 8;      // depth of the KRS Cantor tree used by the synthesis criteria
  std::vector<int> only;  // criterion ids to run; empty: all
  std::string fault;      // "" or "weight-sum": corrupts one randomized weight rule
  bool record_runtimes = true;  // off: reports are byte-identical run to run
};

struct Criterion {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string summary;  // one-line measured vs tolerance
  io::json measured;    // values, tolerances and sub-check verdicts
  double seconds = 0;
  double budget = 0;    // runtime budget in seconds
};

struct Report {
  std::vector<Criterion> criteria;  // sorted by id
  bool all_pass() const;
};

std::string default_fixtures_dir();
Report run(const Config& config);
io::json to_json(const Report& r, const Config& config);
/// One `PASS|FAIL [id] name: summary (t s / budget s)` line per criterion.
std::string to_lines(const Report& r);

}  // namespace assouad::acceptance
