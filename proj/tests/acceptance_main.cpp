// Runs criteria 1-10 and prints one PASS/FAIL line per criterion.
#include <cstdlib>
#include <iostream>

#include "assouad/acceptance.hpp"

int main(int argc, char** argv) {
  assouad::acceptance::Config cfg;
  if (const char* t = std::getenv("ASSOUAD_THREADS")) cfg.threads = static_cast<unsigned>(std::atoi(t));
  for (int i = 1; i < argc; ++i) cfg.only.push_back(std::atoi(argv[i]));
  const auto report = assouad::acceptance::run(cfg);
  std::cout << assouad::acceptance::to_lines(report) << std::flush;
  return report.all_pass() ? 0 : 1;
}
