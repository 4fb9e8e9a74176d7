#include <iostream>

#include "wulfflab/verify.hpp"

// One line per criterion; nonzero exit if any criterion fails.
int main(int argc, char** argv) {
  wulfflab::verify::Config cfg;
  if (argc > 1) cfg.seed = std::stoull(argv[1]);
  const auto rep = wulfflab::verify::run_suite("all", cfg, [](const wulfflab::verify::Criterion& c) {
    std::cout << wulfflab::verify::line(c) << std::endl;
  });
  std::size_t passed = 0;
  for (const auto& c : rep.criteria) passed += c.pass();
  std::cout << passed << "/" << rep.criteria.size() << " criteria passed" << std::endl;
  return rep.pass() ? 0 : 1;
}
