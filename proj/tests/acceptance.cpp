#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "solar/suites.hpp"

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria, one PASS/FAIL line each"};
  int only = 0;
  bool verbose = false;
  app.add_option("--criterion", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
  app.add_flag("-v,--verbose", verbose, "print every measured check");
  CLI11_PARSE(app, argc, argv);

  bool all = true;
  for (int id = 1; id <= 9; ++id) {
    if (only != 0 && id != only) continue;
    solar::CriterionResult r;
    try {
      r = solar::run_criterion(id);
    } catch (const std::exception& e) {
      std::cout << "FAIL criterion " << id << ": raised " << e.what() << '\n';
      all = false;
      continue;
    }
    if (verbose || !r.pass()) {
      solar::print_result(std::cout, r);
    } else {
      std::cout << "PASS criterion " << id << ": " << r.title << '\n';
    }
    all = all && r.pass();
  }
  return all ? 0 : 1;
}
