#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace solar {

/// One measured quantity compared against a bound.
struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  std::string op;  // "<=", ">=", "==" (value == bound within tolerance), "info"
  bool pass = false;
  bool timing = false;  // wall-clock values are left out of result files
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;

  bool pass() const;
};

/// Runs acceptance criterion 1..9. Throws std::out_of_range for other ids.
CriterionResult run_criterion(int id);

/// Criteria grouped under a verify suite name; throws std::invalid_argument
/// for unknown names.
std::vector<int> suite_criteria(const std::string& suite);

std::vector<std::string> suite_names();

/// "PASS criterion 3: title" followed by one indented line per check.
void print_result(std::ostream& out, const CriterionResult& r);

/// JUnit-style XML. Timing values are omitted so that reruns are byte-identical.
void write_junit(std::ostream& out, const std::string& suite,
                 const std::vector<CriterionResult>& results);

}  // namespace solar
