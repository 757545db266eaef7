#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace uclab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Runs criteria 1 to 11, printing one PASS/FAIL line each. Output carries
/// no timings so repeated runs compare byte for byte.
std::vector<CriterionResult> run_acceptance(std::ostream& out);

}  // namespace uclab
