#pragma once

#include <string>
#include <vector>

namespace stomech::verify {

enum class Suite { Noise, Calculus, Pde, Correspond, Geometry, Relativity, All };

Suite suite_from_name(const std::string& name);  // throws ConfigError
const char* to_string(Suite s);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs the acceptance criteria of the given suite at pinned seeds and sizes.
// tol_scale scales the statistical tolerances only (distribution distances,
// standard-error bands); exact algebraic tolerances are never scaled.
std::vector<CriterionResult> run_suite(Suite suite, double tol_scale = 1.0);

}  // namespace stomech::verify
