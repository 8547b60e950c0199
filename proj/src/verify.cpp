#include "stomech/verify.hpp"

#include "stomech/errors.hpp"

namespace stomech::verify {

Suite suite_from_name(const std::string& name) {
  if (name == "noise") return Suite::Noise;
  if (name == "calculus") return Suite::Calculus;
  if (name == "pde") return Suite::Pde;
  if (name == "correspond") return Suite::Correspond;
  if (name == "geometry") return Suite::Geometry;
  if (name == "relativity") return Suite::Relativity;
  if (name == "all") return Suite::All;
  throw Error(ErrorCode::ConfigError, "unknown suite: " + name);
}

const char* to_string(Suite s) {
  switch (s) {
    case Suite::Noise: return "noise";
    case Suite::Calculus: return "calculus";
    case Suite::Pde: return "pde";
    case Suite::Correspond: return "correspond";
    case Suite::Geometry: return "geometry";
    case Suite::Relativity: return "relativity";
    case Suite::All: return "all";
  }
  return "?";
}

std::vector<CriterionResult> run_suite(Suite, double) { return {}; }

}  // namespace stomech::verify
