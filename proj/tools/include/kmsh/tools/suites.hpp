#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace kmsh::suites {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
  nlohmann::json data;
};

CriterionResult kms_correspondence(std::uint64_t seed);        // 1
CriterionResult transport_char_numbers(std::uint64_t seed);    // 2
CriterionResult deligne_vanishing(std::uint64_t seed);         // 3
CriterionResult cross_formula(std::uint64_t seed);             // 4
CriterionResult perturbation_scheme(std::uint64_t seed);       // 5
CriterionResult harmonic_fixed_point();                        // 6
CriterionResult uniform_bound();                               // 7
CriterionResult scalar_inequalities(std::uint64_t seed);       // 8
CriterionResult heat_flow_run();                               // 9
CriterionResult donaldson_functional(std::uint64_t seed);      // 10
CriterionResult boundary_formula();                            // 11

// All eleven, in order.
std::vector<CriterionResult> acceptance(std::uint64_t seed);
// The fast randomized property suites (1-5, 8, 10).
std::vector<CriterionResult> properties(std::uint64_t seed);

std::string line(const CriterionResult& r);
nlohmann::json to_json(const CriterionResult& r);

}  // namespace kmsh::suites
