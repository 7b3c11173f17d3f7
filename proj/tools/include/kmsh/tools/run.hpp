#pragma once

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kmsh::cli {

enum Status { ok = 0, validation_failure = 1, identity_failure = 2, numerical_abort = 3 };

struct JobSpec {
  std::string command;  // charnum, perturb, corr, flow, scan, verify
  std::vector<std::string> inputs;
  // Base path: <output>.json, <output>.txt and, for flows and scans, <output>.csv.
  std::string output;
  std::optional<std::pair<int, int>> grid;
  std::vector<double> eps;
  std::optional<int> m;
  std::optional<double> dt;
  std::optional<int> steps;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  std::string format = "text";
  // scan only: inequality, uniform, sweep, scalars
  std::string kind = "inequality";
  long samples = 100000;
};

struct Report {
  int status = ok;
  nlohmann::json data;
  std::string text;
  std::string csv;
};

Report run(const JobSpec& spec);

// Runs, writes the report files and prints the requested format to `out`; returns the exit status.
int execute(const JobSpec& spec, std::ostream& out, std::ostream& err);

// "64x128" -> (64, 128); "0.5,0.1" -> {0.5, 0.1}. Throw std::invalid_argument.
std::pair<int, int> parse_grid(const std::string& text);
std::vector<double> parse_list(const std::string& text);

}  // namespace kmsh::cli
