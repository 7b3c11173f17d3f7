#pragma once

#include "kmsh/charnum.hpp"
#include "kmsh/corrfun.hpp"
#include "kmsh/flow.hpp"
#include "kmsh/pardata.hpp"
#include "kmsh/perturb.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace kmsh::io {

using json = nlohmann::json;

// Carries the JSON path of the offending field.
struct FormatError : std::runtime_error {
  std::string path;
  FormatError(std::string p, const std::string& msg) : std::runtime_error(p + ": " + msg), path(std::move(p)) {}
};

// "p/q" strings, integers or decimals (decimals are read from their text, exactly).
Rational rational_from(const json& j, const std::string& path);
json to_json(const Rational& q);

// {"re": .., "im": ..} or a bare real.
QComplex qcomplex_from(const json& j, const std::string& path);
json to_json(const QComplex& z);

// {"exponent": {"re", "im"}} exactly, or a numeric {"re", "im"} value of omega.
Omega omega_from(const json& j, const std::string& path);
json to_json(const Omega& w);

DivisorGeometry geometry_from(const json& j, const std::string& path = "geometry");
json to_json(const DivisorGeometry& g);

ParabolicFlatData bundle_from(const json& j);
json to_json(const ParabolicFlatData& d);

FilteredLocalSystemData localsys_from(const json& j);
json to_json(const FilteredLocalSystemData& d);

// Optional "nilpotent": {"D1": [matrix, ...]} alongside a bundle; matrices are rows of rationals or complexes.
NilpotentBlocks blocks_from(const json& j);

std::vector<MonodromyDatum> monodromy_from(const json& j);

json to_json(const CharReport& r);
json to_json(const PerturbPlan& p);
json to_json(const RefinedSpectrum& r);

// Fields of FlowConfig; grid as {"r_min", "r_max", "n_rad", "n_ang"}.
FlowConfig flow_config_from(const json& j);

json read_file(const std::string& path);

}  // namespace kmsh::io
