#include "kmsh/tools/json_io.hpp"

#include <fstream>

namespace kmsh::io {

namespace {

const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(path + "." + key, "missing field");
  return j.at(key);
}

int int_from(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw FormatError(path, "expected an integer");
  return j.get<int>();
}

std::string string_from(const json& j, const std::string& path) {
  if (!j.is_string()) throw FormatError(path, "expected a string");
  return j.get<std::string>();
}

std::string idx(const std::string& path, std::size_t n) { return path + "[" + std::to_string(n) + "]"; }

KmsPair kms_pair_from(const json& j, const std::string& path) {
  return {rational_from(field(j, "a", path), path + ".a"), qcomplex_from(field(j, "alpha", path), path + ".alpha")};
}

json pair_json(const KmsPair& u) { return {{"a", to_json(u.a)}, {"alpha", to_json(u.alpha)}}; }

LsPair ls_pair_from(const json& j, const std::string& path) {
  return {rational_from(field(j, "b", path), path + ".b"), omega_from(field(j, "omega", path), path + ".omega")};
}

json pair_json(const LsPair& u) { return {{"b", to_json(u.b)}, {"omega", to_json(u.omega)}}; }

}  // namespace

Rational rational_from(const json& j, const std::string& path) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer() || j.is_number_unsigned()) return parse_rational(j.dump());
    if (j.is_number_float()) return parse_rational(j.dump());
  } catch (const std::exception& e) {
    throw FormatError(path, e.what());
  }
  throw FormatError(path, "expected a rational");
}

json to_json(const Rational& q) { return to_string(q); }

QComplex qcomplex_from(const json& j, const std::string& path) {
  if (j.is_object()) {
    Rational re = j.contains("re") ? rational_from(j.at("re"), path + ".re") : Rational(0);
    Rational im = j.contains("im") ? rational_from(j.at("im"), path + ".im") : Rational(0);
    return {re, im};
  }
  return QComplex(rational_from(j, path));
}

json to_json(const QComplex& z) { return {{"re", to_json(z.re)}, {"im", to_json(z.im)}}; }

Omega omega_from(const json& j, const std::string& path) {
  if (j.is_object() && j.contains("exponent")) return Omega::from_exponent(qcomplex_from(j.at("exponent"), path + ".exponent"));
  double re = 0, im = 0;
  if (j.is_object()) {
    if (j.contains("re")) re = j.at("re").get<double>();
    if (j.contains("im")) im = j.at("im").get<double>();
  } else if (j.is_number()) {
    re = j.get<double>();
  } else {
    throw FormatError(path, "expected omega as {\"exponent\": ..} or a numeric value");
  }
  if (re == 0 && im == 0) throw FormatError(path, "omega must be nonzero");
  return omega_from_value({re, im});
}

json to_json(const Omega& w) {
  auto v = w.value();
  return {{"exponent", to_json(w.exponent())}, {"value", {{"re", v.real()}, {"im", v.imag()}}}};
}

DivisorGeometry geometry_from(const json& j, const std::string& path) {
  DivisorGeometry g;
  const json& comps = field(j, "components", path);
  if (!comps.is_array()) throw FormatError(path + ".components", "expected an array");
  for (std::size_t n = 0; n < comps.size(); ++n) g.components.push_back(string_from(comps[n], idx(path + ".components", n)));
  for (auto& [k, v] : field(j, "selfint", path).items()) g.selfint[k] = rational_from(v, path + ".selfint." + k);
  for (auto& [k, v] : field(j, "degL", path).items()) g.degL[k] = rational_from(v, path + ".degL." + k);
  if (j.contains("points")) {
    const json& pts = j.at("points");
    for (std::size_t n = 0; n < pts.size(); ++n) {
      std::string p = idx(path + ".points", n);
      PointRecord r;
      r.i = string_from(field(pts[n], "i", p), p + ".i");
      r.j = string_from(field(pts[n], "j", p), p + ".j");
      r.label = string_from(field(pts[n], "label", p), p + ".label");
      r.mult = pts[n].contains("mult") ? int_from(pts[n].at("mult"), p + ".mult") : 1;
      g.points.push_back(r);
    }
  }
  return g;
}

json to_json(const DivisorGeometry& g) {
  json j;
  j["components"] = g.components;
  j["selfint"] = json::object();
  for (const auto& [k, v] : g.selfint) j["selfint"][k] = to_json(v);
  j["degL"] = json::object();
  for (const auto& [k, v] : g.degL) j["degL"][k] = to_json(v);
  j["points"] = json::array();
  for (const auto& p : g.points) j["points"].push_back({{"i", p.i}, {"j", p.j}, {"label", p.label}, {"mult", p.mult}});
  return j;
}

ParabolicFlatData bundle_from(const json& j) {
  ParabolicFlatData d;
  d.lambda = j.contains("lambda") ? qcomplex_from(j.at("lambda"), "lambda") : QComplex(1);
  d.rank = int_from(field(j, "rank", ""), "rank");
  d.geometry = geometry_from(field(j, "geometry", ""));
  for (auto& [c, arr] : field(j, "divisor_spectra", "").items()) {
    std::string base = "divisor_spectra." + c;
    for (std::size_t n = 0; n < arr.size(); ++n) {
      std::string p = idx(base, n);
      KmsPair u = kms_pair_from(arr[n], p);
      int r = arr[n].contains("r") ? int_from(arr[n].at("r"), p + ".r") : 1;
      d.divisor_spectra[c].push_back({u.a, u.alpha, r});
    }
  }
  if (j.contains("point_spectra"))
    for (auto& [c, arr] : j.at("point_spectra").items()) {
      std::string base = "point_spectra." + c;
      auto& dst = d.point_spectra[c];
      for (std::size_t n = 0; n < arr.size(); ++n) {
        std::string p = idx(base, n);
        int r = arr[n].contains("r") ? int_from(arr[n].at("r"), p + ".r") : 1;
        dst.push_back({kms_pair_from(field(arr[n], "u_i", p), p + ".u_i"), kms_pair_from(field(arr[n], "u_j", p), p + ".u_j"), r});
      }
    }
  if (j.contains("truncation"))
    for (auto& [c, v] : j.at("truncation").items()) d.truncation[c] = rational_from(v, "truncation." + c);
  return d;
}

json to_json(const ParabolicFlatData& d) {
  json j;
  j["lambda"] = to_json(d.lambda);
  j["rank"] = d.rank;
  j["geometry"] = to_json(d.geometry);
  j["divisor_spectra"] = json::object();
  for (const auto& [c, spec] : d.divisor_spectra) {
    json arr = json::array();
    for (const auto& p : spec) arr.push_back({{"a", to_json(p.a)}, {"alpha", to_json(p.alpha)}, {"r", p.r}});
    j["divisor_spectra"][c] = arr;
  }
  j["point_spectra"] = json::object();
  for (const auto& [c, entries] : d.point_spectra) {
    json arr = json::array();
    for (const auto& e : entries) arr.push_back({{"u_i", pair_json(e.u_i)}, {"u_j", pair_json(e.u_j)}, {"r", e.r}});
    j["point_spectra"][c] = arr;
  }
  j["truncation"] = json::object();
  for (const auto& [c, v] : d.truncation) j["truncation"][c] = to_json(v);
  return j;
}

FilteredLocalSystemData localsys_from(const json& j) {
  FilteredLocalSystemData d;
  d.rank = int_from(field(j, "rank", ""), "rank");
  d.geometry = geometry_from(field(j, "geometry", ""));
  for (auto& [c, arr] : field(j, "divisor_spectra", "").items()) {
    std::string base = "divisor_spectra." + c;
    for (std::size_t n = 0; n < arr.size(); ++n) {
      std::string p = idx(base, n);
      LsPair u = ls_pair_from(arr[n], p);
      int r = arr[n].contains("r") ? int_from(arr[n].at("r"), p + ".r") : 1;
      d.divisor_spectra[c].push_back({u.b, u.omega, r});
    }
  }
  if (j.contains("point_spectra"))
    for (auto& [c, arr] : j.at("point_spectra").items()) {
      std::string base = "point_spectra." + c;
      auto& dst = d.point_spectra[c];
      for (std::size_t n = 0; n < arr.size(); ++n) {
        std::string p = idx(base, n);
        int r = arr[n].contains("r") ? int_from(arr[n].at("r"), p + ".r") : 1;
        dst.push_back({ls_pair_from(field(arr[n], "u_i", p), p + ".u_i"), ls_pair_from(field(arr[n], "u_j", p), p + ".u_j"), r});
      }
    }
  return d;
}

json to_json(const FilteredLocalSystemData& d) {
  json j;
  j["rank"] = d.rank;
  j["geometry"] = to_json(d.geometry);
  j["divisor_spectra"] = json::object();
  for (const auto& [c, spec] : d.divisor_spectra) {
    json arr = json::array();
    for (const auto& p : spec) arr.push_back({{"b", to_json(p.b)}, {"omega", to_json(p.omega)}, {"r", p.r}});
    j["divisor_spectra"][c] = arr;
  }
  j["point_spectra"] = json::object();
  for (const auto& [c, entries] : d.point_spectra) {
    json arr = json::array();
    for (const auto& e : entries) arr.push_back({{"u_i", pair_json(e.u_i)}, {"u_j", pair_json(e.u_j)}, {"r", e.r}});
    j["point_spectra"][c] = arr;
  }
  return j;
}

NilpotentBlocks blocks_from(const json& j) {
  NilpotentBlocks out;
  if (!j.contains("nilpotent")) return out;
  for (auto& [c, arr] : j.at("nilpotent").items()) {
    for (std::size_t n = 0; n < arr.size(); ++n) {
      std::string p = idx("nilpotent." + c, n);
      const json& rows = arr[n];
      int sz = static_cast<int>(rows.size());
      QMatrix m(sz, sz);
      for (int a = 0; a < sz; ++a) {
        if (static_cast<int>(rows[a].size()) != sz) throw FormatError(idx(p, a), "matrix must be square");
        for (int b = 0; b < sz; ++b) m(a, b) = qcomplex_from(rows[a][b], idx(idx(p, a), b));
      }
      out[c].push_back(m);
    }
  }
  return out;
}

std::vector<MonodromyDatum> monodromy_from(const json& j) {
  std::vector<MonodromyDatum> out;
  const json& arr = field(j, "monodromy", "");
  for (std::size_t n = 0; n < arr.size(); ++n) {
    std::string p = idx("monodromy", n);
    const json& M = field(arr[n], "M", p);
    const int sz = static_cast<int>(M.size());
    MonodromyDatum d;
    d.M = CMat(sz, sz);
    for (int a = 0; a < sz; ++a) {
      if (static_cast<int>(M[a].size()) != sz) throw FormatError(idx(p + ".M", a), "matrix must be square");
      for (int b = 0; b < sz; ++b) d.M(a, b) = qcomplex_from(M[a][b], idx(idx(p + ".M", a), b)).to_complex();
    }
    const json& b = field(arr[n], "b", p);
    for (std::size_t k = 0; k < b.size(); ++k) d.b.push_back(rational_from(b[k], idx(p + ".b", k)));
    out.push_back(std::move(d));
  }
  return out;
}

json to_json(const CharReport& r) {
  json j;
  j["c1_coeffs"] = json::object();
  for (const auto& [k, v] : r.c1_coeffs) j["c1_coeffs"][k] = to_json(v);
  j["par_deg"] = to_json(r.par_deg);
  j["par_ch2"] = to_json(r.par_ch2);
  j["c1_squared"] = to_json(r.c1_squared);
  j["bg_gap"] = to_json(r.bg_gap);
  j["im_residual"] = to_json(r.im_residual);
  return j;
}

json to_json(const PerturbPlan& p) {
  json j;
  j["m"] = p.m;
  j["gamma"] = to_json(p.gamma);
  j["L"] = to_json(p.L);
  j["a_prime"] = json::array();
  for (const auto& [a, ap] : p.a_prime) j["a_prime"].push_back({{"a", to_json(a)}, {"a_prime", to_json(ap)}});
  j["new_weights"] = json::array();
  for (const auto& [key, phi] : p.new_weights)
    j["new_weights"].push_back({{"a", to_json(key.first)}, {"k", key.second}, {"phi", to_json(phi)}});
  return j;
}

json to_json(const RefinedSpectrum& r) {
  json arr = json::array();
  for (const auto& e : r) {
    json by = json::array();
    for (const auto& [alpha, rk] : e.by_alpha) by.push_back({{"alpha", to_json(alpha)}, {"r", rk}});
    arr.push_back({{"a", to_json(e.a)}, {"k", e.k}, {"r", e.r}, {"by_alpha", by}});
  }
  return arr;
}

FlowConfig flow_config_from(const json& j) {
  FlowConfig c;
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    c.grid = LogPolarGrid::make(g.value("r_min", 0.1), g.value("r_max", 0.9), g.value("n_rad", 64), g.value("n_ang", 64));
  }
  if (j.contains("lambda")) c.lambda = qcomplex_from(j.at("lambda"), "lambda").to_complex();
  c.eps = j.value("eps", c.eps);
  c.eta = j.value("eta", c.eta);
  c.dt = j.value("dt", c.dt);
  c.steps = j.value("steps", c.steps);
  c.guard = j.value("guard", c.guard);
  c.record_every = j.value("record_every", c.record_every);
  if (j.contains("stepper")) {
    std::string s = string_from(j.at("stepper"), "stepper");
    if (s == "semi_implicit")
      c.stepper = Stepper::semi_implicit;
    else if (s == "explicit_euler")
      c.stepper = Stepper::explicit_euler;
    else
      throw FormatError("stepper", "expected semi_implicit or explicit_euler");
  }
  if (j.contains("kahler") && j.at("kahler") != "model") throw FormatError("kahler", "only the model weight is supported");
  if (j.contains("boundary") && j.at("boundary") != "dirichlet-model")
    throw FormatError("boundary", "only dirichlet-model is supported");
  return c;
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path, "cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path, e.what());
  }
}

}  // namespace kmsh::io
