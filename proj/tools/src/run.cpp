#include "kmsh/tools/run.hpp"

#include "kmsh/charnum.hpp"
#include "kmsh/corrfun.hpp"
#include "kmsh/flow.hpp"
#include "kmsh/model.hpp"
#include "kmsh/perturb.hpp"
#include "kmsh/tools/json_io.hpp"
#include "kmsh/tools/suites.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace kmsh::cli {

using io::json;

namespace {

// Validation problems that end the job with status 1.
struct ValidationError : std::runtime_error {
  json violations;
  ValidationError(const std::string& what, json v) : std::runtime_error(what), violations(std::move(v)) {}
};

void require_valid(const std::vector<Violation>& v) {
  if (v.empty()) return;
  json arr = json::array();
  for (const auto& x : v) arr.push_back({{"path", x.path}, {"message", x.message}});
  throw ValidationError(v.front().path + ": " + v.front().message, arr);
}

const std::string& single_input(const JobSpec& s) {
  if (s.inputs.size() != 1) throw ValidationError("--input: expected exactly one file", json::array());
  return s.inputs.front();
}

bool is_localsys(const json& j) {
  if (j.contains("monodromy")) return true;
  if (!j.contains("divisor_spectra") || !j.at("divisor_spectra").is_object()) return false;
  for (const auto& [k, arr] : j.at("divisor_spectra").items())
    if (arr.is_array() && !arr.empty()) return arr.front().contains("b");
  return !j.contains("lambda");
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

json cplx_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

void text_report(std::ostringstream& os, const CharReport& r) {
  os << "par_deg     " << to_string(r.par_deg) << "\n";
  os << "par_ch2     " << to_string(r.par_ch2) << "\n";
  os << "c1^2        " << to_string(r.c1_squared) << "\n";
  os << "bg_gap      " << to_string(r.bg_gap) << "\n";
  os << "im_residual " << to_string(r.im_residual) << "\n";
  for (const auto& [c, k] : r.c1_coeffs) os << "c1[" << c << "]   " << to_string(k) << "\n";
}

Report charnum_job(const JobSpec& s) {
  Report rep;
  json in = io::read_file(single_input(s));
  std::ostringstream os;
  if (is_localsys(in)) {
    FilteredLocalSystemData ls = io::localsys_from(in);
    require_valid(validate(ls));
    CharReport r = char_report(ls);
    rep.data = {{"side", "local_system"}, {"report", io::to_json(r)}};
    os << "characteristic numbers (filtered local system)\n";
    text_report(os, r);
  } else {
    ParabolicFlatData d = io::bundle_from(in);
    require_valid(validate(d));
    CharReport r = char_report(d);
    rep.data = {{"side", "flat"}, {"report", io::to_json(r)}};
    os << "characteristic numbers (parabolic flat)\n";
    text_report(os, r);
    try {
      CrossCheck cc = par_ch2_cross_check(d);
      VanishingCheck v = vanishing_check(d);
      rep.data["cross_check"] = {{"direct", io::to_json(cc.direct)}, {"via_graded", io::to_json(cc.via_graded)}};
      rep.data["deligne_type"] = v.is_deligne_type;
      os << "cross-check agrees; deligne type: " << (v.is_deligne_type ? "yes" : "no") << "\n";
    } catch (const std::logic_error& e) {
      rep.status = identity_failure;
      rep.data["identity_failure"] = e.what();
      os << "IDENTITY FAILURE: " << e.what() << "\n";
    }
  }
  rep.text = os.str();
  return rep;
}

Report perturb_job(const JobSpec& s) {
  Report rep;
  json in = io::read_file(single_input(s));
  ParabolicFlatData d = io::bundle_from(in);
  require_valid(validate(d));
  NilpotentBlocks blocks = io::blocks_from(in);
  const int m = s.m.value_or(10);
  if (m < 1) throw ValidationError("--m: must be positive", json::array());
  PerturbedData p = perturb_II(d, blocks, m);

  auto c1_before = par_c1_flat(d), c1_after = par_c1_flat(p.data);
  Rational ch2_before = par_ch2_flat(d), ch2_after = par_ch2_flat(p.data);
  json plans = json::object(), refined = json::object();
  for (const auto& [c, plan] : p.plans) plans[c] = io::to_json(plan);
  for (const auto& [c, r] : p.refined) refined[c] = io::to_json(r);
  rep.data = {{"m", m},
              {"graded_semisimple", graded_semisimple_check(blocks)},
              {"refined", refined},
              {"plans", plans},
              {"perturbed", io::to_json(p.data)},
              {"par_c1_preserved", c1_before == c1_after},
              {"par_ch2_before", io::to_json(ch2_before)},
              {"par_ch2_after", io::to_json(ch2_after)},
              {"par_ch2_change", io::to_json(Rational(abs_of(ch2_after - ch2_before)))}};
  std::ostringstream os;
  os << "perturbation (II), m = " << m << "\n";
  for (const auto& [c, plan] : p.plans) {
    os << c << ": L = " << to_string(plan.L) << ", gamma = " << to_string(plan.gamma) << "\n";
    for (const auto& [key, phi] : plan.new_weights)
      os << "  (a, k) = (" << to_string(key.first) << ", " << key.second << ") -> " << to_string(phi) << "\n";
  }
  os << "par_c1 preserved: " << (c1_before == c1_after ? "yes" : "NO") << "\n";
  os << "par_ch2 " << to_string(ch2_before) << " -> " << to_string(ch2_after) << "\n";
  if (c1_before != c1_after) rep.status = identity_failure;
  rep.text = os.str();
  return rep;
}

std::map<Label, Rational> truncations(const json& in, const std::vector<Label>& comps) {
  std::map<Label, Rational> c;
  for (const auto& comp : comps) c[comp] = 0;
  if (in.contains("truncation"))
    for (auto& [k, v] : in.at("truncation").items()) c[k] = io::rational_from(v, "truncation." + k);
  return c;
}

Report corr_job(const JobSpec& s) {
  Report rep;
  json in = io::read_file(single_input(s));
  std::ostringstream os;
  if (in.contains("monodromy")) {
    Rational c = in.contains("c") ? io::rational_from(in.at("c"), "c") : Rational(0);
    auto data = io::monodromy_from(in);
    json out = json::array();
    for (std::size_t n = 0; n < data.size(); ++n) {
      FlatLocalDatum f = phi_local(data[n], c);
      json res = json::array();
      os << "monodromy[" << n << "]\n";
      for (std::size_t k = 0; k < f.a.size(); ++k) {
        res.push_back({{"a", f.a[k]}, {"n", f.n[k]}, {"residue", cplx_json(f.residue[k])}});
        os << "  a = " << num(f.a[k]) << ", n = " << f.n[k] << ", residue = " << num(f.residue[k].real()) << " + "
           << num(f.residue[k].imag()) << "i\n";
      }
      json N = json::array();
      for (int i = 0; i < f.N.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < f.N.cols(); ++j) row.push_back(cplx_json(f.N(i, j)));
        N.push_back(row);
      }
      out.push_back({{"basis", res}, {"N", N}});
    }
    rep.data = {{"c", io::to_json(c)}, {"local", out}};
    rep.text = os.str();
    return rep;
  }

  CharReport ls_side, flat_side;
  if (is_localsys(in)) {
    FilteredLocalSystemData ls = io::localsys_from(in);
    require_valid(validate(ls));
    QComplex lambda = in.contains("lambda") ? io::qcomplex_from(in.at("lambda"), "lambda") : QComplex(1);
    if (lambda.is_zero()) throw ValidationError("lambda: must be nonzero", json::array());
    ParabolicFlatData d = kms_table_transport(ls, lambda, truncations(in, ls.geometry.components));
    ls_side = char_report(ls);
    flat_side = char_report(d);
    rep.data = {{"direction", "local_system_to_flat"}, {"flat", io::to_json(d)}};
  } else {
    ParabolicFlatData d = io::bundle_from(in);
    require_valid(validate(d));
    FilteredLocalSystemData ls = kms_table_inverse(d);
    ls_side = char_report(ls);
    flat_side = char_report(d);
    rep.data = {{"direction", "flat_to_local_system"}, {"local_system", io::to_json(ls)}};
  }
  bool same = ls_side.c1_coeffs == flat_side.c1_coeffs && ls_side.par_ch2 == flat_side.par_ch2;
  rep.data["local_system_report"] = io::to_json(ls_side);
  rep.data["flat_report"] = io::to_json(flat_side);
  rep.data["numbers_agree"] = same;
  os << "local system side\n";
  text_report(os, ls_side);
  os << "flat side\n";
  text_report(os, flat_side);
  os << "par_c1 and par_ch2 agree: " << (same ? "yes" : "NO") << "\n";
  if (!same) rep.status = identity_failure;
  rep.text = os.str();
  return rep;
}

Report flow_job(const JobSpec& s) {
  Report rep;
  json in = json::object();
  if (s.inputs.size() > 1) throw ValidationError("--input: at most one flow.json", json::array());
  if (!s.inputs.empty()) in = io::read_file(s.inputs.front());
  FlowConfig cfg = io::flow_config_from(in);
  if (!in.contains("record_every")) cfg.record_every = 10;
  if (s.grid) {
    const auto& g = cfg.grid;
    cfg.grid = LogPolarGrid::make(g.r_min, g.r_max, s.grid->first, s.grid->second);
  }
  if (s.dt) cfg.dt = *s.dt;
  if (s.steps) cfg.steps = *s.steps;
  if (!s.eps.empty()) cfg.eps = s.eps.front();
  const double amp = in.value("perturbation", 0.2);

  HarmonicModel model = rank2_model(cfg.lambda, cfg.eps);
  GridMetricField H0 = perturbed_model(model, cfg.grid, amp);
  FlowResult r = heat_flow(cfg, H0, model.conn);

  double det = 0, max_inc = -INFINITY, prev = 0;
  std::ostringstream csv;
  csv << "step,t,det_residual,M,M_direct,lambdaG_perp_l2\n";
  json trace = json::array();
  for (const auto& x : r.trace) {
    det = std::max(det, x.det_residual);
    if (x.step > 0) max_inc = std::max(max_inc, x.donaldson_cumulative - prev);
    prev = x.donaldson_cumulative;
    csv << x.step << "," << num(x.t) << "," << num(x.det_residual) << "," << num(x.donaldson_cumulative) << ","
        << (std::isnan(x.donaldson) ? std::string() : num(x.donaldson)) << "," << num(x.lambdaG_perp_l2) << "\n";
    json row = {{"step", x.step},
                {"t", x.t},
                {"det_residual", x.det_residual},
                {"M", x.donaldson_cumulative},
                {"lambdaG_perp_l2", x.lambdaG_perp_l2}};
    if (!std::isnan(x.donaldson)) {
      row["M_direct"] = x.donaldson;
      row["sup_log_s"] = x.sup_log_s;
    }
    trace.push_back(row);
  }
  rep.csv = csv.str();
  const bool det_ok = det < 1e-8, mono = r.trace.size() < 2 || max_inc <= s.tol;
  rep.data = {{"steps", cfg.steps},
              {"dt", cfg.dt},
              {"grid", {cfg.grid.n_rad, cfg.grid.n_ang}},
              {"aborted", r.aborted},
              {"message", r.message},
              {"det_residual", det},
              {"max_M_increment", r.trace.size() < 2 ? 0.0 : max_inc},
              {"fit", {{"C1", r.fit_C1}, {"C2", r.fit_C2}}},
              {"trace", trace}};
  std::ostringstream os;
  os << "heat flow: " << r.trace.size() - 1 << " steps of dt = " << cfg.dt << " on " << cfg.grid.n_rad << "x"
     << cfg.grid.n_ang << "\n";
  os << "|Lambda G perp|_L2: " << num(r.trace.front().lambdaG_perp_l2) << " -> " << num(r.trace.back().lambdaG_perp_l2)
     << "\n";
  os << "max det residual " << num(det) << ", largest M increment " << num(max_inc) << "\n";
  os << "sup|log s| <= " << num(r.fit_C1) << " + " << num(r.fit_C2) << " M (fit)\n";
  if (r.aborted) {
    os << "ABORTED: " << r.message << "\n";
    rep.status = numerical_abort;
  } else if (!det_ok || !mono) {
    os << "ASSERTION FAILURE: " << (!det_ok ? "det s_t drifted" : "M increased") << "\n";
    rep.status = identity_failure;
  }
  rep.text = os.str();
  return rep;
}

Report scan_job(const JobSpec& s) {
  Report rep;
  std::ostringstream os, csv;
  if (s.kind == "inequality") {
    if (s.samples < 1) throw ValidationError("--samples: must be positive", json::array());
    InequalityReport r = inequality_scan(s.samples, s.seed);
    json viol = json::array();
    csv << "lemma,log_r,eps,lhs,rhs\n";
    for (const auto& v : r.violations) {
      viol.push_back({{"lemma", v.lemma}, {"log_r", v.log_r}, {"eps", v.eps}, {"lhs", v.lhs}, {"rhs", v.rhs}});
      csv << v.lemma << "," << num(v.log_r) << "," << num(v.eps) << "," << num(v.lhs) << "," << num(v.rhs) << "\n";
    }
    rep.data = {{"kind", "inequality"},
                {"seed", s.seed},
                {"samples", r.samples},
                {"violations", viol},
                {"max_K_ratio", r.max_K_ratio},
                {"max_M_ratio", r.max_M_ratio}};
    os << r.samples << " samples (seed " << s.seed << "), " << r.violations.size() << " violations\n";
    os << "max (K-1)/(L^2 eps^2 |z|^eps) = " << num(r.max_K_ratio) << " (bound 1/2)\n";
    os << "max (1-M)/(L^2 eps^2 |z|^eps) = " << num(r.max_M_ratio) << " (bound 3)\n";
    if (!r.violations.empty()) rep.status = identity_failure;
  } else if (s.kind == "uniform") {
    std::vector<double> eps = s.eps.empty() ? std::vector<double>{0.5, 0.25, 0.1, 0.05, 0.01} : s.eps;
    auto [nr, na] = s.grid.value_or(std::pair{256, 256});
    UniformBoundReport r = uniform_bound_scan(eps, LogPolarGrid::make(0.1, 0.9, nr, na));
    json rows = json::array();
    csv << "eps,sup,r_at_sup\n";
    double mx = 0;
    for (const auto& row : r.rows) {
      rows.push_back({{"eps", row.eps}, {"sup", row.sup}, {"r_at_sup", row.r_at_sup}});
      csv << num(row.eps) << "," << num(row.sup) << "," << num(row.r_at_sup) << "\n";
      os << "eps = " << num(row.eps) << ": sup = " << num(row.sup) << " at r = " << num(row.r_at_sup) << "\n";
      mx = std::max(mx, row.sup);
    }
    const double ratio = mx / r.rows.front().sup;
    rep.data = {{"kind", "uniform"}, {"rows", rows}, {"under_resolved", r.under_resolved}, {"max_over_first", ratio}};
    if (r.under_resolved) os << "warning: grid under-resolved (n_rad < 256)\n";
    os << "max / first = " << num(ratio) << "\n";
    if (ratio > 1.5) rep.status = identity_failure;
  } else if (s.kind == "sweep") {
    // sup over a compact sub-annulus of |H_eps - H_0|
    std::vector<double> eps = s.eps.empty() ? std::vector<double>{0.4, 0.2, 0.1, 0.05, 0.01, 0.001} : s.eps;
    auto [nr, na] = s.grid.value_or(std::pair{64, 16});
    auto g = LogPolarGrid::make(0.1, 0.9, nr, na);
    HarmonicModel h0 = rank2_model(1.0, 0.0);
    json rows = json::array();
    csv << "eps,sup_diff\n";
    for (double e : eps) {
      HarmonicModel he = rank2_model(1.0, e);
      double sup = 0;
      for (int i = 0; i < g.n_rad; ++i)
        for (int j = 0; j < g.n_ang; ++j) sup = std::max(sup, (he.metric(g.z(i, j)) - h0.metric(g.z(i, j))).norm());
      rows.push_back({{"eps", e}, {"sup_diff", sup}});
      csv << num(e) << "," << num(sup) << "\n";
      os << "eps = " << num(e) << ": sup |H_eps - H_0| = " << num(sup) << "\n";
    }
    rep.data = {{"kind", "sweep"}, {"rows", rows}};
  } else if (s.kind == "scalars") {
    const double e = s.eps.empty() ? 0.25 : s.eps.front();
    const int n = static_cast<int>(std::min<long>(s.samples, 10000));
    csv << "r,L,K,M\n";
    json rows = json::array();
    for (int k = 1; k <= n; ++k) {
      double r = static_cast<double>(k) / (n + 1);
      ModelScalars ms = model_scalars(r, e);
      csv << num(r) << "," << num(ms.L) << "," << num(ms.K) << "," << num(ms.M) << "\n";
      rows.push_back({{"r", r}, {"L", ms.L}, {"K", ms.K}, {"M", ms.M}});
    }
    rep.data = {{"kind", "scalars"}, {"eps", e}, {"rows", rows}};
    os << n << " samples of L, K, M at eps = " << num(e) << " (see CSV)\n";
  } else {
    throw ValidationError("--kind: expected inequality, uniform, sweep or scalars", json::array());
  }
  rep.csv = csv.str();
  rep.text = os.str();
  return rep;
}

Report verify_job(const JobSpec& s) {
  Report rep;
  std::ostringstream os;
  json arr = json::array();
  for (const auto& r : suites::properties(s.seed)) {
    os << suites::line(r) << "\n";
    arr.push_back(suites::to_json(r));
    if (!r.pass) rep.status = identity_failure;
  }
  rep.data = {{"seed", s.seed}, {"suites", arr}};
  rep.text = os.str();
  return rep;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(path + ": cannot write");
  f << content;
}

}  // namespace

std::pair<int, int> parse_grid(const std::string& text) {
  auto x = text.find_first_of("xX");
  if (x == std::string::npos) throw std::invalid_argument("--grid: expected NxM, got '" + text + "'");
  try {
    std::size_t used1 = 0, used2 = 0;
    int a = std::stoi(text.substr(0, x), &used1), b = std::stoi(text.substr(x + 1), &used2);
    if (used1 != x || used2 != text.size() - x - 1 || a < 8 || b < 8)
      throw std::invalid_argument("");
    return {a, b};
  } catch (const std::exception&) {
    throw std::invalid_argument("--grid: expected NxM with N, M >= 8, got '" + text + "'");
  }
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw std::invalid_argument("--eps: cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument("--eps: empty list");
  return out;
}

Report run(const JobSpec& s) {
  Report rep;
  try {
    for (const auto& p : s.inputs)
      if (!std::filesystem::exists(p)) throw ValidationError("--input: no such file '" + p + "'", json::array());
    if (s.command == "charnum")
      rep = charnum_job(s);
    else if (s.command == "perturb")
      rep = perturb_job(s);
    else if (s.command == "corr")
      rep = corr_job(s);
    else if (s.command == "flow")
      rep = flow_job(s);
    else if (s.command == "scan")
      rep = scan_job(s);
    else if (s.command == "verify")
      rep = verify_job(s);
    else
      throw ValidationError("unknown command '" + s.command + "'", json::array());
  } catch (const ValidationError& e) {
    rep = {validation_failure, {{"error", e.what()}, {"violations", e.violations}}, std::string("error: ") + e.what() + "\n", {}};
  } catch (const io::FormatError& e) {
    rep = {validation_failure, {{"error", e.what()}, {"path", e.path}}, std::string("error: ") + e.what() + "\n", {}};
  } catch (const nlohmann::json::exception& e) {
    rep = {validation_failure, {{"error", e.what()}}, std::string("error: ") + e.what() + "\n", {}};
  } catch (const std::invalid_argument& e) {
    rep = {validation_failure, {{"error", e.what()}}, std::string("error: ") + e.what() + "\n", {}};
  } catch (const std::logic_error& e) {
    rep = {identity_failure, {{"error", e.what()}}, std::string("identity failure: ") + e.what() + "\n", {}};
  } catch (const std::runtime_error& e) {
    rep = {numerical_abort, {{"error", e.what()}}, std::string("numerical failure: ") + e.what() + "\n", {}};
  }
  rep.data["command"] = s.command;
  rep.data["status"] = rep.status;
  return rep;
}

int execute(const JobSpec& s, std::ostream& out, std::ostream& err) {
  if (s.format != "text" && s.format != "json" && s.format != "csv") {
    err << "error: --format: expected text, json or csv\n";
    return validation_failure;
  }
  Report rep = run(s);
  if (!s.output.empty()) {
    std::string base = s.output;
    if (std::filesystem::path(base).extension() == ".json") base.resize(base.size() - 5);
    try {
      write_file(base + ".json", rep.data.dump(2) + "\n");
      write_file(base + ".txt", rep.text);
      if (!rep.csv.empty()) write_file(base + ".csv", rep.csv);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return validation_failure;
    }
  }
  if (s.format == "json")
    out << rep.data.dump(2) << "\n";
  else if (rep.status != ok)
    ;
  else if (s.format == "csv" && !rep.csv.empty())
    out << rep.csv;
  else
    out << rep.text;
  if (rep.status != ok) err << rep.text;
  return rep.status;
}

}  // namespace kmsh::cli
