#include "kmsh/tools/suites.hpp"

#include "kmsh/boundary.hpp"
#include "kmsh/charnum.hpp"
#include "kmsh/corrfun.hpp"
#include "kmsh/flow.hpp"
#include "kmsh/model.hpp"
#include "kmsh/perturb.hpp"
#include "kmsh/tools/random_tables.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

namespace kmsh::suites {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

CriterionResult start(int id, std::string name) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  return r;
}

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

QComplex nonzero_lambda(gen::Rng& rng) {
  for (;;) {
    QComplex l = gen::random_qcomplex(rng, 2, 4);
    if (!l.is_zero()) return l;
  }
}

struct Failures {
  long count = 0;
  std::string first;
  void add(const std::string& what) {
    if (count++ == 0) first = what;
  }
  std::string summary() const { return count ? std::to_string(count) + " failures, first: " + first : "no failures"; }
};

}  // namespace

CriterionResult kms_correspondence(std::uint64_t seed) {
  CriterionResult res = start(1, "KMS correspondence round trips");
  auto t0 = Clock::now();
  gen::Rng rng(seed);
  Failures f;
  double max_err = 0;
  const int n_cases = 1000;
  for (int n = 0; n < n_cases; ++n) {
    Rational a = gen::random_rational(rng, 3);
    QComplex alpha = gen::random_qcomplex(rng, 1);
    int shift = gen::uniform_int(rng, -5, 5);
    LsImage base = phi_inverse_kms(a, alpha);
    LsImage moved = phi_inverse_kms(a + shift, alpha - QComplex(shift));
    double e = std::abs(base.omega.value() - moved.omega.value()) / std::abs(base.omega.value());
    max_err = std::max(max_err, e);
    if (base.b != moved.b || !(base.omega == moved.omega) || e >= 1e-12) f.add("shift invariance, case " + std::to_string(n));

    Rational c = gen::random_rational(rng, 2, 4);
    KmsPair k = phi_local(LsPair{base.b, base.omega}, c);
    LsImage back = phi_inverse_kms(k.a, k.alpha);
    if (k.a <= c - 1 || k.a > c) f.add("truncation window, case " + std::to_string(n));
    if (back.b != base.b || !(back.omega == base.omega)) f.add("exact round trip, case " + std::to_string(n));

    // numeric path through the monodromy
    MonodromyDatum datum{CMat::Constant(1, 1, base.omega.value()), {base.b}};
    FlatLocalDatum fl = phi_local(datum, c);
    cplx w = std::exp(cplx(0, -2 * std::numbers::pi) * fl.residue[0]);
    e = std::abs(w - base.omega.value()) / std::abs(base.omega.value());
    max_err = std::max(max_err, e);
    double b_err = std::abs(fl.a[0] + fl.residue[0].real() - base.b.get_d());
    if (e >= 1e-12 || b_err >= 1e-12) f.add("numeric round trip, case " + std::to_string(n));
  }
  res.seconds = since(t0);
  res.pass = f.count == 0 && res.seconds < 1.0;
  res.detail = std::to_string(n_cases) + " cases, max |omega error| " + fmt(max_err) + ", " + f.summary();
  res.data = {{"cases", n_cases}, {"max_omega_rel_error", max_err}, {"failures", f.count}};
  return res;
}

CriterionResult transport_char_numbers(std::uint64_t seed) {
  CriterionResult res = start(2, "transport preserves par-c1 and par-ch2");
  auto t0 = Clock::now();
  gen::Rng rng(seed);
  Failures f;
  const int n_cases = 1000;
  for (int n = 0; n < n_cases; ++n) {
    FilteredLocalSystemData ls = gen::random_localsys(rng);
    QComplex lambda = nonzero_lambda(rng);
    std::map<Label, Rational> c;
    for (const auto& comp : ls.geometry.components) c[comp] = gen::random_rational(rng, 2, 4);
    ParabolicFlatData d = kms_table_transport(ls, lambda, c);
    if (!validate(d).empty()) f.add("invalid transported table, case " + std::to_string(n));
    if (par_c1_ls(ls) != par_c1_flat(d)) f.add("par-c1, case " + std::to_string(n));
    if (par_ch2_ls(ls) != par_ch2_flat(d)) f.add("par-ch2, case " + std::to_string(n));
  }
  res.seconds = since(t0);
  res.pass = f.count == 0 && res.seconds < 5.0;
  res.detail = std::to_string(n_cases) + " tables, exact comparison, " + f.summary();
  res.data = {{"cases", n_cases}, {"failures", f.count}};
  return res;
}

CriterionResult deligne_vanishing(std::uint64_t seed) {
  CriterionResult res = start(3, "Deligne-type vanishing");
  auto t0 = Clock::now();
  gen::Rng rng(seed);
  Failures f;
  const int n_cases = 200;
  for (int n = 0; n < n_cases; ++n) {
    ParabolicFlatData d = gen::random_deligne_data(rng);
    try {
      VanishingCheck v = vanishing_check(d);
      if (!v.is_deligne_type || v.par_deg != 0 || v.par_ch2 != 0) f.add("case " + std::to_string(n));
    } catch (const std::exception& e) {
      f.add("case " + std::to_string(n) + ": " + e.what());
    }
  }
  res.seconds = since(t0);
  res.pass = f.count == 0;
  res.detail = std::to_string(n_cases) + " tables, " + f.summary();
  res.data = {{"cases", n_cases}, {"failures", f.count}};
  return res;
}

CriterionResult cross_formula(std::uint64_t seed) {
  CriterionResult res = start(4, "par-ch2 cross-formula identity");
  auto t0 = Clock::now();
  gen::Rng rng(seed);
  Failures f;
  const int n_cases = 100;
  int multi = 0;
  gen::TableShape shape;
  shape.max_points = 4;
  for (int n = 0; n < n_cases; ++n) {
    ParabolicFlatData d = gen::random_flat_data(rng, shape);
    if (d.geometry.points.size() >= 2) ++multi;
    try {
      CrossCheck cc = par_ch2_cross_check(d);
      if (cc.direct != cc.via_graded || cc.direct != par_ch2_flat(d)) f.add("case " + std::to_string(n));
    } catch (const std::exception& e) {
      f.add("case " + std::to_string(n) + ": " + e.what());
    }
  }
  res.seconds = since(t0);
  res.pass = f.count == 0 && multi > 0;
  res.detail = std::to_string(n_cases) + " tables (" + std::to_string(multi) + " with several points), " + f.summary();
  res.data = {{"cases", n_cases}, {"multi_point", multi}, {"failures", f.count}};
  return res;
}

namespace {

// A priori bound on |par-ch2 change| when every effective weight moves by at most delta.
Rational ch2_change_bound(const ParabolicFlatData& d, const Rational& delta) {
  Rational diag = 0;
  for (const auto& [c, spec] : d.divisor_spectra) {
    Rational s = 0;
    for (const auto& p : spec) s += (2 * abs_of(effective_weight(d.lambda, p.pair())) * delta + delta * delta) * p.r;
    auto it = d.geometry.selfint.find(c);
    if (it != d.geometry.selfint.end()) diag += s * abs_of(it->second);
  }
  Rational cross = 0;
  for (const auto& P : d.geometry.points) {
    auto it = d.point_spectra.find(P.label);
    if (it == d.point_spectra.end()) continue;
    for (const auto& e : it->second) {
      Rational xi = abs_of(effective_weight(d.lambda, e.u_i)), xj = abs_of(effective_weight(d.lambda, e.u_j));
      cross += (delta * (xi + xj) + delta * delta) * e.r * P.mult;
    }
  }
  return diag / 2 + cross;
}

Rational frac(long p, long q) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

bool on_lattice(const Rational& phi, const Rational& c, const Rational& gamma, int m) {
  Rational t = (phi - c - gamma) * m;
  return t.get_den() == 1;
}

}  // namespace

CriterionResult perturbation_scheme(std::uint64_t seed) {
  CriterionResult res = start(5, "perturbation scheme (II)");
  auto t0 = Clock::now();
  gen::Rng rng(seed);
  Failures f;
  const int n_cases = 100;
  const std::vector<int> ms{10, 100, 1000};
  gen::TableShape shape;
  shape.max_rank = 3;
  shape.max_components = 2;
  shape.max_points = 2;
  shape.max_pairs = 2;
  std::vector<Rational> worst(ms.size(), Rational(0));
  double K_fit = 0, K_apriori = 0;
  long rejected = 0;
  int accepted = 0;
  while (accepted < n_cases && rejected < 100000) {
    ParabolicFlatData d = gen::random_flat_data(rng, shape);
    NilpotentBlocks blocks = gen::random_nilpotent_blocks(rng, d);
    std::vector<PerturbedData> out;
    try {
      for (int m : ms) out.push_back(perturb_II(d, blocks, m));
    } catch (const std::invalid_argument&) {
      ++rejected;
      continue;
    }
    const std::string tag = "case " + std::to_string(accepted);
    ++accepted;
    Rational ch2 = par_ch2_flat(d);
    auto c1 = par_c1_flat(d);
    K_apriori = std::max(K_apriori, Rational(ch2_change_bound(d, frac(d.rank, 10)) * 10).get_d());
    for (std::size_t k = 0; k < ms.size(); ++k) {
      const int m = ms[k];
      const ParabolicFlatData& p = out[k].data;
      if (!validate(p).empty()) f.add(tag + ", m=" + std::to_string(m) + ": invalid perturbed table");
      if (par_c1_flat(p) != c1) f.add(tag + ", m=" + std::to_string(m) + ": par-c1 changed");
      for (const auto& [c, spec] : p.divisor_spectra) {
        const Rational& gamma = out[k].plans.at(c).gamma;
        for (const auto& q : spec)
          if (!on_lattice(q.a, d.trunc(c), gamma, m)) f.add(tag + ", m=" + std::to_string(m) + ": weight off lattice");
      }
      Rational diff = abs_of(par_ch2_flat(p) - ch2);
      if (diff > ch2_change_bound(d, frac(d.rank, m))) f.add(tag + ", m=" + std::to_string(m) + ": exceeds K/m");
      worst[k] = std::max(worst[k], diff);
      K_fit = std::max(K_fit, Rational(diff * m).get_d());
    }
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < ms.size(); ++k)
    if (!(worst[k] < worst[k - 1] || worst[k - 1] == 0)) decreasing = false;
  res.seconds = since(t0);
  res.pass = f.count == 0 && accepted == n_cases && decreasing;
  std::ostringstream os;
  os << accepted << " spectra (" << rejected << " rejected by the guard), max |d ch2| at m=10,100,1000: "
     << fmt(worst[0].get_d()) << ", " << fmt(worst[1].get_d()) << ", " << fmt(worst[2].get_d()) << "; fitted K "
     << fmt(K_fit) << ", a priori K " << fmt(K_apriori) << "; " << f.summary();
  res.detail = os.str();
  res.data = {{"cases", accepted},
              {"rejected", rejected},
              {"max_abs_change", {worst[0].get_d(), worst[1].get_d(), worst[2].get_d()}},
              {"m", ms},
              {"K_fit", K_fit},
              {"K_apriori", K_apriori},
              {"decreasing", decreasing},
              {"failures", f.count}};
  return res;
}

namespace {

double sup_G(int n) {
  HarmonicModel m = rank2_model(1.0, 0.0);
  auto g = LogPolarGrid::make(0.1, 0.9, n, n);
  auto H = m.sample(g);
  auto o = induced_ops(H, m.conn);
  auto G = pseudo_curvature(o, m.conn.lambda);
  double s = 0;
  for (int i = 1; i < n - 1; ++i)
    for (int j = 0; j < n; ++j) s = std::max(s, frob_norm(G(i, j), o.P(i, j)));
  return s;
}

}  // namespace

CriterionResult harmonic_fixed_point() {
  CriterionResult res = start(6, "harmonic fixed point, second-order residual");
  auto t0 = Clock::now();
  double s64 = sup_G(64), s128 = sup_G(128);
  double ratio = s64 / s128;
  res.seconds = since(t0);
  res.pass = ratio >= 2.5 && ratio <= 6 && s128 < 1e-2 && res.seconds < 10;
  res.detail = "sup|G| = " + fmt(s64) + " (64^2), " + fmt(s128) + " (128^2), ratio " + fmt(ratio) +
               "; required ratio in [2.5, 6] and < 1e-2 at 128^2";
  res.data = {{"sup_G_64", s64}, {"sup_G_128", s128}, {"ratio", ratio}};
  return res;
}

CriterionResult uniform_bound() {
  CriterionResult res = start(7, "uniform bound over eps");
  auto t0 = Clock::now();
  const std::vector<double> eps{0.5, 0.25, 0.1, 0.05, 0.01};
  auto rep = uniform_bound_scan(eps, LogPolarGrid::make(0.1, 0.9, 256, 256));
  double ref = rep.rows.front().sup, mx = 0;
  bool blowup = true;  // strictly increasing as eps decreases
  bool finite = true;
  json rows = json::array();
  std::ostringstream os;
  for (std::size_t k = 0; k < rep.rows.size(); ++k) {
    const auto& r = rep.rows[k];
    finite = finite && std::isfinite(r.sup);
    mx = std::max(mx, r.sup);
    if (k > 0 && !(r.sup > rep.rows[k - 1].sup)) blowup = false;
    rows.push_back({{"eps", r.eps}, {"sup", r.sup}, {"r_at_sup", r.r_at_sup}});
    os << (k ? ", " : "") << r.eps << ": " << fmt(r.sup);
  }
  res.seconds = since(t0);
  res.pass = finite && !rep.under_resolved && mx <= 1.5 * ref && !blowup;
  res.detail = "sups " + os.str() + "; max/ref " + fmt(mx / ref) + " (limit 1.5)";
  res.data = {{"rows", rows}, {"max_over_ref", mx / ref}, {"monotone_blowup", blowup}};
  return res;
}

CriterionResult scalar_inequalities(std::uint64_t seed) {
  CriterionResult res = start(8, "scalar inequalities");
  auto t0 = Clock::now();
  auto rep = inequality_scan(100000, seed);
  res.seconds = since(t0);
  res.pass = rep.violations.empty() && rep.samples == 100000 && res.seconds < 2;
  res.detail = std::to_string(rep.samples) + " samples, " + std::to_string(rep.violations.size()) +
               " violations, max ratios " + fmt(rep.max_K_ratio) + " / " + fmt(rep.max_M_ratio);
  res.data = {{"samples", rep.samples},
              {"violations", rep.violations.size()},
              {"max_K_ratio", rep.max_K_ratio},
              {"max_M_ratio", rep.max_M_ratio}};
  return res;
}

CriterionResult heat_flow_run() {
  CriterionResult res = start(9, "heat flow");
  auto t0 = Clock::now();
  FlowConfig cfg;
  cfg.record_every = 100;
  HarmonicModel m = rank2_model(1.0, 0.0);
  auto H0 = perturbed_model(m, cfg.grid, 0.2);
  FlowResult r = heat_flow(cfg, H0, m.conn);
  double det = 0, max_inc = -INFINITY, prev = 0, max_drift = 0;
  for (const auto& x : r.trace) {
    det = std::max(det, x.det_residual);
    max_drift = std::max(max_drift, x.det_drift);
    if (x.step > 0) max_inc = std::max(max_inc, x.donaldson_cumulative - prev);
    prev = x.donaldson_cumulative;
  }
  double l0 = r.trace.front().lambdaG_perp_l2, l1 = r.trace.back().lambdaG_perp_l2;
  res.seconds = since(t0);
  res.pass = !r.aborted && static_cast<int>(r.trace.size()) == cfg.steps + 1 && det < 1e-8 && max_inc <= 1e-10 &&
             l1 <= 0.5 * l0 && res.seconds < 60;
  res.detail = "det residual " + fmt(det) + ", largest M step " + fmt(max_inc) + ", |LG perp| " + fmt(l0) + " -> " +
               fmt(l1) + (r.aborted ? ", aborted: " + r.message : "");
  res.data = {{"det_residual", det},
              {"max_det_drift", max_drift},
              {"max_M_increment", max_inc},
              {"l2_initial", l0},
              {"l2_final", l1},
              {"M_final", r.trace.back().donaldson},
              {"M_cumulative_final", r.trace.back().donaldson_cumulative}};
  return res;
}

namespace {

// P e^s with s = P^(-1/2) U P^(1/2), U Hermitian; returned as the metric matrix field H.
GridMetricField times_exp(const GridMetricField& H1, const MatrixField& U) {
  MatrixField P1 = H1.P();
  GridMetricField out;
  out.grid = H1.grid;
  out.H = MatrixField::generate(H1.grid, P1.dim(), [&](int i, int j) -> Mat {
    Mat r, ir;
    sqrt_pair(P1(i, j), r, ir);
    Mat P = r * herm_exp(U(i, j)) * r;
    P = 0.5 * (P + P.adjoint()).eval();
    return P.conjugate();
  });
  return out;
}

// Random trace-free Hermitian field vanishing on the radial ends, sup operator norm `scale`.
MatrixField random_hermitian(const LogPolarGrid& g, gen::Rng& rng, double scale) {
  std::uniform_real_distribution<double> u(-1, 1);
  double c[8];
  for (double& x : c) x = u(rng);
  MatrixField U = MatrixField::generate(g, 2, [&](int i, int j) -> Mat {
    double b = std::sin(std::numbers::pi * i / (g.n_rad - 1));
    double y = g.y(j);
    double d = c[0] + c[1] * std::cos(y) + c[2] * std::sin(2 * y);
    cplx off(c[3] + c[4] * std::sin(y), c[5] + c[6] * std::cos(y) + c[7] * g.x(i));
    Mat X(2, 2);
    X << d, off, std::conj(off), -d;
    return b * X;
  });
  double mx = 0;
  for (std::size_t k = 0; k < U.size(); ++k) mx = std::max(mx, U[k].jacobiSvd().singularValues()(0));
  for (std::size_t k = 0; k < U.size(); ++k) U[k] *= scale / mx;
  return U;
}

}  // namespace

CriterionResult donaldson_functional(std::uint64_t seed) {
  CriterionResult res = start(10, "Donaldson functional");
  auto t0 = Clock::now();
  gen::Rng rng(seed);
  HarmonicModel m = rank2_model(cplx(0.7, 0.4), 0.0);
  auto g = LogPolarGrid::make(0.1, 0.6, 96, 64);
  KahlerWeight w{0.0};
  GridMetricField H1 = perturbed_model(m, g, 0.2);

  double self = donaldson(H1, H1, m.conn, w).value;

  // direct exponential path against a broken path through an off-ray midpoint
  MatrixField U = random_hermitian(g, rng, 0.8);
  MatrixField V = random_hermitian(g, rng, 0.3);
  GridMetricField H3 = times_exp(H1, U);
  GridMetricField Hm = times_exp(H1, 0.5 * U + V);
  double m13 = donaldson(H1, H3, m.conn, w).value;
  double m1m = donaldson(H1, Hm, m.conn, w).value;
  double mm3 = donaldson(Hm, H3, m.conn, w).value;
  double rel = std::abs(m1m + mm3 - m13) / std::abs(m13);

  // lower bound M >= -B int|s| with B = sup |sqrt(-1) Lambda G(h1)|
  InducedOps o1 = induced_ops(H1, m.conn);
  MatrixField K1 = lambda_G(pseudo_curvature(o1, m.conn.lambda), w);
  double B = 0;
  for (std::size_t k = 0; k < K1.size(); ++k) B = std::max(B, frob_norm(K1[k], o1.P[k]));
  int lb_fail = 0;
  double min_margin = INFINITY;
  std::uniform_real_distribution<double> amp(0.05, 1.0);
  for (int n = 0; n < 50; ++n) {
    MatrixField S = random_hermitian(g, rng, amp(rng));
    GridMetricField H2 = times_exp(H1, S);
    DonaldsonValue v = donaldson(o1, K1, H2.P(), m.conn, w);
    double margin = v.value + B * v.s_l1;
    min_margin = std::min(min_margin, margin);
    if (margin < 0) ++lb_fail;
  }
  res.seconds = since(t0);
  res.pass = self == 0.0 && rel < 1e-3 && lb_fail == 0;
  res.detail = "M(h,h) = " + fmt(self) + ", path mismatch " + fmt(rel) + " relative, lower bound failures " +
               std::to_string(lb_fail) + "/50 (min margin " + fmt(min_margin) + ")";
  res.data = {{"M_self", self},   {"M_direct", m13},           {"M_broken", m1m + mm3}, {"relative_mismatch", rel},
              {"B", B},           {"lower_bound_failures", lb_fail}, {"min_margin", min_margin}};
  return res;
}

CriterionResult boundary_formula() {
  CriterionResult res = start(11, "boundary integral formula");
  auto t0 = Clock::now();
  auto g = LogPolarGrid::make(0.1, 0.9, 256, 256);
  auto f1 = rank1_boundary_fixture(g, 0.5, 0.0, 1.0);
  auto b1 = boundary_integral(f1.H, f1.conn, f1.weights);
  auto f2 = rank2_nilpotent_fixture(g, 1.0);
  auto b2 = boundary_integral(f2.H, f2.conn, f2.weights);
  const double scale = std::abs(b1.rhs);
  double e_area = std::abs(b1.lhs - b1.rhs) / scale, e_circle = std::abs(b1.lhs_circle - b1.rhs) / scale;
  double r2 = std::max({std::abs(b2.lhs), std::abs(b2.lhs_circle), std::abs(b2.rhs)}) / scale;
  res.seconds = since(t0);
  res.pass = std::abs(b1.rhs - 0.25) < 1e-14 && e_area < 0.02 && e_circle < 0.02 && r2 < 0.02;
  res.detail = "rank 1: rhs " + fmt(b1.rhs.real()) + ", lhs " + fmt(b1.lhs.real()) + " (area), " +
               fmt(b1.lhs_circle.real()) + " (circles); rank 2 relative size " + fmt(r2);
  res.data = {{"rank1", {{"rhs", b1.rhs.real()}, {"lhs", b1.lhs.real()}, {"lhs_circle", b1.lhs_circle.real()}}},
              {"rank2_relative", r2}};
  return res;
}

std::vector<CriterionResult> acceptance(std::uint64_t seed) {
  return {kms_correspondence(seed), transport_char_numbers(seed), deligne_vanishing(seed), cross_formula(seed),
          perturbation_scheme(seed), harmonic_fixed_point(),       uniform_bound(),          scalar_inequalities(seed),
          heat_flow_run(),           donaldson_functional(seed),   boundary_formula()};
}

std::vector<CriterionResult> properties(std::uint64_t seed) {
  return {kms_correspondence(seed), transport_char_numbers(seed), deligne_vanishing(seed),
          cross_formula(seed),      perturbation_scheme(seed),     scalar_inequalities(seed),
          donaldson_functional(seed)};
}

std::string line(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << ": " << r.detail << " (" << fmt(r.seconds)
     << " s)";
  return os.str();
}

json to_json(const CriterionResult& r) {
  return {{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"data", r.data}};
}

}  // namespace kmsh::suites
