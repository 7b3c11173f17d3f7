#include "kmsh/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace kmsh {

ModelScalars model_scalars(cplx z, double eps) {
  const double r = std::abs(z);
  if (!(r > 0 && r < 1)) throw std::invalid_argument("model scalars need 0 < |z| < 1");
  if (eps < 0) throw std::invalid_argument("eps must be nonnegative");
  const double x = std::log(r);
  ModelScalars m;
  const double ex = eps * x;
  if (std::abs(ex) < 1e-4) {
    // L = -2 sinh(eps x)/eps, K = cosh(eps x), M = e^t (1 - t) with t = 4 eps x
    const double t = 4 * ex;
    m.L = -2 * x * (1 + ex * ex / 6);
    m.K_minus_1 = ex * ex / 2 * (1 + ex * ex / 12);
    m.one_minus_M = t * t / 2 + t * t * t / 3 + t * t * t * t / 8;
  } else {
    const double t = 4 * ex;
    m.L = -2 * std::sinh(ex) / eps;
    const double sh = std::sinh(ex / 2);
    m.K_minus_1 = 2 * sh * sh;
    m.one_minus_M = -std::expm1(t) + t * std::exp(t);
  }
  m.K = 1 + m.K_minus_1;
  m.M = 1 - m.one_minus_M;
  return m;
}

GridMetricField HarmonicModel::sample(const LogPolarGrid& g) const {
  GridMetricField f;
  f.grid = g;
  f.H = MatrixField::generate(g, rank, [&](int i, int j) { return metric(g.z(i, j)); });
  return f;
}

HarmonicModel rank2_model(cplx lambda, double eps) {
  if (lambda == cplx(0)) throw std::invalid_argument("lambda must be nonzero");
  if (!(eps >= 0 && eps <= 0.5)) throw std::invalid_argument("rank 2 model needs 0 <= eps <= 1/2");
  HarmonicModel m;
  m.rank = 2;
  m.conn.lambda = lambda;
  m.conn.residue = Mat::Zero(2, 2);
  m.conn.residue(1, 0) = 1.0;
  const double c = 1 + std::norm(lambda);
  m.metric = [lambda, eps, c](cplx z) {
    ModelScalars s = model_scalars(z, eps);
    Mat H(2, 2);
    H(0, 0) = s.L;
    H(1, 1) = c / s.L;
    H(0, 1) = -std::conj(lambda) * s.M;
    H(1, 0) = -lambda * s.M;
    return H;
  };
  return m;
}

Mat sym_power_metric(const Mat& H, int k) {
  const int n = k + 1;
  Mat S(n, n);
  std::vector<double> binom(n, 1.0);
  for (int m = 1; m < n; ++m) binom[m] = binom[m - 1] * (k - m + 1) / m;
  for (int m = 0; m < n; ++m) {
    // (H00 t1 + H01 t2)^(k-m) (H10 t1 + H11 t2)^m, coefficients indexed by the power of t2
    std::vector<cplx> poly{1.0};
    auto mul = [&](cplx a, cplx b) {
      std::vector<cplx> out(poly.size() + 1, 0.0);
      for (std::size_t q = 0; q < poly.size(); ++q) {
        out[q] += poly[q] * a;
        out[q + 1] += poly[q] * b;
      }
      poly.swap(out);
    };
    for (int t = 0; t < k - m; ++t) mul(H(0, 0), H(0, 1));
    for (int t = 0; t < m; ++t) mul(H(1, 0), H(1, 1));
    for (int q = 0; q < n; ++q) S(m, q) = binom[m] * poly[q];
  }
  return S;
}

HarmonicModel sym_power_model(int l, cplx lambda, double eps) {
  if (l < 2 || l > 8) throw std::invalid_argument("symmetric power model needs 2 <= l <= 8");
  HarmonicModel base = rank2_model(lambda, eps);
  if (l == 2) return base;
  const int k = l - 1;
  HarmonicModel m;
  m.rank = l;
  m.conn.lambda = lambda;
  m.conn.residue = Mat::Zero(l, l);
  for (int q = 0; q + 1 < l; ++q) m.conn.residue(q + 1, q) = q + 1;
  auto h2 = base.metric;
  m.metric = [h2, k](cplx z) { return sym_power_metric(h2(z), k); };
  return m;
}

double power_log_sup(double b, int d) {
  if (d == 0) return 1.0;
  return std::pow(2.0 * d / b, d) * std::exp(-static_cast<double>(d));
}

InequalityReport inequality_scan(long samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ulog(-12.0, -0.01), ueps(0.0, 0.5);
  InequalityReport rep;
  rep.samples = samples;
  const double tol = 1e-12;
  auto flag = [&](const char* lemma, double lx, double e, double lhs, double rhs) {
    if (lhs > rhs + tol * std::max(1.0, std::abs(rhs))) rep.violations.push_back({lemma, lx, e, lhs, rhs});
  };
  for (long s = 0; s < samples; ++s) {
    double lx = ulog(rng);
    double e = ueps(rng);
    while (e == 0.0) e = ueps(rng);
    cplx z(std::exp(lx), 0.0);
    ModelScalars m0 = model_scalars(z, 0.0), me = model_scalars(z, e);
    flag("L0 <= L_eps", lx, e, m0.L, me.L);
    double scale = me.L * me.L * e * e * std::exp(e * lx);
    flag("K_eps - 1 <= 1/2 L^2 eps^2 |z|^eps", lx, e, me.K_minus_1, 0.5 * scale);
    flag("0 <= 1 - M_eps", lx, e, -me.one_minus_M, 0.0);
    flag("1 - M_eps <= 3 L^2 eps^2 |z|^eps", lx, e, me.one_minus_M, 3.0 * scale);
    rep.max_K_ratio = std::max(rep.max_K_ratio, me.K_minus_1 / scale);
    rep.max_M_ratio = std::max(rep.max_M_ratio, me.one_minus_M / scale);
    for (double b : {1.0, 4.0})
      for (int d : {1, 2, 3}) {
        double v = std::exp(b * e * lx) * std::pow(e * m0.L, d);
        flag("|z|^(b eps) (eps L0)^d bounded", lx, e, v, power_log_sup(b, d));
      }
  }
  return rep;
}

UniformBoundReport uniform_bound_scan(const std::vector<double>& eps_list, const LogPolarGrid& g, cplx lambda) {
  UniformBoundReport rep;
  rep.under_resolved = g.n_rad < 256;
  const double c = 1 + std::norm(lambda);
  for (double e : eps_list) {
    if (!(e > 0 && e <= 0.5)) throw std::invalid_argument("eps list must lie in (0, 1/2]");
    HarmonicModel m = rank2_model(lambda, e);
    GridMetricField H = m.sample(g);
    InducedOps o = induced_ops(H, m.conn);
    MatrixField G = pseudo_curvature(o, lambda);
    KahlerWeight w{e};
    UniformBoundRow row{e, 0.0, 0.0};
    for (int i = 1; i < g.n_rad - 1; ++i)
      for (int j = 0; j < g.n_ang; ++j) {
        // dbar_h theta = -(lambda / c^2) G
        double v = std::abs(lambda) / (c * c) * op_norm(G(i, j), o.P(i, j)) / w(g.r(i));
        if (v > row.sup) {
          row.sup = v;
          row.r_at_sup = g.r(i);
        }
      }
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace kmsh
