#include "kmsh/flow.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace kmsh {

namespace {

double min_eig(const Mat& P) {
  RVec e;
  Mat V;
  herm_eigen(P, e, V);
  return e.minCoeff();
}

Mat conj_to_H(const Mat& P) { return P.conjugate(); }

}  // namespace

namespace {

MatrixField perp_with_edges(const MatrixField& Kfull) {
  MatrixField K = trace_free(Kfull);
  const auto& g = K.grid();
  for (int j = 0; j < g.n_ang; ++j) {
    K(0, j).setZero();
    K(g.n_rad - 1, j).setZero();
  }
  return K;
}

double sup_log_s(const MatrixField& P0inv, const MatrixField& P0, const MatrixField& P) {
  double sl = 0;
  for (std::size_t k = 0; k < P.size(); ++k) {
    RVec kap;
    Mat T, Ti;
    self_adjoint_eigen(P0inv[k] * P[k], P0[k], kap, T, Ti);
    sl = std::max(sl, kap.array().log().abs().maxCoeff());
  }
  return sl;
}

}  // namespace

MatrixField flow_curvature(const InducedOps& o, cplx lambda, const KahlerWeight& w) {
  return perp_with_edges(lambda_G(pseudo_curvature(o, lambda), w));
}

double l2_norm(const MatrixField& K, const MatrixField& P, const KahlerWeight& w) {
  const auto& g = K.grid();
  double s = 0;
  for (int i = 1; i < g.n_rad - 1; ++i)
    for (int j = 0; j < g.n_ang; ++j) {
      // |X|_h^2 = tr(X P^-1 X^* P)
      const Mat& X = K(i, j);
      double n2 = std::abs((X * P(i, j).partialPivLu().solve(Mat(X.adjoint() * P(i, j)))).trace());
      s += n2 * g.r(i) * g.r(i) * w(g.r(i)) * g.hx * g.hy;
    }
  return std::sqrt(s);
}

GridMetricField perturbed_model(const HarmonicModel& model, const LogPolarGrid& g, double amp) {
  if (model.rank != 2) throw std::invalid_argument("the standard perturbation is defined for rank 2");
  GridMetricField H0 = model.sample(g);
  const double x0 = g.x(0), x1 = g.x(g.n_rad - 1);
  GridMetricField out;
  out.grid = g;
  out.H = MatrixField::generate(g, 2, [&](int i, int j) -> Mat {
    Mat P0 = H0.H(i, j).conjugate();
    double bump = amp * std::sin(std::numbers::pi * (g.x(i) - x0) / (x1 - x0));
    if (i == 0 || i == g.n_rad - 1) bump = 0;
    Mat U(2, 2);
    U << std::cos(g.y(j)), std::sin(g.y(j)), std::sin(g.y(j)), -std::cos(g.y(j));
    U *= bump;
    Mat r, ir;
    sqrt_pair(P0, r, ir);
    // P0 exp(u) = P0^(1/2) exp(U) P0^(1/2)
    Mat P = r * herm_exp(U) * r;
    P = 0.5 * (P + P.adjoint());
    return conj_to_H(P);
  });
  return out;
}

FlowResult heat_flow(const FlowConfig& cfg, const GridMetricField& initial, const ConnectionModel& conn) {
  const auto& g = cfg.grid;
  if (!(cfg.dt > 0)) throw std::invalid_argument("dt must be positive");
  if (cfg.steps < 1) throw std::invalid_argument("steps must be at least 1");
  if (cfg.eps < 0 || cfg.eps > 0.5) throw std::invalid_argument("eps must lie in [0, 1/2]");
  if (cfg.lambda == cplx(0)) throw std::invalid_argument("lambda must be nonzero");
  const int d = initial.H.dim();
  if (cfg.eps > 0 && !(10.0 * d * cfg.eps < cfg.eta)) throw std::invalid_argument("eta must exceed 10 rank eps");
  if (initial.grid.n_rad != g.n_rad || initial.grid.n_ang != g.n_ang)
    throw std::invalid_argument("initial metric is sampled on a different grid");
  initial.validate();
  ConnectionModel cn = conn;
  cn.lambda = cfg.lambda;
  const KahlerWeight w{cfg.eps};
  const double c = 1 + std::norm(cfg.lambda);
  const int n = g.n_rad, m = g.n_ang;

  FlowResult res;
  res.H = initial;
  MatrixField P = initial.P();
  const MatrixField P0 = P;
  std::vector<cplx> det0(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) det0[k] = P0[k].determinant();

  InducedOps o0 = induced_ops(initial, cn);
  MatrixField Kfull = lambda_G(pseudo_curvature(o0, cfg.lambda), w);
  MatrixField K = perp_with_edges(Kfull);
  const MatrixField K0_full = Kfull;
  const MatrixField P0inv = o0.Pinv;
  double sup0 = 0;
  for (std::size_t k = 0; k < g.size(); ++k) sup0 = std::max(sup0, op_norm(K[k], P[k]));
  if (cfg.dt * sup0 > cfg.guard)
    throw std::invalid_argument("stability guard violated: dt * sup|Lambda G| = " + std::to_string(cfg.dt * sup0) +
                                " > " + std::to_string(cfg.guard));

  // Implicit operator on the (x, y) grid; Dirichlet rows stay zero.
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  if (cfg.stepper == Stepper::semi_implicit) {
    std::vector<Eigen::Triplet<double>> trip;
    const double ix2 = 1.0 / (g.hx * g.hx), iy2 = 1.0 / (g.hy * g.hy);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        int k = static_cast<int>(g.idx(i, j));
        if (i == 0 || i == n - 1) {
          trip.emplace_back(k, k, 1.0);
          continue;
        }
        double D = cfg.dt * c / (4 * g.r(i) * g.r(i) * w(g.r(i)));
        trip.emplace_back(k, k, 1 + D * (2 * ix2 + 2 * iy2));
        trip.emplace_back(k, static_cast<int>(g.idx(i + 1, j)), -D * ix2);
        trip.emplace_back(k, static_cast<int>(g.idx(i - 1, j)), -D * ix2);
        trip.emplace_back(k, static_cast<int>(g.idx(i, (j + 1) % m)), -D * iy2);
        trip.emplace_back(k, static_cast<int>(g.idx(i, (j + m - 1) % m)), -D * iy2);
      }
    Eigen::SparseMatrix<double> A(static_cast<int>(g.size()), static_cast<int>(g.size()));
    A.setFromTriplets(trip.begin(), trip.end());
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw std::runtime_error("implicit operator factorization failed");
  }

  auto direct_M = [&](const MatrixField& Pc) { return donaldson(o0, K0_full, Pc, cn, w).value; };

  InducedOps o = o0;
  double cumulative = 0;
  {
    FlowRecord rec;
    rec.lambdaG_perp_l2 = l2_norm(K, P, w);
    rec.donaldson = 0;
    rec.sup_log_s = 0;
    res.trace.push_back(rec);
  }

  for (int step = 1; step <= cfg.steps; ++step) {
    MatrixField Pn(g, d);
    if (cfg.stepper == Stepper::explicit_euler) {
      Pn = MatrixField::generate(g, d, [&](int i, int j) -> Mat {
        Mat r, ir;
        sqrt_pair(P(i, j), r, ir);
        return r * herm_exp(-cfg.dt * (r * K(i, j) * ir)) * r;
      });
    } else {
      std::vector<Mat> Kt(g.size()), R(g.size());
      parallel_points(g.size(), [&](std::size_t k) {
        Mat ir;
        sqrt_pair(P[k], R[k], ir);
        Kt[k] = R[k] * K[k] * ir;
        Kt[k] = 0.5 * (Kt[k] + Kt[k].adjoint());
      });
      Eigen::MatrixXd rhs(static_cast<int>(g.size()), 2 * d * d);
      for (std::size_t k = 0; k < g.size(); ++k) {
        int i = static_cast<int>(k / m);
        bool edge = (i == 0 || i == n - 1);
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b) {
            cplx v = edge ? cplx(0) : -cfg.dt * Kt[k](a, b);
            rhs(static_cast<int>(k), 2 * (a * d + b)) = v.real();
            rhs(static_cast<int>(k), 2 * (a * d + b) + 1) = v.imag();
          }
      }
      Eigen::MatrixXd sol = lu.solve(rhs);
      parallel_points(g.size(), [&](std::size_t k) {
        Mat sig(d, d);
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b)
            sig(a, b) = cplx(sol(static_cast<int>(k), 2 * (a * d + b)), sol(static_cast<int>(k), 2 * (a * d + b) + 1));
        sig = 0.5 * (sig + sig.adjoint());
        sig -= (sig.trace() / static_cast<double>(d)) * Mat::Identity(d, d);
        Pn[k] = R[k] * herm_exp(sig) * R[k];
      });
    }
    double drift = 0, det_res = 0;
    long bad = -1;
    for (std::size_t k = 0; k < g.size(); ++k) {
      Mat& p = Pn[k];
      p = 0.5 * (p + p.adjoint());
      cplx ratio = p.determinant() / det0[k];
      drift = std::max(drift, std::abs(ratio - 1.0));
      p *= std::pow(ratio.real(), -1.0 / d);
      det_res = std::max(det_res, std::abs(p.determinant() / det0[k] - 1.0));
      if (bad < 0 && !(min_eig(p) > 0)) bad = static_cast<long>(k);
    }
    if (bad >= 0) {
      res.aborted = true;
      res.message = "positivity lost at step " + std::to_string(step) + ", grid point (" +
                    std::to_string(bad / g.n_ang) + ", " + std::to_string(bad % g.n_ang) + ")";
      break;
    }
    // M(h_k, h_(k+1)) uses the curvature of h_k.
    cumulative += donaldson(o, Kfull, Pn, cn, w).value;

    P = Pn;
    GridMetricField Hc;
    Hc.grid = g;
    Hc.H = conj_field(P);
    o = induced_ops(Hc, cn);
    Kfull = lambda_G(pseudo_curvature(o, cfg.lambda), w);
    K = perp_with_edges(Kfull);

    FlowRecord rec;
    rec.step = step;
    rec.t = step * cfg.dt;
    rec.det_drift = drift;
    rec.det_residual = det_res;
    rec.donaldson_cumulative = cumulative;
    rec.lambdaG_perp_l2 = l2_norm(K, P, w);
    bool direct = (step % std::max(1, cfg.record_every) == 0) || step == cfg.steps;
    rec.donaldson = direct ? direct_M(P) : std::numeric_limits<double>::quiet_NaN();
    double sl = direct ? sup_log_s(P0inv, P0, P) : std::numeric_limits<double>::quiet_NaN();
    rec.sup_log_s = sl;
    res.trace.push_back(rec);
    res.H = Hc;
    res.t = rec.t;
  }

  // Least-squares line through (M, sup|log s|), reported only.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (const auto& r : res.trace)
    if (!std::isnan(r.donaldson)) {
      sx += r.donaldson;
      sy += r.sup_log_s;
      sxx += r.donaldson * r.donaldson;
      sxy += r.donaldson * r.sup_log_s;
      ++cnt;
    }
  if (cnt >= 2 && cnt * sxx - sx * sx != 0) {
    res.fit_C2 = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    res.fit_C1 = (sy - res.fit_C2 * sx) / cnt;
  }
  return res;
}

}  // namespace kmsh
