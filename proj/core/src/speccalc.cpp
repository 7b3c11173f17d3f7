#include "kmsh/speccalc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kmsh {

namespace {

Mat comm(const Mat& a, const Mat& b) { return a * b - b * a; }

double c_of(cplx lambda) { return 1.0 + std::norm(lambda); }

void require_lambda(cplx lambda) {
  if (lambda == cplx(0)) throw std::invalid_argument("lambda = 0 is not supported by the operator stack");
}

double sup_rows(const MatrixField& f, int margin, bool per_r2 = true) {
  const auto& g = f.grid();
  double s = 0;
  for (int i = margin; i < g.n_rad - margin; ++i) {
    double scale = per_r2 ? 1.0 / (g.r(i) * g.r(i)) : 1.0;
    for (int j = 0; j < g.n_ang; ++j) s = std::max(s, f(i, j).norm() * scale);
  }
  return s;
}

}  // namespace

bool is_self_adjoint(const Mat& s, const Mat& P, double tol) {
  Mat d = P * s - s.adjoint() * P;
  return d.norm() <= tol * std::max(1.0, (P * s).norm());
}

void self_adjoint_eigen(const Mat& s, const Mat& P, RVec& kappa, Mat& T, Mat& Tinv) {
  Mat r, ir;
  sqrt_pair(P, r, ir);
  Mat X = r * s * ir;
  Mat V;
  herm_eigen(X, kappa, V);
  T = ir * V;
  Tinv = V.adjoint() * r;
}

Mat scalar_calculus(const std::function<double(double)>& phi, const Mat& s, const Mat& P) {
  if (!is_self_adjoint(s, P)) throw std::invalid_argument("matrix is not self-adjoint for the metric");
  RVec k;
  Mat T, Ti;
  self_adjoint_eigen(s, P, k, T, Ti);
  RVec f = k.unaryExpr(phi);
  return T * f.cast<cplx>().asDiagonal() * Ti;
}

Mat two_var_calculus(const std::function<double(double, double)>& psi, const Mat& s, const Mat& A, const Mat& P) {
  if (!is_self_adjoint(s, P)) throw std::invalid_argument("matrix is not self-adjoint for the metric");
  RVec k;
  Mat T, Ti;
  self_adjoint_eigen(s, P, k, T, Ti);
  Mat At = Ti * A * T;
  for (int i = 0; i < At.rows(); ++i)
    for (int j = 0; j < At.cols(); ++j) At(i, j) *= psi(k(i), k(j));
  return T * At * Ti;
}

void GridMetricField::validate() const {
  for (int i = 0; i < grid.n_rad; ++i)
    for (int j = 0; j < grid.n_ang; ++j) {
      const Mat& h = H(i, j);
      if ((h - h.adjoint()).norm() > 1e-12 * std::max(1.0, h.norm()))
        throw std::invalid_argument("metric not Hermitian at grid sample (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ")");
      Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() <= 0)
        throw std::invalid_argument("metric not positive at grid sample (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ")");
    }
}

Mat ConnectionModel::A_w(cplx z) const {
  Mat a = residue;
  if (A) a += z * A(z);
  return a;
}

MatrixField ConnectionModel::A_w_field(const LogPolarGrid& g) const {
  return MatrixField::generate(g, dim(), [&](int i, int j) { return A_w(g.z(i, j)); });
}

InducedOps induced_ops(const GridMetricField& Hf, const ConnectionModel& conn) {
  require_lambda(conn.lambda);
  if (Hf.H.dim() != conn.dim()) throw std::invalid_argument("metric and connection ranks differ");
  const auto& g = Hf.grid;
  const cplx lam = conn.lambda;
  const double c = c_of(lam);
  InducedOps o;
  o.P = Hf.P();
  o.Pinv = inverse(o.P);
  o.A = conn.A_w_field(g);
  MatrixField Pw = d_w(o.P), Pwb = d_wbar(o.P);
  const int d = conn.dim();
  o.B = o.Pinv * Pw;
  o.C = MatrixField::generate(g, d, [&](int i, int j) -> Mat {
    const Mat& Pi = o.Pinv(i, j);
    return std::conj(lam) * Pi * Pwb(i, j) - Pi * o.A(i, j).adjoint() * o.P(i, j);
  });
  o.theta = MatrixField::generate(g, d, [&](int i, int j) -> Mat { return (o.A(i, j) - lam * o.B(i, j)) / c; });
  o.theta_dag = MatrixField::generate(g, d, [&](int i, int j) -> Mat {
    return o.Pinv(i, j) * o.theta(i, j).adjoint() * o.P(i, j);
  });
  o.dbar_h = (lam / c) * o.C;
  o.d_h = MatrixField::generate(g, d, [&](int i, int j) -> Mat { return (std::conj(lam) * o.A(i, j) + o.B(i, j)) / c; });
  return o;
}

MatrixField pseudo_curvature(const InducedOps& o, cplx lam, Scheme scheme) {
  require_lambda(lam);
  const auto& g = o.P.grid();
  const double c = c_of(lam);
  const int d = o.P.dim();
  MatrixField dbar_theta;
  if (scheme == Scheme::nested) {
    dbar_theta = d_wbar(o.theta);
  } else {
    MatrixField Pw = d_w(o.P), Pwb = d_wbar(o.P), Pww = d_wwbar(o.P), Ab = d_wbar(o.A);
    dbar_theta = MatrixField::generate(g, d, [&](int i, int j) -> Mat {
      const Mat& Pi = o.Pinv(i, j);
      Mat dB = -Pi * Pwb(i, j) * Pi * Pw(i, j) + Pi * Pww(i, j);
      return (Ab(i, j) - lam * dB) / c;
    });
  }
  const cplx k = c * c / lam;
  return MatrixField::generate(g, d, [&](int i, int j) -> Mat {
    double r2 = g.r(i) * g.r(i);
    return k * (dbar_theta(i, j) + comm(o.dbar_h(i, j), o.theta(i, j))) / r2;
  });
}

MatrixField pseudo_curvature(const GridMetricField& Hf, const ConnectionModel& conn, Scheme scheme) {
  return pseudo_curvature(induced_ops(Hf, conn), conn.lambda, scheme);
}

double KahlerWeight::operator()(double r) const {
  if (eps == 0) return 1.0;
  return eps * eps * std::pow(r, eps - 2.0) + 1.0;
}

MatrixField lambda_G(const MatrixField& G, const KahlerWeight& w) {
  const auto& g = G.grid();
  return MatrixField::generate(g, G.dim(), [&](int i, int j) -> Mat { return G(i, j) / w(g.r(i)); });
}

MatrixField trace_free(const MatrixField& f) {
  const int d = f.dim();
  return MatrixField::generate(f.grid(), d, [&](int i, int j) -> Mat {
    return f(i, j) - (f(i, j).trace() / static_cast<double>(d)) * Mat::Identity(d, d);
  });
}

FlatnessReport flatness_residuals(const GridMetricField& Hf, const ConnectionModel& conn, int margin) {
  InducedOps o = induced_ops(Hf, conn);
  const auto& g = Hf.grid;
  const cplx lam = conn.lambda;
  const double c = c_of(lam);
  const int d = conn.dim();
  FlatnessReport rep;

  MatrixField dth_b = d_wbar(o.theta), dthd_w = d_w(o.theta_dag);
  MatrixField mixed = MatrixField::generate(g, d, [&](int i, int j) -> Mat {
    Mat dh_thd = dthd_w(i, j) + comm(o.d_h(i, j), o.theta_dag(i, j));
    Mat dbh_th = dth_b(i, j) + comm(o.dbar_h(i, j), o.theta(i, j));
    return dh_thd / std::conj(lam) - dbh_th / lam;
  });
  rep.mixed_identity = sup_rows(mixed, margin);

  MatrixField dG_w = d_w(o.dbar_h), dPi_b = d_wbar(o.d_h);
  MatrixField kahler = MatrixField::generate(g, d, [&](int i, int j) -> Mat {
    return dG_w(i, j) - dPi_b(i, j) + comm(o.d_h(i, j), o.dbar_h(i, j)) + comm(o.theta(i, j), o.theta_dag(i, j));
  });
  rep.kahler_identity = sup_rows(kahler, margin);

  MatrixField G = pseudo_curvature(o, lam, Scheme::compact);
  MatrixField dB_nested = d_wbar(o.B);
  MatrixField Pw = d_w(o.P), Pwb = d_wbar(o.P), Pww = d_wwbar(o.P);
  MatrixField tr_theta = trace_field(o.theta);
  MatrixField dtr = d_wbar(tr_theta);
  MatrixField res_R(g, 1), res_th(g, 1), harm(g, d);
  const cplx k = c * c / lam;
  for (int i = 0; i < g.n_rad; ++i) {
    double r2 = g.r(i) * g.r(i);
    for (int j = 0; j < g.n_ang; ++j) {
      const Mat& Pi = o.Pinv(i, j);
      cplx trR_nested = -dB_nested(i, j).trace() / r2;
      cplx trR_compact = -(-Pi * Pwb(i, j) * Pi * Pw(i, j) + Pi * Pww(i, j)).trace() / r2;
      res_R(i, j)(0, 0) = G(i, j).trace() - c * trR_nested;
      res_th(i, j)(0, 0) = c * trR_compact - k * dtr(i, j)(0, 0) / r2;
      harm(i, j) = G(i, j) / k;
    }
  }
  rep.trace_identity_R = sup_rows(res_R, margin, false);
  rep.trace_identity_theta = sup_rows(res_th, margin, false);
  rep.harmonicity = sup_rows(harm, margin, false);
  return rep;
}

MetricChangeReport metric_change_residual(const GridMetricField& H1, const GridMetricField& H2,
                                          const ConnectionModel& conn, const KahlerWeight& w, int margin) {
  const auto& g = H1.grid;
  const cplx lam = conn.lambda;
  const double c = c_of(lam);
  const int d = conn.dim();
  InducedOps o1 = induced_ops(H1, conn);
  MatrixField P2 = H2.P();
  MatrixField S = o1.Pinv * P2;
  for (std::size_t k = 0; k < S.size(); ++k) {
    RVec kap;
    Mat T, Ti;
    self_adjoint_eigen(S[k], o1.P[k], kap, T, Ti);
    if (kap.minCoeff() <= 0) throw std::invalid_argument("transition endomorphism is not positive");
  }
  MatrixField K1 = lambda_G(pseudo_curvature(o1, lam), w);
  MatrixField K2 = lambda_G(pseudo_curvature(H2, conn), w);
  MatrixField Sw = d_w(S), Swb = d_wbar(S);
  MatrixField alpha = MatrixField::generate(g, d, [&](int i, int j) -> Mat { return Sw(i, j) + comm(o1.B(i, j), S(i, j)); });
  MatrixField beta = MatrixField::generate(g, d, [&](int i, int j) -> Mat {
    return -(std::conj(lam) * Swb(i, j) + comm(o1.C(i, j), S(i, j)));
  });
  MatrixField alpha_b = d_wbar(alpha), beta_w = d_w(beta);

  MatrixField logtr(g, 1);
  for (std::size_t k = 0; k < S.size(); ++k) logtr[k](0, 0) = std::log(S[k].trace().real());
  MatrixField logtr_ww = d_wwbar(logtr);

  MetricChangeReport rep;
  rep.inequality_excess = -1e300;
  for (int i = margin; i < g.n_rad - margin; ++i) {
    double vol = g.r(i) * g.r(i) * w(g.r(i));
    for (int j = 0; j < g.n_ang; ++j) {
      const Mat& s = S(i, j);
      Mat si = s.inverse();
      Mat a = lam * Sw(i, j) + comm(o1.A(i, j), s);
      const Mat& b = Swb(i, j);
      Mat lap = (-alpha_b(i, j) + lam * beta_w(i, j) + comm(o1.A(i, j), beta(i, j))) / vol;
      Mat rhs = s * (K2(i, j) - K1(i, j)) + (a * si * beta(i, j) - b * si * alpha(i, j)) / vol;
      rep.equation_residual = std::max(rep.equation_residual, (lap - rhs).norm());
      rep.laplacian_sup = std::max(rep.laplacian_sup, lap.norm());
      double lhs = -c * logtr_ww(i, j)(0, 0).real() / vol;
      double bound = frob_norm(K1(i, j), o1.P(i, j)) + frob_norm(K2(i, j), P2(i, j));
      rep.inequality_excess = std::max(rep.inequality_excess, lhs - bound);
    }
  }
  return rep;
}

}  // namespace kmsh
