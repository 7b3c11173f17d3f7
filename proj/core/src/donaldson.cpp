#include "kmsh/donaldson.hpp"

#include <cmath>
#include <stdexcept>

namespace kmsh {

double donaldson_psi(double t1, double t2) {
  const double d = t2 - t1;
  if (std::abs(d) < 1e-4) return 0.5 + d / 6 + d * d / 24 + d * d * d / 120;
  return (std::expm1(d) - d) / (d * d);
}

double quad_weight(const LogPolarGrid& g, int i) {
  double wx = (i == 0 || i == g.n_rad - 1) ? 0.5 : 1.0;
  return wx * g.hx * g.hy;
}

DonaldsonValue donaldson(const InducedOps& o1, const MatrixField& K1, const MatrixField& P2, const ConnectionModel& conn,
                         const KahlerWeight& w) {
  const auto& g = o1.P.grid();
  const int d = o1.P.dim();
  const cplx lam = conn.lambda;
  // the constant path: zero by definition, not up to rounding
  bool same = true;
  for (std::size_t k = 0; k < g.size() && same; ++k) same = o1.P[k] == P2[k];
  if (same) return {};
  MatrixField S = o1.Pinv * P2;
  MatrixField s(g, d);
  std::vector<RVec> kap(g.size());
  std::vector<Mat> T(g.size()), Ti(g.size());
  parallel_points(g.size(), [&](std::size_t k) {
    self_adjoint_eigen(S[k], o1.P[k], kap[k], T[k], Ti[k]);
    if (kap[k].minCoeff() <= 0) throw std::invalid_argument("transition endomorphism is not positive");
    RVec lg = kap[k].array().log();
    kap[k] = lg;
    s[k] = T[k] * lg.cast<cplx>().asDiagonal() * Ti[k];
  });
  MatrixField sw = d_w(s), swb = d_wbar(s);
  DonaldsonValue out;
  cplx total = 0;
  for (int i = 0; i < g.n_rad; ++i) {
    const double q = quad_weight(g, i);
    const double vol = g.r(i) * g.r(i) * w(g.r(i));
    for (int j = 0; j < g.n_ang; ++j) {
      const std::size_t k = g.idx(i, j);
      total += q * vol * (s[k] * K1[k]).trace();
      Mat a = Ti[k] * (lam * sw[k] + o1.A[k] * s[k] - s[k] * o1.A[k]) * T[k];
      Mat b = Ti[k] * swb[k] * T[k];
      double quad = 0;
      for (int p = 0; p < d; ++p)
        for (int r = 0; r < d; ++r) quad += donaldson_psi(kap[k](r), kap[k](p)) * (std::norm(a(p, r)) + std::norm(b(p, r)));
      total += q * quad;
      out.s_l1 += q * vol * kap[k].norm();
    }
  }
  out.value = total.real();
  out.imag_residual = total.imag();
  return out;
}

DonaldsonValue donaldson(const GridMetricField& H1, const GridMetricField& H2, const ConnectionModel& conn,
                         const KahlerWeight& w) {
  InducedOps o1 = induced_ops(H1, conn);
  MatrixField K1 = lambda_G(pseudo_curvature(o1, conn.lambda), w);
  return donaldson(o1, K1, H2.P(), conn, w);
}

}  // namespace kmsh
