#pragma once

#include "kmsh/grid.hpp"

#include <functional>

namespace kmsh {

// Metrics are handled through P = conj(H), H_ij = h(v_i, v_j); the h-adjoint of X is P^-1 X^* P.
// A matrix s is self-adjoint for P when s = P^-1 s^* P.
bool is_self_adjoint(const Mat& s, const Mat& P, double tol = 1e-10);

Mat scalar_calculus(const std::function<double(double)>& phi, const Mat& s, const Mat& P);
// Entry (i, j) of A, in an eigenbasis of s, scaled by psi(kappa_i, kappa_j).
Mat two_var_calculus(const std::function<double(double, double)>& psi, const Mat& s, const Mat& A, const Mat& P);

// Eigenvalues of s and the frame T (s = T diag T^-1) with T^-1 = T^* P, i.e. h-orthonormal columns.
void self_adjoint_eigen(const Mat& s, const Mat& P, RVec& kappa, Mat& T, Mat& Tinv);

struct GridMetricField {
  LogPolarGrid grid;
  MatrixField H;

  // Throws if some sample is not Hermitian positive definite.
  void validate() const;
  MatrixField P() const { return conj_field(H); }
};

struct ConnectionModel {
  cplx lambda{1.0};
  // Coefficient of dz/z.
  Mat residue;
  // Regular part: the coefficient of dz. Empty means zero.
  std::function<Mat(cplx)> A;

  int dim() const { return static_cast<int>(residue.rows()); }
  // Coefficient of dw = dz/z.
  Mat A_w(cplx z) const;
  MatrixField A_w_field(const LogPolarGrid& g) const;
};

// Coefficients in log coordinates w = log z: a (1,0)-form is X dw, a (0,1)-form Y dwbar.
// The dz coefficient is X/z and the dzbar coefficient Y/zbar.
struct InducedOps {
  MatrixField P;
  MatrixField Pinv;
  MatrixField A;          // A_w
  MatrixField B;          // delta'_h = d' + B dw, B = P^-1 P_w
  MatrixField C;          // delta''_h = lambda-bar dbar + C dwbar
  MatrixField theta;      // theta_h = Theta dw
  MatrixField theta_dag;  // theta_h^dagger = Theta^dagger dwbar
  MatrixField dbar_h;     // dbar_h = dbar + Gamma dwbar
  MatrixField d_h;        // d_h = d + Pi dw
};

InducedOps induced_ops(const GridMetricField& Hf, const ConnectionModel& conn);

enum class Scheme {
  // Expands dbar(P^-1 P_w) and uses the compact second difference for P_{w wbar}.
  compact,
  // Differentiates the sampled theta again.
  nested,
};

// dz^dzbar coefficient of G(h, D^lambda).
MatrixField pseudo_curvature(const GridMetricField& Hf, const ConnectionModel& conn, Scheme scheme = Scheme::compact);
MatrixField pseudo_curvature(const InducedOps& ops, cplx lambda, Scheme scheme = Scheme::compact);

// w(r) = eps^2 r^(eps - 2) + 1; eps = 0 gives the flat form dz dzbar.
struct KahlerWeight {
  double eps = 0;
  double operator()(double r) const;
};

// sqrt(-1) Lambda_omega G: the dz^dzbar coefficient divided by w.
MatrixField lambda_G(const MatrixField& G_zzbar, const KahlerWeight& w);
MatrixField trace_free(const MatrixField& f);

struct FlatnessReport {
  // (2,0) and (0,2) identities vanish by type on a curve.
  double d_h_squared_theta_squared = 0;
  double dbar_h_squared_theta_dag_squared = 0;
  // lambda-bar^-1 d_h theta^dagger + lambda^-1 dbar_h theta
  double mixed_identity = 0;
  // [d_h, dbar_h] + [theta, theta^dagger]
  double kahler_identity = 0;
  // tr G - (1+|lambda|^2) tr R(d'', h)
  double trace_identity_R = 0;
  // (1+|lambda|^2) tr R + (1+|lambda|^2)^2/lambda dbar tr theta
  double trace_identity_theta = 0;
  // sup |dbar_h theta|, zero exactly for harmonic metrics
  double harmonicity = 0;
  // theta^2 = 0 by type; the dim 2 identity is not exercised on curves.
  bool dim2_identity_applicable = false;
};

// Sups in dz^dzbar units over radial rows [margin, n_rad - 1 - margin].
FlatnessReport flatness_residuals(const GridMetricField& Hf, const ConnectionModel& conn, int margin = 2);

struct MetricChangeReport {
  // sup | Delta s - s (K2 - K1) - sqrt(-1) Lambda D s s^-1 D* s |
  double equation_residual = 0;
  // sup of Delta log tr s - |K1|_h1 - |K2|_h2 (nonpositive up to discretization)
  double inequality_excess = 0;
  double laplacian_sup = 0;
};

MetricChangeReport metric_change_residual(const GridMetricField& H1, const GridMetricField& H2,
                                          const ConnectionModel& conn, const KahlerWeight& w, int margin = 2);

}  // namespace kmsh
