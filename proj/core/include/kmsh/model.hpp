#pragma once

#include "kmsh/speccalc.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace kmsh {

struct ModelScalars {
  double L = 0;
  double K = 1;
  double M = 1;
  // Evaluated without cancellation.
  double K_minus_1 = 0;
  double one_minus_M = 0;
};

ModelScalars model_scalars(cplx z, double eps);

struct HarmonicModel {
  int rank = 2;
  ConnectionModel conn;
  std::function<Mat(cplx)> metric;  // H(z)
  GridMetricField sample(const LogPolarGrid& g) const;
};

// Frame u_1, u_2 with D u_1 = u_2 dz/z; metric of the family h_eps. Accepts 0 <= eps <= 1/2.
HarmonicModel rank2_model(cplx lambda, double eps);

// Sym^(l-1) of the rank 2 model in the symmetrized-tensor frame e_m = sym(u_1^(k-m) u_2^m), k = l - 1.
HarmonicModel sym_power_model(int l, cplx lambda, double eps);
// Induced metric on the symmetrized-tensor frame of Sym^k.
Mat sym_power_metric(const Mat& H, int k);

struct InequalityViolation {
  std::string lemma;
  double log_r = 0;
  double eps = 0;
  double lhs = 0;
  double rhs = 0;
};

struct InequalityReport {
  long samples = 0;
  std::vector<InequalityViolation> violations;
  // Largest observed ratios against the constants 1/2 and 3 (finite as eps -> 0).
  double max_K_ratio = 0;
  double max_M_ratio = 0;
};

// Uniform samples log|z| in [-12, -0.01], eps in (0, 1/2).
InequalityReport inequality_scan(long samples, std::uint64_t seed = 0);

// sup over u in (0, 1) of u^b (-log u^2)^d.
double power_log_sup(double b, int d);

struct UniformBoundRow {
  double eps = 0;
  double sup = 0;
  double r_at_sup = 0;
};

struct UniformBoundReport {
  std::vector<UniformBoundRow> rows;
  bool under_resolved = false;
};

// sup over interior rows of |dbar_eps theta_eps|, operator norm for h_eps divided by the omega_eps density.
UniformBoundReport uniform_bound_scan(const std::vector<double>& eps_list, const LogPolarGrid& g, cplx lambda = 1.0);

}  // namespace kmsh
