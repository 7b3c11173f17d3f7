#pragma once

#include "kmsh/pardata.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace kmsh {

using CMat = Eigen::MatrixXcd;
using cplx = std::complex<double>;

struct UnipotentLog {
  // Distinct eigenvalues omega of M with a basis (columns) of each generalized eigenspace.
  std::vector<std::pair<cplx, CMat>> eigen;
  CMat Ms;
  CMat Mu;
  CMat N;
};

// M = Ms Mu, N = -(2 pi i)^-1 log Mu. Eigenvalues closer than `tol` (relative) are merged.
UnipotentLog unipotent_log(const CMat& M, double tol = 1e-8);

// The alpha with exp(-2 pi i alpha) = omega and 0 <= Re alpha < 1.
cplx alpha_of(cplx omega);

// Continued-fraction rationalization of the exponent of a numeric omega.
Omega omega_from_value(cplx omega, long max_den = 1000000);

struct MonodromyDatum {
  CMat M;
  // Weight b of each basis vector (column index of M).
  std::vector<Rational> b;
};

struct FlatLocalDatum {
  Rational c;
  std::vector<double> a;
  std::vector<long> n;
  std::vector<cplx> residue;  // alpha - n
  CMat N;
};

FlatLocalDatum phi_local(const MonodromyDatum& datum, const Rational& c, double tol = 1e-8);

// Exact version on one graded piece: (b, omega) to the canonical (a, alpha - n).
KmsPair phi_local(const LsPair& u, const Rational& c);
KmsPoint phi_local(const LsPoint& u, const Rational& c);

struct LsImage {
  Rational b;
  Omega omega;
};

// (a, alpha) to (a + Re alpha, exp(-2 pi i alpha)).
LsImage phi_inverse_kms(const Rational& a, const QComplex& alpha);

// Transport to the flat side for the lambda-connection; residues stored so that Re(lambda^-1 alpha) + a = b.
ParabolicFlatData kms_table_transport(const FilteredLocalSystemData& ls, const QComplex& lambda,
                                      const std::map<Label, Rational>& c);

// Reverse direction, through the lambda = 1 residues alpha / lambda.
FilteredLocalSystemData kms_table_inverse(const ParabolicFlatData& d);

// D'' + (lambda2/lambda1) D': residues scale by lambda2/lambda1.
ParabolicFlatData rescale_lambda(const ParabolicFlatData& d, const QComplex& lambda2);

}  // namespace kmsh
