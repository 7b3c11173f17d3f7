#pragma once

#include "kmsh/speccalc.hpp"

#include <vector>

namespace kmsh {

struct BoundaryIntegral {
  // (sqrt(-1)/2pi) int dbar tr theta over the annulus, by quadrature of the sampled derivative
  cplx lhs;
  // the same through Stokes: difference of circle integrals of tr theta
  cplx lhs_circle;
  // lambda (1+|lambda|^2)^-1 (lambda^-1 tr Res + sum a)
  cplx rhs;
};

// Weights a(v_i) of the product-form metric h(v_i, v_i) = |z|^(-2 a_i) on the innermost rows.
// Throws std::invalid_argument if the sampled metric is not of that form there.
BoundaryIntegral boundary_integral(const GridMetricField& Hf, const ConnectionModel& conn,
                                   const std::vector<double>& weights, int product_rows = 3);

// Smooth step: 1 for t <= 0, 0 for t >= 1.
double cutoff(double t);

struct BoundaryFixture {
  ConnectionModel conn;
  GridMetricField H;
  std::vector<double> weights;
};

// Rank 1: A = chi(x) alpha dz/z, H = |z|^(-2 a chi(x)); chi switches off across the middle of the annulus.
BoundaryFixture rank1_boundary_fixture(const LogPolarGrid& g, double a, cplx alpha, cplx lambda);
// Rank 2: A = chi N dz/z with N nilpotent, weights 0, H = identity plus an off-diagonal bump inside the annulus.
BoundaryFixture rank2_nilpotent_fixture(const LogPolarGrid& g, cplx lambda);

}  // namespace kmsh
