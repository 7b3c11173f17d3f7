#pragma once

#include "kmsh/speccalc.hpp"

namespace kmsh {

// (e^(t2 - t1) - (t2 - t1) - 1) / (t2 - t1)^2, equal to 1/2 on the diagonal.
double donaldson_psi(double t1, double t2);

struct DonaldsonValue {
  double value = 0;
  double imag_residual = 0;
  // Integral of |s|_h1 dvol, for the lower bound -B * int |s|.
  double s_l1 = 0;
};

// M(h1, h2) for h2 = h1 e^s; trapezoid in x, uniform in y. Volume dvol = w |z|^2 dx dy.
DonaldsonValue donaldson(const GridMetricField& H1, const GridMetricField& H2, const ConnectionModel& conn,
                         const KahlerWeight& w);

// Same with the curvature term sqrt(-1) Lambda G(h1) already computed.
DonaldsonValue donaldson(const InducedOps& o1, const MatrixField& K1, const MatrixField& P2, const ConnectionModel& conn,
                         const KahlerWeight& w);

// Trapezoid weights in x times hx hy.
double quad_weight(const LogPolarGrid& g, int i);

}  // namespace kmsh
