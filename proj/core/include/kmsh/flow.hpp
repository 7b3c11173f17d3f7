#pragma once

#include "kmsh/donaldson.hpp"
#include "kmsh/model.hpp"

#include <string>
#include <vector>

namespace kmsh {

enum class Stepper {
  // (I - dt D Delta) sigma = -dt sqrt(-1) Lambda G^perp, then h <- h exp(sigma); D Delta linearizes Lambda G.
  semi_implicit,
  // h <- h exp(-dt sqrt(-1) Lambda G^perp)
  explicit_euler,
};

struct FlowConfig {
  LogPolarGrid grid = LogPolarGrid::make(0.1, 0.9, 64, 64);
  cplx lambda{1.0};
  double eps = 0;
  double eta = 0;
  double dt = 1e-3;
  int steps = 500;
  Stepper stepper = Stepper::semi_implicit;
  // Guard: dt * sup |sqrt(-1) Lambda G^perp| <= guard.
  double guard = 0.1;
  // Record the direct M(h0, h_t) every `record_every` steps (always at the last one).
  int record_every = 1;
};

struct FlowRecord {
  int step = 0;
  double t = 0;
  // max |det s_t - 1| after renormalization, and the drift before it
  double det_residual = 0;
  double det_drift = 0;
  // M(h0, h_t); NaN on steps where it is not recorded
  double donaldson = 0;
  // running sum of M(h_k, h_(k+1))
  double donaldson_cumulative = 0;
  double lambdaG_perp_l2 = 0;
  double sup_log_s = 0;
};

struct FlowResult {
  GridMetricField H;
  double t = 0;
  std::vector<FlowRecord> trace;
  bool aborted = false;
  std::string message;
  // Fit of sup|log s_t| <= C1 + C2 M(h0, h_t); reported only.
  double fit_C1 = 0;
  double fit_C2 = 0;
};

// Throws std::invalid_argument if the configuration fails validation or the stability guard.
FlowResult heat_flow(const FlowConfig& config, const GridMetricField& initial, const ConnectionModel& conn);

// Trace-free perturbation H0 exp(u) of the rank 2 model: u = P0^(-1/2) U P0^(1/2) with
// U = amp sin(pi (x - x0)/(x1 - x0)) [[cos y, sin y], [sin y, -cos y]], vanishing on the radial ends.
GridMetricField perturbed_model(const HarmonicModel& model, const LogPolarGrid& g, double amp);

// sqrt(-1) Lambda G^perp with the two boundary rows set to zero, and its L2 norm.
MatrixField flow_curvature(const InducedOps& o, cplx lambda, const KahlerWeight& w);
double l2_norm(const MatrixField& K, const MatrixField& P, const KahlerWeight& w);

}  // namespace kmsh
