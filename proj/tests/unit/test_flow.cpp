#include "kmsh/boundary.hpp"
#include "kmsh/donaldson.hpp"
#include "kmsh/flow.hpp"

#include <doctest.h>

#include <cmath>

using namespace kmsh;

namespace {

// P1 e^(tU') with U' = P1^(-1/2) U P1^(1/2), returned as H.
GridMetricField times_exp(const GridMetricField& H1, const MatrixField& U, double t) {
  MatrixField P1 = H1.P();
  GridMetricField out{H1.grid, MatrixField::generate(H1.grid, 2, [&](int i, int j) -> Mat {
                        Mat r, ir;
                        sqrt_pair(P1(i, j), r, ir);
                        Mat P = r * herm_exp(t * U(i, j)) * r;
                        return Mat(0.5 * (P + P.adjoint())).conjugate();
                      })};
  return out;
}

MatrixField bump(const LogPolarGrid& g) {
  const double x0 = g.x(0), x1 = g.x(g.n_rad - 1);
  return MatrixField::generate(g, 2, [&](int i, int j) -> Mat {
    double b = std::sin(M_PI * (g.x(i) - x0) / (x1 - x0));
    Mat U(2, 2);
    U << b * std::cos(g.y(j)), cplx(0.3 * b, 0.2 * b), cplx(0.3 * b, -0.2 * b), -b;
    return U;
  });
}

FlowConfig small_config() {
  FlowConfig cfg;
  cfg.grid = LogPolarGrid::make(0.1, 0.9, 24, 16);
  cfg.lambda = 1.0;
  cfg.dt = 1e-3;
  cfg.steps = 30;
  cfg.record_every = 10;
  return cfg;
}

}  // namespace

TEST_CASE("donaldson psi") {
  CHECK(donaldson_psi(0.3, 0.3) == 0.5);
  CHECK(donaldson_psi(0, 1) == doctest::Approx(std::exp(1.0) - 2).epsilon(1e-14));
  CHECK(donaldson_psi(1, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  for (double d : {0.99e-4, 1.01e-4, -0.99e-4, -1.01e-4}) {
    double exact = (std::expm1(d) - d) / (d * d);
    CHECK(donaldson_psi(0.2, 0.2 + d) == doctest::Approx(exact).epsilon(1e-7));
  }
  for (double a = -3; a < 3; a += 0.37)
    for (double b = -3; b < 3; b += 0.41) CHECK(donaldson_psi(a, b) > 0);
}

TEST_CASE("M(h, h) is zero and M has the curvature term as its derivative") {
  HarmonicModel m = rank2_model(cplx(0.7, 0.4), 0.0);
  auto g = LogPolarGrid::make(0.1, 0.6, 48, 32);
  auto H1 = perturbed_model(m, g, 0.3);
  KahlerWeight w{0};
  CHECK(donaldson(H1, H1, m.conn, w).value == 0);

  InducedOps o1 = induced_ops(H1, m.conn);
  MatrixField K1 = lambda_G(pseudo_curvature(o1, m.conn.lambda), w);
  MatrixField U = bump(g);
  double lin = 0;
  for (int i = 0; i < g.n_rad; ++i)
    for (int j = 0; j < g.n_ang; ++j) {
      Mat r, ir;
      sqrt_pair(o1.P(i, j), r, ir);
      lin += quad_weight(g, i) * g.r(i) * g.r(i) * (ir * U(i, j) * r * K1(i, j)).trace().real();
    }
  const double t = 1e-3;
  DonaldsonValue v1 = donaldson(H1, times_exp(H1, U, t), m.conn, w);
  DonaldsonValue v2 = donaldson(H1, times_exp(H1, U, 2 * t), m.conn, w);
  CHECK(std::abs(v1.imag_residual) < 1e-10);
  double q1 = v1.value - t * lin, q2 = v2.value - 2 * t * lin;
  // the remainder is a positive quadratic form
  CHECK(q1 > 0);
  CHECK(q2 / q1 == doctest::Approx(4).epsilon(0.01));
}

TEST_CASE("a short heat flow keeps det fixed and decreases M") {
  FlowConfig cfg = small_config();
  HarmonicModel m = rank2_model(1.0, 0.0);
  FlowResult r = heat_flow(cfg, perturbed_model(m, cfg.grid, 0.2), m.conn);
  REQUIRE_FALSE(r.aborted);
  REQUIRE(r.trace.size() == 31);
  double prev = 0;
  for (const auto& x : r.trace) {
    CHECK(x.det_residual < 1e-10);
    CHECK(x.donaldson_cumulative <= prev + 1e-12);
    prev = x.donaldson_cumulative;
    if (x.step % 10 == 0) {
      CHECK_FALSE(std::isnan(x.donaldson));
    } else {
      CHECK(std::isnan(x.donaldson));
    }
  }
  CHECK(r.trace.back().lambdaG_perp_l2 < r.trace.front().lambdaG_perp_l2);
  CHECK(r.trace.back().donaldson < 0);
  CHECK(r.t == doctest::Approx(0.03));
  r.H.validate();
}

TEST_CASE("explicit and semi-implicit steppers agree for small steps") {
  FlowConfig cfg = small_config();
  cfg.dt = 1e-5;
  cfg.steps = 5;
  HarmonicModel m = rank2_model(1.0, 0.0);
  auto H0 = perturbed_model(m, cfg.grid, 0.2);
  FlowResult a = heat_flow(cfg, H0, m.conn);
  cfg.stepper = Stepper::explicit_euler;
  FlowResult b = heat_flow(cfg, H0, m.conn);
  double diff = 0, move = 0;
  for (std::size_t k = 0; k < cfg.grid.size(); ++k) {
    diff = std::max(diff, (a.H.H[k] - b.H.H[k]).norm());
    move = std::max(move, (a.H.H[k] - H0.H[k]).norm());
  }
  CHECK(move > 0);
  CHECK(diff < 0.1 * move);
}

TEST_CASE("the harmonic metric is nearly stationary") {
  FlowConfig cfg = small_config();
  cfg.grid = LogPolarGrid::make(0.1, 0.6, 32, 8);
  HarmonicModel m = rank2_model(1.0, 0.0);
  FlowResult r = heat_flow(cfg, m.sample(cfg.grid), m.conn);
  REQUIRE_FALSE(r.aborted);
  CHECK(r.trace.back().sup_log_s < 1e-3);
}

TEST_CASE("flow configuration is validated") {
  HarmonicModel m = rank2_model(1.0, 0.0);
  FlowConfig cfg = small_config();
  auto H0 = perturbed_model(m, cfg.grid, 0.2);
  FlowConfig bad = cfg;
  bad.dt = 10;
  CHECK_THROWS_AS(heat_flow(bad, H0, m.conn), std::invalid_argument);
  bad = cfg;
  bad.dt = 0;
  CHECK_THROWS_AS(heat_flow(bad, H0, m.conn), std::invalid_argument);
  bad = cfg;
  bad.eps = 0.1;
  bad.eta = 1.0;
  CHECK_THROWS_AS(heat_flow(bad, H0, m.conn), std::invalid_argument);
  bad.eta = 2.5;
  CHECK_NOTHROW(heat_flow(bad, rank2_model(1.0, 0.1).sample(cfg.grid), m.conn));
  bad = cfg;
  bad.grid = LogPolarGrid::make(0.1, 0.9, 16, 16);
  CHECK_THROWS_AS(heat_flow(bad, H0, m.conn), std::invalid_argument);
  CHECK_THROWS(perturbed_model(sym_power_model(3, 1.0, 0.0), cfg.grid, 0.1));
}

TEST_CASE("boundary integral on the fixtures") {
  auto g = LogPolarGrid::make(0.1, 0.9, 128, 64);
  auto f1 = rank1_boundary_fixture(g, 0.5, 0.0, 1.0);
  auto b1 = boundary_integral(f1.H, f1.conn, f1.weights);
  CHECK(std::abs(b1.rhs - 0.25) < 1e-14);
  CHECK(std::abs(b1.lhs - b1.rhs) < 0.02 * 0.25);
  CHECK(std::abs(b1.lhs_circle - b1.rhs) < 0.02 * 0.25);

  const cplx lam(0.7, 0.4), alpha(0.3, 0.2);
  auto f2 = rank1_boundary_fixture(g, 0.25, alpha, lam);
  auto b2 = boundary_integral(f2.H, f2.conn, f2.weights);
  const cplx expect = (alpha + lam * 0.25) / (1 + std::norm(lam));
  CHECK(std::abs(b2.rhs - expect) < 1e-14);
  CHECK(std::abs(b2.lhs - expect) < 0.02 * std::abs(expect));

  auto f3 = rank2_nilpotent_fixture(g, 1.0);
  auto b3 = boundary_integral(f3.H, f3.conn, f3.weights);
  CHECK(std::abs(b3.rhs) < 1e-14);
  CHECK(std::abs(b3.lhs) < 5e-3);

  CHECK_THROWS_AS(boundary_integral(f1.H, f1.conn, {0.3}), std::invalid_argument);
  CHECK(cutoff(-1) == 1);
  CHECK(cutoff(2) == 0);
  CHECK(cutoff(0.5) == doctest::Approx(0.5));
}
