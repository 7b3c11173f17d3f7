#include "kmsh/boundary.hpp"

#include "kmsh/donaldson.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kmsh {

double cutoff(double t) {
  if (t <= 0) return 1.0;
  if (t >= 1) return 0.0;
  auto f = [](double s) { return s <= 0 ? 0.0 : std::exp(-1.0 / s); };
  return f(1 - t) / (f(1 - t) + f(t));
}

BoundaryIntegral boundary_integral(const GridMetricField& Hf, const ConnectionModel& conn,
                                   const std::vector<double>& weights, int product_rows) {
  const auto& g = Hf.grid;
  const int d = conn.dim();
  if (static_cast<int>(weights.size()) != d) throw std::invalid_argument("one weight per frame vector is required");
  for (int i = 0; i < product_rows; ++i)
    for (int j = 0; j < g.n_ang; ++j) {
      const Mat& h = Hf.H(i, j);
      for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q) {
          double expect = p == q ? std::pow(g.r(i), -2 * weights[p]) : 0.0;
          if (std::abs(h(p, q) - expect) > 1e-9 * std::max(1.0, std::abs(expect)))
            throw std::invalid_argument("metric is not of product form at grid sample (" + std::to_string(i) + ", " +
                                        std::to_string(j) + ")");
        }
    }
  InducedOps o = induced_ops(Hf, conn);
  MatrixField tr = trace_field(o.theta);
  MatrixField dtr = d_wbar(tr);
  const double pi = std::numbers::pi;
  BoundaryIntegral out;
  cplx area = 0;
  for (int i = 0; i < g.n_rad; ++i)
    for (int j = 0; j < g.n_ang; ++j) area += quad_weight(g, i) * dtr(i, j)(0, 0);
  // dbar tr theta = 2i (d_wbar tr Theta) dx^dy
  out.lhs = -area / pi;
  cplx circ = 0;
  for (int j = 0; j < g.n_ang; ++j) circ += (tr(g.n_rad - 1, j)(0, 0) - tr(0, j)(0, 0)) * g.hy;
  out.lhs_circle = -circ / (2 * pi);
  const cplx lam = conn.lambda;
  double wsum = 0;
  for (double a : weights) wsum += a;
  out.rhs = lam / (1 + std::norm(lam)) * (conn.residue.trace() / lam + wsum);
  return out;
}

namespace {

double chi_at(const LogPolarGrid& g, double x) {
  const double x0 = g.x(0), x1 = g.x(g.n_rad - 1);
  const double xa = x0 + 0.3 * (x1 - x0), xb = x0 + 0.7 * (x1 - x0);
  return cutoff((x - xa) / (xb - xa));
}

}  // namespace

BoundaryFixture rank1_boundary_fixture(const LogPolarGrid& g, double a, cplx alpha, cplx lambda) {
  BoundaryFixture f;
  f.weights = {a};
  f.conn.lambda = lambda;
  f.conn.residue = Mat::Constant(1, 1, alpha);
  f.conn.A = [g, alpha](cplx z) {
    double chi = chi_at(g, std::log(std::abs(z)));
    return Mat::Constant(1, 1, (chi - 1.0) * alpha / z);
  };
  f.H.grid = g;
  f.H.H = MatrixField::generate(g, 1, [&](int i, int) -> Mat {
    return Mat::Constant(1, 1, std::exp(-2 * a * chi_at(g, g.x(i)) * g.x(i)));
  });
  return f;
}

BoundaryFixture rank2_nilpotent_fixture(const LogPolarGrid& g, cplx lambda) {
  BoundaryFixture f;
  f.weights = {0.0, 0.0};
  f.conn.lambda = lambda;
  Mat N = Mat::Zero(2, 2);
  N(1, 0) = 1.0;
  f.conn.residue = N;
  f.conn.A = [g, N](cplx z) -> Mat {
    double chi = chi_at(g, std::log(std::abs(z)));
    return (chi - 1.0) * N / z;
  };
  f.H.grid = g;
  f.H.H = MatrixField::generate(g, 2, [&](int i, int j) -> Mat {
    double chi = chi_at(g, g.x(i));
    cplx b = 1.2 * chi * (1 - chi) * std::exp(cplx(0, g.y(j)));
    Mat h = Mat::Identity(2, 2);
    h(0, 1) = b;
    h(1, 0) = std::conj(b);
    return h;
  });
  return f;
}

}  // namespace kmsh
