#include "kmsh/model.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace kmsh;

namespace {

// Sum-of-words frame of Sym^k inside the k-fold tensor power of C^2.
std::vector<int> words_with(int k, int ones) {
  std::vector<int> out;
  for (int w = 0; w < (1 << k); ++w)
    if (__builtin_popcount(static_cast<unsigned>(w)) == ones) out.push_back(w);
  return out;
}

cplx tensor_pairing(const Mat& H, int k, int a, int b) {
  cplx p = 1;
  for (int t = 0; t < k; ++t) p *= H((a >> t) & 1, (b >> t) & 1);
  return p;
}

double binom(int n, int r) {
  double b = 1;
  for (int i = 1; i <= r; ++i) b = b * (n - r + i) / i;
  return b;
}

}  // namespace

TEST_CASE("model scalars") {
  ModelScalars m0 = model_scalars(0.5, 0.0);
  CHECK(m0.L == doctest::Approx(-std::log(0.25)).epsilon(1e-12));
  CHECK(m0.K == 1);
  CHECK(m0.M == 1);
  ModelScalars m1 = model_scalars(0.5, 0.1);
  CHECK(m1.L == doctest::Approx(-2 * std::sinh(0.1 * std::log(0.5)) / 0.1).epsilon(1e-12));
  CHECK(m1.L == doctest::Approx(1.3874048).epsilon(1e-7));
  CHECK(m1.K == doctest::Approx(std::cosh(0.1 * std::log(0.5))).epsilon(1e-12));
  const double t = 0.4 * std::log(0.5);
  CHECK(m1.M == doctest::Approx(std::exp(t) * (1 - t)).epsilon(1e-12));
  // both branches agree near the switch |eps log r| = 1e-4
  const double x = std::log(0.3);
  for (double e : {0.99e-4 / -x, 1.01e-4 / -x}) {
    ModelScalars s = model_scalars(0.3, e);
    CHECK(s.L == doctest::Approx(-2 * std::sinh(e * x) / e).epsilon(1e-14));
    CHECK(s.K_minus_1 == doctest::Approx(std::cosh(e * x) - 1).epsilon(1e-6));
    CHECK(s.one_minus_M > 0);
    CHECK(s.one_minus_M == doctest::Approx(8 * e * e * x * x).epsilon(1e-3));
  }
  CHECK_THROWS(model_scalars(1.0, 0.1));
  CHECK_THROWS(model_scalars(0.0, 0.1));
  CHECK_THROWS(model_scalars(0.5, -0.1));
}

TEST_CASE("rank 2 model metric") {
  const cplx lam(0.7, 0.4);
  const double c = 1 + std::norm(lam);
  for (double e : {0.0, 0.1, 0.5}) {
    HarmonicModel m = rank2_model(lam, e);
    CHECK(m.rank == 2);
    CHECK(m.conn.residue(1, 0) == cplx(1));
    CHECK(m.conn.residue(0, 1) == cplx(0));
    for (double r : {0.01, 0.2, 0.7}) {
      Mat H = m.metric(cplx(r, 0) * std::polar(1.0, 0.3));
      ModelScalars s = model_scalars(r, e);
      CHECK((H - H.adjoint()).norm() < 1e-14);
      CHECK(std::abs(H.determinant() - (c - std::norm(lam) * s.M * s.M)) < 1e-12);
      CHECK(H.determinant().real() > 0);
    }
  }
  CHECK(std::abs(rank2_model(lam, 0.0).metric(0.3).determinant() - 1.0) < 1e-12);
  CHECK_THROWS(rank2_model(0.0, 0.1));
  CHECK_THROWS(rank2_model(lam, 0.6));
}

TEST_CASE("symmetric power metric against the tensor power") {
  Mat H(2, 2);
  H << 2.0, cplx(0.3, -0.5), cplx(0.3, 0.5), 1.5;
  for (int k = 1; k <= 5; ++k) {
    Mat S = sym_power_metric(H, k);
    double dev = 0;
    for (int m = 0; m <= k; ++m)
      for (int q = 0; q <= k; ++q) {
        cplx v = 0;
        for (int a : words_with(k, m))
          for (int b : words_with(k, q)) v += tensor_pairing(H, k, a, b);
        dev = std::max(dev, std::abs(v - S(m, q)));
      }
    CHECK(dev < 1e-10);
    double prod = 1;
    for (int m = 0; m <= k; ++m) prod *= binom(k, m);
    cplx ratio = S.determinant() / prod / std::pow(H.determinant(), k * (k + 1) / 2);
    CHECK(std::abs(ratio - 1.0) < 1e-10);
  }
}

TEST_CASE("symmetric power residue is induced from the rank 2 one") {
  for (int l = 3; l <= 5; ++l) {
    const int k = l - 1;
    HarmonicModel m = sym_power_model(l, 1.0, 0.0);
    // N on the tensor power acts by u1 -> u2 in each slot
    for (int q = 0; q < k; ++q) {
      std::vector<cplx> img(1 << k, 0.0);
      for (int a : words_with(k, q))
        for (int t = 0; t < k; ++t)
          if (!((a >> t) & 1)) img[a | (1 << t)] += 1.0;
      for (int b : words_with(k, q + 1)) CHECK(img[b] == m.conn.residue(q + 1, q));
    }
    CHECK((m.conn.residue.diagonal()).norm() == 0);
  }
  CHECK_THROWS(sym_power_model(1, 1.0, 0.0));
  CHECK_THROWS(sym_power_model(9, 1.0, 0.0));
}

TEST_CASE("the symmetric power of the harmonic model is harmonic") {
  HarmonicModel m = sym_power_model(4, cplx(0.7, 0.4), 0.0);
  double prev = 0;
  for (int n : {32, 64, 128}) {
    auto g = LogPolarGrid::make(0.1, 0.6, n, 16);
    auto o = induced_ops(m.sample(g), m.conn);
    MatrixField G = pseudo_curvature(o, m.conn.lambda);
    double s = 0;
    for (int i = 1; i < n - 1; ++i)
      for (int j = 0; j < g.n_ang; ++j) s = std::max(s, G(i, j).norm());
    if (prev > 0) CHECK(prev / s > 3.0);
    prev = s;
  }
}

TEST_CASE("scalar inequalities and the power-log bound") {
  InequalityReport r = inequality_scan(20000, 7);
  CHECK(r.samples == 20000);
  CHECK(r.violations.empty());
  CHECK(r.max_K_ratio <= 0.5 + 1e-12);
  CHECK(r.max_M_ratio <= 3.0 + 1e-12);
  CHECK(r.max_K_ratio > 0.4);
  for (double b : {1.0, 2.5, 4.0})
    for (int d : {1, 2, 3}) {
      double s = 0;
      for (int k = 1; k < 200000; ++k) {
        double u = k / 200000.0;
        s = std::max(s, std::pow(u, b) * std::pow(-std::log(u * u), d));
      }
      CHECK(power_log_sup(b, d) == doctest::Approx(s).epsilon(1e-4));
    }
  CHECK(power_log_sup(2.0, 0) == 1.0);
}

TEST_CASE("uniform bound scan flags coarse grids") {
  auto g = LogPolarGrid::make(0.05, 0.9, 48, 8);
  UniformBoundReport r = uniform_bound_scan({0.1, 0.3}, g, 1.0);
  CHECK(r.under_resolved);
  REQUIRE(r.rows.size() == 2);
  for (const auto& row : r.rows) {
    CHECK(std::isfinite(row.sup));
    CHECK(row.r_at_sup >= 0.05);
    CHECK(row.r_at_sup <= 0.9);
  }
  CHECK_THROWS(uniform_bound_scan({0.0}, g, 1.0));
}
