#include "kmsh/grid.hpp"

#include "kmsh/parallel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kmsh {

LogPolarGrid LogPolarGrid::make(double r_min, double r_max, int n_rad, int n_ang) {
  if (!(r_min > 0 && r_min < r_max && r_max <= 1.0))
    throw std::invalid_argument("grid radii must satisfy 0 < r_min < r_max <= 1");
  if (n_rad < 8 || n_ang < 8) throw std::invalid_argument("grid needs at least 8 samples per direction");
  LogPolarGrid g;
  g.r_min = r_min;
  g.r_max = r_max;
  g.n_rad = n_rad;
  g.n_ang = n_ang;
  g.hx = (std::log(r_max) - std::log(r_min)) / (n_rad - 1);
  g.hy = 2.0 * std::numbers::pi / n_ang;
  return g;
}

double LogPolarGrid::x(int i) const { return std::log(r_min) + i * hx; }
double LogPolarGrid::y(int j) const { return j * hy; }
double LogPolarGrid::r(int i) const { return std::exp(x(i)); }
cplx LogPolarGrid::z(int i, int j) const { return std::exp(cplx(x(i), y(j))); }

void parallel_points(std::size_t n, const std::function<void(std::size_t)>& f) {
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) f(k);
  });
}

MatrixField::MatrixField(const LogPolarGrid& g, int dim) : g_(g), dim_(dim), v_(g.size(), Mat::Zero(dim, dim)) {}

MatrixField& MatrixField::operator+=(const MatrixField& o) {
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
  return *this;
}
MatrixField& MatrixField::operator-=(const MatrixField& o) {
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
  return *this;
}
MatrixField& MatrixField::operator*=(cplx s) {
  for (auto& m : v_) m *= s;
  return *this;
}

MatrixField operator+(MatrixField a, const MatrixField& b) { return a += b; }
MatrixField operator-(MatrixField a, const MatrixField& b) { return a -= b; }
MatrixField operator*(cplx s, MatrixField a) { return a *= s; }
MatrixField operator*(const MatrixField& a, const MatrixField& b) {
  return MatrixField::generate(a.grid(), a.dim(), [&](int i, int j) -> Mat { return a(i, j) * b(i, j); });
}

MatrixField d_x(const MatrixField& f) {
  const auto& g = f.grid();
  const int n = g.n_rad;
  const double h = g.hx;
  return MatrixField::generate(g, f.dim(), [&](int i, int j) -> Mat {
    if (i == 0) return (-3.0 * f(0, j) + 4.0 * f(1, j) - f(2, j)) / (2 * h);
    if (i == n - 1) return (3.0 * f(n - 1, j) - 4.0 * f(n - 2, j) + f(n - 3, j)) / (2 * h);
    return (f(i + 1, j) - f(i - 1, j)) / (2 * h);
  });
}

MatrixField d_y(const MatrixField& f) {
  const auto& g = f.grid();
  const int m = g.n_ang;
  return MatrixField::generate(g, f.dim(), [&](int i, int j) -> Mat {
    return (f(i, (j + 1) % m) - f(i, (j + m - 1) % m)) / (2 * g.hy);
  });
}

MatrixField d_xx(const MatrixField& f) {
  const auto& g = f.grid();
  const int n = g.n_rad;
  const double h2 = g.hx * g.hx;
  return MatrixField::generate(g, f.dim(), [&](int i, int j) -> Mat {
    if (i == 0) return (2.0 * f(0, j) - 5.0 * f(1, j) + 4.0 * f(2, j) - f(3, j)) / h2;
    if (i == n - 1) return (2.0 * f(n - 1, j) - 5.0 * f(n - 2, j) + 4.0 * f(n - 3, j) - f(n - 4, j)) / h2;
    return (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) / h2;
  });
}

MatrixField d_yy(const MatrixField& f) {
  const auto& g = f.grid();
  const int m = g.n_ang;
  const double h2 = g.hy * g.hy;
  return MatrixField::generate(g, f.dim(), [&](int i, int j) -> Mat {
    return (f(i, (j + 1) % m) - 2.0 * f(i, j) + f(i, (j + m - 1) % m)) / h2;
  });
}

namespace {

// (d_x + sign i d_y) / 2 in one pass.
MatrixField d_complex(const MatrixField& f, double sign) {
  const auto& g = f.grid();
  const int n = g.n_rad, m = g.n_ang;
  const double h = g.hx;
  const cplx iy(0, sign / (2 * g.hy));
  return MatrixField::generate(g, f.dim(), [&](int i, int j) -> Mat {
    Mat dx;
    if (i == 0)
      dx = (-3.0 * f(0, j) + 4.0 * f(1, j) - f(2, j)) / (2 * h);
    else if (i == n - 1)
      dx = (3.0 * f(n - 1, j) - 4.0 * f(n - 2, j) + f(n - 3, j)) / (2 * h);
    else
      dx = (f(i + 1, j) - f(i - 1, j)) / (2 * h);
    return 0.5 * dx + 0.5 * iy * (f(i, (j + 1) % m) - f(i, (j + m - 1) % m));
  });
}

}  // namespace

MatrixField d_w(const MatrixField& f) { return d_complex(f, -1.0); }
MatrixField d_wbar(const MatrixField& f) { return d_complex(f, 1.0); }

MatrixField d_wwbar(const MatrixField& f) {
  const auto& g = f.grid();
  const int n = g.n_rad, m = g.n_ang;
  const double hx2 = g.hx * g.hx, hy2 = g.hy * g.hy;
  return MatrixField::generate(g, f.dim(), [&](int i, int j) -> Mat {
    Mat dxx;
    if (i == 0)
      dxx = (2.0 * f(0, j) - 5.0 * f(1, j) + 4.0 * f(2, j) - f(3, j)) / hx2;
    else if (i == n - 1)
      dxx = (2.0 * f(n - 1, j) - 5.0 * f(n - 2, j) + 4.0 * f(n - 3, j) - f(n - 4, j)) / hx2;
    else
      dxx = (f(i + 1, j) - 2.0 * f(i, j) + f(i - 1, j)) / hx2;
    return 0.25 * (dxx + (f(i, (j + 1) % m) - 2.0 * f(i, j) + f(i, (j + m - 1) % m)) / hy2);
  });
}

MatrixField inverse(const MatrixField& f) {
  return MatrixField::generate(f.grid(), f.dim(), [&](int i, int j) -> Mat {
    Eigen::PartialPivLU<Mat> lu(f(i, j));
    if (std::abs(lu.determinant()) < 1e-300)
      throw std::domain_error("singular matrix at grid sample (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    return lu.inverse();
  });
}

MatrixField conj_field(const MatrixField& f) {
  return MatrixField::generate(f.grid(), f.dim(), [&](int i, int j) -> Mat { return f(i, j).conjugate(); });
}

MatrixField trace_field(const MatrixField& f) {
  return MatrixField::generate(f.grid(), 1, [&](int i, int j) -> Mat {
    Mat t(1, 1);
    t(0, 0) = f(i, j).trace();
    return t;
  });
}

void herm_eigen(const Mat& X, RVec& e, Mat& V) {
  if (X.rows() != 2) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (X + X.adjoint()));
    e = es.eigenvalues();
    V = es.eigenvectors();
    return;
  }
  const double a = X(0, 0).real(), d = X(1, 1).real();
  const cplx b = 0.5 * (X(0, 1) + std::conj(X(1, 0)));
  const double m = 0.5 * (a + d), delta = 0.5 * (a - d);
  const double rho = std::hypot(delta, std::abs(b));
  e.resize(2);
  V.resize(2, 2);
  e << m - rho, m + rho;
  if (std::abs(b) <= 1e-300 || rho == 0) {
    if (a <= d) {
      V.setIdentity();
    } else {
      V << 0.0, 1.0, 1.0, 0.0;
    }
    return;
  }
  Eigen::Matrix<cplx, 2, 1> v1, v2;
  if (delta >= 0) {
    v1 << b, cplx(-delta - rho);
    v2 << cplx(delta + rho), std::conj(b);
  } else {
    v1 << cplx(delta - rho), std::conj(b);
    v2 << b, cplx(rho - delta);
  }
  V.col(0) = v1.normalized();
  V.col(1) = v2.normalized();
}

Mat herm_exp(const Mat& X) {
  RVec e;
  Mat V;
  herm_eigen(X, e, V);
  return V * e.array().exp().matrix().cast<cplx>().asDiagonal() * V.adjoint();
}

void sqrt_pair(const Mat& P, Mat& root, Mat& inv_root) {
  RVec e;
  Mat V;
  herm_eigen(P, e, V);
  if (e.minCoeff() <= 0) throw std::domain_error("metric is not positive definite");
  root = V * e.cwiseSqrt().cast<cplx>().asDiagonal() * V.adjoint();
  inv_root = V * e.cwiseSqrt().cwiseInverse().cast<cplx>().asDiagonal() * V.adjoint();
}

Mat adjoint(const Mat& X, const Mat& P) { return P.partialPivLu().solve(Mat(X.adjoint() * P)); }

double frob_norm(const Mat& X, const Mat& P) {
  Mat r, ir;
  sqrt_pair(P, r, ir);
  return (r * X * ir).norm();
}

double op_norm(const Mat& X, const Mat& P) {
  Mat r, ir;
  sqrt_pair(P, r, ir);
  Eigen::JacobiSVD<Mat> svd(r * X * ir);
  return svd.singularValues()(0);
}

}  // namespace kmsh
