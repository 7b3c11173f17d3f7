#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace kmsh {

using cplx = std::complex<double>;
// Small dense matrices; every model here has rank at most 8.
using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 8, 8>;
using RVec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 8, 1>;

// Samples z = exp(x + iy), x uniform on [log r_min, log r_max] (endpoints included), y periodic.
struct LogPolarGrid {
  double r_min = 0.1;
  double r_max = 0.9;
  int n_rad = 64;
  int n_ang = 64;
  double hx = 0;
  double hy = 0;

  static LogPolarGrid make(double r_min, double r_max, int n_rad, int n_ang);

  double x(int i) const;
  double y(int j) const;
  double r(int i) const;
  cplx z(int i, int j) const;
  std::size_t size() const { return static_cast<std::size_t>(n_rad) * n_ang; }
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * n_ang + j; }
};

class MatrixField {
 public:
  MatrixField() = default;
  MatrixField(const LogPolarGrid& g, int dim);

  template <typename F>
  static MatrixField generate(const LogPolarGrid& g, int dim, F&& f);

  const LogPolarGrid& grid() const { return g_; }
  int dim() const { return dim_; }
  Mat& operator()(int i, int j) { return v_[g_.idx(i, j)]; }
  const Mat& operator()(int i, int j) const { return v_[g_.idx(i, j)]; }
  Mat& operator[](std::size_t k) { return v_[k]; }
  const Mat& operator[](std::size_t k) const { return v_[k]; }
  std::size_t size() const { return v_.size(); }

  MatrixField& operator+=(const MatrixField& o);
  MatrixField& operator-=(const MatrixField& o);
  MatrixField& operator*=(cplx s);

 private:
  LogPolarGrid g_;
  int dim_ = 0;
  std::vector<Mat> v_;
};

MatrixField operator+(MatrixField a, const MatrixField& b);
MatrixField operator-(MatrixField a, const MatrixField& b);
MatrixField operator*(cplx s, MatrixField a);
// Pointwise matrix product.
MatrixField operator*(const MatrixField& a, const MatrixField& b);

// Central differences, second order one-sided at the radial ends, periodic in y.
MatrixField d_x(const MatrixField& f);
MatrixField d_y(const MatrixField& f);
MatrixField d_xx(const MatrixField& f);
MatrixField d_yy(const MatrixField& f);
// d/dw = (d_x - i d_y)/2, d/dwbar = (d_x + i d_y)/2 in w = log z.
MatrixField d_w(const MatrixField& f);
MatrixField d_wbar(const MatrixField& f);
// Compact d^2/(dw dwbar) = (d_xx + d_yy)/4.
MatrixField d_wwbar(const MatrixField& f);

MatrixField inverse(const MatrixField& f);
MatrixField conj_field(const MatrixField& f);
MatrixField trace_field(const MatrixField& f);

// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending; closed form for 2x2.
void herm_eigen(const Mat& X, RVec& e, Mat& V);
Mat herm_exp(const Mat& X);

// Hermitian square root and inverse square root of a positive matrix.
void sqrt_pair(const Mat& P, Mat& root, Mat& inv_root);

// X^dagger with respect to P: P^-1 X^* P.
Mat adjoint(const Mat& X, const Mat& P);
// |X|_P as Frobenius and as operator norm of P^{1/2} X P^{-1/2}.
double frob_norm(const Mat& X, const Mat& P);
double op_norm(const Mat& X, const Mat& P);

void parallel_points(std::size_t n, const std::function<void(std::size_t)>& f);

template <typename F>
MatrixField MatrixField::generate(const LogPolarGrid& g, int dim, F&& f) {
  MatrixField out(g, dim);
  parallel_points(g.size(), [&](std::size_t k) {
    int i = static_cast<int>(k / g.n_ang), j = static_cast<int>(k % g.n_ang);
    out.v_[k] = f(i, j);
  });
  return out;
}

}  // namespace kmsh
