#include "kmsh/qlinalg.hpp"

#include <stdexcept>

namespace kmsh {

QMatrix QMatrix::identity(int n) {
  QMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = QComplex(1);
  return m;
}

QMatrix QMatrix::from_columns(int rows, const std::vector<std::vector<QComplex>>& cols) {
  QMatrix m(rows, static_cast<int>(cols.size()));
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = cols[j][i];
  return m;
}

bool QMatrix::is_zero() const {
  for (const auto& z : a_)
    if (!z.is_zero()) return false;
  return true;
}

std::vector<QComplex> QMatrix::column(int j) const {
  std::vector<QComplex> c(rows_);
  for (int i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

QMatrix QMatrix::pow(int k) const {
  if (rows_ != cols_) throw std::invalid_argument("pow of non-square matrix");
  QMatrix r = identity(rows_);
  for (int i = 0; i < k; ++i) r = r * *this;
  return r;
}

QMatrix QMatrix::inverse() const {
  if (rows_ != cols_) throw std::invalid_argument("inverse of non-square matrix");
  int n = rows_;
  QMatrix aug(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug(i, j) = (*this)(i, j);
    aug(i, n + i) = QComplex(1);
  }
  auto piv = rref(aug);
  if (static_cast<int>(piv.size()) < n || piv[n - 1] != n - 1) throw std::domain_error("singular matrix");
  QMatrix inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

QMatrix operator*(const QMatrix& a, const QMatrix& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("shape mismatch in product");
  QMatrix c(a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i)
    for (int k = 0; k < a.cols_; ++k) {
      const QComplex& x = a(i, k);
      if (x.is_zero()) continue;
      for (int j = 0; j < b.cols_; ++j) c(i, j) += x * b(k, j);
    }
  return c;
}

QMatrix operator+(const QMatrix& a, const QMatrix& b) {
  QMatrix c = a;
  for (std::size_t i = 0; i < c.a_.size(); ++i) c.a_[i] += b.a_[i];
  return c;
}

QMatrix operator-(const QMatrix& a, const QMatrix& b) {
  QMatrix c = a;
  for (std::size_t i = 0; i < c.a_.size(); ++i) c.a_[i] -= b.a_[i];
  return c;
}

bool operator==(const QMatrix& a, const QMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
}

std::vector<int> rref(QMatrix& m) {
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
    int p = -1;
    for (int i = r; i < m.rows(); ++i)
      if (!m(i, c).is_zero()) { p = i; break; }
    if (p < 0) continue;
    if (p != r)
      for (int j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    QComplex inv = m(r, c).inverse();
    for (int j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (int i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c).is_zero()) continue;
      QComplex f = m(i, c);
      for (int j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

int rank(const QMatrix& m) {
  QMatrix t = m;
  return static_cast<int>(rref(t).size());
}

QMatrix kernel(const QMatrix& m) {
  QMatrix t = m;
  auto piv = rref(t);
  std::vector<bool> is_piv(m.cols(), false);
  for (int c : piv) is_piv[c] = true;
  std::vector<std::vector<QComplex>> basis;
  for (int f = 0; f < m.cols(); ++f) {
    if (is_piv[f]) continue;
    std::vector<QComplex> v(m.cols());
    v[f] = QComplex(1);
    for (std::size_t k = 0; k < piv.size(); ++k) v[piv[k]] = -t(static_cast<int>(k), f);
    basis.push_back(std::move(v));
  }
  return QMatrix::from_columns(m.cols(), basis);
}

QMatrix image(const QMatrix& m) {
  QMatrix t = m;
  auto piv = rref(t);
  std::vector<std::vector<QComplex>> cols;
  for (int c : piv) cols.push_back(m.column(c));
  return QMatrix::from_columns(m.rows(), cols);
}

QMatrix span_sum(const QMatrix& u, const QMatrix& v) {
  QMatrix both(u.rows(), u.cols() + v.cols());
  for (int i = 0; i < u.rows(); ++i) {
    for (int j = 0; j < u.cols(); ++j) both(i, j) = u(i, j);
    for (int j = 0; j < v.cols(); ++j) both(i, u.cols() + j) = v(i, j);
  }
  return image(both);
}

QMatrix span_intersection(const QMatrix& u, const QMatrix& v) {
  if (u.cols() == 0 || v.cols() == 0) return QMatrix(u.rows(), 0);
  QMatrix uu = image(u);
  QMatrix vv = image(v);
  QMatrix both(uu.rows(), uu.cols() + vv.cols());
  for (int i = 0; i < uu.rows(); ++i) {
    for (int j = 0; j < uu.cols(); ++j) both(i, j) = uu(i, j);
    for (int j = 0; j < vv.cols(); ++j) both(i, uu.cols() + j) = -vv(i, j);
  }
  QMatrix k = kernel(both);
  QMatrix w(uu.rows(), k.cols());
  for (int c = 0; c < k.cols(); ++c)
    for (int i = 0; i < uu.rows(); ++i) {
      QComplex s;
      for (int j = 0; j < uu.cols(); ++j) s += uu(i, j) * k(j, c);
      w(i, c) = s;
    }
  return image(w);
}

}  // namespace kmsh
