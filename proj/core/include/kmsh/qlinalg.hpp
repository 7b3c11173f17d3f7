#pragma once

#include "kmsh/rational.hpp"

#include <vector>

namespace kmsh {

// Dense matrix over Q(i), row-major.
class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols) {}
  static QMatrix identity(int n);
  static QMatrix from_columns(int rows, const std::vector<std::vector<QComplex>>& cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  QComplex& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const QComplex& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  bool is_zero() const;
  std::vector<QComplex> column(int j) const;
  QMatrix pow(int k) const;
  QMatrix inverse() const;

  friend QMatrix operator*(const QMatrix& a, const QMatrix& b);
  friend QMatrix operator+(const QMatrix& a, const QMatrix& b);
  friend QMatrix operator-(const QMatrix& a, const QMatrix& b);
  friend bool operator==(const QMatrix& a, const QMatrix& b);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<QComplex> a_;
};

int rank(const QMatrix& m);
// Reduced row echelon form; returns pivot columns.
std::vector<int> rref(QMatrix& m);
// Columns form a basis of the null space.
QMatrix kernel(const QMatrix& m);
// Columns form a basis of the column space (a subset of the columns of m).
QMatrix image(const QMatrix& m);
QMatrix span_sum(const QMatrix& u, const QMatrix& v);
QMatrix span_intersection(const QMatrix& u, const QMatrix& v);

}  // namespace kmsh
