#pragma once

#include <gmpxx.h>

#include <complex>
#include <string>
#include <string_view>

namespace kmsh {

using Rational = mpq_class;
using Integer = mpz_class;

// Accepts "p/q", integers and plain decimals such as "-0.35" (converted exactly).
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

Integer floor_of(const Rational& q);
Integer ceil_of(const Rational& q);
Rational abs_of(const Rational& q);
// Rounds to the nearest integer, ties away from zero.
Integer round_half_away(const Rational& q);

struct QComplex {
  Rational re;
  Rational im;

  QComplex() = default;
  QComplex(Rational r) : re(std::move(r)), im(0) {}
  QComplex(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  QComplex(long r) : re(r), im(0) {}

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  QComplex conj() const { return {re, -im}; }
  Rational norm2() const { return re * re + im * im; }
  QComplex inverse() const;
  std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }

  friend QComplex operator+(const QComplex& a, const QComplex& b) { return {a.re + b.re, a.im + b.im}; }
  friend QComplex operator-(const QComplex& a, const QComplex& b) { return {a.re - b.re, a.im - b.im}; }
  friend QComplex operator-(const QComplex& a) { return {-a.re, -a.im}; }
  friend QComplex operator*(const QComplex& a, const QComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend QComplex operator/(const QComplex& a, const QComplex& b) { return a * b.inverse(); }
  QComplex& operator+=(const QComplex& b) { re += b.re; im += b.im; return *this; }
  QComplex& operator-=(const QComplex& b) { re -= b.re; im -= b.im; return *this; }
  QComplex& operator*=(const QComplex& b) { *this = *this * b; return *this; }
  friend bool operator==(const QComplex& a, const QComplex& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const QComplex& a, const QComplex& b) { return !(a == b); }
  // Lexicographic on (re, im); only used to key containers.
  friend bool operator<(const QComplex& a, const QComplex& b) {
    if (a.re != b.re) return a.re < b.re;
    return a.im < b.im;
  }
};

std::string to_string(const QComplex& z);

}  // namespace kmsh
