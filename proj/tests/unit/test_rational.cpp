#include "kmsh/qlinalg.hpp"
#include "kmsh/rational.hpp"

#include <doctest.h>

using namespace kmsh;

namespace {
Rational q(const char* s) { return parse_rational(s); }
}

TEST_CASE("decimals are read exactly") {
  CHECK(q("-0.35") == Rational(-7, 20));
  CHECK(q("0.1") * 10 == 1);
  CHECK(q("+2.50") == Rational(5, 2));
  CHECK(q("6/8") == Rational(3, 4));
  CHECK(to_string(q("6/8")) == "3/4");
  CHECK(to_string(q("4/2")) == "2");
}

TEST_CASE("malformed rationals are rejected") {
  CHECK_THROWS_AS(q(""), std::invalid_argument);
  CHECK_THROWS_AS(q("abc"), std::invalid_argument);
  CHECK_THROWS_AS(q("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(q("1.5e3"), std::invalid_argument);
}

TEST_CASE("rounding helpers") {
  CHECK(floor_of(q("-1/2")) == -1);
  CHECK(ceil_of(q("-1/2")) == 0);
  CHECK(round_half_away(q("5/2")) == 3);
  CHECK(round_half_away(q("-5/2")) == -3);
  CHECK(round_half_away(q("-7/3")) == -2);
  CHECK(abs_of(q("-3/7")) == q("3/7"));
}

TEST_CASE("complex rationals") {
  QComplex z(q("1/2"), q("-3/4"));
  CHECK(z * z.inverse() == QComplex(1));
  CHECK((z / z) == QComplex(1));
  CHECK(z.norm2() == q("13/16"));
  CHECK(to_string(z) == "1/2 - 3/4i");
  CHECK_THROWS(QComplex().inverse());
}

TEST_CASE("qmatrix rank, kernel and inverse") {
  QMatrix A(3, 3);
  A(0, 1) = 1;
  A(1, 2) = 1;
  CHECK(rank(A) == 2);
  CHECK(rank(A.pow(2)) == 1);
  CHECK(A.pow(3).is_zero());
  QMatrix K = kernel(A);
  CHECK(K.cols() == 1);
  CHECK((A * K).is_zero());

  QMatrix B = QMatrix::identity(3) + A;
  QMatrix Bi = B.inverse();
  CHECK(B * Bi == QMatrix::identity(3));
  // (I + A)^-1 = I - A + A^2 for A^3 = 0
  CHECK(Bi == QMatrix::identity(3) - A + A.pow(2));

  QMatrix sing(2, 2);
  sing(0, 0) = 1;
  sing(1, 0) = 2;
  CHECK_THROWS(sing.inverse());
}

TEST_CASE("span sum and intersection dimensions") {
  QMatrix u = QMatrix::from_columns(3, {{1, 0, 0}, {0, 1, 0}});
  QMatrix v = QMatrix::from_columns(3, {{0, 1, 0}, {0, 0, 1}});
  CHECK(rank(span_sum(u, v)) == 3);
  QMatrix w = span_intersection(u, v);
  CHECK(w.cols() == 1);
  CHECK(sgn(w(0, 0).norm2()) == 0);
  CHECK(sgn(w(2, 0).norm2()) == 0);
}
