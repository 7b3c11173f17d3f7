#include "kmsh/rational.hpp"

#include <stdexcept>

namespace kmsh {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto bad = [&] { return std::invalid_argument("not a rational: '" + s + "'"); };
  if (s.empty()) throw bad();
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    if (s.find('/') != std::string::npos || s.find_first_of("eE") != std::string::npos) throw bad();
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t scale = s.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+") throw bad();
    if (digits[0] == '+') digits.erase(0, 1);
    Integer num;
    if (num.set_str(digits, 10) != 0) throw bad();
    Integer den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, scale);
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  if (s[0] == '+') s.erase(0, 1);
  Rational q;
  if (q.set_str(s, 10) != 0) throw bad();
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: '" + s + "'");
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

Integer floor_of(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Integer ceil_of(const Rational& q) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Rational abs_of(const Rational& q) { return sgn(q) < 0 ? Rational(-q) : q; }

Integer round_half_away(const Rational& q) {
  Rational half(1, 2);
  if (sgn(q) >= 0) return floor_of(q + half);
  return -floor_of(-q + half);
}

QComplex QComplex::inverse() const {
  Rational n = norm2();
  if (sgn(n) == 0) throw std::domain_error("inverse of zero complex rational");
  return {re / n, -im / n};
}

std::string to_string(const QComplex& z) {
  if (sgn(z.im) == 0) return to_string(z.re);
  std::string s = to_string(z.re);
  s += sgn(z.im) < 0 ? " - " : " + ";
  s += to_string(abs_of(z.im));
  s += "i";
  return s;
}

}  // namespace kmsh
