#pragma once

#include "kmsh/rational.hpp"

#include <complex>
#include <map>
#include <string>
#include <vector>

namespace kmsh {

using Label = std::string;

struct PointRecord {
  Label i;
  Label j;
  Label label;
  long mult = 1;
};

struct DivisorGeometry {
  std::vector<Label> components;
  std::map<Label, Rational> selfint;
  std::map<Label, Rational> degL;
  std::vector<PointRecord> points;

  const PointRecord* find_point(const Label& label) const;
};

// The pair u = (a, alpha) of a KMS spectrum.
struct KmsPair {
  Rational a;
  QComplex alpha;
  friend bool operator==(const KmsPair&, const KmsPair&) = default;
  friend bool operator<(const KmsPair& x, const KmsPair& y) {
    if (x.a != y.a) return x.a < y.a;
    return x.alpha < y.alpha;
  }
};

struct KmsPoint {
  Rational a;
  QComplex alpha;
  int r = 1;
  KmsPair pair() const { return {a, alpha}; }
};

struct PointKmsEntry {
  KmsPair u_i;
  KmsPair u_j;
  int r = 1;
};

struct ParabolicFlatData {
  QComplex lambda{1};
  int rank = 1;
  DivisorGeometry geometry;
  std::map<Label, std::vector<KmsPoint>> divisor_spectra;
  std::map<Label, std::vector<PointKmsEntry>> point_spectra;
  std::map<Label, Rational> truncation;

  Rational trunc(const Label& i) const;
};

// A nonzero complex number omega = exp(-2 pi i alpha), stored through its exponent.
// The exponent is normalized to 0 <= Re(alpha) < 1, so equality is exact.
class Omega {
 public:
  Omega() = default;
  static Omega from_exponent(const QComplex& alpha);
  const QComplex& exponent() const { return alpha_; }
  std::complex<double> value() const;
  friend bool operator==(const Omega&, const Omega&) = default;
  friend bool operator<(const Omega& x, const Omega& y) { return x.alpha_ < y.alpha_; }

 private:
  QComplex alpha_;
};

struct LsPair {
  Rational b;
  Omega omega;
  friend bool operator==(const LsPair&, const LsPair&) = default;
  friend bool operator<(const LsPair& x, const LsPair& y) {
    if (x.b != y.b) return x.b < y.b;
    return x.omega < y.omega;
  }
};

struct LsPoint {
  Rational b;
  Omega omega;
  int r = 1;
  LsPair pair() const { return {b, omega}; }
};

struct LsPointEntry {
  LsPair u_i;
  LsPair u_j;
  int r = 1;
};

struct FilteredLocalSystemData {
  int rank = 1;
  DivisorGeometry geometry;
  std::map<Label, std::vector<LsPoint>> divisor_spectra;
  std::map<Label, std::vector<LsPointEntry>> point_spectra;
};

struct Violation {
  std::string path;
  std::string message;
};

std::vector<Violation> validate(const DivisorGeometry& g);
std::vector<Violation> validate(const ParabolicFlatData& d);
std::vector<Violation> validate(const FilteredLocalSystemData& d);

// Orders every point record so that i < j, swapping the sides of its spectrum entries.
void canonicalize(ParabolicFlatData& d);
void canonicalize(FilteredLocalSystemData& d);

// The Z-translate (a+n, alpha-n) with a+n in (c-1, c].
KmsPoint canonical_kms(const KmsPoint& p, const Rational& c);
Integer canonical_shift(const Rational& a, const Rational& c);

}  // namespace kmsh
