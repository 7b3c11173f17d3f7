#include "kmsh/charnum.hpp"
#include "kmsh/corrfun.hpp"
#include "kmsh/tools/random_tables.hpp"

#include <doctest.h>

#include <numbers>
#include <unsupported/Eigen/MatrixFunctions>

using namespace kmsh;

namespace {

Rational q(const char* s) { return parse_rational(s); }
const cplx I(0, 1);
const double two_pi = 2 * std::numbers::pi;

CMat mat2(cplx a, cplx b, cplx c, cplx d) {
  CMat m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_CASE("alpha of omega") {
  CHECK(std::abs(alpha_of(1.0)) < 1e-15);
  CHECK(std::abs(alpha_of(-1.0) - 0.5) < 1e-15);
  CHECK(std::abs(alpha_of(std::exp(-two_pi)) - cplx(0, -1)) < 1e-14);
  CHECK_THROWS(alpha_of(0.0));
  // branch and exponential relation on a sweep
  for (double t = -3; t < 3; t += 0.37)
    for (double rho : {0.01, 0.5, 1.0, 3.0}) {
      cplx w = std::polar(rho, t);
      cplx a = alpha_of(w);
      CHECK(a.real() >= 0);
      CHECK(a.real() < 1);
      CHECK(std::abs(std::exp(-two_pi * I * a) - w) < 1e-12 * std::abs(w));
    }
}

TEST_CASE("unipotent logarithm") {
  UnipotentLog u = unipotent_log(CMat::Identity(3, 3));
  CHECK(u.N.norm() < 1e-15);
  CHECK(u.eigen.size() == 1);

  u = unipotent_log(mat2(1, 1, 0, 1));
  CMat expect = -mat2(0, 1, 0, 0) / (two_pi * I);
  CHECK((u.N - expect).norm() < 1e-14);

  u = unipotent_log(mat2(-1, -1, 0, -1));
  REQUIRE(u.eigen.size() == 1);
  CHECK(std::abs(u.eigen[0].first + 1.0) < 1e-12);
  CHECK((u.N - expect).norm() < 1e-14);

  CHECK_THROWS(unipotent_log(mat2(1, 0, 0, 0)));
}

TEST_CASE("unipotent logarithm reproduces the unipotent part") {
  CMat T(3, 3);
  T << 1, 2, 0, 0, 1, 1, 1, 0, 1;
  CMat J(3, 3);
  J << cplx(0.3, 0.4), 1, 0, 0, cplx(0.3, 0.4), 0, 0, 0, -2.0;
  CMat M = T * J * T.inverse();
  UnipotentLog u = unipotent_log(M);
  CHECK((u.Ms * u.Mu - M).norm() < 1e-10);
  CHECK((u.Ms * u.Mu - u.Mu * u.Ms).norm() < 1e-10);
  CMat E = (two_pi * I * (-u.N)).exp();
  CHECK((E - u.Mu).norm() < 1e-10);
  CHECK((u.N * u.N * u.N).norm() < 1e-12);
  CHECK(u.eigen.size() == 2);
}

TEST_CASE("local correspondence examples") {
  KmsPair k = phi_local(LsPair{0, Omega::from_exponent(0)}, 0);
  CHECK(k.a == 0);
  CHECK(k.alpha == QComplex(0));
  k = phi_local(LsPair{q("3/4"), Omega::from_exponent(q("1/2"))}, 0);
  CHECK(k.a == q("-3/4"));
  CHECK(k.alpha == QComplex(q("3/2")));
  k = phi_local(LsPair{q("1/4"), Omega::from_exponent(0)}, q("1/2"));
  CHECK(k.a == q("1/4"));
  CHECK(k.alpha == QComplex(0));

  MonodromyDatum m{CMat::Constant(1, 1, -1.0), {q("3/4")}};
  FlatLocalDatum f = phi_local(m, 0);
  CHECK(std::abs(f.a[0] + 0.75) < 1e-15);
  CHECK(f.n[0] == -1);
  CHECK(std::abs(f.residue[0] - 1.5) < 1e-12);
}

TEST_CASE("inverse map and its Z-invariance") {
  LsImage im = phi_inverse_kms(0, 0);
  CHECK(im.b == 0);
  CHECK(std::abs(im.omega.value() - 1.0) < 1e-15);
  im = phi_inverse_kms(q("1/4"), q("1/2"));
  CHECK(im.b == q("3/4"));
  CHECK(std::abs(im.omega.value() + 1.0) < 1e-15);
  LsImage shifted = phi_inverse_kms(q("5/4"), q("-1/2"));
  CHECK(shifted.b == im.b);
  CHECK(shifted.omega == im.omega);
}

TEST_CASE("omega rationalization") {
  Omega w = omega_from_value(std::exp(-two_pi * I * cplx(0.3, -0.25)));
  CHECK(w.exponent() == QComplex(q("3/10"), q("-1/4")));
  CHECK_THROWS(omega_from_value(0.0));
}

TEST_CASE("two-divisor example through the transport") {
  FilteredLocalSystemData ls;
  ls.rank = 1;
  ls.geometry.components = {"D1", "D2"};
  ls.geometry.selfint = {{"D1", 0}, {"D2", 0}};
  ls.geometry.degL = {{"D1", 1}, {"D2", 1}};
  ls.geometry.points = {{"D1", "D2", "P", 1}};
  Omega one = Omega::from_exponent(0);
  ls.divisor_spectra["D1"] = {{q("1/2"), one, 1}};
  ls.divisor_spectra["D2"] = {{q("1/3"), one, 1}};
  ls.point_spectra["P"] = {{{q("1/2"), one}, {q("1/3"), one}, 1}};
  REQUIRE(validate(ls).empty());
  CHECK(par_ch2_ls(ls) == q("1/6"));
  for (QComplex lambda : {QComplex(1), QComplex(q("1/2"), 2)}) {
    ParabolicFlatData d = kms_table_transport(ls, lambda, {{"D1", 0}, {"D2", 0}});
    CHECK(validate(d).empty());
    CHECK(effective_weight(lambda, d.divisor_spectra["D1"][0].pair()) == q("1/2"));
    CHECK(effective_weight(lambda, d.divisor_spectra["D2"][0].pair()) == q("1/3"));
    CHECK(par_ch2_flat(d) == q("1/6"));
  }
}

TEST_CASE("transport round trip and lambda rescaling on random tables") {
  gen::Rng rng(17);
  for (int n = 0; n < 200; ++n) {
    FilteredLocalSystemData ls = gen::random_localsys(rng);
    std::map<Label, Rational> c;
    for (const auto& comp : ls.geometry.components) c[comp] = gen::random_rational(rng, 2, 3);
    ParabolicFlatData d = kms_table_transport(ls, 1, c);
    REQUIRE(validate(d).empty());
    FilteredLocalSystemData back = kms_table_inverse(d);
    CHECK(par_c1_ls(back) == par_c1_ls(ls));
    CHECK(par_ch2_ls(back) == par_ch2_ls(ls));
    for (const auto& [comp, spec] : back.divisor_spectra) {
      std::map<LsPair, long> a, b;
      for (const auto& p : spec) a[p.pair()] += p.r;
      for (const auto& p : ls.divisor_spectra.at(comp)) b[p.pair()] += p.r;
      CHECK(a == b);
    }
    ParabolicFlatData r = rescale_lambda(d, QComplex(q("1/3"), 1));
    CHECK(par_c1_flat(r) == par_c1_flat(d));
    CHECK(par_ch2_flat(r) == par_ch2_flat(d));
  }
}

TEST_CASE("transport rejects invalid tables") {
  FilteredLocalSystemData ls;
  ls.rank = 2;
  ls.geometry.components = {"D1"};
  ls.geometry.selfint["D1"] = 0;
  ls.geometry.degL["D1"] = 1;
  ls.divisor_spectra["D1"] = {{0, Omega::from_exponent(0), 1}};
  CHECK_THROWS(kms_table_transport(ls, 1, {{"D1", 0}}));
}
