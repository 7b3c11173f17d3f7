#pragma once

#include "kmsh/pardata.hpp"

#include <map>
#include <utility>
#include <vector>

namespace kmsh {

struct CharReport {
  std::map<Label, Rational> c1_coeffs;
  Rational par_deg;
  Rational par_ch2;
  Rational c1_squared;
  Rational bg_gap;
  // Sum over (i, u) of Im(lambda^-1 alpha) * (-par-deg(i,u) + a r(i,u) [D_i]^2); zero for genuine bundles.
  Rational im_residual;
};

// Sum of a * r.
Rational wt(const std::vector<KmsPoint>& spectrum);
Rational wt(const std::vector<LsPoint>& spectrum);

// Re(lambda^-1 alpha) + a, the quantity every flat-side formula is built from.
Rational effective_weight(const QComplex& lambda, const KmsPair& u);
Rational re_lambda_inv(const QComplex& lambda, const QComplex& alpha);
Rational im_lambda_inv(const QComplex& lambda, const QComplex& alpha);

std::map<Label, Rational> par_c1_flat(const ParabolicFlatData& d);
Rational par_deg_flat(const ParabolicFlatData& d);
Rational par_ch2_flat(const ParabolicFlatData& d);

std::map<Label, Rational> par_c1_ls(const FilteredLocalSystemData& d);
Rational par_deg_ls(const FilteredLocalSystemData& d);
Rational par_ch2_ls(const FilteredLocalSystemData& d);

// sum kappa_i^2 [D_i]^2 + 2 sum_P kappa_i kappa_j mult(P)
Rational c1_squared(const DivisorGeometry& g, const std::map<Label, Rational>& kappa);

Rational bg_gap(const ParabolicFlatData& d);
Rational bg_gap(const FilteredLocalSystemData& d);

CharReport char_report(const ParabolicFlatData& d);
CharReport char_report(const FilteredLocalSystemData& d);

struct VanishingCheck {
  bool is_deligne_type = false;
  Rational par_deg;
  Rational par_ch2;
};
// Throws std::logic_error if the data is of Deligne type yet a number is nonzero.
VanishingCheck vanishing_check(const ParabolicFlatData& d);

struct GradedDegree {
  Rational re;
  Rational im_residual;
};
// Keyed by (divisor, u) with u = (a, alpha) aggregated over the divisor spectrum.
std::map<std::pair<Label, KmsPair>, GradedDegree> graded_degrees(const ParabolicFlatData& d);

struct CrossCheck {
  Rational via_graded;
  Rational direct;
};
// Throws std::logic_error on disagreement.
CrossCheck par_ch2_cross_check(const ParabolicFlatData& d);

}  // namespace kmsh
