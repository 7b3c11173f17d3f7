#include "kmsh/charnum.hpp"

#include <stdexcept>

namespace kmsh {

Rational wt(const std::vector<KmsPoint>& spectrum) {
  Rational s = 0;
  for (const auto& p : spectrum) s += p.a * p.r;
  return s;
}

Rational wt(const std::vector<LsPoint>& spectrum) {
  Rational s = 0;
  for (const auto& p : spectrum) s += p.b * p.r;
  return s;
}

// lambda^-1 alpha = conj(lambda) alpha / |lambda|^2
Rational re_lambda_inv(const QComplex& lambda, const QComplex& alpha) {
  return (lambda.re * alpha.re + lambda.im * alpha.im) / lambda.norm2();
}

Rational im_lambda_inv(const QComplex& lambda, const QComplex& alpha) {
  return (lambda.re * alpha.im - lambda.im * alpha.re) / lambda.norm2();
}

Rational effective_weight(const QComplex& lambda, const KmsPair& u) { return re_lambda_inv(lambda, u.alpha) + u.a; }

std::map<Label, Rational> par_c1_flat(const ParabolicFlatData& d) {
  std::map<Label, Rational> kappa;
  for (const auto& c : d.geometry.components) {
    Rational k = 0;
    auto it = d.divisor_spectra.find(c);
    if (it != d.divisor_spectra.end())
      for (const auto& p : it->second) k -= effective_weight(d.lambda, p.pair()) * p.r;
    kappa[c] = k;
  }
  return kappa;
}

namespace {

Rational degree_against(const DivisorGeometry& g, const std::map<Label, Rational>& kappa) {
  Rational s = 0;
  for (const auto& [c, k] : kappa) {
    auto it = g.degL.find(c);
    if (it != g.degL.end()) s += k * it->second;
  }
  return s;
}

Rational selfint_of(const DivisorGeometry& g, const Label& c) {
  auto it = g.selfint.find(c);
  return it == g.selfint.end() ? Rational(0) : it->second;
}

}  // namespace

Rational par_deg_flat(const ParabolicFlatData& d) { return degree_against(d.geometry, par_c1_flat(d)); }

Rational par_ch2_flat(const ParabolicFlatData& d) {
  Rational diag = 0;
  for (const auto& c : d.geometry.components) {
    auto it = d.divisor_spectra.find(c);
    if (it == d.divisor_spectra.end()) continue;
    Rational s = 0;
    for (const auto& p : it->second) {
      Rational x = effective_weight(d.lambda, p.pair());
      s += x * x * p.r;
    }
    diag += s * selfint_of(d.geometry, c);
  }
  // Each unordered pair appears twice in the ordered sum; the outer 1/2 cancels that.
  Rational cross = 0;
  for (const auto& P : d.geometry.points) {
    auto it = d.point_spectra.find(P.label);
    if (it == d.point_spectra.end()) continue;
    for (const auto& e : it->second)
      cross += effective_weight(d.lambda, e.u_i) * effective_weight(d.lambda, e.u_j) * e.r * P.mult;
  }
  return diag / 2 + cross;
}

std::map<Label, Rational> par_c1_ls(const FilteredLocalSystemData& d) {
  std::map<Label, Rational> kappa;
  for (const auto& c : d.geometry.components) {
    auto it = d.divisor_spectra.find(c);
    kappa[c] = it == d.divisor_spectra.end() ? Rational(0) : Rational(-wt(it->second));
  }
  return kappa;
}

Rational par_deg_ls(const FilteredLocalSystemData& d) { return degree_against(d.geometry, par_c1_ls(d)); }

Rational par_ch2_ls(const FilteredLocalSystemData& d) {
  Rational diag = 0;
  for (const auto& c : d.geometry.components) {
    auto it = d.divisor_spectra.find(c);
    if (it == d.divisor_spectra.end()) continue;
    Rational s = 0;
    for (const auto& p : it->second) s += p.b * p.b * p.r;
    diag += s * selfint_of(d.geometry, c);
  }
  Rational cross = 0;
  for (const auto& P : d.geometry.points) {
    auto it = d.point_spectra.find(P.label);
    if (it == d.point_spectra.end()) continue;
    for (const auto& e : it->second) cross += e.u_i.b * e.u_j.b * e.r * P.mult;
  }
  return diag / 2 + cross;
}

Rational c1_squared(const DivisorGeometry& g, const std::map<Label, Rational>& kappa) {
  Rational s = 0;
  for (const auto& [c, k] : kappa) s += k * k * selfint_of(g, c);
  for (const auto& P : g.points) {
    auto a = kappa.find(P.i);
    auto b = kappa.find(P.j);
    if (a == kappa.end() || b == kappa.end()) continue;
    s += 2 * a->second * b->second * P.mult;
  }
  return s;
}

Rational bg_gap(const ParabolicFlatData& d) {
  return c1_squared(d.geometry, par_c1_flat(d)) / (2 * d.rank) - par_ch2_flat(d);
}

Rational bg_gap(const FilteredLocalSystemData& d) {
  return c1_squared(d.geometry, par_c1_ls(d)) / (2 * d.rank) - par_ch2_ls(d);
}

std::map<std::pair<Label, KmsPair>, GradedDegree> graded_degrees(const ParabolicFlatData& d) {
  std::map<std::pair<Label, KmsPair>, GradedDegree> out;
  std::map<std::pair<Label, KmsPair>, long> ranks;
  for (const auto& c : d.geometry.components) {
    auto it = d.divisor_spectra.find(c);
    if (it == d.divisor_spectra.end()) continue;
    for (const auto& p : it->second) ranks[{c, p.pair()}] += p.r;
  }
  for (const auto& [key, r] : ranks) {
    const Rational si = selfint_of(d.geometry, key.first);
    GradedDegree g;
    g.re = -re_lambda_inv(d.lambda, key.second.alpha) * r * si;
    g.im_residual = im_lambda_inv(d.lambda, key.second.alpha) * r * si;
    out[key] = g;
  }
  auto add = [&](const Label& side, const KmsPair& mine, const KmsPair& other, long r, long mult) {
    auto it = out.find({side, mine});
    if (it == out.end()) return;
    it->second.re -= effective_weight(d.lambda, other) * r * mult;
    it->second.im_residual += im_lambda_inv(d.lambda, other.alpha) * r * mult;
  };
  for (const auto& P : d.geometry.points) {
    auto it = d.point_spectra.find(P.label);
    if (it == d.point_spectra.end()) continue;
    for (const auto& e : it->second) {
      add(P.i, e.u_i, e.u_j, e.r, P.mult);
      add(P.j, e.u_j, e.u_i, e.r, P.mult);
    }
  }
  return out;
}

namespace {

// Sum over (i, u) of f(u) * (-par-deg(i,u) + a r(i,u) [D_i]^2).
template <typename F>
Rational graded_pairing(const ParabolicFlatData& d, const std::map<std::pair<Label, KmsPair>, GradedDegree>& gd,
                        F&& f) {
  std::map<std::pair<Label, KmsPair>, long> ranks;
  for (const auto& [c, spec] : d.divisor_spectra)
    for (const auto& p : spec) ranks[{c, p.pair()}] += p.r;
  Rational s = 0;
  for (const auto& [key, g] : gd) {
    const KmsPair& u = key.second;
    s += f(u) * (-g.re + u.a * ranks[key] * selfint_of(d.geometry, key.first));
  }
  return s;
}

}  // namespace

CharReport char_report(const ParabolicFlatData& d) {
  CharReport r;
  r.c1_coeffs = par_c1_flat(d);
  r.par_deg = degree_against(d.geometry, r.c1_coeffs);
  r.par_ch2 = par_ch2_flat(d);
  r.c1_squared = c1_squared(d.geometry, r.c1_coeffs);
  r.bg_gap = r.c1_squared / (2 * d.rank) - r.par_ch2;
  auto gd = graded_degrees(d);
  r.im_residual = graded_pairing(d, gd, [&](const KmsPair& u) { return im_lambda_inv(d.lambda, u.alpha); });
  return r;
}

CharReport char_report(const FilteredLocalSystemData& d) {
  CharReport r;
  r.c1_coeffs = par_c1_ls(d);
  r.par_deg = degree_against(d.geometry, r.c1_coeffs);
  r.par_ch2 = par_ch2_ls(d);
  r.c1_squared = c1_squared(d.geometry, r.c1_coeffs);
  r.bg_gap = r.c1_squared / (2 * d.rank) - r.par_ch2;
  r.im_residual = 0;
  return r;
}

VanishingCheck vanishing_check(const ParabolicFlatData& d) {
  VanishingCheck v;
  v.is_deligne_type = true;
  for (const auto& [c, spec] : d.divisor_spectra)
    for (const auto& p : spec)
      if (sgn(effective_weight(d.lambda, p.pair())) != 0) v.is_deligne_type = false;
  for (const auto& [lab, spec] : d.point_spectra)
    for (const auto& e : spec)
      if (sgn(effective_weight(d.lambda, e.u_i)) != 0 || sgn(effective_weight(d.lambda, e.u_j)) != 0)
        v.is_deligne_type = false;
  v.par_deg = par_deg_flat(d);
  v.par_ch2 = par_ch2_flat(d);
  if (v.is_deligne_type && (sgn(v.par_deg) != 0 || sgn(v.par_ch2) != 0))
    throw std::logic_error("Deligne-type data with nonzero characteristic numbers");
  return v;
}

CrossCheck par_ch2_cross_check(const ParabolicFlatData& d) {
  auto gd = graded_degrees(d);
  CrossCheck c;
  c.via_graded = graded_pairing(d, gd, [&](const KmsPair& u) { return effective_weight(d.lambda, u); }) / 2;
  c.direct = par_ch2_flat(d);
  if (c.via_graded != c.direct)
    throw std::logic_error("par-ch2 cross check failed: " + to_string(c.via_graded) + " vs " + to_string(c.direct));
  return c;
}

}  // namespace kmsh
