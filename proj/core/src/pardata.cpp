#include "kmsh/pardata.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace kmsh {

const PointRecord* DivisorGeometry::find_point(const Label& label) const {
  for (const auto& p : points)
    if (p.label == label) return &p;
  return nullptr;
}

Rational ParabolicFlatData::trunc(const Label& i) const {
  auto it = truncation.find(i);
  return it == truncation.end() ? Rational(0) : it->second;
}

Omega Omega::from_exponent(const QComplex& alpha) {
  Omega w;
  w.alpha_ = alpha;
  w.alpha_.re -= Rational(floor_of(alpha.re));
  return w;
}

std::complex<double> Omega::value() const {
  // exp(-2 pi i alpha) = exp(2 pi Im alpha) * exp(-2 pi i Re alpha)
  const double two_pi = 2.0 * std::numbers::pi;
  double mod = std::exp(two_pi * alpha_.im.get_d());
  double arg = -two_pi * alpha_.re.get_d();
  return std::polar(mod, arg);
}

namespace {

template <typename Key>
void check_marginals(std::vector<Violation>& out, const std::string& path, const std::map<Key, long>& point_side,
                     const std::map<Key, long>& divisor_side) {
  if (point_side != divisor_side)
    out.push_back({path, "point spectrum marginal does not reproduce the divisor spectrum ranks"});
}

}  // namespace

std::vector<Violation> validate(const DivisorGeometry& g) {
  std::vector<Violation> out;
  std::set<Label> comps;
  for (const auto& c : g.components)
    if (!comps.insert(c).second) out.push_back({"geometry.components", "duplicate component '" + c + "'"});
  for (const auto& c : comps) {
    if (!g.selfint.count(c)) out.push_back({"geometry.selfint." + c, "missing self-intersection"});
    if (!g.degL.count(c)) out.push_back({"geometry.degL." + c, "missing degree"});
  }
  for (const auto& [k, v] : g.selfint)
    if (!comps.count(k)) out.push_back({"geometry.selfint." + k, "unknown component"});
  for (const auto& [k, v] : g.degL)
    if (!comps.count(k)) out.push_back({"geometry.degL." + k, "unknown component"});
  std::set<std::tuple<Label, Label, Label>> seen;
  std::set<Label> labels;
  for (std::size_t n = 0; n < g.points.size(); ++n) {
    const auto& p = g.points[n];
    std::string path = "geometry.points[" + std::to_string(n) + "]";
    if (p.i == p.j) out.push_back({path, "point joins a component to itself"});
    if (!comps.count(p.i) || !comps.count(p.j)) out.push_back({path, "unknown component"});
    if (p.mult < 1) out.push_back({path + ".mult", "multiplicity must be positive"});
    if (!seen.insert({std::min(p.i, p.j), std::max(p.i, p.j), p.label}).second)
      out.push_back({path, "duplicate (i, j, label) triple"});
    else if (!labels.insert(p.label).second) out.push_back({path + ".label", "label reused by another point"});
  }
  return out;
}

std::vector<Violation> validate(const ParabolicFlatData& d) {
  std::vector<Violation> out = validate(d.geometry);
  if (d.lambda.is_zero()) out.push_back({"lambda", "lambda must be nonzero"});
  if (d.rank < 1) out.push_back({"rank", "rank must be positive"});
  std::set<Label> comps(d.geometry.components.begin(), d.geometry.components.end());
  for (const auto& [k, v] : d.truncation)
    if (!comps.count(k)) out.push_back({"truncation." + k, "unknown component"});

  std::map<Label, std::map<KmsPair, long>> div_ranks;
  for (const auto& c : comps) {
    auto it = d.divisor_spectra.find(c);
    if (it == d.divisor_spectra.end()) {
      out.push_back({"divisor_spectra." + c, "missing spectrum"});
      continue;
    }
    Rational c_i = d.trunc(c);
    long sum = 0;
    for (std::size_t n = 0; n < it->second.size(); ++n) {
      const auto& p = it->second[n];
      std::string path = "divisor_spectra." + c + "[" + std::to_string(n) + "]";
      if (p.r < 1) out.push_back({path + ".r", "rank must be positive"});
      if (p.a <= c_i - 1 || p.a > c_i)
        out.push_back({path + ".a", "weight " + to_string(p.a) + " outside (" + to_string(Rational(c_i - 1)) + ", " +
                                        to_string(c_i) + "]"});
      sum += p.r;
      div_ranks[c][p.pair()] += p.r;
    }
    if (sum != d.rank)
      out.push_back({"divisor_spectra." + c, "ranks sum to " + std::to_string(sum) + ", expected " +
                                                 std::to_string(d.rank)});
  }
  for (const auto& [k, v] : d.divisor_spectra)
    if (!comps.count(k)) out.push_back({"divisor_spectra." + k, "unknown component"});

  for (const auto& p : d.geometry.points) {
    auto it = d.point_spectra.find(p.label);
    std::string path = "point_spectra." + p.label;
    if (it == d.point_spectra.end()) {
      out.push_back({path, "missing point spectrum"});
      continue;
    }
    long sum = 0;
    std::map<KmsPair, long> side_i, side_j;
    for (std::size_t n = 0; n < it->second.size(); ++n) {
      const auto& e = it->second[n];
      if (e.r < 1) out.push_back({path + "[" + std::to_string(n) + "].r", "rank must be positive"});
      sum += e.r;
      side_i[e.u_i] += e.r;
      side_j[e.u_j] += e.r;
    }
    if (sum != d.rank)
      out.push_back({path, "ranks sum to " + std::to_string(sum) + ", expected " + std::to_string(d.rank)});
    check_marginals(out, path + " (side " + p.i + ")", side_i, div_ranks[p.i]);
    check_marginals(out, path + " (side " + p.j + ")", side_j, div_ranks[p.j]);
  }
  for (const auto& [k, v] : d.point_spectra)
    if (!d.geometry.find_point(k)) out.push_back({"point_spectra." + k, "unknown point label"});
  return out;
}

std::vector<Violation> validate(const FilteredLocalSystemData& d) {
  std::vector<Violation> out = validate(d.geometry);
  if (d.rank < 1) out.push_back({"rank", "rank must be positive"});
  std::set<Label> comps(d.geometry.components.begin(), d.geometry.components.end());
  std::map<Label, std::map<LsPair, long>> div_ranks;
  for (const auto& c : comps) {
    auto it = d.divisor_spectra.find(c);
    if (it == d.divisor_spectra.end()) {
      out.push_back({"divisor_spectra." + c, "missing spectrum"});
      continue;
    }
    long sum = 0;
    for (std::size_t n = 0; n < it->second.size(); ++n) {
      const auto& p = it->second[n];
      if (p.r < 1) out.push_back({"divisor_spectra." + c + "[" + std::to_string(n) + "].r", "rank must be positive"});
      sum += p.r;
      div_ranks[c][p.pair()] += p.r;
    }
    if (sum != d.rank)
      out.push_back({"divisor_spectra." + c, "ranks sum to " + std::to_string(sum) + ", expected " +
                                                 std::to_string(d.rank)});
  }
  for (const auto& [k, v] : d.divisor_spectra)
    if (!comps.count(k)) out.push_back({"divisor_spectra." + k, "unknown component"});
  for (const auto& p : d.geometry.points) {
    auto it = d.point_spectra.find(p.label);
    std::string path = "point_spectra." + p.label;
    if (it == d.point_spectra.end()) {
      out.push_back({path, "missing point spectrum"});
      continue;
    }
    long sum = 0;
    std::map<LsPair, long> side_i, side_j;
    for (std::size_t n = 0; n < it->second.size(); ++n) {
      const auto& e = it->second[n];
      if (e.r < 1) out.push_back({path + "[" + std::to_string(n) + "].r", "rank must be positive"});
      sum += e.r;
      side_i[e.u_i] += e.r;
      side_j[e.u_j] += e.r;
    }
    if (sum != d.rank)
      out.push_back({path, "ranks sum to " + std::to_string(sum) + ", expected " + std::to_string(d.rank)});
    check_marginals(out, path + " (side " + p.i + ")", side_i, div_ranks[p.i]);
    check_marginals(out, path + " (side " + p.j + ")", side_j, div_ranks[p.j]);
  }
  for (const auto& [k, v] : d.point_spectra)
    if (!d.geometry.find_point(k)) out.push_back({"point_spectra." + k, "unknown point label"});
  return out;
}

void canonicalize(ParabolicFlatData& d) {
  for (auto& p : d.geometry.points) {
    if (p.i < p.j) continue;
    std::swap(p.i, p.j);
    auto it = d.point_spectra.find(p.label);
    if (it == d.point_spectra.end()) continue;
    for (auto& e : it->second) std::swap(e.u_i, e.u_j);
  }
}

void canonicalize(FilteredLocalSystemData& d) {
  for (auto& p : d.geometry.points) {
    if (p.i < p.j) continue;
    std::swap(p.i, p.j);
    auto it = d.point_spectra.find(p.label);
    if (it == d.point_spectra.end()) continue;
    for (auto& e : it->second) std::swap(e.u_i, e.u_j);
  }
}

Integer canonical_shift(const Rational& a, const Rational& c) { return floor_of(c - a); }

KmsPoint canonical_kms(const KmsPoint& p, const Rational& c) {
  Rational n(canonical_shift(p.a, c));
  return {p.a + n, QComplex(p.alpha.re - n, p.alpha.im), p.r};
}

}  // namespace kmsh
