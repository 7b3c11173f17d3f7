#include "kmsh/tools/random_tables.hpp"

#include <algorithm>
#include <set>

namespace kmsh::gen {

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Rational random_rational(Rng& rng, int bound, int max_den) {
  int q = uniform_int(rng, 1, max_den);
  int p = uniform_int(rng, -bound * q, bound * q);
  Rational r(p, q);
  r.canonicalize();
  return r;
}

Rational random_fraction(Rng& rng, int max_den) {
  int q = uniform_int(rng, 1, max_den);
  Rational r(uniform_int(rng, 0, q - 1), q);
  r.canonicalize();
  return r;
}

QComplex random_qcomplex(Rng& rng, int bound, int max_den) {
  return {random_rational(rng, bound, max_den), random_rational(rng, bound, max_den)};
}

namespace {

// Random composition of n into k positive parts, k <= n.
std::vector<int> composition(Rng& rng, int n, int k) {
  std::vector<int> cuts;
  for (int i = 1; i < n; ++i) cuts.push_back(i);
  std::shuffle(cuts.begin(), cuts.end(), rng);
  cuts.resize(k - 1);
  std::sort(cuts.begin(), cuts.end());
  std::vector<int> parts;
  int prev = 0;
  for (int c : cuts) {
    parts.push_back(c - prev);
    prev = c;
  }
  parts.push_back(n - prev);
  return parts;
}

template <typename Pair>
std::vector<Pair> units(const std::vector<std::pair<Pair, int>>& spec) {
  std::vector<Pair> out;
  for (const auto& [p, r] : spec)
    for (int k = 0; k < r; ++k) out.push_back(p);
  return out;
}

// Pairs the rank units of the two sides at random and aggregates.
template <typename Pair, typename Entry>
std::vector<Entry> random_point_spectrum(Rng& rng, const std::vector<std::pair<Pair, int>>& si,
                                         const std::vector<std::pair<Pair, int>>& sj) {
  auto ui = units(si);
  auto uj = units(sj);
  std::shuffle(uj.begin(), uj.end(), rng);
  std::map<std::pair<Pair, Pair>, int> agg;
  for (std::size_t k = 0; k < ui.size(); ++k) agg[{ui[k], uj[k]}] += 1;
  std::vector<Entry> out;
  for (const auto& [key, r] : agg) out.push_back({key.first, key.second, r});
  return out;
}

QComplex random_lambda(Rng& rng) {
  for (;;) {
    QComplex l = random_qcomplex(rng, 2, 4);
    if (!l.is_zero()) return l;
  }
}

// Distinct pairs from `make`, with ranks summing to `rank`.
template <typename Pair, typename Make>
std::vector<std::pair<Pair, int>> random_spectrum(Rng& rng, int rank, int max_pairs, Make make) {
  int k = uniform_int(rng, 1, std::min(rank, max_pairs));
  std::set<Pair> seen;
  std::vector<Pair> pairs;
  while (static_cast<int>(pairs.size()) < k) {
    Pair p = make();
    if (seen.insert(p).second) pairs.push_back(p);
  }
  auto parts = composition(rng, rank, k);
  std::vector<std::pair<Pair, int>> out;
  for (int n = 0; n < k; ++n) out.push_back({pairs[n], parts[n]});
  return out;
}

template <typename Make>
ParabolicFlatData flat_data(Rng& rng, const TableShape& shape, Make make_pair) {
  ParabolicFlatData d;
  d.lambda = random_lambda(rng);
  d.rank = uniform_int(rng, 1, shape.max_rank);
  d.geometry = random_geometry(rng, shape);
  std::map<Label, std::vector<std::pair<KmsPair, int>>> spec;
  for (const auto& c : d.geometry.components) {
    Rational ci(uniform_int(rng, -2, 2));
    if (uniform_int(rng, 0, 1)) ci += random_fraction(rng, 4);
    d.truncation[c] = ci;
    spec[c] = random_spectrum<KmsPair>(rng, d.rank, shape.max_pairs, [&] { return make_pair(d.lambda, ci); });
    for (const auto& [p, r] : spec[c]) d.divisor_spectra[c].push_back({p.a, p.alpha, r});
  }
  for (const auto& pt : d.geometry.points)
    d.point_spectra[pt.label] = random_point_spectrum<KmsPair, PointKmsEntry>(rng, spec[pt.i], spec[pt.j]);
  return d;
}

}  // namespace

DivisorGeometry random_geometry(Rng& rng, const TableShape& shape) {
  DivisorGeometry g;
  int nc = uniform_int(rng, 1, shape.max_components);
  for (int k = 0; k < nc; ++k) {
    Label c = "D" + std::to_string(k + 1);
    g.components.push_back(c);
    g.selfint[c] = Rational(uniform_int(rng, -3, 3));
    g.degL[c] = Rational(uniform_int(rng, 1, 4));
  }
  if (nc > 1) {
    int np = uniform_int(rng, 0, shape.max_points);
    for (int k = 0; k < np; ++k) {
      int i = uniform_int(rng, 0, nc - 2);
      int j = uniform_int(rng, i + 1, nc - 1);
      g.points.push_back({g.components[i], g.components[j], "P" + std::to_string(k + 1), uniform_int(rng, 1, 2)});
    }
  }
  return g;
}

ParabolicFlatData random_flat_data(Rng& rng, const TableShape& shape) {
  return flat_data(rng, shape, [&](const QComplex&, const Rational& c) {
    return KmsPair{c - random_fraction(rng), random_qcomplex(rng, 2)};
  });
}

ParabolicFlatData random_deligne_data(Rng& rng, const TableShape& shape) {
  return flat_data(rng, shape, [&](const QComplex& lambda, const Rational& c) {
    Rational a = c - random_fraction(rng);
    // lambda^-1 alpha = -a + i t
    QComplex alpha = lambda * QComplex(-a, random_rational(rng, 2));
    return KmsPair{a, alpha};
  });
}

FilteredLocalSystemData random_localsys(Rng& rng, const TableShape& shape) {
  FilteredLocalSystemData d;
  d.rank = uniform_int(rng, 1, shape.max_rank);
  d.geometry = random_geometry(rng, shape);
  std::map<Label, std::vector<std::pair<LsPair, int>>> spec;
  for (const auto& c : d.geometry.components) {
    spec[c] = random_spectrum<LsPair>(rng, d.rank, shape.max_pairs, [&] {
      return LsPair{random_rational(rng, 2), Omega::from_exponent(random_qcomplex(rng, 1))};
    });
    for (const auto& [p, r] : spec[c]) d.divisor_spectra[c].push_back({p.b, p.omega, r});
  }
  for (const auto& pt : d.geometry.points)
    d.point_spectra[pt.label] = random_point_spectrum<LsPair, LsPointEntry>(rng, spec[pt.i], spec[pt.j]);
  return d;
}

NilpotentBlocks random_nilpotent_blocks(Rng& rng, const ParabolicFlatData& d) {
  NilpotentBlocks out;
  for (const auto& [c, spec] : d.divisor_spectra)
    for (const auto& p : spec) {
      QMatrix N(p.r, p.r);
      if (uniform_int(rng, 0, 3) != 0)
        for (int i = 0; i < p.r; ++i)
          for (int j = i + 1; j < p.r; ++j)
            if (uniform_int(rng, 0, 2) != 0) N(i, j) = QComplex(Rational(uniform_int(rng, -2, 2)));
      out[c].push_back(N);
    }
  return out;
}

}  // namespace kmsh::gen
