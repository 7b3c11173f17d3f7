#include "kmsh/perturb.hpp"

#include <algorithm>
#include <stdexcept>

namespace kmsh {

namespace {

QMatrix columns_of(const QMatrix& m, const std::vector<int>& idx) {
  QMatrix out(m.rows(), static_cast<int>(idx.size()));
  for (int c = 0; c < out.cols(); ++c)
    for (int i = 0; i < m.rows(); ++i) out(i, c) = m(i, idx[c]);
  return out;
}

QMatrix append_columns(const QMatrix& a, const QMatrix& b) {
  QMatrix out(a.rows(), a.cols() + b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
    for (int j = 0; j < b.cols(); ++j) out(i, a.cols() + j) = b(i, j);
  }
  return out;
}

// Columns of `target` that extend `current` to a basis of span(current, target).
QMatrix extension(const QMatrix& current, const QMatrix& target) {
  QMatrix acc = current;
  std::vector<int> keep;
  int r = rank(acc);
  for (int j = 0; j < target.cols(); ++j) {
    QMatrix trial = append_columns(acc, columns_of(target, {j}));
    int rt = rank(trial);
    if (rt > r) {
      acc = trial;
      r = rt;
      keep.push_back(j);
    }
  }
  return columns_of(target, keep);
}

}  // namespace

WeightFiltration weight_filtration(const QMatrix& N) {
  if (N.rows() != N.cols()) throw std::invalid_argument("weight filtration needs a square matrix");
  const int n = N.rows();
  if (!N.pow(n).is_zero()) throw std::invalid_argument("matrix is not nilpotent");
  std::vector<QMatrix> pw(2 * n + 2);
  pw[0] = QMatrix::identity(n);
  for (std::size_t j = 1; j < pw.size(); ++j) pw[j] = pw[j - 1] * N;
  auto ker_pow = [&](int p) { return p <= 0 ? QMatrix(n, 0) : kernel(pw[std::min<int>(p, n)]); };
  auto im_pow = [&](int p) { return image(pw[std::min(p, n)]); };

  WeightFiltration wf;
  wf.basis = QMatrix(n, 0);
  int prev_dim = 0;
  for (int k = -n; k <= n; ++k) {
    QMatrix W(n, 0);
    for (int j = std::max(0, -k); j <= n; ++j) W = span_sum(W, span_intersection(ker_pow(k + j + 1), im_pow(j)));
    int dim = W.cols();
    if (dim > prev_dim) {
      QMatrix ext = extension(wf.basis, W);
      wf.offsets.push_back(wf.basis.cols());
      wf.basis = append_columns(wf.basis, ext);
      wf.graded.emplace_back(k, dim - prev_dim);
      prev_dim = dim;
    }
  }
  if (prev_dim != n) throw std::logic_error("weight filtration is not exhaustive");
  return wf;
}

std::vector<int> jordan_type(const QMatrix& N) {
  const int n = N.rows();
  std::vector<int> r(n + 2, 0);
  QMatrix p = QMatrix::identity(n);
  for (int j = 0; j <= n + 1; ++j) {
    r[j] = rank(p);
    p = p * N;
  }
  std::vector<int> sizes;
  for (int j = 1; j <= n; ++j) {
    int exactly = (r[j - 1] - r[j]) - (r[j] - r[j + 1]);
    for (int t = 0; t < exactly; ++t) sizes.push_back(j);
  }
  std::sort(sizes.rbegin(), sizes.rend());
  return sizes;
}

bool graded_semisimple_check(const NilpotentBlocks& blocks) {
  for (const auto& [c, list] : blocks)
    for (const auto& b : list)
      if (!b.is_zero()) return false;
  return true;
}

RefinedSpectrum refine(const std::vector<KmsPoint>& spectrum, const std::vector<QMatrix>& blocks) {
  if (blocks.size() != spectrum.size()) throw std::invalid_argument("one nilpotent block per spectrum entry is required");
  std::map<std::pair<Rational, int>, RefinedEntry> acc;
  for (std::size_t n = 0; n < spectrum.size(); ++n) {
    const auto& p = spectrum[n];
    const auto& N = blocks[n];
    if (N.rows() != p.r || N.cols() != p.r)
      throw std::invalid_argument("nilpotent block size " + std::to_string(N.rows()) + " does not match rank " +
                                  std::to_string(p.r));
    for (auto [k, rk] : weight_filtration(N).graded) {
      auto& e = acc[{p.a, k}];
      e.a = p.a;
      e.k = k;
      e.r += rk;
      auto it = std::find_if(e.by_alpha.begin(), e.by_alpha.end(), [&](const auto& x) { return x.first == p.alpha; });
      if (it == e.by_alpha.end())
        e.by_alpha.emplace_back(p.alpha, rk);
      else
        it->second += rk;
    }
  }
  RefinedSpectrum out;
  for (auto& [key, e] : acc) out.push_back(std::move(e));
  return out;
}

Rational gap(const std::vector<KmsPoint>& spectrum, const Rational& c) {
  std::vector<Rational> w;
  for (const auto& p : spectrum) w.push_back(p.a);
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());
  Rational g = 1;
  for (std::size_t i = 0; i < w.size(); ++i) {
    g = std::min(g, abs_of(w[i] - (c - 1)));
    g = std::min(g, abs_of(c - w[i]));
    if (i > 0) g = std::min(g, Rational(w[i] - w[i - 1]));
  }
  return g;
}

std::vector<KmsPoint> perturb_I(const RefinedSpectrum& refined, const Rational& eps,
                                const std::map<std::pair<Rational, int>, Rational>& targets, const Rational& c,
                                int rank) {
  std::vector<KmsPoint> out;
  const Rational* prev = nullptr;
  for (const auto& e : refined) {
    auto it = targets.find({e.a, e.k});
    if (it == targets.end()) throw std::invalid_argument("missing target for (" + to_string(e.a) + ", " + std::to_string(e.k) + ")");
    const Rational& t = it->second;
    if (prev && !(*prev < t)) throw std::invalid_argument("targets are not strictly increasing");
    if (t <= c - 1 || t > c) throw std::invalid_argument("target " + to_string(t) + " outside (c-1, c]");
    if (abs_of(t - e.a) > eps * rank) throw std::invalid_argument("target " + to_string(t) + " moves too far");
    prev = &it->second;
    for (const auto& [alpha, r] : e.by_alpha) out.push_back({t, alpha, r});
  }
  return out;
}

PerturbPlan perturb_II(const RefinedSpectrum& refined, int m, const Rational& c, int rank, GapGuard guard) {
  if (m < 1) throw std::invalid_argument("m must be positive");
  PerturbPlan plan;
  plan.m = m;
  const Rational inv_m(1, m);
  if (guard == GapGuard::strict) {
    std::vector<KmsPoint> flat;
    for (const auto& e : refined) flat.push_back({e.a, QComplex(0), e.r});
    if (!(Rational(Rational(10 * rank) / m) < gap(flat, c)))
      throw std::invalid_argument("gap precondition 10 rank / m < gap fails for m = " + std::to_string(m));
  }
  std::map<Rational, long> rank_of_a;
  for (const auto& e : refined) {
    if (e.a <= c - 1 || e.a > c) throw std::invalid_argument("weight " + to_string(e.a) + " outside (c-1, c]");
    rank_of_a[e.a] += e.r;
  }
  Rational shift_sum = 0;
  for (const auto& [a, r] : rank_of_a) {
    Rational ap(round_half_away(a * m), Integer(m));
    ap.canonicalize();
    plan.a_prime[a] = ap;
    shift_sum += (ap - a) * r;
  }
  plan.L = shift_sum / rank;
  for (const auto& e : refined) plan.new_weights[{e.a, e.k}] = plan.a_prime[e.a] - plan.L + Rational(Rational(e.k) / m);
  Rational t = -plan.L - c;
  plan.gamma = t - Rational(ceil_of(t * m)) / m;

  const Rational bound = Rational(rank) * inv_m;
  const Rational* prev = nullptr;
  for (const auto& e : refined) {
    const Rational& phi = plan.new_weights[{e.a, e.k}];
    if (prev && !(*prev < phi))
      throw std::invalid_argument("perturbed weights collide for m = " + std::to_string(m) + "; m is too small");
    if (phi <= c - 1 || phi > c)
      throw std::invalid_argument("perturbed weight " + to_string(phi) + " leaves (c-1, c] for m = " + std::to_string(m));
    if (abs_of(phi - e.a) > bound) throw std::logic_error("perturbed weight moved further than rank/m");
    prev = &phi;
  }
  return plan;
}

std::vector<KmsPoint> apply_plan(const RefinedSpectrum& refined, const PerturbPlan& plan) {
  std::vector<KmsPoint> out;
  for (const auto& e : refined) {
    const Rational& phi = plan.new_weights.at({e.a, e.k});
    for (const auto& [alpha, r] : e.by_alpha) out.push_back({phi, alpha, r});
  }
  return out;
}

namespace {

struct Piece {
  int k;
  int r;
};

// Refined pieces (k, r) of each KMS pair on one divisor, in increasing k.
std::map<KmsPair, std::vector<Piece>> pieces_of(const RefinedSpectrum& refined) {
  std::map<KmsPair, std::vector<Piece>> out;
  for (const auto& e : refined)
    for (const auto& [alpha, r] : e.by_alpha) out[{e.a, alpha}].push_back({e.k, r});
  return out;
}

// Northwest-corner split of `sizes` (in order) against `pieces` (in order); both totals agree.
std::vector<std::vector<Piece>> northwest(const std::vector<int>& sizes, const std::vector<Piece>& pieces) {
  std::vector<std::vector<Piece>> out(sizes.size());
  std::size_t p = 0;
  int left_in_piece = pieces.empty() ? 0 : pieces[0].r;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    int need = sizes[s];
    while (need > 0) {
      if (p >= pieces.size()) throw std::logic_error("point spectrum exceeds the divisor ranks");
      int take = std::min(need, left_in_piece);
      out[s].push_back({pieces[p].k, take});
      need -= take;
      left_in_piece -= take;
      if (left_in_piece == 0 && ++p < pieces.size()) left_in_piece = pieces[p].r;
    }
  }
  return out;
}

struct SplitEntry {
  KmsPair u_i;
  int k_i = 0;
  KmsPair u_j;
  int k_j = 0;
  int r = 0;
};

}  // namespace

PerturbedData perturb_II(const ParabolicFlatData& d, const NilpotentBlocks& blocks, int m, GapGuard guard) {
  PerturbedData out;
  out.data = d;
  std::map<Label, std::map<KmsPair, std::vector<Piece>>> pieces;
  for (const auto& c : d.geometry.components) {
    const auto& spec = d.divisor_spectra.at(c);
    std::vector<QMatrix> b;
    auto it = blocks.find(c);
    if (it != blocks.end()) {
      b = it->second;
    } else {
      for (const auto& p : spec) b.emplace_back(p.r, p.r);
    }
    auto refined = refine(spec, b);
    auto plan = perturb_II(refined, m, d.trunc(c), d.rank, guard);
    out.data.divisor_spectra[c] = apply_plan(refined, plan);
    pieces[c] = pieces_of(refined);
    out.refined[c] = std::move(refined);
    out.plans[c] = std::move(plan);
  }

  for (const auto& P : d.geometry.points) {
    auto it = d.point_spectra.find(P.label);
    if (it == d.point_spectra.end()) continue;
    const auto& entries = it->second;

    // Side i: split every entry over the refined pieces of its u_i.
    std::vector<SplitEntry> stage;
    std::map<KmsPair, std::vector<std::size_t>> by_ui;
    for (std::size_t n = 0; n < entries.size(); ++n) by_ui[entries[n].u_i].push_back(n);
    for (const auto& [u, idx] : by_ui) {
      std::vector<int> sizes;
      for (auto n : idx) sizes.push_back(entries[n].r);
      auto split = northwest(sizes, pieces[P.i].at(u));
      for (std::size_t s = 0; s < idx.size(); ++s)
        for (const auto& pc : split[s]) stage.push_back({u, pc.k, entries[idx[s]].u_j, 0, pc.r});
    }
    // Side j: split the pieces again over the refined pieces of u_j.
    std::vector<SplitEntry> fin;
    std::map<KmsPair, std::vector<std::size_t>> by_uj;
    for (std::size_t n = 0; n < stage.size(); ++n) by_uj[stage[n].u_j].push_back(n);
    for (const auto& [u, idx] : by_uj) {
      std::vector<int> sizes;
      for (auto n : idx) sizes.push_back(stage[n].r);
      auto split = northwest(sizes, pieces[P.j].at(u));
      for (std::size_t s = 0; s < idx.size(); ++s)
        for (const auto& pc : split[s]) {
          SplitEntry e = stage[idx[s]];
          e.k_j = pc.k;
          e.r = pc.r;
          fin.push_back(e);
        }
    }
    std::map<std::pair<KmsPair, KmsPair>, int> merged;
    for (const auto& e : fin) {
      KmsPair ni{out.plans[P.i].new_weights.at({e.u_i.a, e.k_i}), e.u_i.alpha};
      KmsPair nj{out.plans[P.j].new_weights.at({e.u_j.a, e.k_j}), e.u_j.alpha};
      merged[{ni, nj}] += e.r;
    }
    auto& dst = out.data.point_spectra[P.label];
    dst.clear();
    for (const auto& [key, r] : merged) dst.push_back({key.first, key.second, r});
  }
  return out;
}

}  // namespace kmsh
