#pragma once

#include "kmsh/pardata.hpp"
#include "kmsh/qlinalg.hpp"

#include <map>
#include <utility>
#include <vector>

namespace kmsh {

struct WeightFiltration {
  // (k, rank Gr_k) for every nonzero graded piece, k increasing.
  std::vector<std::pair<int, int>> graded;
  // Columns: a basis adapted to W, grouped by increasing k.
  QMatrix basis;
  // Index of the first basis column of each W_k, in the order of `graded`.
  std::vector<int> offsets;
};

// Throws std::invalid_argument for non-nilpotent input.
WeightFiltration weight_filtration(const QMatrix& N);

// Jordan block sizes read off from ranks of powers; used as a test oracle.
std::vector<int> jordan_type(const QMatrix& N);

// Per divisor, one nilpotent block per divisor-spectrum entry (same order).
using NilpotentBlocks = std::map<Label, std::vector<QMatrix>>;

bool graded_semisimple_check(const NilpotentBlocks& blocks);

struct RefinedEntry {
  Rational a;
  int k = 0;
  int r = 0;
  // How r splits across the residue eigenvalues sharing the weight a.
  std::vector<std::pair<QComplex, int>> by_alpha;
};

// Entries sorted lexicographically by (a, k).
using RefinedSpectrum = std::vector<RefinedEntry>;

RefinedSpectrum refine(const std::vector<KmsPoint>& spectrum, const std::vector<QMatrix>& blocks);

// Minimal distance between distinct weights, and from each weight to {c-1, c}.
Rational gap(const std::vector<KmsPoint>& spectrum, const Rational& c);

// Scheme (I): explicit targets, keyed by (a, k).
std::vector<KmsPoint> perturb_I(const RefinedSpectrum& refined, const Rational& eps,
                                const std::map<std::pair<Rational, int>, Rational>& targets, const Rational& c,
                                int rank);

enum class GapGuard {
  // 10 rank / m < gap, as stated for the construction.
  strict,
  // Only the properties the construction needs: phi strictly increasing, in (c-1, c], |phi - a| <= rank/m.
  structural,
};

struct PerturbPlan {
  int m = 1;
  Rational gamma;
  Rational L;
  std::map<Rational, Rational> a_prime;
  std::map<std::pair<Rational, int>, Rational> new_weights;
};

// Scheme (II) on one divisor. Throws std::invalid_argument when the guard fails.
PerturbPlan perturb_II(const RefinedSpectrum& refined, int m, const Rational& c, int rank,
                       GapGuard guard = GapGuard::structural);

std::vector<KmsPoint> apply_plan(const RefinedSpectrum& refined, const PerturbPlan& plan);

struct PerturbedData {
  std::map<Label, RefinedSpectrum> refined;
  std::map<Label, PerturbPlan> plans;
  ParabolicFlatData data;
};

// Scheme (II) on every divisor, point spectra split to match the refined pieces.
PerturbedData perturb_II(const ParabolicFlatData& d, const NilpotentBlocks& blocks, int m,
                         GapGuard guard = GapGuard::structural);

}  // namespace kmsh
