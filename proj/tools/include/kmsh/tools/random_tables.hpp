#pragma once

#include "kmsh/pardata.hpp"
#include "kmsh/perturb.hpp"

#include <random>

namespace kmsh::gen {

using Rng = std::mt19937_64;

int uniform_int(Rng& rng, int lo, int hi);
// p/q with 1 <= q <= max_den and |p/q| <= bound.
Rational random_rational(Rng& rng, int bound, int max_den = 12);
// Uniform rational in [0, 1).
Rational random_fraction(Rng& rng, int max_den = 12);
QComplex random_qcomplex(Rng& rng, int bound, int max_den = 12);

struct TableShape {
  int max_rank = 4;
  int max_components = 3;
  int max_points = 3;
  // At most this many distinct pairs per divisor.
  int max_pairs = 3;
};

DivisorGeometry random_geometry(Rng& rng, const TableShape& shape = {});

// Consistent flat-side tables with random lambda and truncations.
ParabolicFlatData random_flat_data(Rng& rng, const TableShape& shape = {});
// Same but every pair satisfies Re(lambda^-1 alpha) + a = 0.
ParabolicFlatData random_deligne_data(Rng& rng, const TableShape& shape = {});
FilteredLocalSystemData random_localsys(Rng& rng, const TableShape& shape = {});

// One strictly upper triangular block per spectrum entry, zero with probability 1/4.
NilpotentBlocks random_nilpotent_blocks(Rng& rng, const ParabolicFlatData& d);

}  // namespace kmsh::gen
