#include "kmsh/charnum.hpp"
#include "kmsh/perturb.hpp"
#include "kmsh/tools/random_tables.hpp"

#include <doctest.h>

#include <algorithm>

using namespace kmsh;

namespace {

Rational q(const char* s) { return parse_rational(s); }

QMatrix jordan(const std::vector<int>& sizes) {
  int n = 0;
  for (int s : sizes) n += s;
  QMatrix N(n, n);
  int off = 0;
  for (int s : sizes) {
    for (int k = 0; k + 1 < s; ++k) N(off + k, off + k + 1) = 1;
    off += s;
  }
  return N;
}

// Conjugate by a fixed unimodular matrix so the block structure is hidden.
QMatrix scramble(const QMatrix& N) {
  int n = N.rows();
  QMatrix S = QMatrix::identity(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) S(i, j) = QComplex(Rational((i + 2 * j) % 3 - 1));
  QMatrix L = QMatrix::identity(n);
  for (int i = 1; i < n; ++i) L(i, i - 1) = QComplex(Rational(i % 2 ? 1 : -2), Rational(1));
  QMatrix T = S * L;
  return T * N * T.inverse();
}

std::vector<std::pair<int, int>> graded(const QMatrix& N) { return weight_filtration(N).graded; }

}  // namespace

TEST_CASE("weight filtration of small nilpotents") {
  CHECK(graded(QMatrix(3, 3)) == std::vector<std::pair<int, int>>{{0, 3}});
  CHECK(graded(jordan({2})) == std::vector<std::pair<int, int>>{{-1, 1}, {1, 1}});
  CHECK(graded(jordan({2, 1})) == std::vector<std::pair<int, int>>{{-1, 1}, {0, 1}, {1, 1}});
  CHECK(graded(jordan({3})) == std::vector<std::pair<int, int>>{{-2, 1}, {0, 1}, {2, 1}});
  CHECK_THROWS_AS(weight_filtration(QMatrix::identity(2)), std::invalid_argument);
}

TEST_CASE("weight filtration against the Jordan-type oracle") {
  // Gr_k has rank #{blocks of size s with k in {-(s-1), -(s-3), ..., s-1}}
  for (auto sizes : std::vector<std::vector<int>>{{1}, {2}, {3}, {2, 2}, {3, 1}, {3, 2, 1}, {4, 2}, {2, 1, 1}}) {
    QMatrix N = scramble(jordan(sizes));
    auto jt = jordan_type(N);
    auto expect = sizes;
    std::sort(expect.rbegin(), expect.rend());
    std::sort(jt.rbegin(), jt.rend());
    CHECK(jt == expect);
    std::map<int, int> oracle;
    for (int s : sizes)
      for (int k = -(s - 1); k <= s - 1; k += 2) oracle[k] += 1;
    WeightFiltration wf = weight_filtration(N);
    std::map<int, int> got(wf.graded.begin(), wf.graded.end());
    CHECK(got == oracle);
    CHECK(rank(wf.basis) == N.rows());
  }
}

TEST_CASE("N lowers the weight by two") {
  QMatrix N = scramble(jordan({3, 2}));
  WeightFiltration wf = weight_filtration(N);
  // In the adapted basis the matrix of N is strictly block lower with respect to increasing k: N W_k in W_(k-2).
  QMatrix B = wf.basis.inverse() * N * wf.basis;
  std::vector<int> level(N.rows());
  for (std::size_t g = 0; g < wf.graded.size(); ++g) {
    int end = g + 1 < wf.offsets.size() ? wf.offsets[g + 1] : N.rows();
    for (int c = wf.offsets[g]; c < end; ++c) level[c] = wf.graded[g].first;
  }
  for (int i = 0; i < N.rows(); ++i)
    for (int j = 0; j < N.rows(); ++j)
      if (!B(i, j).is_zero()) CHECK(level[i] <= level[j] - 2);
}

TEST_CASE("refinement") {
  std::vector<KmsPoint> spec{{q("-1/4"), 0, 2}};
  RefinedSpectrum r = refine(spec, {jordan({2})});
  REQUIRE(r.size() == 2);
  CHECK(r[0].k == -1);
  CHECK(r[1].k == 1);
  CHECK(r[0].r == 1);

  r = refine({{q("-1/2"), 0, 1}, {q("-1/4"), 1, 2}}, {QMatrix(1, 1), QMatrix(2, 2)});
  REQUIRE(r.size() == 2);
  CHECK(r[0].a == q("-1/2"));
  CHECK(r[1].r == 2);
  CHECK(r[1].k == 0);
}

TEST_CASE("scheme (II) by hand") {
  RefinedSpectrum r = refine({{q("-1/4"), 0, 2}}, {jordan({2})});
  PerturbPlan p = perturb_II(r, 10, 0, 2);
  CHECK(p.a_prime.at(q("-1/4")) == q("-3/10"));
  CHECK(p.L == q("-1/20"));
  CHECK(p.new_weights.at({q("-1/4"), -1}) == q("-7/20"));
  CHECK(p.new_weights.at({q("-1/4"), 1}) == q("-3/20"));
  auto out = apply_plan(r, p);
  CHECK(wt(out) == q("-1/2"));
  // strict gap guard rejects the same data
  CHECK_THROWS_AS(perturb_II(r, 10, 0, 2, GapGuard::strict), std::invalid_argument);
}

TEST_CASE("scheme (II) leaves lattice weights alone") {
  RefinedSpectrum r = refine({{q("-7/10"), 0, 1}, {q("-1/5"), 0, 1}}, {QMatrix(1, 1), QMatrix(1, 1)});
  PerturbPlan p = perturb_II(r, 10, 0, 2);
  CHECK(p.L == 0);
  CHECK(apply_plan(r, p)[0].a == q("-7/10"));
  CHECK(apply_plan(r, p)[1].a == q("-1/5"));
}

TEST_CASE("scheme (II) preserves the weight sum") {
  RefinedSpectrum r = refine({{q("-3/5"), 0, 1}, {q("-1/4"), 0, 1}}, {QMatrix(1, 1), QMatrix(1, 1)});
  PerturbPlan p = perturb_II(r, 20, 0, 2);
  CHECK(wt(apply_plan(r, p)) == q("-17/20"));
}

TEST_CASE("scheme (I)") {
  RefinedSpectrum r = refine({{q("-1/4"), 0, 2}}, {jordan({2})});
  auto out = perturb_I(r, q("1/10"), {{{q("-1/4"), -1}, q("-3/10")}, {{q("-1/4"), 1}, q("-1/5")}}, 0, 2);
  REQUIRE(out.size() == 2);
  CHECK(out[0].a != out[1].a);
  CHECK_THROWS(perturb_I(r, q("1/10"), {{{q("-1/4"), -1}, q("-1/5")}, {{q("-1/4"), 1}, q("-3/10")}}, 0, 2));
}

TEST_CASE("graded semisimple check") {
  CHECK(graded_semisimple_check({{"D1", {QMatrix(2, 2)}}}));
  CHECK_FALSE(graded_semisimple_check({{"D1", {jordan({2})}}}));
}

TEST_CASE("data-level scheme (II) on random tables") {
  gen::Rng rng(5);
  gen::TableShape shape;
  shape.max_rank = 3;
  shape.max_pairs = 2;
  int done = 0;
  for (int n = 0; n < 200 && done < 50; ++n) {
    ParabolicFlatData d = gen::random_flat_data(rng, shape);
    NilpotentBlocks b = gen::random_nilpotent_blocks(rng, d);
    PerturbedData p;
    try {
      p = perturb_II(d, b, 100);
    } catch (const std::invalid_argument&) {
      continue;
    }
    ++done;
    CHECK(validate(p.data).empty());
    CHECK(par_c1_flat(p.data) == par_c1_flat(d));
    // perturbed data is graded semisimple: every refined piece has its own weight
    for (const auto& [c, spec] : p.data.divisor_spectra) {
      std::map<KmsPair, int> seen;
      for (const auto& e : spec) seen[e.pair()] += 1;
      for (const auto& [k, v] : seen) CHECK(v == 1);
    }
  }
  CHECK(done >= 20);
}
