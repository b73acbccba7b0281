#include <algorithm>

#include <gtest/gtest.h>

#include "reflat/chamber.hpp"
#include "reflat/expr.hpp"

using namespace reflat;

namespace {

ReflectivityReport all(long k) { return classify_type(series_lattice(k), RootPolicy::all_norms); }
ReflectivityReport two(const GramLattice& L) { return classify_type(L, RootPolicy::two_only); }

bool preserves_walls(const GramLattice& L, const ReflectivityReport& r, const Mat<Int>& c) {
  // Images of low walls are walls enumerated later or earlier.
  std::set<Vec<Int>> walls;
  for (const auto& x : r.chamber.roots) walls.insert(x.coords);
  std::size_t hits = 0;
  for (const auto& x : r.chamber.roots) hits += walls.count(act(c, x.coords));
  (void)L;
  return hits >= 3;
}

}  // namespace

TEST(Classify, IsometryKinds) {
  GramLattice L = series_lattice(23);
  auto t = classify_isometry(L, {{25, 92, 460}, {23, 81, 414}, {-5, -18, -91}});
  EXPECT_EQ(t.kind, SymmetryKind::hyperbolic_translation);
  EXPECT_EQ(act(Mat<Int>{{25, 92, 460}, {23, 81, 414}, {-5, -18, -91}}, t.witness), t.witness);
  EXPECT_EQ(canonical_line(t.witness), canonical_line(Vec<Int>{-46, -23, 7}));

  GramLattice L43 = series_lattice(43);
  Mat<Int> c43{{172, 289, 2924}, {25, 43, 430}, {-10, -17, -171}};
  auto s = classify_isometry(L43, c43);
  EXPECT_EQ(s.kind, SymmetryKind::skew_symmetry);
  EXPECT_EQ(act(c43, Vec<Int>{-34, -10, 3}), (Vec<Int>{34, 10, -3}));
  auto id = classify_isometry(L, identity_matrix<Int>(3));
  EXPECT_EQ(id.kind, SymmetryKind::finite_order);
  EXPECT_EQ(id.order, 1);
}

TEST(Classify, ParabolicKind) {
  // Unipotent isometry of U + <-2> fixing (1,0,0): Eichler transvection.
  GramLattice L = series_lattice(1);
  // x -> x + (x,e) v - (x,v) e + (x,e) e with e = (1,0,0), v = (0,0,1)
  Mat<Int> c{{1, 1, 2}, {0, 1, 0}, {0, 1, 1}};
  ASSERT_TRUE(is_isometry(L, c));
  auto s = classify_isometry(L, c);
  EXPECT_EQ(s.kind, SymmetryKind::parabolic_translation);
  EXPECT_EQ(canonical_line(s.witness), canonical_line(Vec<Int>{1, 0, 0}));
}

TEST(Elliptic, SmallSeries) {
  std::map<long, std::size_t> walls{{1, 3}, {2, 3}, {5, 4}, {11, 6}, {17, 8}};
  for (auto [k, n] : walls) {
    auto r = all(k);
    EXPECT_EQ(r.type, ReflectivityType::elliptic) << k;
    EXPECT_TRUE(r.certified);
    EXPECT_EQ(r.chamber.status, ChamberStatus::closed_finite_volume);
    EXPECT_EQ(r.chamber.roots.size(), n) << k;
  }
}

TEST(Elliptic, K11Gram) {
  auto r = all(11);
  std::vector<Vec<Int>> v;
  for (const auto& x : r.chamber.roots) v.push_back(x.coords);
  Mat<Int> g = gram_of(r.chamber.lattice, v);
  std::multiset<Int> diag;
  for (std::size_t i = 0; i < g.size(); ++i) diag.insert(g[i][i]);
  EXPECT_EQ(diag, (std::multiset<Int>{-2, -2, -22, -22, -22, -22}));
}

TEST(Hyperbolic, K23) {
  auto r = all(23);
  ASSERT_EQ(r.type, ReflectivityType::hyperbolic);
  ASSERT_TRUE(r.w);
  EXPECT_EQ(norm(r.chamber.lattice, *r.w), -138);
  EXPECT_EQ(canonical_line(*r.w), canonical_line(Vec<Int>{-46, -23, 7}));
  for (const auto& g : r.generators) {
    EXPECT_TRUE(is_isometry(r.chamber.lattice, g.matrix));
    Vec<Int> cw = act(g.matrix, *r.w);
    EXPECT_TRUE(cw == *r.w || cw == negated(*r.w));
    EXPECT_TRUE(preserves_walls(r.chamber.lattice, r, g.matrix));
  }
  EXPECT_TRUE(r.certified);
  EXPECT_FALSE(r.orbits.base_e.empty());
}

TEST(Hyperbolic, K35Kinds) {
  auto r = all(35);
  ASSERT_EQ(r.type, ReflectivityType::hyperbolic);
  EXPECT_EQ(norm(r.chamber.lattice, *r.w), -30);
  std::set<SymmetryKind> kinds;
  for (const auto& s : r.symmetries) kinds.insert(s.kind);
  EXPECT_TRUE(kinds.count(SymmetryKind::central_symmetry));
  EXPECT_TRUE(kinds.count(SymmetryKind::hyperbolic_translation));
}

TEST(Hyperbolic, S0SpannedByW) {
  auto r = all(29);
  ASSERT_EQ(r.type, ReflectivityType::hyperbolic);
  ASSERT_TRUE(r.s0);
  ASSERT_EQ(r.s0->generators.size(), 1u);
  EXPECT_EQ(canonical_line(r.s0->generators[0]), canonical_line(*r.w));
}

TEST(NotReflective, K27HasTwoAxes) {
  auto r = all(27);
  EXPECT_EQ(r.type, ReflectivityType::not_reflective);
  EXPECT_GE(r.axes.size(), 2u);
  EXPECT_TRUE(r.certified);
}

TEST(TwoReflective, S2Parabolic) {
  auto r = two(series_lattice(2));
  ASSERT_EQ(r.type, ReflectivityType::parabolic);
  ASSERT_TRUE(r.c);
  EXPECT_EQ(canonical_line(*r.c), canonical_line(Vec<Int>{2, 0, 0}));
  EXPECT_EQ(r.orbits.base_e.size(), 1u);
  EXPECT_EQ(r.cusp_orbits.size(), 1u);
  ASSERT_EQ(r.generators.size(), 2u);
  for (const auto& g : r.generators) {
    EXPECT_EQ(g.order, 2);
    EXPECT_EQ(act(g.matrix, *r.c), *r.c);
  }
  auto prod = classify_isometry(r.chamber.lattice,
                                mat_mul(r.generators[0].matrix, r.generators[1].matrix));
  EXPECT_EQ(prod.kind, SymmetryKind::parabolic_translation);
}

TEST(Budget, TinyBudgetIsUndecided) {
  Budgets b;
  b.max_height = 8;
  auto r = classify_type(series_lattice(23), RootPolicy::all_norms, b);
  EXPECT_EQ(r.type, ReflectivityType::undecided);
  EXPECT_FALSE(r.certified);
  EXPECT_EQ(r.chamber.status, ChamberStatus::open_budget_exhausted);
}

TEST(Budget, DoublingKeepsCertifiedType) {
  for (long k : {5, 23, 27, 40}) {
    Budgets a, b;
    b.max_height = a.max_height * 2;
    b.initial_height = a.initial_height * 2;
    auto x = classify_type(series_lattice(k), RootPolicy::all_norms, a);
    auto y = classify_type(series_lattice(k), RootPolicy::all_norms, b);
    EXPECT_EQ(x.type, y.type) << k;
  }
}

TEST(Rank, HigherRankEnumeratesOnly) {
  auto r = classify_type(construct("U + <-2> + <-2>"), RootPolicy::all_norms);
  EXPECT_EQ(r.type, ReflectivityType::undecided);
  EXPECT_FALSE(r.note.empty());
}
