#include <gtest/gtest.h>

#include "reflat/expr.hpp"
#include "reflat/k3.hpp"

using namespace reflat;

TEST(TwoElementary, GenericFormulas) {
  struct Case {
    const char* expr;
    int r, a, g, k;
  };
  for (auto c : {Case{"U + <-2>", 3, 1, 9, 1}, Case{"U(2) + <-2>", 3, 3, 8, 0},
                 Case{"U + E8 + E8 + <-2>", 19, 1, 1, 9}, Case{"U + E8", 10, 0, 6, 5}}) {
    auto d = two_elementary_data(construct(c.expr));
    EXPECT_EQ(d.r, c.r) << c.expr;
    EXPECT_EQ(d.a, c.a) << c.expr;
    EXPECT_EQ(d.kind, TwoElementaryCase::generic);
    ASSERT_TRUE(d.g && d.k_curves);
    EXPECT_EQ(*d.g, c.g) << c.expr;
    EXPECT_EQ(*d.k_curves, c.k) << c.expr;
  }
}

TEST(TwoElementary, Exceptions) {
  auto a = two_elementary_data(construct("U(2) + E8(2)"));
  EXPECT_EQ(a.kind, TwoElementaryCase::exception_U2E82);
  EXPECT_FALSE(a.g);
  EXPECT_EQ(a.fixed_set, "empty");
  auto b = two_elementary_data(construct("U + E8(2)"));
  EXPECT_EQ(b.kind, TwoElementaryCase::exception_UE82);
  EXPECT_EQ(*b.g, 1);
  EXPECT_EQ(*b.k_curves, 0);
}

TEST(TwoElementary, DeltaDistinguishesForms) {
  EXPECT_EQ(two_elementary_data(construct("U(2)")).delta, 0);
  EXPECT_EQ(two_elementary_data(construct("U + <-2>")).delta, 1);
}

TEST(TwoElementary, Rejections) {
  EXPECT_THROW(two_elementary_data(construct("U + <-4>")), lattice_error);
  EXPECT_THROW(two_elementary_data(construct("U + <-3>")), lattice_error);
  EXPECT_THROW(two_elementary_data(GramLattice(Mat<Int>{{-2, 0}, {0, -2}})), lattice_error);
}

TEST(RootSpan, SeriesIndices) {
  std::map<long, long> idx{{1, 1}, {2, 4}, {3, 6}, {7, 2}};
  for (auto [k, want] : idx) {
    auto rs = root_sublattice_span(series_lattice(k));
    ASSERT_FALSE(rs.empty) << k;
    ASSERT_TRUE(rs.span.index) << k;
    EXPECT_EQ(*rs.span.index, want) << k;
    EXPECT_GE(rs.stabilization_bound, 2);
  }
}

TEST(RootSpan, NoMinusTwoVectors) {
  auto rs = root_sublattice_span(construct("U(2) + E8(2)"));
  EXPECT_TRUE(rs.empty);
  EXPECT_FALSE(rs.note.empty());
}

TEST(Intermediate, IndicesForS2) {
  GramLattice L = series_lattice(2);
  auto rs = root_sublattice_span(L);
  auto ms = intermediate_lattices(L, rs.span);
  std::vector<Int> idx;
  for (const auto& m : ms) idx.push_back(m.index);
  EXPECT_EQ(idx, (std::vector<Int>{1, 2, 4}));
  for (const auto& m : ms) EXPECT_TRUE(m.lattice.is_even());
}

TEST(Intermediate, RequiresFullRank) {
  GramLattice L = series_lattice(2);
  SublatticeSpan s = span_and_index(L, {{1, 0, 0}});
  EXPECT_THROW(intermediate_lattices(L, s), lattice_error);
}

TEST(Embedding, RankBound) {
  EXPECT_EQ(embeds_in_LK3_rank_bound(construct("U + E8 + <-2>")), EmbeddingVerdict::yes_by_rank);
  EXPECT_EQ(embeds_in_LK3_rank_bound(construct("U + E8 + E8 + <-2>")), EmbeddingVerdict::unknown);
}
