#include <gtest/gtest.h>

#include "reflat/expr.hpp"

using namespace reflat;

TEST(Checked64, OverflowThrows) {
  checked64 big(std::numeric_limits<std::int64_t>::max() / 2 + 1);
  EXPECT_THROW(big * checked64(2), overflow_error);
  EXPECT_THROW(big + big, overflow_error);
  EXPECT_EQ((checked64(7) * checked64(-6)).value(), -42);
}

TEST(Parse, SeriesLattice) {
  GramLattice L = construct("U + <-46>");
  Mat<Int> g{{0, 1, 0}, {1, 0, 0}, {0, 0, -46}};
  EXPECT_EQ(L.gram(), g);
  EXPECT_EQ(L, series_lattice(23));
}

TEST(Parse, ScaledHyperbolicPlane) {
  GramLattice L = construct("U(11) + <-2>");
  Mat<Int> g{{0, 11, 0}, {11, 0, 0}, {0, 0, -2}};
  EXPECT_EQ(L.gram(), g);
}

TEST(Parse, SyntaxErrorColumn) {
  try {
    parse_lattice("U + <->");
    FAIL() << "no error";
  } catch (const parse_error& e) {
    EXPECT_EQ(e.line, 1);
    EXPECT_EQ(e.column, 5);
  }
}

TEST(Parse, RoundTripIsCanonical) {
  for (std::string s : {"U+<-4>", "  U(2) +E8(2)", "U + E8 + E8 + <-2>", "A2 + [[0,1],[1,0]]",
                        "U(11)+<-2>"}) {
    std::string once = print(parse_lattice(s));
    EXPECT_EQ(print(parse_lattice(once)), once) << s;
    EXPECT_EQ(construct(once), construct(s)) << s;
  }
  EXPECT_EQ(print(parse_lattice("U+<-4>")), "U + <-4>");
}

TEST(Parse, OddDiagonalRejectedInEvenMode) {
  EXPECT_THROW(construct("U + <-3>", true), lattice_error);
  EXPECT_NO_THROW(construct("U + <-3>", false));
}

TEST(Parse, UnknownNameIsSyntaxError) { EXPECT_THROW(parse_lattice("V + <-2>"), parse_error); }

TEST(Lattice, E8IsUnimodularEvenNegative) {
  GramLattice L = construct("E8");
  EXPECT_EQ(abs(L.det()), 1);
  EXPECT_TRUE(L.is_even());
  EXPECT_EQ(signature(L), std::make_pair(0, 8));
}

TEST(Lattice, SignatureOfRank19) {
  GramLattice L = construct("U + E8 + E8 + <-2>");
  EXPECT_EQ(signature(L), std::make_pair(1, 18));
  EXPECT_TRUE(is_hyperbolic(L));
}

TEST(Lattice, SignatureWithZeroLeadingMinor) {
  // U has a vanishing 1x1 leading minor.
  EXPECT_EQ(signature(construct("U")), std::make_pair(1, 1));
  EXPECT_EQ(signature(construct("U(3) + <-6> + <-2>")), std::make_pair(1, 3));
}

TEST(Lattice, DiscriminantGroupOfSeries) {
  for (long k : {1, 2, 6, 23, 60}) {
    DiscriminantGroup d = discriminant_group(series_lattice(k));
    ASSERT_EQ(d.cyclic_orders.size(), 1u);
    EXPECT_EQ(d.cyclic_orders[0], 2 * k);
    EXPECT_EQ(rational_form(series_lattice(k), d.generators[0], d.generators[0]),
              Rat(-1) / Rat(2 * k) * Rat(1));
  }
}

TEST(Lattice, DiscriminantGroupOfTwoElementary) {
  DiscriminantGroup d = discriminant_group(construct("U(2) + E8(2)"));
  EXPECT_EQ(d.cyclic_orders, Vec<Int>(10, 2));
}

TEST(Matrix, SmithNormalForm) {
  Mat<Int> a{{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}};
  SmithForm s = smith_normal_form(a);
  EXPECT_EQ(s.diagonal, (Vec<Int>{2, 6, 12}));
  EXPECT_EQ(mat_mul(mat_mul(s.U, a), s.V), ([&] {
              Mat<Int> d(3, Vec<Int>(3, 0));
              for (int i = 0; i < 3; ++i) d[i][i] = s.diagonal[i];
              return d;
            })());
}

TEST(Matrix, SmithNormalFormDivisiblePivot) {
  // Entries divisible by the pivot used to cycle forever.
  Mat<Int> a{{2, 4}, {4, 8}};
  SmithForm s = smith_normal_form(a);
  EXPECT_EQ(s.diagonal, (Vec<Int>{2, 0}));
}

TEST(Matrix, HermiteAndKernel) {
  Mat<Int> h = hermite_rows({{2, 4, 6}, {1, 2, 3}, {0, 1, 1}});
  EXPECT_EQ(h.size(), 2u);
  auto ker = integer_kernel(Mat<Int>{{1, 1, 0}});
  ASSERT_EQ(ker.size(), 2u);
  for (const auto& v : ker) EXPECT_EQ(v[0] + v[1], 0);
}

TEST(Lattice, SpanAndIndex) {
  GramLattice L = series_lattice(2);
  SublatticeSpan s = span_and_index(L, {{2, 0, 0}, {0, 1, 0}, {0, 0, 2}});
  ASSERT_TRUE(s.index);
  EXPECT_EQ(*s.index, 4);
  SublatticeSpan t = span_and_index(L, {{1, 0, 0}, {2, 0, 0}});
  EXPECT_FALSE(t.index);
  EXPECT_EQ(t.saturated_rank, 1u);
}

TEST(Lattice, IsometricBoundedSearch) {
  GramLattice a = construct("U + <-2>");
  GramLattice b(Mat<Int>{{0, 1, 0}, {1, -2, 0}, {0, 0, -2}});
  auto v = isometric_bounded_search(a, b);
  ASSERT_TRUE(std::holds_alternative<Isometric>(v));
  Mat<Int> c = std::get<Isometric>(v).witness;
  EXPECT_EQ(mat_mul(mat_mul(transpose(c), b.gram()), c), a.gram());
  EXPECT_TRUE(std::holds_alternative<Distinct>(
      isometric_bounded_search(construct("U + <-2>"), construct("U + <-4>"))));
  // Same determinant, different discriminant forms: U(2)+<-2> vs U+<-8>.
  EXPECT_TRUE(std::holds_alternative<Distinct>(
      isometric_bounded_search(construct("U(2) + <-2>"), construct("U + <-8>"))));
}

TEST(Lattice, IsometryCheck) {
  GramLattice L = series_lattice(23);
  Mat<Int> c{{25, 92, 460}, {23, 81, 414}, {-5, -18, -91}};
  EXPECT_TRUE(is_isometry(L, c));
  c[0][0] += 1;
  EXPECT_FALSE(is_isometry(L, c));
}
