#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "reflat/lattice.hpp"

namespace reflat {

enum class ConeKind { interior_positive, isotropic, negative };
enum class ConeHalf { plus, minus, none };

struct ConeClassification {
  ConeKind kind;
  ConeHalf half;
};

inline const char* to_string(ConeKind k) {
  switch (k) {
    case ConeKind::interior_positive: return "interior_positive";
    case ConeKind::isotropic: return "isotropic";
    case ConeKind::negative: return "negative";
  }
  return "?";
}

// Side of the light cone relative to a reference vector r with r^2 >= 0.
// For x in the closed cone, (x, r) > 0 unless x and r are proportional
// isotropic vectors.
template <class Z>
int cone_side(const Mat<Z>& g, const Vec<Z>& x, const Vec<Z>& r) {
  Z p = form(g, x, r);
  if (p != Z(0)) return sign_of(p);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (r[i] != Z(0)) return sign_of(x[i]) * sign_of(r[i]);
  return 0;
}

inline ConeClassification classify_vector(const GramLattice& L,
                                          const Vec<Int>& x,
                                          const Vec<Int>& reference) {
  if (is_zero(x)) throw lattice_error("zero vector");
  Int q = norm(L, x);
  if (q < 0) return {ConeKind::negative, ConeHalf::none};
  ConeKind k = q > 0 ? ConeKind::interior_positive : ConeKind::isotropic;
  int s = cone_side(L.gram(), x, reference);
  return {k, s > 0 ? ConeHalf::plus : ConeHalf::minus};
}

enum class PairRelation { intersecting, parallel_at_infinity, ultraparallel };

inline const char* to_string(PairRelation r) {
  switch (r) {
    case PairRelation::intersecting: return "intersecting";
    case PairRelation::parallel_at_infinity: return "parallel_at_infinity";
    case PairRelation::ultraparallel: return "ultraparallel";
  }
  return "?";
}

struct HyperplanePairClass {
  PairRelation relation;
  Rat witness;  // (d1,d2)^2 / (d1^2 d2^2) = cosh^2 of the distance if > 1
};

template <class Z>
PairRelation pair_relation(const Z& p, const Z& n1, const Z& n2) {
  Z lhs = p * p, rhs = n1 * n2;
  if (lhs < rhs) return PairRelation::intersecting;
  if (lhs == rhs) return PairRelation::parallel_at_infinity;
  return PairRelation::ultraparallel;
}

inline HyperplanePairClass classify_pair(const GramLattice& L,
                                         const Vec<Int>& d1,
                                         const Vec<Int>& d2) {
  Int n1 = norm(L, d1), n2 = norm(L, d2);
  if (n1 >= 0 || n2 >= 0) throw lattice_error("roots must have negative norm");
  Int p = inner_product(L, d1, d2);
  return {pair_relation(p, n1, n2), ratio(p * p, n1 * n2)};
}

// Gram matrix of e, g, f, h from the quadrangle estimate.
inline Mat<Int> lemma2_gram(const Int& b, const Int& x) {
  return {{-2, 0, b, 0}, {0, -2, 2, x}, {b, 2, -2, 2}, {0, x, 2, -2}};
}

inline Int lemma2_gram_det(const Int& b, const Int& x) {
  return determinant(lemma2_gram(b, x));
}

inline Int lemma2_polynomial(const Int& b, const Int& x) {
  return x * x * (b * b - 4) - 16 * x - 4 * b * b - 16;
}

inline Rat lemma_bound(const Rat& a) {
  if (a <= 2) throw std::domain_error("lemma_bound needs a > 2");
  return Rat(14) + Rat(64) / (a * a - 4);
}

struct Interval {
  Rat lo, hi;
  Rat width() const { return hi - lo; }
  bool contains(const Rat& q) const { return lo <= q && q <= hi; }
  bool overlaps(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
};

inline Interval operator+(const Interval& a, const Interval& b) {
  return {a.lo + b.lo, a.hi + b.hi};
}

// Enclosure of sqrt(v) for an enclosure v of a nonnegative number.
inline Interval sqrt_enclosure(const Interval& v, const Rat& tol) {
  auto root_below = [&](const Rat& t, bool upper) {
    Rat lo = 0, hi = t + 1;
    while (hi - lo > tol / 4) {
      Rat mid = (lo + hi) / 2;
      if (mid * mid <= t)
        lo = mid;
      else
        hi = mid;
    }
    return upper ? hi : lo;
  };
  return {root_below(v.lo, false), root_below(v.hi, true)};
}

struct LemmaConstants {
  Interval sqrt5;
  Interval narrow_bound;  // 10 + 4 sqrt 5
  Interval a0_squared;    // 8 + 4 sqrt 5
  Interval a0;            // positive root of x^4 - 16 x^2 - 16

  static LemmaConstants compute(const Rat& tol = ratio(1, 1000000000000)) {
    LemmaConstants c;
    c.sqrt5 = sqrt_enclosure({5, 5}, tol / 8);
    c.narrow_bound = {10 + 4 * c.sqrt5.lo, 10 + 4 * c.sqrt5.hi};
    c.a0_squared = {8 + 4 * c.sqrt5.lo, 8 + 4 * c.sqrt5.hi};
    c.a0 = sqrt_enclosure(c.a0_squared, tol / 8);
    return c;
  }

  // bound_fn is decreasing on (2, inf).
  static Interval bound_fn(const Interval& a) {
    return {lemma_bound(a.hi), lemma_bound(a.lo)};
  }
};

inline Int strip_invariant(const GramLattice& L, const Vec<Int>& e,
                           const std::vector<Vec<Int>>& roots) {
  if (roots.empty()) throw lattice_error("empty root list");
  if (norm(L, e) != -2) throw lattice_error("e must have norm -2");
  Int a = 0;
  for (const auto& d : roots) {
    Int p = abs(inner_product(L, e, d));
    if (p > a) a = p;
  }
  return a;
}

// Display only: hyperbolic distance between two ultraparallel walls.
inline double wall_distance(const HyperplanePairClass& c) {
  double w = to_double(c.witness);
  return w > 1 ? std::acosh(std::sqrt(w)) : 0.0;
}

}  // namespace reflat
