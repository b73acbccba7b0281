#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "reflat/arith.hpp"
#include "reflat/matrix.hpp"

namespace reflat {

struct lattice_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class GramLattice {
 public:
  GramLattice() = default;
  explicit GramLattice(Mat<Int> gram, std::vector<std::string> labels = {})
      : gram_(std::move(gram)), labels_(std::move(labels)) {
    std::size_t n = gram_.size();
    if (n == 0) throw lattice_error("empty Gram matrix");
    for (const auto& row : gram_)
      if (row.size() != n) throw lattice_error("Gram matrix is not square");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (gram_[i][j] != gram_[j][i])
          throw lattice_error("Gram matrix is not symmetric");
    det_ = determinant(gram_);
    if (det_ == 0) throw lattice_error("degenerate form");
  }

  std::size_t rank() const { return gram_.size(); }
  const Mat<Int>& gram() const { return gram_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const Int& det() const { return det_; }

  bool is_even() const {
    for (std::size_t i = 0; i < rank(); ++i)
      if (gram_[i][i] % 2 != 0) return false;
    return true;
  }

  friend bool operator==(const GramLattice& a, const GramLattice& b) {
    return a.gram_ == b.gram_;
  }

 private:
  Mat<Int> gram_;
  std::vector<std::string> labels_;
  Int det_ = 1;
};

template <class Z>
Z form(const Mat<Z>& g, const Vec<Z>& x, const Vec<Z>& y) {
  Z s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == Z(0)) continue;
    Z t = 0;
    for (std::size_t j = 0; j < y.size(); ++j) t += g[i][j] * y[j];
    s += x[i] * t;
  }
  return s;
}

inline Int inner_product(const GramLattice& L, const Vec<Int>& x,
                         const Vec<Int>& y) {
  if (x.size() != L.rank() || y.size() != L.rank())
    throw lattice_error("dimension mismatch");
  return form(L.gram(), x, y);
}

inline Int norm(const GramLattice& L, const Vec<Int>& x) {
  return inner_product(L, x, x);
}

// Signature by exact symmetric elimination. Zero pivots are removed by
// congruent row/column operations.
inline std::pair<int, int> signature(const GramLattice& L) {
  Mat<Rat> a = to_rational(L.gram());
  std::size_t n = a.size();
  int pos = 0, neg = 0;
  std::vector<bool> used(n, false);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t p = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i] && a[i][i] != 0) {
        p = i;
        break;
      }
    if (p == n) {
      std::size_t pi = n, pj = n;
      for (std::size_t i = 0; i < n && pi == n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (!used[i] && !used[j] && i != j && a[i][j] != 0) {
            pi = i;
            pj = j;
            break;
          }
      if (pi == n) throw lattice_error("degenerate form");
      // e_i <- e_i + e_j makes the diagonal entry 2 a_ij
      for (std::size_t c = 0; c < n; ++c) a[pi][c] += a[pj][c];
      for (std::size_t r = 0; r < n; ++r) a[r][pi] += a[r][pj];
      p = pi;
    }
    Rat piv = a[p][p];
    (piv > 0 ? pos : neg)++;
    used[p] = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i] || a[i][p] == 0) continue;
      Rat f = a[i][p] / piv;
      for (std::size_t j = 0; j < n; ++j) a[i][j] -= f * a[p][j];
    }
    for (std::size_t j = 0; j < n; ++j)
      if (!used[j]) a[p][j] = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i]) a[i][p] = 0;
  }
  return {pos, neg};
}

inline bool is_hyperbolic(const GramLattice& L) {
  auto [p, m] = signature(L);
  return p == 1 && m == static_cast<int>(L.rank()) - 1;
}

struct DiscriminantGroup {
  Vec<Int> cyclic_orders;           // d_1 | d_2 | ..., all > 1
  Int exponent = 1;
  std::vector<Vec<Rat>> generators;  // in lattice coordinates, order d_i
  Int order() const {
    Int o = 1;
    for (const auto& d : cyclic_orders) o *= d;
    return o;
  }
};

inline DiscriminantGroup discriminant_group(const GramLattice& L) {
  SmithForm s = smith_normal_form(L.gram());
  DiscriminantGroup g;
  // G = U^-1 D V^-1, so G^-1 = V D^-1 U and V e_i / d_i generate S*/S.
  for (std::size_t i = 0; i < s.diagonal.size(); ++i) {
    const Int& d = s.diagonal[i];
    if (d == 1) continue;
    g.cyclic_orders.push_back(d);
    Vec<Rat> gen;
    for (std::size_t r = 0; r < L.rank(); ++r) gen.push_back(ratio(s.V[r][i], d));
    g.generators.push_back(std::move(gen));
  }
  if (!g.cyclic_orders.empty()) g.exponent = g.cyclic_orders.back();
  return g;
}

inline Rat rational_form(const GramLattice& L, const Vec<Rat>& x,
                         const Vec<Rat>& y) {
  Rat s = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j)
      if (x[i] != 0 && y[j] != 0) s += x[i] * Rat(L.gram()[i][j]) * y[j];
  return s;
}

inline bool is_isometry(const GramLattice& L, const Mat<Int>& c) {
  std::size_t n = L.rank();
  if (c.size() != n) return false;
  for (const auto& row : c)
    if (row.size() != n) return false;
  Int d = determinant(c);
  if (d != 1 && d != -1) return false;
  return mat_mul(mat_mul(transpose(c), L.gram()), c) == L.gram();
}

struct SublatticeSpan {
  std::vector<Vec<Int>> generators;  // Hermite basis of the span
  std::size_t saturated_rank = 0;
  std::optional<Int> index;  // empty when the span has lower rank
};

inline SublatticeSpan span_and_index(const GramLattice& L,
                                     const std::vector<Vec<Int>>& gens) {
  if (gens.empty()) throw lattice_error("empty generator list");
  for (const auto& g : gens)
    if (g.size() != L.rank()) throw lattice_error("dimension mismatch");
  SublatticeSpan s;
  Mat<Int> h = hermite_rows(Mat<Int>(gens.begin(), gens.end()));
  s.generators.assign(h.begin(), h.end());
  s.saturated_rank = h.size();
  if (h.size() == L.rank()) s.index = abs(determinant(h));
  return s;
}

// Gram matrix of a family of vectors.
inline Mat<Int> gram_of(const GramLattice& L, const std::vector<Vec<Int>>& v) {
  Mat<Int> g(v.size(), Vec<Int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i; j < v.size(); ++j)
      g[i][j] = g[j][i] = inner_product(L, v[i], v[j]);
  return g;
}

inline GramLattice sublattice(const GramLattice& L,
                              const std::vector<Vec<Int>>& basis) {
  return GramLattice(gram_of(L, basis));
}

struct Isometric {
  Mat<Int> witness;  // columns: images of L1's basis in L2 coordinates
};
struct Distinct {
  std::string invariant;
};
struct Unknown {
  std::string reason;
};
using IsometryVerdict = std::variant<Isometric, Distinct, Unknown>;

// Enumerates basis images with coordinates bounded by height_bound after
// comparing cheap invariants.
inline IsometryVerdict isometric_bounded_search(const GramLattice& L1,
                                                const GramLattice& L2,
                                                int height_bound = 10) {
  if (L1.rank() != L2.rank()) return Distinct{"rank"};
  if (L1.det() != L2.det()) return Distinct{"determinant"};
  if (signature(L1) != signature(L2)) return Distinct{"signature"};
  if (L1.is_even() != L2.is_even()) return Distinct{"parity"};
  if (discriminant_group(L1).cyclic_orders !=
      discriminant_group(L2).cyclic_orders)
    return Distinct{"discriminant group"};
  if (L1.gram() == L2.gram())
    return Isometric{identity_matrix<Int>(L1.rank())};
  std::size_t n = L1.rank();
  long side = 2L * height_bound + 1;
  double space = 1;
  for (std::size_t i = 0; i < n; ++i) space *= static_cast<double>(side);
  if (space > 5e7) return Unknown{"search space too large"};

  // Candidate images for each basis vector, filtered by norm.
  std::vector<std::vector<Vec<Int>>> cand(n);
  Vec<Int> v(n, -height_bound);
  while (true) {
    Int q = norm(L2, v);
    for (std::size_t i = 0; i < n; ++i)
      if (q == L1.gram()[i][i]) cand[i].push_back(v);
    std::size_t p = 0;
    while (p < n && v[p] == height_bound) v[p++] = -height_bound;
    if (p == n) break;
    v[p] += 1;
  }
  std::vector<Vec<Int>> pick(n);
  std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
    if (i == n) return true;
    for (const auto& c : cand[i]) {
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j)
        ok = inner_product(L2, pick[j], c) == L1.gram()[i][j];
      if (!ok) continue;
      pick[i] = c;
      if (rec(i + 1)) return true;
    }
    return false;
  };
  if (rec(0)) return Isometric{from_columns(pick)};
  return Unknown{"no witness within height bound"};
}

}  // namespace reflat
