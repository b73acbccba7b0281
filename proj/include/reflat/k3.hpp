#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "reflat/lattice.hpp"

namespace reflat {

// ---------------------------------------------------------------------------
// 2-elementary lattices

enum class TwoElementaryCase { generic, exception_U2E82, exception_UE82 };

inline const char* to_string(TwoElementaryCase c) {
  switch (c) {
    case TwoElementaryCase::generic: return "generic";
    case TwoElementaryCase::exception_U2E82: return "exception_U2E82";
    case TwoElementaryCase::exception_UE82: return "exception_UE82";
  }
  return "?";
}

struct TwoElementaryData {
  int r = 0;
  int a = 0;
  int delta = 0;  // 0 iff the discriminant form takes integral values
  std::optional<int> g;
  std::optional<int> k_curves;
  TwoElementaryCase kind = TwoElementaryCase::generic;
  std::string fixed_set;  // human readable description
};

// Even indefinite 2-elementary lattices are fixed up to isometry by
// (r, a, delta), so the two exceptional models are matched on those.
inline TwoElementaryData two_elementary_data(const GramLattice& L) {
  if (!L.is_even()) throw lattice_error("lattice is not even");
  if (!is_hyperbolic(L)) throw lattice_error("lattice is not hyperbolic");
  DiscriminantGroup dg = discriminant_group(L);
  for (const auto& d : dg.cyclic_orders)
    if (d != 2) throw lattice_error("lattice is not 2-elementary");
  TwoElementaryData out;
  out.r = static_cast<int>(L.rank());
  out.a = static_cast<int>(dg.cyclic_orders.size());
  for (const auto& x : dg.generators)
    if (denominator(rational_form(L, x, x)) != 1) out.delta = 1;

  if (out.r == 10 && out.a == 10 && out.delta == 0) {
    out.kind = TwoElementaryCase::exception_U2E82;
    out.fixed_set = "empty";
    return out;
  }
  if (out.r == 10 && out.a == 8 && out.delta == 0) {
    out.kind = TwoElementaryCase::exception_UE82;
    out.g = 1;
    out.k_curves = 0;
    out.fixed_set = "two disjoint curves of genus 1";
    return out;
  }
  int g2 = 22 - out.r - out.a, k2 = out.r - out.a;
  if (g2 < 0 || k2 < 0 || g2 % 2 != 0 || k2 % 2 != 0)
    throw lattice_error("(r, a) outside the range of K3 fixed loci");
  out.g = g2 / 2;
  out.k_curves = k2 / 2;
  if (*out.g + *out.k_curves > 11) throw lattice_error("g + k exceeds 11");
  out.fixed_set = "a curve of genus " + std::to_string(*out.g) + " and " +
                  std::to_string(*out.k_curves) + " rational curves";
  return out;
}

// ---------------------------------------------------------------------------
// Span of the norm -2 vectors

struct RootSublattice {
  SublatticeSpan span;       // generators empty when no -2 vector exists
  long stabilization_bound = 0;
  bool empty = true;
  std::string note;
};

namespace detail {

// Norms are all divisible by 4 when the diagonal is 0 mod 4 and the
// off-diagonal entries are even.
inline bool norms_divisible_by_four(const Mat<Int>& g) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i][i] % 4 != 0) return false;
    for (std::size_t j = 0; j < g.size(); ++j)
      if (j != i && g[i][j] % 2 != 0) return false;
  }
  return true;
}

template <class F>
void for_each_in_box(std::size_t n, long bound, F&& f) {
  Vec<Int> v(n, -bound);
  while (true) {
    f(v);
    std::size_t i = 0;
    while (i < n && v[i] == bound) v[i++] = -bound;
    if (i == n) return;
    v[i] += 1;
  }
}

}  // namespace detail

inline RootSublattice root_sublattice_span(const GramLattice& L, long start_bound = 2,
                                           double max_points = 3e7) {
  if (!is_hyperbolic(L)) throw lattice_error("lattice is not hyperbolic");
  RootSublattice out;
  if (detail::norms_divisible_by_four(L.gram())) {
    out.note = "every norm is divisible by 4";
    return out;
  }
  std::size_t n = L.rank();
  std::optional<Mat<Int>> prev;
  long b = std::max(1L, start_bound);
  while (true) {
    double pts = 1;
    for (std::size_t i = 0; i < n; ++i) pts *= static_cast<double>(2 * b + 1);
    if (pts > max_points) {
      out.note = "search box cap reached before the span stabilised";
      return out;
    }
    std::vector<Vec<Int>> roots;
    detail::for_each_in_box(n, b, [&](const Vec<Int>& v) {
      if (canonical_line(v) != v || is_zero(v)) return;
      if (norm(L, v) == -2) roots.push_back(v);
    });
    out.stabilization_bound = b;
    if (!roots.empty()) {
      Mat<Int> h = hermite_rows(Mat<Int>(roots.begin(), roots.end()));
      if (prev && *prev == h) {
        out.span = span_and_index(L, roots);
        out.empty = false;
        return out;
      }
      prev = h;
    }
    b *= 2;
  }
}

// ---------------------------------------------------------------------------
// Lattices between a full-rank sublattice and L

struct IntermediateLattice {
  std::vector<Vec<Int>> basis;  // rows in L coordinates
  GramLattice lattice;
  Int index;                    // [L : M]
};

inline std::vector<IntermediateLattice> intermediate_lattices(const GramLattice& L,
                                                              const SublatticeSpan& sub,
                                                              std::size_t max_order = 4096) {
  std::size_t n = L.rank();
  if (sub.generators.size() != n || !sub.index)
    throw lattice_error("sublattice must have full rank (finite index)");
  Mat<Int> b(sub.generators.begin(), sub.generators.end());
  SmithForm sf = smith_normal_form(b);
  // Rows of V^-1 form a basis f of Z^n with sub = span{d_i f_i}.
  Mat<Int> vinv = to_integer(inverse(to_rational(sf.V)));
  Vec<Int> mods;
  for (std::size_t i = 0; i < n; ++i) mods.push_back(abs(sf.diagonal[i]));
  Int order = 1;
  for (const auto& d : mods) order *= d;
  if (order > Int(max_order)) throw lattice_error("quotient too large to enumerate");

  using Elem = Vec<Int>;
  auto add = [&](const Elem& x, const Elem& y) {
    Elem z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = mod_floor(Int(x[i] + y[i]), mods[i]);
    return z;
  };
  std::vector<Elem> elems;
  {
    Elem e(n, 0);
    while (true) {
      elems.push_back(e);
      std::size_t i = 0;
      while (i < n && e[i] + 1 == mods[i]) e[i++] = 0;
      if (i == n) break;
      e[i] += 1;
    }
  }
  auto closure = [&](std::set<Elem> h, const Elem& g) {
    std::vector<Elem> frontier(h.begin(), h.end());
    frontier.push_back(g);
    h.insert(g);
    while (!frontier.empty()) {
      Elem x = frontier.back();
      frontier.pop_back();
      std::vector<Elem> cur(h.begin(), h.end());
      for (const auto& y : cur) {
        Elem z = add(x, y);
        if (h.insert(z).second) frontier.push_back(z);
      }
    }
    return h;
  };
  std::set<std::set<Elem>> subgroups{{Elem(n, 0)}};
  std::vector<std::set<Elem>> work(subgroups.begin(), subgroups.end());
  while (!work.empty()) {
    auto h = work.back();
    work.pop_back();
    for (const auto& g : elems) {
      if (h.count(g)) continue;
      auto h2 = closure(h, g);
      if (subgroups.insert(h2).second) work.push_back(h2);
    }
  }

  std::vector<IntermediateLattice> out;
  for (const auto& h : subgroups) {
    std::vector<Vec<Int>> gens = sub.generators;
    for (const auto& y : h) {
      Vec<Int> x(n, 0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) x[j] += y[i] * vinv[i][j];
      gens.push_back(x);
    }
    Mat<Int> basis = hermite_rows(Mat<Int>(gens.begin(), gens.end()));
    IntermediateLattice m;
    m.basis.assign(basis.begin(), basis.end());
    m.lattice = sublattice(L, m.basis);
    m.index = abs(determinant(basis));
    out.push_back(std::move(m));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.index != b.index) return a.index < b.index;
    return a.basis < b.basis;
  });
  return out;
}

// ---------------------------------------------------------------------------

enum class EmbeddingVerdict { yes_by_rank, unknown };

inline const char* to_string(EmbeddingVerdict v) {
  return v == EmbeddingVerdict::yes_by_rank ? "yes_by_rank" : "unknown";
}

// Even hyperbolic lattices of rank at most 11 embed primitively into the
// K3 lattice; beyond that the answer needs finer invariants.
inline EmbeddingVerdict embeds_in_LK3_rank_bound(const GramLattice& L) {
  return L.rank() <= 11 ? EmbeddingVerdict::yes_by_rank : EmbeddingVerdict::unknown;
}

}  // namespace reflat
