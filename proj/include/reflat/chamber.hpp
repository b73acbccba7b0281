#pragma once

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "reflat/geometry.hpp"
#include "reflat/vinberg.hpp"

namespace reflat {

enum class SymmetryKind {
  finite_order,
  central_symmetry,
  skew_symmetry,
  parabolic_translation,
  hyperbolic_translation
};

inline const char* to_string(SymmetryKind k) {
  switch (k) {
    case SymmetryKind::finite_order: return "finite_order";
    case SymmetryKind::central_symmetry: return "central_symmetry";
    case SymmetryKind::skew_symmetry: return "skew_symmetry";
    case SymmetryKind::parabolic_translation: return "parabolic_translation";
    case SymmetryKind::hyperbolic_translation: return "hyperbolic_translation";
  }
  return "?";
}

enum class ReflectivityType { elliptic, parabolic, hyperbolic, not_reflective, undecided };

inline const char* to_string(ReflectivityType t) {
  switch (t) {
    case ReflectivityType::elliptic: return "elliptic";
    case ReflectivityType::parabolic: return "parabolic";
    case ReflectivityType::hyperbolic: return "hyperbolic";
    case ReflectivityType::not_reflective: return "not_reflective";
    case ReflectivityType::undecided: return "undecided";
  }
  return "?";
}

enum class ChamberStatus { closed_finite_volume, open_with_symmetry, open_budget_exhausted };

inline const char* to_string(ChamberStatus s) {
  switch (s) {
    case ChamberStatus::closed_finite_volume: return "closed_finite_volume";
    case ChamberStatus::open_with_symmetry: return "open_with_symmetry";
    case ChamberStatus::open_budget_exhausted: return "open_budget_exhausted";
  }
  return "?";
}

struct analysis_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ChamberSymmetry {
  Mat<Int> matrix;
  SymmetryKind kind = SymmetryKind::finite_order;
  Vec<Int> witness;  // c, w, or a fixed point; may be empty
  int order = 0;     // 0 for infinite order
};

// Extreme ray of the cone cut out by the walls. norm > 0: finite vertex,
// norm == 0: cusp, norm < 0: lies beyond the absolute.
struct Vertex {
  std::size_t wall_a = 0, wall_b = 0;
  Vec<Int> point;
  Int norm;
  bool certified = false;
};

struct VolumeCheck {
  bool closed = false;
  bool cyclic = false;
  std::vector<Vertex> vertices;
  std::vector<std::size_t> wall_order;  // cyclic when closed, else a path
  std::string reason;
};

struct Chamber {
  GramLattice lattice;
  Center center;
  RootPolicy policy = RootPolicy::all_norms;
  std::vector<RootVector> roots;
  ChamberStatus status = ChamberStatus::open_budget_exhausted;
  Rat frontier;
};

struct OrbitPresentation {
  std::vector<Vec<Int>> base_e;
  std::vector<Vec<Int>> base_f;
  bool certified = false;
  Rat checked_height;
};

struct Budgets {
  Rat max_height = 1000000;
  std::size_t max_roots = 10000;
  Rat initial_height = 8;
};

struct ReflectivityReport {
  ReflectivityType type = ReflectivityType::undecided;
  Chamber chamber;
  std::vector<ChamberSymmetry> symmetries;  // every verified symmetry found
  std::vector<ChamberSymmetry> generators;  // reduced list
  std::optional<Vec<Int>> w;
  std::optional<Vec<Int>> c;
  std::optional<SublatticeSpan> s0;
  OrbitPresentation orbits;
  std::vector<Vec<Int>> cusp_orbits;
  std::vector<Vec<Int>> axes;  // distinct axis vectors seen
  std::vector<Vertex> vertices;
  bool certified = false;
  std::string note;
};

// ---------------------------------------------------------------------------
// Small matrix helpers

inline Vec<Int> act(const Mat<Int>& c, const Vec<Int>& v) { return mat_vec(c, v); }

inline Int max_abs_entry(const Mat<Int>& m) {
  Int r = 0;
  for (const auto& row : m)
    for (const auto& x : row)
      if (abs(x) > r) r = abs(x);
  return r;
}

inline Int trace(const Mat<Int>& m) {
  Int t = 0;
  for (std::size_t i = 0; i < m.size(); ++i) t += m[i][i];
  return t;
}

// Inverse of an isometry: C^-1 = G^-1 C^T G.
inline Mat<Int> isometry_inverse(const GramLattice& L, const Mat<Int>& c) {
  Mat<Rat> gi = inverse(to_rational(L.gram()));
  Mat<Rat> r = to_rational(mat_mul(transpose(c), L.gram()));
  Mat<Rat> out(gi.size(), Vec<Rat>(gi.size(), 0));
  for (std::size_t i = 0; i < gi.size(); ++i)
    for (std::size_t j = 0; j < gi.size(); ++j)
      for (std::size_t k = 0; k < gi.size(); ++k) out[i][j] += gi[i][k] * r[k][j];
  return to_integer(out);
}

inline Rat vector_height(const GramLattice& L, const Vec<Int>& rho,
                         const Vec<Int>& y) {
  Int p = inner_product(L, rho, y);
  Int q = norm(L, y);
  return ratio(p * p, abs(q));
}

// ---------------------------------------------------------------------------
// Finite volume (rank 3)

// Extreme rays of the cone cut out by the roots. Consecutive walls of the
// cross-section polygon form a cycle whenever the roots span. A vertex is
// certified when it is known to be a vertex of the true chamber: cusps always
// are (two accepted walls meeting at infinity), finite vertices once their
// height is at most the frontier.
inline VolumeCheck polygon_data(const GramLattice& L,
                                const std::vector<Vec<Int>>& roots,
                                const Vec<Int>& rho = {},
                                const std::optional<Rat>& frontier = std::nullopt) {
  if (L.rank() != 3) throw analysis_error("closure certification needs rank 3");
  VolumeCheck out;
  std::size_t n = roots.size();
  std::vector<Vec<Int>> rows;
  for (const auto& r : roots) rows.push_back(mat_vec(L.gram(), r));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      Vec<Int> x = cross3(rows[i], rows[j]);
      if (is_zero(x)) continue;
      x = primitive_part(x);
      for (int s = 0; s < 2; ++s, x = negated(x)) {
        bool ok = true;
        for (std::size_t t = 0; t < n && ok; ++t) {
          if (t == i || t == j) continue;
          Int p = rows[t][0] * x[0] + rows[t][1] * x[1] + rows[t][2] * x[2];
          if (p < 0) ok = false;
        }
        if (!ok) continue;
        Vertex v{i, j, x, norm(L, x), false};
        if (v.norm == 0) {
          v.certified = true;
        } else if (v.norm > 0 && frontier && !rho.empty()) {
          v.certified = vector_height(L, rho, x) <= *frontier;
        }
        out.vertices.push_back(std::move(v));
      }
    }
  std::vector<std::vector<std::size_t>> nb(n);
  for (const auto& v : out.vertices) {
    nb[v.wall_a].push_back(v.wall_b);
    nb[v.wall_b].push_back(v.wall_a);
  }
  bool all_inside = !out.vertices.empty();
  for (const auto& v : out.vertices)
    if (v.norm < 0) all_inside = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (nb[i].size() == 1) {
      start = i;
      break;
    }
  if (n > 0) {
    std::vector<bool> used(n, false);
    std::size_t cur = start;
    while (true) {
      out.wall_order.push_back(cur);
      used[cur] = true;
      std::optional<std::size_t> nxt;
      for (auto j : nb[cur])
        if (!used[j]) {
          nxt = j;
          break;
        }
      if (!nxt) break;
      cur = *nxt;
    }
  }
  out.cyclic = out.wall_order.size() == n && n >= 3;
  for (std::size_t i = 0; i < n && out.cyclic; ++i)
    if (nb[i].size() != 2) out.cyclic = false;
  if (!out.cyclic) {
    out.reason = "walls do not close up into a cycle";
  } else if (!all_inside) {
    out.reason = "a vertex of the cone lies outside the closed disc";
  } else {
    out.closed = true;
  }
  return out;
}

// The vertex shared by two walls, if they are adjacent.
inline const Vertex* shared_vertex(const VolumeCheck& poly, std::size_t a, std::size_t b) {
  for (const auto& v : poly.vertices)
    if ((v.wall_a == a && v.wall_b == b) || (v.wall_a == b && v.wall_b == a)) return &v;
  return nullptr;
}

inline VolumeCheck finite_volume_check(const Chamber& ch) {
  std::vector<Vec<Int>> r;
  for (const auto& x : ch.roots) r.push_back(x.coords);
  return polygon_data(ch.lattice, r, ch.center.rho, ch.frontier);
}

// ---------------------------------------------------------------------------
// Isometry classification

namespace detail {

inline Mat<Int> minus_scalar(Mat<Int> c, const Int& s) {
  for (std::size_t i = 0; i < c.size(); ++i) c[i][i] -= s;
  return c;
}

inline bool is_identity(const Mat<Int>& c) {
  return c == identity_matrix<Int>(c.size());
}

inline bool is_nilpotent(const Mat<Int>& n) {
  Mat<Int> p = n;
  for (std::size_t i = 1; i < n.size(); ++i) p = mat_mul(p, n);
  for (const auto& row : p)
    for (const auto& x : row)
      if (x != 0) return false;
  return true;
}

// Some primitive vector in the kernel with the requested norm sign.
inline std::optional<Vec<Int>> kernel_vector(const GramLattice& L,
                                             const Mat<Int>& m, int norm_sign) {
  auto ker = integer_kernel(m);
  for (const auto& v : ker)
    if (sign_of(norm(L, v)) == norm_sign) return canonical_line(v);
  if (ker.size() >= 2) {
    // look for a combination with the right sign
    for (int a = -3; a <= 3; ++a)
      for (int b = -3; b <= 3; ++b) {
        if (a == 0 && b == 0) continue;
        Vec<Int> v(ker[0].size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = a * ker[0][i] + b * ker[1][i];
        if (!is_zero(v) && sign_of(norm(L, v)) == norm_sign) return canonical_line(v);
      }
  }
  return std::nullopt;
}

}  // namespace detail

inline ChamberSymmetry classify_isometry(const GramLattice& L, const Mat<Int>& c) {
  if (!is_isometry(L, c)) throw analysis_error("matrix is not an isometry");
  ChamberSymmetry s;
  s.matrix = c;
  std::size_t n = L.rank();
  Mat<Int> p = c;
  for (int k = 1; k <= 60; ++k) {
    if (detail::is_identity(p)) {
      s.order = k;
      break;
    }
    p = mat_mul(p, c);
  }
  if (s.order > 0) {
    s.kind = SymmetryKind::finite_order;
    Mat<Int> fix = detail::minus_scalar(c, 1);
    auto ker = integer_kernel(fix);
    if (s.order == 2 && ker.size() == 1 && norm(L, ker[0]) > 0) {
      s.kind = SymmetryKind::central_symmetry;
      s.witness = canonical_line(ker[0]);
    } else if (s.order > 1) {
      if (auto v = detail::kernel_vector(L, fix, 1)) s.witness = *v;
    }
    return s;
  }
  Mat<Int> c2 = mat_mul(c, c);
  if (detail::is_nilpotent(detail::minus_scalar(c2, 1))) {
    s.kind = SymmetryKind::parabolic_translation;
    auto ker = integer_kernel(detail::minus_scalar(c2, 1));
    for (const auto& v : ker)
      if (norm(L, v) == 0 && act(c, v) == v) s.witness = canonical_line(v);
    if (s.witness.empty())
      if (auto v = detail::kernel_vector(L, detail::minus_scalar(c2, 1), 0))
        s.witness = *v;
    return s;
  }
  // Axial case: an eigenvector w of eigenvalue +-1 with negative norm.
  Int det = determinant(c);
  for (int e : {1, -1}) {
    auto w = detail::kernel_vector(L, detail::minus_scalar(c, e), -1);
    if (!w) continue;
    if (n == 3 && e != det) continue;
    s.witness = *w;
    s.kind = e == 1 ? SymmetryKind::hyperbolic_translation : SymmetryKind::skew_symmetry;
    return s;
  }
  throw analysis_error("isometry could not be classified");
}

inline bool is_infinite(const ChamberSymmetry& s) { return s.order == 0; }

// ---------------------------------------------------------------------------
// Rigorous chamber membership

// Decides whether points lie in the interior of the chamber, using only
// roots that have been enumerated. A point y with h(y) <= frontier that is
// positive on every accepted root of height <= h(y) cannot be separated from
// the center by any higher root, so it is interior.
class InteriorOracle {
 public:
  enum class Answer { inside, outside, unknown };

  InteriorOracle(const GramLattice& L, const Vec<Int>& rho,
                 const std::vector<RootVector>& roots, const Rat& frontier)
      : L_(L), rho_(rho), frontier_(frontier) {
    for (const auto& r : roots) items_.push_back({r.height, mat_vec(L.gram(), r.coords)});
    std::stable_sort(items_.begin(), items_.end(),
                     [](const Item& a, const Item& b) { return a.h < b.h; });
  }

  Answer classify(const Vec<Int>& y) const {
    Int q = norm(L_, y);
    Int p = inner_product(L_, rho_, y);
    if (q <= 0 || p <= 0) return Answer::outside;
    Rat h = ratio(p * p, q);
    if (h > frontier_) return Answer::unknown;
    for (const auto& it : items_) {
      if (it.h > h) break;
      Int s = 0;
      for (std::size_t i = 0; i < y.size(); ++i) s += it.gv[i] * y[i];
      if (s <= 0) return Answer::outside;
    }
    return Answer::inside;
  }

 private:
  struct Item {
    Rat h;
    Vec<Int> gv;
  };
  const GramLattice& L_;
  Vec<Int> rho_;
  Rat frontier_;
  std::vector<Item> items_;
};

// ---------------------------------------------------------------------------
// Symmetry discovery

struct SymmetrySearch {
  std::vector<ChamberSymmetry> verified;
  std::size_t candidates = 0;
  std::size_t rejected = 0;
  std::size_t unresolved = 0;
};

inline SymmetrySearch find_symmetry(const Chamber& ch, const VolumeCheck& poly) {
  SymmetrySearch out;
  const GramLattice& L = ch.lattice;
  if (L.rank() != 3 || ch.roots.size() < 2 * L.rank()) return out;
  std::vector<Vec<Int>> roots;
  for (const auto& r : ch.roots) roots.push_back(r.coords);
  InteriorOracle oracle(L, ch.center.rho, ch.roots, ch.frontier);

  // Interior reference point. Certified vertices lie in the closed chamber,
  // so the center plus any of them is a candidate; the oracle decides.
  std::map<std::size_t, std::vector<Vec<Int>>> wall_vertices;
  std::vector<std::pair<Rat, Vec<Int>>> near;
  for (const auto& v : poly.vertices) {
    if (!v.certified) continue;
    wall_vertices[v.wall_a].push_back(v.point);
    wall_vertices[v.wall_b].push_back(v.point);
    near.push_back({std::max(ch.roots[v.wall_a].height, ch.roots[v.wall_b].height), v.point});
  }
  std::stable_sort(near.begin(), near.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::optional<Vec<Int>> found_x0;
  Vec<Int> acc = ch.center.rho;
  if (oracle.classify(acc) == InteriorOracle::Answer::inside) found_x0 = acc;
  for (std::size_t i = 0; i < near.size() && !found_x0; ++i) {
    for (int j = 0; j < 3; ++j) acc[j] += near[i].second[j];
    for (int scale : {1, 4}) {
      Vec<Int> y(3);
      for (int j = 0; j < 3; ++j) y[j] = scale * acc[j] + (scale - 1) * ch.center.rho[j];
      if (oracle.classify(y) == InteriorOracle::Answer::inside) {
        found_x0 = y;
        break;
      }
    }
  }
  if (!found_x0) return out;
  const Vec<Int> x0 = *found_x0;

  // Consecutive wall triples and their Gram fingerprints.
  const auto& ord = poly.wall_order;
  std::size_t m = ord.size();
  bool cyclic = poly.cyclic;
  using Triple = std::array<std::size_t, 3>;
  std::vector<Triple> triples;
  for (std::size_t t = 0; t < m; ++t) {
    if (!cyclic && (t == 0 || t + 1 == m)) continue;
    Triple tr{ord[(t + m - 1) % m], ord[t], ord[(t + 1) % m]};
    Mat<Int> cols = from_columns(std::vector<Vec<Int>>{roots[tr[0]], roots[tr[1]], roots[tr[2]]});
    if (det3(cols) == 0) continue;
    triples.push_back(tr);
  }
  auto fingerprint = [&](const Triple& t) {
    std::array<Int, 6> f;
    int p = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) f[p++] = inner_product(L, roots[t[i]], roots[t[j]]);
    return f;
  };
  std::map<std::array<Int, 6>, std::vector<Triple>> by_fp;
  for (const auto& t : triples) by_fp[fingerprint(t)].push_back(t);

  std::set<Mat<Int>> cand;
  for (const auto& t : triples)
    for (int rev = 0; rev < 2; ++rev) {
      Triple src = rev ? Triple{t[2], t[1], t[0]} : t;
      auto it = by_fp.find(fingerprint(src));
      if (it == by_fp.end()) continue;
      Mat<Int> a = from_columns(std::vector<Vec<Int>>{roots[src[0]], roots[src[1]], roots[src[2]]});
      Int da = det3(a);
      Mat<Int> adj = adjugate3(a);
      for (const auto& dst : it->second) {
        if (dst == src) continue;
        Mat<Int> b = from_columns(std::vector<Vec<Int>>{roots[dst[0]], roots[dst[1]], roots[dst[2]]});
        Mat<Int> num = mat_mul(b, adj);
        bool integral = true;
        for (auto& row : num)
          for (auto& x : row) {
            if (x % da != 0) integral = false;
            else x /= da;
          }
        if (!integral) continue;
        cand.insert(num);
      }
    }
  out.candidates = cand.size();

  for (const auto& c : cand) {
    if (detail::is_identity(c) || !is_isometry(L, c)) {
      ++out.rejected;
      continue;
    }
    // future preserving
    if (inner_product(L, act(c, x0), x0) <= 0) {
      ++out.rejected;
      continue;
    }
    std::optional<bool> member;
    {
      auto r = oracle.classify(act(c, x0));
      if (r != InteriorOracle::Answer::unknown) member = r == InteriorOracle::Answer::inside;
    }
    for (const auto& [w, vs] : wall_vertices) {
      if (member) break;
      if (vs.size() < 2) continue;
      Vec<Int> x(3);
      for (int i = 0; i < 3; ++i) x[i] = Int(1000000) * (vs[0][i] + vs[1][i]) + x0[i];
      if (oracle.classify(x) != InteriorOracle::Answer::inside) continue;
      auto r = oracle.classify(act(c, x));
      if (r == InteriorOracle::Answer::unknown) continue;
      member = r == InteriorOracle::Answer::inside;
    }
    if (!member) {
      ++out.unresolved;
      continue;
    }
    if (!*member) {
      ++out.rejected;
      continue;
    }
    out.verified.push_back(classify_isometry(L, c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Group helpers

// Elements of <gens> reachable through words whose partial products stay
// below an entry cap.
inline std::set<Mat<Int>> bounded_closure(const GramLattice& L,
                                          const std::vector<Mat<Int>>& gens,
                                          const Int& cap,
                                          std::size_t limit = 4000) {
  std::vector<Mat<Int>> letters;
  for (const auto& g : gens) {
    letters.push_back(g);
    letters.push_back(isometry_inverse(L, g));
  }
  std::set<Mat<Int>> seen{identity_matrix<Int>(L.rank())};
  std::deque<Mat<Int>> queue{identity_matrix<Int>(L.rank())};
  while (!queue.empty() && seen.size() < limit) {
    Mat<Int> cur = queue.front();
    queue.pop_front();
    for (const auto& l : letters) {
      Mat<Int> nx = mat_mul(cur, l);
      if (max_abs_entry(nx) > cap) continue;
      if (seen.insert(nx).second) queue.push_back(nx);
    }
  }
  return seen;
}

// Translation length proxy: trace minus determinant grows with it.
inline Int translation_size(const ChamberSymmetry& s) {
  return trace(s.matrix) - determinant(s.matrix);
}

inline std::optional<ChamberSymmetry> minimal_translation(
    const std::vector<ChamberSymmetry>& syms) {
  std::optional<ChamberSymmetry> best;
  auto key = [](const ChamberSymmetry& s) {
    return s.kind == SymmetryKind::parabolic_translation
               ? max_abs_entry(detail::minus_scalar(s.matrix, 1))
               : translation_size(s);
  };
  for (const auto& s : syms) {
    if (!is_infinite(s)) continue;
    if (!best || key(s) < key(*best) ||
        (key(s) == key(*best) && s.matrix < best->matrix))
      best = s;
  }
  return best;
}

// Generators: the minimal translation, then finite-order elements and other
// translations not already generated, smallest entries first.
inline std::vector<ChamberSymmetry> reduce_generators(
    const GramLattice& L, const std::vector<ChamberSymmetry>& syms) {
  std::vector<ChamberSymmetry> gens;
  if (syms.empty()) return gens;
  Int cap = 0;
  for (const auto& s : syms) cap = std::max(cap, max_abs_entry(s.matrix));
  cap *= 4;
  std::vector<ChamberSymmetry> order = syms;
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    Int ea = max_abs_entry(a.matrix), eb = max_abs_entry(b.matrix);
    if (ea != eb) return ea < eb;
    return a.matrix < b.matrix;
  });
  // Two involutions generating everything found (dihedral presentation).
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i].order != 2) continue;
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (order[j].order != 2) continue;
      auto prod = classify_isometry(L, mat_mul(order[i].matrix, order[j].matrix));
      if (!is_infinite(prod)) continue;
      auto cl = bounded_closure(L, {order[i].matrix, order[j].matrix}, cap);
      bool all = true;
      for (const auto& s : syms)
        if (!cl.count(s.matrix)) all = false;
      if (all) return {order[i], order[j]};
    }
  }
  if (auto t = minimal_translation(syms)) gens.push_back(*t);
  for (const auto& s : order) {
    std::vector<Mat<Int>> g;
    for (const auto& x : gens) g.push_back(x.matrix);
    if (!g.empty() && bounded_closure(L, g, cap).count(s.matrix)) continue;
    gens.push_back(s);
  }
  std::stable_sort(gens.begin(), gens.end(), [](const auto& a, const auto& b) {
    return static_cast<int>(a.kind) < static_cast<int>(b.kind);
  });
  return gens;
}

// Fixed data of the infinite-order symmetries and their conjugates, plus
// products of pairs. Two different axes certify a non-elementary group.
struct AxisCensus {
  std::set<Vec<Int>> axes;     // hyperbolic kinds: canonical w
  std::set<Vec<Int>> cusps;    // parabolic kinds: canonical c
};

inline AxisCensus axis_census(const GramLattice& L,
                              const std::vector<ChamberSymmetry>& syms) {
  AxisCensus out;
  std::vector<Mat<Int>> inf;
  for (const auto& s : syms)
    if (is_infinite(s)) inf.push_back(s.matrix);
  std::vector<Mat<Int>> pool = inf;
  for (const auto& s : syms)
    for (const auto& c : inf) {
      Mat<Int> conj = mat_mul(mat_mul(s.matrix, c), isometry_inverse(L, s.matrix));
      pool.push_back(conj);
    }
  std::size_t base = pool.size();
  for (std::size_t i = 0; i < std::min<std::size_t>(base, 24); ++i)
    for (std::size_t j = 0; j < std::min<std::size_t>(base, 24); ++j)
      if (i != j) pool.push_back(mat_mul(pool[i], pool[j]));
  for (const auto& m : pool) {
    ChamberSymmetry s = classify_isometry(L, m);
    if (s.kind == SymmetryKind::hyperbolic_translation || s.kind == SymmetryKind::skew_symmetry)
      out.axes.insert(canonical_line(s.witness));
    else if (s.kind == SymmetryKind::parabolic_translation && !s.witness.empty())
      out.cusps.insert(canonical_line(s.witness));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Orbits

// Classes of a root set under a group given by generators, moving only
// inside the set.
inline std::vector<std::vector<std::size_t>> orbit_classes(
    const GramLattice& L, const std::vector<Vec<Int>>& roots,
    const std::vector<Mat<Int>>& gens) {
  std::map<Vec<Int>, std::size_t> index;
  for (std::size_t i = 0; i < roots.size(); ++i) index[roots[i]] = i;
  std::vector<Mat<Int>> letters;
  for (const auto& g : gens) {
    letters.push_back(g);
    letters.push_back(isometry_inverse(L, g));
  }
  std::vector<int> cls(roots.size(), -1);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (cls[i] >= 0) continue;
    int id = static_cast<int>(out.size());
    out.push_back({});
    std::deque<std::size_t> q{i};
    cls[i] = id;
    while (!q.empty()) {
      auto a = q.front();
      q.pop_front();
      out[id].push_back(a);
      for (const auto& l : letters) {
        auto it = index.find(act(l, roots[a]));
        if (it == index.end() || cls[it->second] >= 0) continue;
        cls[it->second] = id;
        q.push_back(it->second);
      }
    }
  }
  return out;
}

// Maximal invariant sublattice.
inline Vec<Int> saturate_line(const Vec<Int>& v) { return canonical_line(v); }

inline SublatticeSpan saturation(const GramLattice& L, const std::vector<Vec<Int>>& gens) {
  auto perp = integer_kernel(Mat<Int>(gens.begin(), gens.end()));
  std::vector<Vec<Int>> basis;
  if (perp.empty()) {
    for (std::size_t i = 0; i < L.rank(); ++i) {
      Vec<Int> e(L.rank(), 0);
      e[i] = 1;
      basis.push_back(e);
    }
  } else {
    basis = integer_kernel(Mat<Int>(perp.begin(), perp.end()));
  }
  SublatticeSpan s;
  s.generators = basis;
  s.saturated_rank = basis.size();
  if (basis.size() == L.rank()) s.index = 1;
  return s;
}

inline SublatticeSpan maximal_invariant_sublattice(const GramLattice& L,
                                                   const ReflectivityReport& rep) {
  if (rep.type == ReflectivityType::hyperbolic) {
    if (!rep.w) throw analysis_error("report has no axis vector");
    return saturation(L, {*rep.w});
  }
  if (rep.type != ReflectivityType::parabolic || !rep.c)
    throw analysis_error("invariant sublattice needs a parabolic or hyperbolic report");
  const Vec<Int>& c = *rep.c;
  // Basis of c-perp whose first vector is c.
  auto k = integer_kernel(Mat<Int>{mat_vec(L.gram(), c)});
  Mat<Int> kb = from_columns(k);  // columns are kernel vectors
  // coordinates of c in the kernel basis
  Mat<Rat> kr = to_rational(kb);
  std::size_t n = L.rank(), r = k.size();
  Vec<Int> a(r, 0);
  {
    // solve kb a = c by least squares normal equations (exact)
    Mat<Rat> ktk(r, Vec<Rat>(r, 0));
    Vec<Rat> ktc(r, 0);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < r; ++j)
        for (std::size_t t = 0; t < n; ++t) ktk[i][j] += kr[t][i] * kr[t][j];
      for (std::size_t t = 0; t < n; ++t) ktc[i] += kr[t][i] * Rat(c[t]);
    }
    Mat<Rat> inv = inverse(ktk);
    for (std::size_t i = 0; i < r; ++i) {
      Rat s = 0;
      for (std::size_t j = 0; j < r; ++j) s += inv[i][j] * ktc[j];
      a[i] = numerator(s);
    }
  }
  SmithForm sf = smith_normal_form(Mat<Int>{a});
  Mat<Rat> winv = inverse(to_rational(sf.V));
  Mat<Int> w = to_integer(winv);  // first row is +-a
  std::vector<Vec<Int>> others;
  for (std::size_t i = 1; i < r; ++i) {
    Vec<Int> v(n, 0);
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t t = 0; t < n; ++t) v[t] += w[i][j] * k[j][t];
    others.push_back(v);
  }
  std::vector<Vec<Int>> gens{c};
  if (!others.empty()) {
    Mat<Rat> q(others.size(), Vec<Rat>(others.size()));
    for (std::size_t i = 0; i < others.size(); ++i)
      for (std::size_t j = 0; j < others.size(); ++j)
        q[i][j] = Rat(-inner_product(L, others[i], others[j]));
    detail::QuadraticEnumerator qe(q);
    qe.enumerate(Vec<Rat>(others.size(), 0), Rat(2), [&](const Vec<Int>& y) {
      Vec<Int> v(n, 0);
      for (std::size_t i = 0; i < y.size(); ++i)
        for (std::size_t t = 0; t < n; ++t) v[t] += y[i] * others[i][t];
      gens.push_back(v);
    });
  }
  return saturation(L, gens);
}

// Isotropic vertices plus parabolic fixed points, one per orbit.
inline std::vector<Vec<Int>> cusp_orbits(const GramLattice& L,
                                         const std::vector<Vertex>& vertices,
                                         const std::vector<ChamberSymmetry>& syms) {
  std::vector<Vec<Int>> cusps;
  for (const auto& v : vertices)
    if (v.norm == 0) cusps.push_back(canonical_line(v.point));
  for (const auto& s : syms)
    if (s.kind == SymmetryKind::parabolic_translation && !s.witness.empty())
      cusps.push_back(canonical_line(s.witness));
  std::sort(cusps.begin(), cusps.end());
  cusps.erase(std::unique(cusps.begin(), cusps.end()), cusps.end());
  std::vector<Mat<Int>> gens;
  for (const auto& s : syms) gens.push_back(s.matrix);
  // orbit classes on lines: act and re-normalise
  std::map<Vec<Int>, std::size_t> index;
  for (std::size_t i = 0; i < cusps.size(); ++i) index[cusps[i]] = i;
  std::vector<int> cls(cusps.size(), -1);
  std::vector<Vec<Int>> reps;
  for (std::size_t i = 0; i < cusps.size(); ++i) {
    if (cls[i] >= 0) continue;
    cls[i] = static_cast<int>(reps.size());
    reps.push_back(cusps[i]);
    std::deque<std::size_t> q{i};
    while (!q.empty()) {
      auto a = q.front();
      q.pop_front();
      for (const auto& g : gens)
        for (const auto& h : {g, isometry_inverse(L, g)}) {
          auto it = index.find(canonical_line(act(h, cusps[a])));
          if (it == index.end() || cls[it->second] >= 0) continue;
          cls[it->second] = cls[i];
          q.push_back(it->second);
        }
    }
  }
  return reps;
}

// ---------------------------------------------------------------------------
// Driver

namespace detail {

template <class Z>
Chamber snapshot(const VinbergEngine<Z>& e) {
  Chamber ch;
  ch.lattice = e.lattice();
  ch.center = e.center();
  ch.policy = e.policy();
  ch.roots = e.exported();
  ch.frontier = e.frontier();
  return ch;
}

}  // namespace detail

// One period of a boundary chain of the chamber under a translation T: a run
// of walls joined by certified vertices from a wall up to (not including) its
// image. side is the sign of the axis vector on the chain, 0 for parabolic.
struct PeriodSegment {
  std::vector<std::size_t> walls;
  int side = 0;
};

// Translation used to walk a chain: T itself when it keeps each side of its
// axis (or is a proper parabolic), otherwise T^2.
inline Mat<Int> chain_translation(const ChamberSymmetry& t) {
  bool proper = determinant(t.matrix) == 1;
  if (t.kind == SymmetryKind::hyperbolic_translation && proper) return t.matrix;
  if (t.kind == SymmetryKind::parabolic_translation && proper &&
      detail::is_nilpotent(detail::minus_scalar(t.matrix, 1)))
    return t.matrix;
  return mat_mul(t.matrix, t.matrix);
}

inline std::vector<PeriodSegment> periodic_segments(const GramLattice& L,
                                                    const std::vector<Vec<Int>>& roots,
                                                    const VolumeCheck& poly,
                                                    const Mat<Int>& t,
                                                    const std::optional<Vec<Int>>& w) {
  std::vector<PeriodSegment> out;
  const auto& ord = poly.wall_order;
  std::size_t n = ord.size();
  if (!poly.cyclic || n < 2) return out;
  std::map<Vec<Int>, std::size_t> index;
  for (std::size_t i = 0; i < roots.size(); ++i) index[roots[i]] = i;
  auto edge_ok = [&](std::size_t pos) {
    const Vertex* v = shared_vertex(poly, ord[pos % n], ord[(pos + 1) % n]);
    return v && v->certified;
  };
  std::size_t cut = n;
  for (std::size_t i = 0; i < n; ++i)
    if (!edge_ok(i)) {
      cut = i;
      break;
    }
  if (cut == n) return out;  // closed polygon, nothing to do here
  // Runs of walls joined by certified edges, starting after the cut.
  std::vector<std::vector<std::size_t>> runs{{}};
  for (std::size_t k = 1; k <= n; ++k) {
    std::size_t pos = (cut + k) % n;
    runs.back().push_back(ord[pos]);
    if (!edge_ok(pos)) runs.push_back({});
  }
  auto side_of = [&](const std::vector<std::size_t>& walls) {
    if (!w) return 0;
    for (std::size_t i = 0; i + 1 < walls.size(); ++i) {
      const Vertex* v = shared_vertex(poly, walls[i], walls[i + 1]);
      if (!v) continue;
      int sg = sign_of(inner_product(L, v->point, *w));
      if (sg != 0) return sg;
    }
    return 0;
  };
  for (const auto& run : runs) {
    std::map<std::size_t, std::size_t> pos;
    for (std::size_t i = 0; i < run.size(); ++i) pos[run[i]] = i;
    std::optional<PeriodSegment> best;
    for (std::size_t p = 0; p < run.size(); ++p) {
      auto it = index.find(act(t, roots[run[p]]));
      if (it == index.end()) continue;
      auto q = pos.find(it->second);
      if (q == pos.end()) continue;
      PeriodSegment seg;
      if (q->second == p) {
        // wall containing the axis: the chain is this single wall
        if (!w) continue;
        seg.walls = {run[p]};
        seg.side = sign_of(inner_product(L, roots[run[p]], *w));
      } else {
        std::size_t lo = std::min(p, q->second), hi = std::max(p, q->second);
        seg.walls.assign(run.begin() + lo, run.begin() + hi);
        std::vector<std::size_t> closed_seg(run.begin() + lo, run.begin() + hi + 1);
        seg.side = side_of(closed_seg);
        if (w && seg.side == 0) continue;
      }
      if (!best || seg.walls.size() < best->walls.size()) best = seg;
    }
    if (best) out.push_back(*best);
  }
  return out;
}

namespace detail {

template <class Z>
ReflectivityReport analyze_with(const GramLattice& L, const Center& center,
                                RootPolicy policy, const Budgets& budgets) {
  VinbergEngine<Z> eng(L, center, policy);
  ReflectivityReport rep;
  Rat h = budgets.initial_height;
  std::size_t last_count = 0;
  while (true) {
    if (h > budgets.max_height) h = budgets.max_height;
    bool under_cap = eng.advance_to(h, budgets.max_roots);
    Chamber ch = snapshot(eng);
    rep.chamber = ch;
    if (L.rank() != 3) {
      rep.note = "closure and symmetry certification need rank 3";
      rep.chamber.status = ChamberStatus::open_budget_exhausted;
      return rep;
    }
    if (ch.roots.size() >= 3 && ch.roots.size() != last_count) {
      last_count = ch.roots.size();
      VolumeCheck poly = finite_volume_check(ch);
      rep.vertices = poly.vertices;
      if (poly.closed) {
        rep.type = ReflectivityType::elliptic;
        rep.chamber.status = ChamberStatus::closed_finite_volume;
        rep.certified = true;
        std::vector<Vec<Int>> all;
        for (const auto& r : ch.roots) all.push_back(r.coords);
        rep.orbits.base_e = all;
        rep.orbits.certified = true;
        rep.orbits.checked_height = ch.frontier;
        rep.cusp_orbits = cusp_orbits(L, poly.vertices, {});
        return rep;
      }
      SymmetrySearch found = find_symmetry(ch, poly);
      if (!found.verified.empty()) {
        rep.symmetries = found.verified;
        AxisCensus census = axis_census(L, found.verified);
        rep.axes.assign(census.axes.begin(), census.axes.end());
        rep.generators = reduce_generators(L, found.verified);
        if (census.axes.size() + census.cusps.size() >= 2) {
          rep.type = ReflectivityType::not_reflective;
          rep.chamber.status = ChamberStatus::open_with_symmetry;
          rep.certified = true;
          rep.cusp_orbits = cusp_orbits(L, poly.vertices, found.verified);
          return rep;
        }
        auto t = minimal_translation(found.verified);
        if (t) {
          std::vector<Vec<Int>> roots;
          for (const auto& r : ch.roots) roots.push_back(r.coords);
          bool parabolic = t->kind == SymmetryKind::parabolic_translation;
          std::optional<Vec<Int>> w;
          if (!parabolic) w = t->witness;
          auto segs = periodic_segments(L, roots, poly, chain_translation(*t), w);
          std::optional<PeriodSegment> plus, minus, any;
          for (const auto& sg : segs) {
            if (!any) any = sg;
            if (sg.side > 0 && !plus) plus = sg;
            if (sg.side < 0 && !minus) minus = sg;
          }
          bool done = parabolic ? any.has_value() : (plus && minus);
          if (done) {
            rep.chamber.status = ChamberStatus::open_with_symmetry;
            rep.certified = true;
            rep.orbits.certified = true;
            rep.orbits.checked_height = ch.frontier;
            rep.cusp_orbits = cusp_orbits(L, poly.vertices, found.verified);
            // One wall per class under the verified symmetries.
            std::vector<Mat<Int>> letters;
            for (const auto& sym : found.verified) letters.push_back(sym.matrix);
            std::vector<int> cls(roots.size(), -1);
            {
              auto classes = orbit_classes(L, roots, letters);
              for (std::size_t c = 0; c < classes.size(); ++c)
                for (auto i : classes[c]) cls[i] = static_cast<int>(c);
            }
            std::set<int> taken;
            auto walls_of = [&](const PeriodSegment& sg) {
              std::vector<Vec<Int>> v;
              for (auto i : sg.walls)
                if (taken.insert(cls[i]).second) v.push_back(roots[i]);
              return v;
            };
            if (parabolic) {
              rep.type = ReflectivityType::parabolic;
              rep.c = canonical_line(t->witness);
              rep.orbits.base_e = walls_of(*any);
            } else {
              rep.type = ReflectivityType::hyperbolic;
              rep.w = canonical_line(*w);
              // e lies on the side of the center
              bool first_in_minus = sign_of(inner_product(L, center.rho, *w)) < 0;
              const PeriodSegment& e = first_in_minus ? *minus : *plus;
              const PeriodSegment& f = first_in_minus ? *plus : *minus;
              rep.orbits.base_e = walls_of(e);
              rep.orbits.base_f = walls_of(f);
            }
            rep.s0 = maximal_invariant_sublattice(L, rep);
            return rep;
          }
        }
      }
    }
    if (!under_cap || h >= budgets.max_height) {
      rep.type = ReflectivityType::undecided;
      rep.chamber = snapshot(eng);
      rep.chamber.status = ChamberStatus::open_budget_exhausted;
      rep.certified = false;
      rep.note = under_cap ? "height budget exhausted" : "root budget exhausted";
      return rep;
    }
    h = std::max(Rat(h * 2), eng.frontier());
  }
}

}  // namespace detail

// Full pipeline; the int64 path is rerun in cpp_int on overflow.
inline ReflectivityReport classify_type(const GramLattice& L, const Center& center,
                                        RootPolicy policy, const Budgets& budgets = {}) {
  try {
    return detail::analyze_with<checked64>(L, center, policy, budgets);
  } catch (const overflow_error&) {
    return detail::analyze_with<Int>(L, center, policy, budgets);
  }
}

inline ReflectivityReport classify_type(const GramLattice& L, RootPolicy policy,
                                        const Budgets& budgets = {}) {
  return classify_type(L, default_center(L, policy), policy, budgets);
}

}  // namespace reflat
