#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "reflat/geometry.hpp"
#include "reflat/lattice.hpp"

namespace reflat {

enum class RootPolicy { two_only, all_norms };

inline const char* to_string(RootPolicy p) {
  return p == RootPolicy::two_only ? "two" : "all";
}

inline RootPolicy parse_policy(const std::string& s) {
  if (s == "two" || s == "two_only") return RootPolicy::two_only;
  if (s == "all" || s == "all_norms") return RootPolicy::all_norms;
  throw std::invalid_argument("unknown policy: " + s);
}

struct Center {
  Vec<Int> rho;
  bool isotropic = false;
};

struct RootVector {
  Vec<Int> coords;
  Int norm;
  int step_index = 0;
  Rat height;
};

struct engine_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Norms d = -2m allowed by the discriminant form: the class of -delta/m
// in S*/S has order m and square -2/m mod 2.
inline std::vector<Int> admissible_norms(const GramLattice& L,
                                         RootPolicy policy) {
  if (policy == RootPolicy::two_only) return {Int(-2)};
  DiscriminantGroup dg = discriminant_group(L);
  Int e = dg.exponent;
  std::vector<Int> divisors;
  for (Int m = 1; m * m <= e; ++m)
    if (e % m == 0) {
      divisors.push_back(m);
      if (m * m != e) divisors.push_back(e / m);
    }
  std::sort(divisors.begin(), divisors.end());
  std::vector<Int> out;
  Int size = dg.order();
  if (size > 200000) {
    for (const auto& m : divisors) out.push_back(-2 * m);
    return out;
  }
  // Walk all group elements as coefficient tuples.
  std::size_t r = dg.cyclic_orders.size();
  std::set<Int> ok;
  Vec<Int> c(r, 0);
  while (true) {
    Vec<Rat> g(L.rank(), 0);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < L.rank(); ++j)
        g[j] += Rat(c[i]) * dg.generators[i][j];
    // order of g
    Int ord = 1;
    for (std::size_t j = 0; j < L.rank(); ++j) {
      Int den = denominator(g[j]);
      ord = ord / gcd_of(ord, den) * den;
    }
    Rat q = rational_form(L, g, g);
    Rat target = ratio(-2, ord);
    Rat diff = q - target;
    if (denominator(diff) == 1 && numerator(diff) % 2 == 0) ok.insert(ord);
    std::size_t p = 0;
    while (p < r && c[p] + 1 == dg.cyclic_orders[p]) c[p++] = 0;
    if (p == r) break;
    c[p] += 1;
  }
  for (const auto& m : divisors)
    if (ok.count(m)) out.push_back(-2 * m);
  return out;
}

namespace detail {

// Basis (rho, lambda) of the rank-2 lattice rho-perp in a rank-3 lattice.
inline std::pair<Vec<Int>, Vec<Int>> isotropic_plane(const GramLattice& L,
                                                     const Vec<Int>& rho) {
  Vec<Int> grho = mat_vec(L.gram(), rho);
  auto ker = integer_kernel(Mat<Int>{grho});
  if (ker.size() != 2) throw engine_error("unexpected kernel rank");
  // rho = a k1 + b k2 with gcd(a, b) = 1
  Mat<Int> kb = from_columns(ker);
  // Solve for (a, b) using two independent coordinates.
  Int a = 0, b = 0;
  bool found = false;
  for (int i = 0; i < 3 && !found; ++i)
    for (int j = i + 1; j < 3 && !found; ++j) {
      Int det = ker[0][i] * ker[1][j] - ker[0][j] * ker[1][i];
      if (det == 0) continue;
      Int na = rho[i] * ker[1][j] - rho[j] * ker[1][i];
      Int nb = ker[0][i] * rho[j] - ker[0][j] * rho[i];
      if (na % det != 0 || nb % det != 0)
        throw engine_error("center is not in its own orthogonal lattice");
      a = na / det;
      b = nb / det;
      found = true;
    }
  Int x, y;
  Int g = ext_gcd(a, b, x, y);
  if (g != 1) throw engine_error("center must be primitive");
  // [[a, b], [-y, x]] has determinant a x + b y = 1.
  Vec<Int> lambda(3);
  for (int i = 0; i < 3; ++i) lambda[i] = -y * ker[0][i] + x * ker[1][i];
  return {rho, lambda};
}

// Some x with (rho, x) = gcd of the entries of G rho.
inline std::pair<Vec<Int>, Int> unit_pairing_vector(const GramLattice& L,
                                                    const Vec<Int>& rho) {
  Vec<Int> grho = mat_vec(L.gram(), rho);
  std::size_t n = grho.size();
  Vec<Int> x(n, 0);
  Int g = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (grho[i] == 0) continue;
    if (g == 0) {
      g = abs(grho[i]);
      x[i] = grho[i] > 0 ? 1 : -1;
      continue;
    }
    Int u, v;
    Int ng = ext_gcd(g, grho[i], u, v);
    for (auto& c : x) c *= u;
    x[i] = v;
    g = ng;
  }
  if (g == 0) throw engine_error("center pairs trivially with the lattice");
  return {x, g};
}

template <class Z>
bool crystallographic(const Mat<Z>& g, const Vec<Z>& d, const Z& nrm) {
  Z a = abs_of(nrm);
  for (std::size_t i = 0; i < d.size(); ++i) {
    Z s = 0;
    for (std::size_t j = 0; j < d.size(); ++j) s += g[i][j] * d[j];
    if ((Z(2) * s) % a != Z(0)) return false;
  }
  return true;
}

// Exact positive-definite enumeration of integer y with
// (y - y0)^T Q (y - y0) == R, Q given as rational Gram of a definite form.
struct QuadraticEnumerator {
  Mat<Rat> q;  // positive definite
  // Decomposition Q(y) = sum_i d_i (y_i + sum_{j>i} mu_ij y_j)^2
  Vec<Rat> dia;
  Mat<Rat> mu;

  explicit QuadraticEnumerator(Mat<Rat> qq) : q(std::move(qq)) {
    std::size_t n = q.size();
    mu.assign(n, Vec<Rat>(n, 0));
    dia.assign(n, 0);
    Mat<Rat> a = q;
    for (std::size_t i = 0; i < n; ++i) {
      dia[i] = a[i][i];
      if (dia[i] <= 0) throw engine_error("form is not positive definite");
      for (std::size_t j = i + 1; j < n; ++j) mu[i][j] = a[i][j] / dia[i];
      for (std::size_t j = i + 1; j < n; ++j)
        for (std::size_t k = i + 1; k < n; ++k)
          a[j][k] -= mu[i][j] * mu[i][k] * dia[i];
    }
  }

  template <class F>
  void enumerate(const Vec<Rat>& center, const Rat& r, F&& visit) const {
    std::size_t n = q.size();
    Vec<Int> y(n, 0);
    rec(static_cast<long>(n) - 1, center, r, y, visit);
  }

 private:
  template <class F>
  void rec(long i, const Vec<Rat>& c, const Rat& remain, Vec<Int>& y,
           F& visit) const {
    if (i < 0) {
      if (remain == 0) visit(y);
      return;
    }
    std::size_t n = q.size();
    // shift: y_i + sum_{j>i} mu_ij y_j - (c_i + sum_{j>i} mu_ij c_j)
    Rat shift = -c[i];
    for (std::size_t j = i + 1; j < n; ++j) shift += mu[i][j] * (Rat(y[j]) - c[j]);
    // need d_i (y_i + shift)^2 <= remain
    Rat bound = remain / dia[i];
    double bd = std::sqrt(std::max(0.0, to_double(bound)));
    double cd = -to_double(shift);
    Int lo(static_cast<long long>(std::floor(cd - bd)) - 1);
    Int hi(static_cast<long long>(std::ceil(cd + bd)) + 1);
    for (Int v = lo; v <= hi; ++v) {
      Rat t = Rat(v) + shift;
      Rat used = dia[i] * t * t;
      if (used > remain) continue;
      y[i] = v;
      rec(i - 1, c, remain - used, y, visit);
    }
    y[i] = 0;
  }
};

}  // namespace detail

// Step-0 walls and their affine chamber for an isotropic rank-3 center.
struct IsotropicFrame {
  Vec<Int> rho, lambda;
  Int lambda_sq;
  std::vector<Vec<Int>> walls;  // empty or two walls
  bool bounded = false;
};

inline IsotropicFrame isotropic_frame(const GramLattice& L, const Vec<Int>& rho,
                                      const std::vector<Int>& norms) {
  IsotropicFrame f;
  auto [r, lam] = detail::isotropic_plane(L, rho);
  f.rho = r;
  f.lambda = lam;
  f.lambda_sq = norm(L, lam);
  if (f.lambda_sq >= 0) throw engine_error("rho-perp is not semidefinite");
  // Wall of s rho + t lambda sits at mu = -s/t.
  std::optional<Rat> left, right;
  Vec<Int> left_root, right_root;
  for (const auto& d : norms) {
    if (d % f.lambda_sq != 0) continue;
    Int t0;
    if (!is_square(Int(d / f.lambda_sq), &t0) || t0 == 0) continue;
    Int span = abs(d) * t0 + 1;
    for (int sg : {1, -1}) {
      Int t = sg * t0;
      for (Int s = -span; s <= span; ++s) {
        if (gcd_of(s, t) != 1) continue;
        Vec<Int> v(3);
        for (int i = 0; i < 3; ++i) v[i] = s * f.rho[i] + t * f.lambda[i];
        if (!detail::crystallographic(L.gram(), v, d)) continue;
        Rat pos = ratio(-s, t);
        if (pos <= 0 && (!left || pos > *left)) {
          left = pos;
          left_root = v;
        }
        if (pos > 0 && (!right || pos < *right)) {
          right = pos;
          right_root = v;
        }
      }
    }
  }
  if (!left || !right) return f;
  f.bounded = true;
  Rat mid = (*left + *right) / 2;
  for (auto v : {left_root, right_root}) {
    // v = s rho + t lambda; orient so that s + t mid > 0
    Int s, t;
    // recover (s, t) from the (rho, lambda) basis
    Vec<Int> gx = mat_vec(L.gram(), v);
    Int vl = inner_product(L, v, f.lambda);
    t = vl / f.lambda_sq;
    Vec<Int> rest(3);
    for (int i = 0; i < 3; ++i) rest[i] = v[i] - t * f.lambda[i];
    s = 0;
    for (int i = 0; i < 3; ++i)
      if (f.rho[i] != 0) {
        s = rest[i] / f.rho[i];
        break;
      }
    if (Rat(s) + Rat(t) * mid < 0) v = negated(v);
    f.walls.push_back(v);
  }
  return f;
}

// Default center: e1 when it is isotropic with a bounded cusp, else the
// shortest positive vector found by growing coordinate boxes.
inline Center default_center(const GramLattice& L, RootPolicy policy) {
  std::size_t n = L.rank();
  if (n == 3 && L.gram()[0][0] == 0) {
    Vec<Int> e1(3, 0);
    e1[0] = 1;
    auto f = isotropic_frame(L, e1, admissible_norms(L, policy));
    if (f.bounded) return {e1, true};
  }
  for (int box = 1; box <= 8; ++box) {
    std::optional<Vec<Int>> best;
    Int best_norm = 0;
    Vec<Int> v(n, -box);
    while (true) {
      if (!is_zero(v) && canonical_line(v) == v && content(v) == 1) {
        Int q = norm(L, v);
        if (q > 0 && (!best || q < best_norm)) {
          best = v;
          best_norm = q;
        }
      }
      std::size_t p = 0;
      while (p < n && v[p] == box) v[p++] = -box;
      if (p == n) break;
      v[p] += 1;
    }
    if (best) return {*best, false};
  }
  throw engine_error("no positive vector found for the default center");
}

inline Center make_center(const GramLattice& L, const Vec<Int>& rho) {
  if (rho.size() != L.rank()) throw engine_error("center has wrong rank");
  if (is_zero(rho)) throw engine_error("center must be nonzero");
  Int q = norm(L, rho);
  if (q < 0) throw engine_error("center must have nonnegative norm");
  if (content(rho) != 1) throw engine_error("center must be primitive");
  return {rho, q == 0};
}

// Height-ordered root enumeration. Z is the arithmetic type of the hot path.
template <class Z>
class VinbergEngine {
 public:
  struct Root {
    Vec<Z> v;
    Vec<Z> gv;  // G v
    Z norm;
    Z rho_pair;
    int step = 0;
  };

  VinbergEngine(const GramLattice& L, Center c, RootPolicy policy)
      : L_(L), center_(std::move(c)), policy_(policy) {
    if (!L.is_even()) throw engine_error("lattice must be even");
    if (!is_hyperbolic(L)) throw engine_error("lattice must be hyperbolic");
    g_ = convert_mat<Z>(L.gram());
    rho_ = convert_vec<Z>(center_.rho);
    norms_ = admissible_norms(L, policy);
    auto [x1, g] = detail::unit_pairing_vector(L, center_.rho);
    x1_ = convert_vec<Z>(x1);
    pair_step_ = from_int<Z>(g);
    for (const auto& d : norms_) next_m_[d] = g;
    if (center_.isotropic) {
      if (L.rank() != 3)
        throw engine_error("isotropic centers are supported in rank 3 only");
      frame_ = isotropic_frame(L, center_.rho, norms_);
      if (!frame_.bounded)
        throw engine_error("cusp at the isotropic center is unbounded");
      lambda_ = convert_vec<Z>(frame_.lambda);
      lambda_sq_ = from_int<Z>(frame_.lambda_sq);
      for (const auto& w : frame_.walls) accept(convert_vec<Z>(w), 0);
    } else {
      setup_point_center();
    }
  }

  const GramLattice& lattice() const { return L_; }
  const Center& center() const { return center_; }
  RootPolicy policy() const { return policy_; }
  const std::vector<Int>& norms() const { return norms_; }
  const std::vector<Root>& roots() const { return roots_; }
  // Every candidate of height <= frontier() has been decided.
  const Rat& frontier() const { return frontier_; }
  int step() const { return step_; }

  Rat height_of(const Root& r) const {
    return ratio(to_int(r.rho_pair) * to_int(r.rho_pair), abs(to_int(r.norm)));
  }

  std::vector<RootVector> exported() const {
    std::vector<RootVector> out;
    for (const auto& r : roots_) {
      RootVector rv;
      for (const auto& x : r.v) rv.coords.push_back(to_int(x));
      rv.norm = to_int(r.norm);
      rv.step_index = r.step;
      rv.height = height_of(r);
      out.push_back(std::move(rv));
    }
    return out;
  }

  // Next accepted root of height <= max_height, or nothing once the
  // frontier reaches max_height.
  std::optional<RootVector> next_root(const Rat& max_height,
                                      std::size_t max_roots = 10000) {
    while (true) {
      if (roots_.size() >= max_roots) return std::nullopt;
      while (batch_pos_ < batch_.size()) {
        Cand& c = batch_[batch_pos_++];
        if (!accepts(c.v)) continue;
        accept(c.v, batch_height_ > last_accepted_height_ ? ++step_ : step_);
        if (batch_pos_ >= batch_.size()) frontier_ = batch_height_;
        return exported().back();
      }
      if (!batch_.empty()) {
        frontier_ = batch_height_;
        batch_.clear();
        batch_pos_ = 0;
      }
      if (!load_batch(max_height)) {
        if (max_height > frontier_) frontier_ = max_height;
        return std::nullopt;
      }
    }
  }

  // Runs until the frontier reaches max_height or the root cap is hit.
  // Returns false in the latter case.
  bool advance_to(const Rat& max_height, std::size_t max_roots = 10000) {
    while (next_root(max_height, max_roots)) {
    }
    return roots_.size() < max_roots || frontier_ >= max_height;
  }

  // Candidates of one exact height and norm, sorted lexicographically.
  std::vector<Vec<Z>> candidates(const Z& d, const Z& m) const {
    std::vector<Vec<Z>> out;
    if (center_.isotropic)
      isotropic_candidates(d, m, out);
    else
      point_candidates(d, m, out);
    std::sort(out.begin(), out.end());
    return out;
  }

  nlohmann::json save_state() const {
    nlohmann::json j;
    j["format"] = "reflat-vinberg-state";
    j["version"] = 1;
    j["gram"] = nlohmann::json::array();
    for (const auto& row : L_.gram()) {
      nlohmann::json r = nlohmann::json::array();
      for (const auto& x : row) r.push_back(x.str());
      j["gram"].push_back(r);
    }
    j["center"] = nlohmann::json::array();
    for (const auto& x : center_.rho) j["center"].push_back(x.str());
    j["policy"] = to_string(policy_);
    j["frontier"] = to_string(frontier_);
    j["step"] = step_;
    j["roots"] = nlohmann::json::array();
    for (const auto& r : roots_) {
      nlohmann::json rr;
      rr["coords"] = nlohmann::json::array();
      for (const auto& x : r.v) rr["coords"].push_back(to_string(x));
      rr["norm"] = to_string(r.norm);
      rr["step"] = r.step;
      j["roots"].push_back(rr);
    }
    j["next_m"] = nlohmann::json::object();
    for (const auto& [d, m] : next_m_) j["next_m"][d.str()] = m.str();
    return j;
  }

  static VinbergEngine load_state(const nlohmann::json& j) {
    if (j.value("format", "") != "reflat-vinberg-state" ||
        j.value("version", 0) != 1)
      throw engine_error("unsupported resume file");
    Mat<Int> g;
    for (const auto& row : j.at("gram")) {
      Vec<Int> r;
      for (const auto& x : row) r.emplace_back(x.get<std::string>());
      g.push_back(r);
    }
    GramLattice L(g);
    Vec<Int> rho;
    for (const auto& x : j.at("center")) rho.emplace_back(x.get<std::string>());
    VinbergEngine e(L, make_center(L, rho),
                    parse_policy(j.at("policy").get<std::string>()));
    e.roots_.clear();
    e.rows_.clear();
    for (const auto& rr : j.at("roots")) {
      Vec<Z> v;
      for (const auto& x : rr.at("coords"))
        v.push_back(from_int<Z>(Int(x.get<std::string>())));
      e.accept(v, rr.at("step").get<int>());
    }
    e.step_ = j.at("step").get<int>();
    std::string fr = j.at("frontier").get<std::string>();
    e.frontier_ = Rat(fr);
    for (auto it = j.at("next_m").begin(); it != j.at("next_m").end(); ++it)
      e.next_m_[Int(it.key())] = Int(it.value().get<std::string>());
    return e;
  }

 private:
  struct Cand {
    Vec<Z> v;
  };

  void accept(const Vec<Z>& v, int step) {
    Root r;
    r.v = v;
    r.gv.assign(v.size(), Z(0));
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) r.gv[i] += g_[i][j] * v[j];
    r.norm = 0;
    r.rho_pair = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      r.norm += v[i] * r.gv[i];
      r.rho_pair += rho_[i] * r.gv[i];
    }
    r.step = step;
    last_accepted_height_ = height_of(r);
    roots_.push_back(std::move(r));
  }

  bool accepts(const Vec<Z>& v) const {
    for (const auto& r : roots_) {
      Z s = 0;
      for (std::size_t i = 0; i < v.size(); ++i) s += r.gv[i] * v[i];
      if (s < Z(0)) return false;
    }
    return true;
  }

  // Loads the next nonempty height class; false if it exceeds max_height.
  bool load_batch(const Rat& max_height) {
    while (true) {
      std::optional<Rat> h;
      for (const auto& [d, m] : next_m_) {
        Rat hh = ratio(m * m, -d);
        if (!h || hh < *h) h = hh;
      }
      if (!h || *h > max_height) return false;
      std::vector<std::pair<Int, Int>> parts;  // (|d|, m)
      for (auto& [d, m] : next_m_)
        if (ratio(m * m, -d) == *h) {
          parts.emplace_back(-d, m);
          m += to_int(pair_step_);
        }
      std::sort(parts.begin(), parts.end());
      batch_.clear();
      batch_pos_ = 0;
      batch_height_ = *h;
      for (const auto& [ad, m] : parts) {
        for (auto& v : candidates(from_int<Z>(Int(-ad)), from_int<Z>(m))) {
          batch_.push_back(Cand{std::move(v)});
        }
      }
      if (batch_.empty()) {
        frontier_ = *h;
        continue;
      }
      return true;
    }
  }

  void isotropic_candidates(const Z& d, const Z& m, std::vector<Vec<Z>>& out) const {
    // delta = x_m + s rho + t lambda, x_m = (m / g) x_1
    Z scale = m / pair_step_;
    Vec<Z> xm(3);
    for (int i = 0; i < 3; ++i) xm[i] = scale * x1_[i];
    Z xm_sq = form(g_, xm, xm);
    Z xm_l = form(g_, xm, lambda_);
    // step-0 walls bound t: (xm, w) + t (lambda, w) >= 0
    std::optional<Z> lo, hi;
    for (std::size_t k = 0; k < 2; ++k) {
      const auto& w = roots_[k];
      Z a = 0, b = 0;
      for (int i = 0; i < 3; ++i) {
        a += xm[i] * w.gv[i];
        b += lambda_[i] * w.gv[i];
      }
      if (b > Z(0)) {
        Z t = ceil_div(Z(-a), b);
        if (!lo || t > *lo) lo = t;
      } else if (b < Z(0)) {
        Z t = floor_div(a, Z(-b));
        if (!hi || t < *hi) hi = t;
      } else if (a < Z(0)) {
        return;
      }
    }
    if (!lo || !hi) throw engine_error("unbounded cusp strip");
    Z two_m = Z(2) * m;
    for (Z t = *lo; t <= *hi; t += Z(1)) {
      Z num = d - xm_sq - Z(2) * t * xm_l - t * t * lambda_sq_;
      if (num % two_m != Z(0)) continue;
      Z s = num / two_m;
      Vec<Z> v(3);
      for (int i = 0; i < 3; ++i) v[i] = xm[i] + s * rho_[i] + t * lambda_[i];
      if (content(v) != Z(1)) continue;
      if (!detail::crystallographic(g_, v, d)) continue;
      out.push_back(std::move(v));
    }
  }

  void setup_point_center() {
    Vec<Int> grho = mat_vec(L_.gram(), center_.rho);
    kernel_ = integer_kernel(Mat<Int>{grho});
    std::size_t k = kernel_.size();
    Mat<Rat> q(k, Vec<Rat>(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        q[i][j] = Rat(-inner_product(L_, kernel_[i], kernel_[j]));
    qenum_.emplace(q);
    qinv_ = inverse(q);
    // Step-0 roots and their chamber for a generic xi in rho-perp.
    std::vector<Vec<Int>> orth;
    for (const auto& d : norms_)
      for (auto& v : point_solutions(Int(d), Int(0))) orth.push_back(v);
    Vec<Int> xi(L_.rank(), 0);
    Int w = 1;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < xi.size(); ++j) xi[j] += w * kernel_[i][j];
      w = w * 1009 + 7;
    }
    for (int tries = 0;; ++tries) {
      bool generic = true;
      for (const auto& v : orth)
        if (inner_product(L_, xi, v) == 0) generic = false;
      if (generic) break;
      for (std::size_t j = 0; j < xi.size(); ++j)
        xi[j] += kernel_[tries % k][j] * (tries + 2);
    }
    std::vector<Vec<Int>> pos;
    for (auto v : orth) {
      if (inner_product(L_, xi, v) < 0) v = negated(v);
      if (std::find(pos.begin(), pos.end(), v) == pos.end()) pos.push_back(v);
    }
    std::vector<Vec<Int>> simple;
    for (const auto& v : pos) {
      // eta = -v^2 xi + 2 (xi, v) v is a positive multiple of s_v(xi)
      Int nv = norm(L_, v), xv = inner_product(L_, xi, v);
      Vec<Int> eta(v.size());
      for (std::size_t j = 0; j < v.size(); ++j) eta[j] = -nv * xi[j] + 2 * xv * v[j];
      int negatives = 0;
      for (const auto& u : pos)
        if (inner_product(L_, eta, u) < 0) ++negatives;
      if (negatives == 1) simple.push_back(v);
    }
    std::sort(simple.begin(), simple.end());
    for (const auto& v : simple) accept(convert_vec<Z>(v), 0);
  }

  // All primitive crystallographic delta with delta^2 = d, (rho, delta) = m.
  std::vector<Vec<Int>> point_solutions(const Int& d, const Int& m) const {
    std::size_t n = L_.rank(), k = kernel_.size();
    Vec<Int> xm(n);
    Int scale = m / to_int(pair_step_);
    for (std::size_t i = 0; i < n; ++i) xm[i] = scale * to_int(x1_[i]);
    // delta = xm + sum y_i k_i; delta^2 = xm^2 + 2 b.y - y^T Q y
    Vec<Rat> b(k);
    for (std::size_t i = 0; i < k; ++i) b[i] = Rat(inner_product(L_, xm, kernel_[i]));
    Vec<Rat> y0(k, 0);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) y0[i] += qinv_[i][j] * b[j];
    Rat by0 = 0;
    for (std::size_t i = 0; i < k; ++i) by0 += b[i] * y0[i];
    Rat r = Rat(norm(L_, xm)) - Rat(d) + by0;
    std::vector<Vec<Int>> out;
    if (r < 0) return out;
    Mat<Int> g = L_.gram();
    qenum_->enumerate(y0, r, [&](const Vec<Int>& y) {
      Vec<Int> v = xm;
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < n; ++j) v[j] += y[i] * kernel_[i][j];
      if (content(v) != 1) return;
      if (norm(L_, v) != d) return;
      if (!detail::crystallographic(g, v, d)) return;
      out.push_back(v);
    });
    return out;
  }

  void point_candidates(const Z& d, const Z& m, std::vector<Vec<Z>>& out) const {
    for (auto& v : point_solutions(to_int(d), to_int(m)))
      out.push_back(convert_vec<Z>(v));
  }

  GramLattice L_;
  Center center_;
  RootPolicy policy_;
  Mat<Z> g_;
  Vec<Z> rho_;
  std::vector<Int> norms_;
  Vec<Z> x1_;
  Z pair_step_ = 1;
  std::map<Int, Int> next_m_;  // per norm: next value of (rho, delta)
  IsotropicFrame frame_;
  Vec<Z> lambda_;
  Z lambda_sq_ = 0;
  std::vector<Vec<Int>> kernel_;
  std::optional<detail::QuadraticEnumerator> qenum_;
  Mat<Rat> qinv_;
  std::vector<Root> roots_;
  std::vector<Vec<Z>> rows_;
  std::vector<Cand> batch_;
  std::size_t batch_pos_ = 0;
  Rat batch_height_ = 0;
  Rat frontier_ = 0;
  Rat last_accepted_height_ = 0;
  int step_ = 0;
};

// All roots of one norm and height; height * |d| must be a square.
inline std::vector<RootVector> enumerate_roots_at_height(
    const GramLattice& L, const Center& c, const Int& d, const Rat& height) {
  Rat m2 = height * Rat(-d);
  if (denominator(m2) != 1) return {};
  Int m;
  if (!is_square(numerator(m2), &m)) return {};
  VinbergEngine<Int> e(L, c, RootPolicy::all_norms);
  std::vector<RootVector> out;
  auto emit = [&](const Vec<Int>& v) {
    RootVector r;
    r.coords = v;
    r.norm = d;
    r.height = height;
    out.push_back(r);
  };
  if (m == 0) {
    for (const auto& r : e.exported())
      if (r.norm == d && r.height == 0) out.push_back(r);
    return out;
  }
  for (const auto& v : e.candidates(d, m)) emit(v);
  return out;
}

}  // namespace reflat
