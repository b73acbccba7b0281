#pragma once

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "reflat/arith.hpp"

namespace reflat {

template <class Z>
Mat<Z> identity_matrix(std::size_t n) {
  Mat<Z> m(n, Vec<Z>(n, Z(0)));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = Z(1);
  return m;
}

template <class Z>
Mat<Z> transpose(const Mat<Z>& a) {
  if (a.empty()) return {};
  Mat<Z> t(a[0].size(), Vec<Z>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
  return t;
}

template <class Z>
Mat<Z> mat_mul(const Mat<Z>& a, const Mat<Z>& b) {
  if (a.empty()) return {};
  if (a[0].size() != b.size()) throw std::invalid_argument("mat_mul shape");
  std::size_t n = a.size(), m = b.empty() ? 0 : b[0].size(), k = b.size();
  Mat<Z> c(n, Vec<Z>(m, Z(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < k; ++t) {
      if (a[i][t] == Z(0)) continue;
      for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][t] * b[t][j];
    }
  return c;
}

template <class Z>
Vec<Z> mat_vec(const Mat<Z>& a, const Vec<Z>& v) {
  Vec<Z> r(a.size(), Z(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != v.size()) throw std::invalid_argument("mat_vec shape");
    for (std::size_t j = 0; j < v.size(); ++j) r[i] += a[i][j] * v[j];
  }
  return r;
}

// Matrix whose columns are the given vectors.
template <class Z>
Mat<Z> from_columns(const std::vector<Vec<Z>>& cols) {
  return transpose(Mat<Z>(cols.begin(), cols.end()));
}

// Fraction-free Gaussian elimination.
template <class Z>
Z determinant(Mat<Z> a) {
  std::size_t n = a.size();
  if (n == 0) return Z(1);
  Z prev = 1;
  int sgn = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == Z(0)) {
      std::size_t p = k + 1;
      while (p < n && a[p][k] == Z(0)) ++p;
      if (p == n) return Z(0);
      std::swap(a[k], a[p]);
      sgn = -sgn;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    prev = a[k][k];
  }
  return sgn > 0 ? a[n - 1][n - 1] : Z(-a[n - 1][n - 1]);
}

inline Mat<Rat> to_rational(const Mat<Int>& a) {
  Mat<Rat> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (const auto& x : a[i]) r[i].push_back(Rat(x));
  return r;
}

// Inverse over Q; throws on singular input.
inline Mat<Rat> inverse(const Mat<Rat>& m) {
  std::size_t n = m.size();
  Mat<Rat> a = m, inv = identity_matrix<Rat>(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) throw std::domain_error("singular matrix");
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    Rat piv = a[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] /= piv;
      inv[c][j] /= piv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      Rat f = a[r][c];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

inline bool is_integral(const Mat<Rat>& m) {
  for (const auto& row : m)
    for (const auto& x : row)
      if (denominator(x) != 1) return false;
  return true;
}

inline Mat<Int> to_integer(const Mat<Rat>& m) {
  Mat<Int> r(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (const auto& x : m[i]) {
      if (denominator(x) != 1) throw std::domain_error("non-integral entry");
      r[i].push_back(numerator(x));
    }
  return r;
}

struct SmithForm {
  Vec<Int> diagonal;  // d_1 | d_2 | ... including 1s and 0s
  Mat<Int> U;         // U * A * V = diag
  Mat<Int> V;
};

// Smith normal form with unimodular transforms.
inline SmithForm smith_normal_form(const Mat<Int>& a_in) {
  std::size_t n = a_in.size(), m = n ? a_in[0].size() : 0;
  Mat<Int> a = a_in, U = identity_matrix<Int>(n), V = identity_matrix<Int>(m);
  auto row_op = [&](std::size_t i, std::size_t j, const Int& p, const Int& q,
                    const Int& r, const Int& s) {
    // rows (i,j) <- [[p,q],[r,s]] * rows (i,j)
    for (std::size_t c = 0; c < m; ++c) {
      Int x = a[i][c], y = a[j][c];
      a[i][c] = p * x + q * y;
      a[j][c] = r * x + s * y;
    }
    for (std::size_t c = 0; c < n; ++c) {
      Int x = U[i][c], y = U[j][c];
      U[i][c] = p * x + q * y;
      U[j][c] = r * x + s * y;
    }
  };
  auto col_op = [&](std::size_t i, std::size_t j, const Int& p, const Int& q,
                    const Int& r, const Int& s) {
    for (std::size_t c = 0; c < n; ++c) {
      Int x = a[c][i], y = a[c][j];
      a[c][i] = p * x + q * y;
      a[c][j] = r * x + s * y;
    }
    for (std::size_t c = 0; c < m; ++c) {
      Int x = V[c][i], y = V[c][j];
      V[c][i] = p * x + q * y;
      V[c][j] = r * x + s * y;
    }
  };
  std::size_t lim = std::min(n, m);
  for (std::size_t t = 0; t < lim; ++t) {
    // pivot: smallest nonzero absolute value in the remaining block
    bool done = false;
    while (!done) {
      std::size_t pi = n, pj = m;
      for (std::size_t i = t; i < n; ++i)
        for (std::size_t j = t; j < m; ++j)
          if (a[i][j] != 0 && (pi == n || abs(a[i][j]) < abs(a[pi][pj]))) {
            pi = i;
            pj = j;
          }
      if (pi == n) break;
      if (pi != t) row_op(t, pi, 0, 1, 1, 0);
      if (pj != t) col_op(t, pj, 0, 1, 1, 0);
      done = true;
      for (std::size_t i = t + 1; i < n; ++i) {
        if (a[i][t] == 0) continue;
        if (a[i][t] % a[t][t] == 0) {
          row_op(t, i, 1, 0, -(a[i][t] / a[t][t]), 1);
          continue;
        }
        Int x, y;
        Int g = ext_gcd(a[t][t], a[i][t], x, y);
        Int p = a[t][t] / g, q = a[i][t] / g;
        row_op(t, i, x, y, -q, p);
      }
      for (std::size_t j = t + 1; j < m; ++j) {
        if (a[t][j] == 0) continue;
        if (a[t][j] % a[t][t] == 0) {
          col_op(t, j, 1, 0, -(a[t][j] / a[t][t]), 1);
          continue;
        }
        Int x, y;
        Int g = ext_gcd(a[t][t], a[t][j], x, y);
        Int p = a[t][t] / g, q = a[t][j] / g;
        col_op(t, j, x, y, -q, p);
        done = false;
      }
      if (!done) continue;
      for (std::size_t i = t + 1; i < n; ++i)
        if (a[i][t] != 0) done = false;
      if (!done) continue;
      // divisibility condition
      for (std::size_t i = t + 1; i < n && done; ++i)
        for (std::size_t j = t + 1; j < m && done; ++j)
          if (a[i][j] % a[t][t] != 0) {
            row_op(t, i, 1, 1, 0, 1);
            done = false;
          }
    }
    if (a[t][t] < 0) {
      for (std::size_t c = 0; c < m; ++c) a[t][c] = -a[t][c];
      for (std::size_t c = 0; c < n; ++c) U[t][c] = -U[t][c];
    }
  }
  SmithForm f;
  for (std::size_t t = 0; t < lim; ++t) f.diagonal.push_back(a[t][t]);
  f.U = std::move(U);
  f.V = std::move(V);
  return f;
}

// Row Hermite normal form of the row lattice; zero rows dropped.
inline Mat<Int> hermite_rows(Mat<Int> a) {
  std::size_t n = a.size();
  if (n == 0) return {};
  std::size_t m = a[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < m && r < n; ++c) {
    for (std::size_t i = r + 1; i < n; ++i) {
      if (a[i][c] == 0) continue;
      Int x, y;
      Int g = ext_gcd(a[r][c], a[i][c], x, y);
      Int p = a[r][c] / g, q = a[i][c] / g;
      for (std::size_t j = 0; j < m; ++j) {
        Int u = a[r][j], v = a[i][j];
        a[r][j] = x * u + y * v;
        a[i][j] = -q * u + p * v;
      }
    }
    if (a[r][c] == 0) continue;
    if (a[r][c] < 0)
      for (auto& e : a[r]) e = -e;
    for (std::size_t i = 0; i < r; ++i) {
      Int f = floor_div(a[i][c], a[r][c]);
      if (f != 0)
        for (std::size_t j = 0; j < m; ++j) a[i][j] -= f * a[r][j];
    }
    ++r;
  }
  a.resize(r);
  return a;
}

// Basis of {x in Z^m : A x = 0}.
inline std::vector<Vec<Int>> integer_kernel(const Mat<Int>& a) {
  if (a.empty()) return {};
  std::size_t n = a.size(), m = a[0].size();
  // Row-reduce [A^T | I]; rows whose A^T part vanishes span the kernel.
  Mat<Int> aug(m, Vec<Int>(n + m, 0));
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) aug[j][i] = a[i][j];
    aug[j][n + j] = 1;
  }
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < m; ++c) {
    for (std::size_t i = r + 1; i < m; ++i) {
      if (aug[i][c] == 0) continue;
      Int x, y;
      Int g = ext_gcd(aug[r][c], aug[i][c], x, y);
      Int p = aug[r][c] / g, q = aug[i][c] / g;
      for (std::size_t j = 0; j < n + m; ++j) {
        Int u = aug[r][j], v = aug[i][j];
        aug[r][j] = x * u + y * v;
        aug[i][j] = -q * u + p * v;
      }
    }
    if (aug[r][c] != 0) ++r;
  }
  std::vector<Vec<Int>> ker;
  for (std::size_t i = r; i < m; ++i)
    ker.emplace_back(aug[i].begin() + static_cast<long>(n), aug[i].end());
  Mat<Int> h = hermite_rows(Mat<Int>(ker.begin(), ker.end()));
  return std::vector<Vec<Int>>(h.begin(), h.end());
}

template <class Z>
Vec<Z> cross3(const Vec<Z>& a, const Vec<Z>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

template <class Z>
Z det3(const Mat<Z>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// Adjugate of a 3x3 matrix: adj(m) * m = det(m) * I.
template <class Z>
Mat<Z> adjugate3(const Mat<Z>& m) {
  Mat<Z> c(3, Vec<Z>(3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      int r0 = (i + 1) % 3, r1 = (i + 2) % 3, c0 = (j + 1) % 3,
          c1 = (j + 2) % 3;
      c[j][i] = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    }
  return c;
}

}  // namespace reflat
