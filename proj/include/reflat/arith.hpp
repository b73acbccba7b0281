#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace reflat {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

struct overflow_error : std::overflow_error {
  overflow_error() : std::overflow_error("int64 overflow") {}
};

// 64-bit integer that throws on overflow. Callers retry with Int.
class checked64 {
 public:
  constexpr checked64() = default;
  constexpr checked64(std::int64_t v) : v_(v) {}  // NOLINT
  explicit checked64(const Int& v) {
    if (v > std::numeric_limits<std::int64_t>::max() ||
        v < std::numeric_limits<std::int64_t>::min())
      throw overflow_error();
    v_ = static_cast<std::int64_t>(v);
  }

  constexpr std::int64_t value() const { return v_; }
  explicit operator Int() const { return Int(v_); }

  friend checked64 operator+(checked64 a, checked64 b) {
    std::int64_t r;
    if (__builtin_add_overflow(a.v_, b.v_, &r)) throw overflow_error();
    return r;
  }
  friend checked64 operator-(checked64 a, checked64 b) {
    std::int64_t r;
    if (__builtin_sub_overflow(a.v_, b.v_, &r)) throw overflow_error();
    return r;
  }
  friend checked64 operator*(checked64 a, checked64 b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a.v_, b.v_, &r)) throw overflow_error();
    return r;
  }
  friend checked64 operator/(checked64 a, checked64 b) {
    if (b.v_ == 0) throw std::domain_error("division by zero");
    if (a.v_ == std::numeric_limits<std::int64_t>::min() && b.v_ == -1)
      throw overflow_error();
    return a.v_ / b.v_;
  }
  friend checked64 operator%(checked64 a, checked64 b) {
    if (b.v_ == 0) throw std::domain_error("division by zero");
    if (b.v_ == -1) return 0;
    return a.v_ % b.v_;
  }
  checked64 operator-() const {
    if (v_ == std::numeric_limits<std::int64_t>::min()) throw overflow_error();
    return -v_;
  }
  checked64& operator+=(checked64 o) { return *this = *this + o; }
  checked64& operator-=(checked64 o) { return *this = *this - o; }
  checked64& operator*=(checked64 o) { return *this = *this * o; }
  checked64& operator/=(checked64 o) { return *this = *this / o; }
  checked64& operator%=(checked64 o) { return *this = *this % o; }

  friend constexpr auto operator<=>(checked64, checked64) = default;
  friend constexpr bool operator==(checked64, checked64) = default;

  friend std::ostream& operator<<(std::ostream& os, checked64 a) {
    return os << a.v_;
  }

 private:
  std::int64_t v_ = 0;
};

// Generic helpers usable with Int and checked64.

template <class Z>
Z abs_of(const Z& a) {
  return a < Z(0) ? Z(-a) : a;
}

template <class Z>
int sign_of(const Z& a) {
  return a < Z(0) ? -1 : (a > Z(0) ? 1 : 0);
}

template <class Z>
Z gcd_of(Z a, Z b) {
  a = abs_of(a);
  b = abs_of(b);
  while (b != Z(0)) {
    Z t = a % b;
    a = b;
    b = t;
  }
  return a;
}

template <class Z>
Z floor_div(const Z& a, const Z& b) {
  Z q = a / b;
  Z r = a % b;
  if (r != Z(0) && ((r < Z(0)) != (b < Z(0)))) q = q - Z(1);
  return q;
}

template <class Z>
Z ceil_div(const Z& a, const Z& b) {
  return -floor_div(Z(-a), b);
}

template <class Z>
Z mod_floor(const Z& a, const Z& b) {
  return a - floor_div(a, b) * b;
}

// Extended gcd: returns g and sets x, y with a*x + b*y = g >= 0.
template <class Z>
Z ext_gcd(const Z& a, const Z& b, Z& x, Z& y) {
  Z old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != Z(0)) {
    Z q = old_r / r;
    Z tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
    tmp = old_t - q * t;
    old_t = t;
    t = tmp;
  }
  if (old_r < Z(0)) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  x = old_s;
  y = old_t;
  return old_r;
}

inline Int isqrt(const Int& n) {
  if (n < 0) throw std::domain_error("isqrt of negative");
  return boost::multiprecision::sqrt(n);
}

inline checked64 isqrt(checked64 n) {
  return checked64(isqrt(Int(n.value())));
}

template <class Z>
bool is_square(const Z& n, Z* root = nullptr) {
  if (n < Z(0)) return false;
  Z r = isqrt(n);
  if (r * r != n) return false;
  if (root) *root = r;
  return true;
}

inline Int to_int(const Int& a) { return a; }
inline Int to_int(checked64 a) { return Int(a.value()); }

template <class Z>
Z from_int(const Int& a);
template <>
inline Int from_int<Int>(const Int& a) {
  return a;
}
template <>
inline checked64 from_int<checked64>(const Int& a) {
  return checked64(a);
}

inline std::string to_string(const Int& a) { return a.str(); }
inline std::string to_string(checked64 a) { return std::to_string(a.value()); }
inline std::string to_string(const Rat& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

// a / b for any nonzero b.
inline Rat ratio(const Int& a, const Int& b) {
  if (b == 0) throw std::domain_error("zero denominator");
  return Rat(a) / Rat(b);
}

inline double to_double(const Rat& q) { return q.convert_to<double>(); }

template <class Z>
using Vec = std::vector<Z>;
template <class Z>
using Mat = std::vector<std::vector<Z>>;

template <class Z, class W>
Vec<Z> convert_vec(const Vec<W>& v) {
  Vec<Z> r;
  r.reserve(v.size());
  for (const auto& x : v) r.push_back(from_int<Z>(to_int(x)));
  return r;
}

template <class Z, class W>
Mat<Z> convert_mat(const Mat<W>& m) {
  Mat<Z> r;
  r.reserve(m.size());
  for (const auto& row : m) r.push_back(convert_vec<Z>(row));
  return r;
}

template <class Z>
Z content(const Vec<Z>& v) {
  Z g = 0;
  for (const auto& x : v) g = gcd_of(g, x);
  return g;
}

template <class Z>
bool is_zero(const Vec<Z>& v) {
  for (const auto& x : v)
    if (x != Z(0)) return false;
  return true;
}

template <class Z>
Vec<Z> primitive_part(Vec<Z> v) {
  Z g = content(v);
  if (g > Z(1))
    for (auto& x : v) x = x / g;
  return v;
}

template <class Z>
Vec<Z> negated(Vec<Z> v) {
  for (auto& x : v) x = -x;
  return v;
}

// Sign-normalised primitive vector: first nonzero coordinate positive.
template <class Z>
Vec<Z> canonical_line(const Vec<Z>& v) {
  Vec<Z> p = primitive_part(v);
  for (const auto& x : p) {
    if (x == Z(0)) continue;
    if (x < Z(0)) p = negated(p);
    break;
  }
  return p;
}

}  // namespace reflat
