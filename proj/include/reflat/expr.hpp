#pragma once

#include <cctype>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "reflat/lattice.hpp"

namespace reflat {

struct parse_error : std::runtime_error {
  parse_error(const std::string& msg, int line, int column)
      : std::runtime_error("line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ": " + msg),
        line(line),
        column(column) {}
  int line;
  int column;
};

struct LatticeTerm {
  enum class Kind { named, diag, gram };
  Kind kind = Kind::named;
  std::string name;   // U, E8, A2
  Int scale = 1;      // U(t), E8(t)
  Int diag_value = 0; // <n>
  Mat<Int> matrix;    // [[...]]
};

struct LatticeExpression {
  std::vector<LatticeTerm> terms;
};

namespace detail {

class ExprParser {
 public:
  explicit ExprParser(const std::string& s) : s_(s) {}

  LatticeExpression parse() {
    LatticeExpression e;
    skip_ws();
    if (at_end()) fail("empty expression", pos_);
    e.terms.push_back(term());
    skip_ws();
    while (!at_end()) {
      if (s_[pos_] != '+') fail("expected '+'", pos_);
      ++pos_;
      skip_ws();
      if (at_end()) fail("expected a term after '+'", pos_);
      e.terms.push_back(term());
      skip_ws();
    }
    return e;
  }

 private:
  bool at_end() const { return pos_ >= s_.size(); }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < at && i < s_.size(); ++i) {
      if (s_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw parse_error(msg, line, col);
  }

  bool integer(Int& out) {
    std::size_t p = pos_;
    if (p < s_.size() && (s_[p] == '-' || s_[p] == '+')) ++p;
    std::size_t digits = p;
    while (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) ++p;
    if (p == digits) return false;
    out = Int(s_.substr(pos_, p - pos_)[0] == '+'
                  ? s_.substr(pos_ + 1, p - pos_ - 1)
                  : s_.substr(pos_, p - pos_));
    pos_ = p;
    return true;
  }

  LatticeTerm term() {
    std::size_t start = pos_;
    LatticeTerm t;
    char c = s_[pos_];
    if (c == '<') {
      ++pos_;
      skip_ws();
      t.kind = LatticeTerm::Kind::diag;
      if (!integer(t.diag_value)) fail("malformed <n> term", start);
      skip_ws();
      if (at_end() || s_[pos_] != '>') fail("malformed <n> term", start);
      ++pos_;
      if (t.diag_value == 0) fail("<0> is degenerate", start);
      return t;
    }
    if (c == '[') {
      t.kind = LatticeTerm::Kind::gram;
      t.matrix = matrix(start);
      return t;
    }
    for (const char* nm : {"E8", "A2", "U"}) {
      std::string n(nm);
      if (s_.compare(pos_, n.size(), n) == 0) {
        t.kind = LatticeTerm::Kind::named;
        t.name = n;
        pos_ += n.size();
        skip_ws();
        if (!at_end() && s_[pos_] == '(') {
          ++pos_;
          skip_ws();
          if (!integer(t.scale)) fail("malformed scale factor", start);
          skip_ws();
          if (at_end() || s_[pos_] != ')') fail("expected ')'", pos_);
          ++pos_;
          if (t.scale == 0) fail("scale factor must be nonzero", start);
        }
        return t;
      }
    }
    fail("unknown term", start);
  }

  Mat<Int> matrix(std::size_t start) {
    Mat<Int> m;
    ++pos_;  // outer '['
    skip_ws();
    while (true) {
      if (at_end() || s_[pos_] != '[') fail("malformed Gram literal", start);
      ++pos_;
      Vec<Int> row;
      skip_ws();
      while (true) {
        Int v;
        if (!integer(v)) fail("malformed Gram literal", start);
        row.push_back(v);
        skip_ws();
        if (!at_end() && s_[pos_] == ',') {
          ++pos_;
          skip_ws();
          continue;
        }
        break;
      }
      if (at_end() || s_[pos_] != ']') fail("malformed Gram literal", start);
      ++pos_;
      m.push_back(std::move(row));
      skip_ws();
      if (!at_end() && s_[pos_] == ',') {
        ++pos_;
        skip_ws();
        continue;
      }
      break;
    }
    if (at_end() || s_[pos_] != ']') fail("malformed Gram literal", start);
    ++pos_;
    for (const auto& r : m)
      if (r.size() != m.size()) fail("Gram literal is not square", start);
    return m;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

inline Mat<Int> e8_gram() {
  // Negative definite, Bourbaki labelling.
  Mat<Int> g(8, Vec<Int>(8, 0));
  for (int i = 0; i < 8; ++i) g[i][i] = -2;
  auto link = [&](int a, int b) { g[a][b] = g[b][a] = 1; };
  link(0, 2);
  link(1, 3);
  link(2, 3);
  link(3, 4);
  link(4, 5);
  link(5, 6);
  link(6, 7);
  return g;
}

}  // namespace detail

inline LatticeExpression parse_lattice(const std::string& text) {
  return detail::ExprParser(text).parse();
}

inline std::string print(const LatticeExpression& e) {
  std::ostringstream os;
  for (std::size_t i = 0; i < e.terms.size(); ++i) {
    if (i) os << " + ";
    const auto& t = e.terms[i];
    switch (t.kind) {
      case LatticeTerm::Kind::named:
        os << t.name;
        if (t.scale != 1) os << "(" << t.scale << ")";
        break;
      case LatticeTerm::Kind::diag:
        os << "<" << t.diag_value << ">";
        break;
      case LatticeTerm::Kind::gram:
        os << "[";
        for (std::size_t r = 0; r < t.matrix.size(); ++r) {
          if (r) os << ",";
          os << "[";
          for (std::size_t c = 0; c < t.matrix[r].size(); ++c) {
            if (c) os << ",";
            os << t.matrix[r][c];
          }
          os << "]";
        }
        os << "]";
        break;
    }
  }
  return os.str();
}

inline Mat<Int> term_gram(const LatticeTerm& t) {
  switch (t.kind) {
    case LatticeTerm::Kind::diag:
      return {{t.diag_value}};
    case LatticeTerm::Kind::gram:
      return t.matrix;
    case LatticeTerm::Kind::named:
      break;
  }
  Mat<Int> g;
  if (t.name == "U")
    g = {{0, 1}, {1, 0}};
  else if (t.name == "A2")
    g = {{-2, 1}, {1, -2}};
  else
    g = detail::e8_gram();
  for (auto& r : g)
    for (auto& x : r) x *= t.scale;
  return g;
}

// Block-diagonal direct sum.
inline GramLattice construct(const LatticeExpression& e,
                             bool require_even = false) {
  std::size_t n = 0;
  std::vector<Mat<Int>> blocks;
  for (const auto& t : e.terms) {
    blocks.push_back(term_gram(t));
    n += blocks.back().size();
  }
  Mat<Int> g(n, Vec<Int>(n, 0));
  std::size_t off = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) g[off + i][off + j] = b[i][j];
    off += b.size();
  }
  if (require_even)
    for (std::size_t i = 0; i < n; ++i)
      if (g[i][i] % 2 != 0)
        throw lattice_error("odd diagonal entry in an even lattice");
  return GramLattice(std::move(g));
}

inline GramLattice construct(const std::string& text,
                             bool require_even = false) {
  return construct(parse_lattice(text), require_even);
}

// U + <-2k>
inline GramLattice series_lattice(long k) {
  return GramLattice({{0, 1, 0}, {1, 0, 0}, {0, 0, Int(-2 * k)}});
}

}  // namespace reflat
