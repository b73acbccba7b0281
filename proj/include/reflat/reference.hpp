#pragma once

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "reflat/survey.hpp"

namespace reflat {

// ---------------------------------------------------------------------------
// Transcribed table for U + <-2k>

struct RefGenerator {
  std::string name;
  std::string label;  // printed kind
  Mat<Int> matrix;
};

struct RefEntry {
  long k = 0;
  std::string type;
  std::vector<Vec<Int>> roots;  // elliptic: P(M)
  Mat<Int> gram;
  std::optional<Int> w_norm;
  std::vector<Vec<Int>> e, f;
  Mat<Int> gram_e, gram_f;
  std::optional<Vec<Int>> w;
  std::vector<RefGenerator> generators;
};

// Lattices outside the series with printed walls (full policy) and the
// type under the -2 policy.
struct ScaledExample {
  std::string lattice;
  std::vector<Vec<Int>> roots;
  Mat<Int> gram;
  std::string two_reflective_type;
  Vec<Int> w;
  Int w_norm;
};

struct ReferenceTable {
  std::map<long, RefEntry> entries;
  std::vector<ScaledExample> scaled;
  std::map<std::string, std::vector<long>> summary;  // closing lists
};

inline ReferenceTable parse_reference(const nlohmann::json& j) {
  if (j.value("format", "") != "reflat-reference-table")
    throw std::invalid_argument("not a reference table");
  ReferenceTable t;
  for (const auto& x : j.at("entries")) {
    RefEntry e;
    e.k = x.at("k").get<long>();
    e.type = x.at("type").get<std::string>();
    auto vecs = [&](const char* key, std::vector<Vec<Int>>& out) {
      if (x.contains(key))
        for (const auto& v : x.at(key)) out.push_back(vec_from_json(v));
    };
    vecs("roots", e.roots);
    vecs("e", e.e);
    vecs("f", e.f);
    if (x.contains("gram")) e.gram = mat_from_json(x.at("gram"));
    if (x.contains("gram_e")) e.gram_e = mat_from_json(x.at("gram_e"));
    if (x.contains("gram_f")) e.gram_f = mat_from_json(x.at("gram_f"));
    if (x.contains("w_norm")) e.w_norm = int_from_json(x.at("w_norm"));
    if (x.contains("w")) e.w = vec_from_json(x.at("w"));
    if (x.contains("generators"))
      for (const auto& g : x.at("generators"))
        e.generators.push_back({g.at("name").get<std::string>(),
                                g.at("label").get<std::string>(),
                                mat_from_json(g.at("matrix"))});
    t.entries[e.k] = std::move(e);
  }
  if (j.contains("scaled_examples"))
    for (const auto& x : j.at("scaled_examples")) {
      ScaledExample e;
      e.lattice = x.at("lattice").get<std::string>();
      for (const auto& v : x.at("roots")) e.roots.push_back(vec_from_json(v));
      e.gram = mat_from_json(x.at("gram"));
      e.two_reflective_type = x.at("two_reflective_type").get<std::string>();
      e.w = vec_from_json(x.at("w"));
      e.w_norm = int_from_json(x.at("w_norm"));
      t.scaled.push_back(std::move(e));
    }
  for (const auto& [name, ks] : j.at("summary_lists").items())
    t.summary[name] = ks.get<std::vector<long>>();
  return t;
}

inline ReferenceTable load_reference(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open reference table: " + path);
  return parse_reference(nlohmann::json::parse(in));
}

enum class CheckStatus { pass, fail, discrepancy_in_source };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "PASS";
    case CheckStatus::fail: return "FAIL";
    case CheckStatus::discrepancy_in_source: return "DISCREPANCY-IN-SOURCE";
  }
  return "?";
}

struct CheckResult {
  long k = 0;
  std::string item;
  CheckStatus status = CheckStatus::pass;
  std::string detail;
};

namespace detail {

inline bool is_root(const GramLattice& L, const Vec<Int>& v) {
  Int q = norm(L, v);
  if (q >= 0) return false;
  Vec<Int> c = canonical_line(v);
  if (c != v && c != negated(v)) return false;  // not primitive
  for (std::size_t i = 0; i < L.rank(); ++i) {
    Vec<Int> e(L.rank(), 0);
    e[i] = 1;
    if ((2 * inner_product(L, e, v)) % q != 0) return false;
  }
  return true;
}

inline bool off_diagonal_nonnegative(const Mat<Int>& g) {
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j)
      if (i != j && g[i][j] < 0) return false;
  return true;
}

}  // namespace detail

// Redundancy checks inside the printed data.
inline std::vector<CheckResult> self_check(const ReferenceTable& t) {
  std::vector<CheckResult> out;
  auto add = [&](long k, std::string item, bool ok, std::string detail = {}) {
    out.push_back({k, std::move(item), ok ? CheckStatus::pass : CheckStatus::fail,
                   std::move(detail)});
  };
  for (const auto& [k, e] : t.entries) {
    GramLattice L = series_lattice(k);
    auto vectors = [&](const char* name, const std::vector<Vec<Int>>& vs, const Mat<Int>& g) {
      if (vs.empty()) return;
      add(k, std::string("gram_") + name, gram_of(L, vs) == g,
          "printed Gram against pairwise products");
      add(k, std::string("sign_") + name, detail::off_diagonal_nonnegative(g),
          "off-diagonal entries nonnegative");
      bool roots = std::all_of(vs.begin(), vs.end(),
                               [&](const Vec<Int>& v) { return detail::is_root(L, v); });
      add(k, std::string("roots_") + name, roots, "every printed vector is a root");
    };
    vectors("P", e.roots, e.gram);
    vectors("e", e.e, e.gram_e);
    vectors("f", e.f, e.gram_f);
    if (e.w && e.w_norm) {
      Int q = norm(L, *e.w);
      std::string d = "w^2 = " + q.str() + ", printed " + e.w_norm->str();
      if (k == 37) d += "; printed w and headline value agree";
      add(k, "w_norm", q == *e.w_norm, d);
    }
    for (const auto& g : e.generators) {
      add(k, "isometry_" + g.name, is_isometry(L, g.matrix), "C^T G C = G");
      if (e.w) {
        Vec<Int> cw = act(g.matrix, *e.w);
        bool plus = cw == *e.w, minus = cw == negated(*e.w);
        add(k, "axis_" + g.name, plus || minus, plus ? "C w = w" : minus ? "C w = -w" : "C w != +-w");
        bool consistent = true;
        if (g.label == "hyperbolic_translation") consistent = plus;
        if (g.label == "skew_symmetry") consistent = minus;
        if (g.label == "central_symmetry")
          consistent = detail::is_identity(mat_mul(g.matrix, g.matrix));
        add(k, "label_" + g.name, consistent, "printed label " + g.label);
      }
    }
    // Summary lists against the table entry.
    std::vector<std::string> in;
    for (const auto& [name, ks] : t.summary)
      if (std::find(ks.begin(), ks.end(), k) != ks.end()) in.push_back(name);
    if (in.size() == 1 && in[0] == e.type) {
      add(k, "summary", true, "entry and summary list agree");
    } else {
      std::string d = "table entry says " + e.type + ", summary lists: ";
      d += in.empty() ? std::string("none") : in[0];
      out.push_back({k, "summary", CheckStatus::discrepancy_in_source, d});
    }
  }
  // k = 0 marks entries outside the series.
  for (const auto& e : t.scaled) {
    GramLattice L = construct(e.lattice);
    add(0, e.lattice + ": gram_P", gram_of(L, e.roots) == e.gram,
        "printed Gram against pairwise products");
    add(0, e.lattice + ": sign_P", detail::off_diagonal_nonnegative(e.gram),
        "off-diagonal entries nonnegative");
    add(0, e.lattice + ": roots_P",
        std::all_of(e.roots.begin(), e.roots.end(),
                    [&](const Vec<Int>& v) { return detail::is_root(L, v); }),
        "every printed vector is a root");
    add(0, e.lattice + ": w_norm", norm(L, e.w) == e.w_norm,
        "w^2 = " + norm(L, e.w).str() + ", printed " + e.w_norm.str());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Orbits and membership

namespace detail {

inline std::vector<Mat<Int>> letters_of(const GramLattice& L, const std::vector<Mat<Int>>& gens) {
  std::vector<Mat<Int>> out;
  for (const auto& g : gens) {
    out.push_back(g);
    out.push_back(isometry_inverse(L, g));
  }
  return out;
}

// Images of the seeds under words of length <= depth.
inline std::set<Vec<Int>> orbit_ball(const GramLattice& L, const std::vector<Mat<Int>>& gens,
                                     const std::vector<Vec<Int>>& seeds, int depth) {
  auto letters = letters_of(L, gens);
  std::set<Vec<Int>> seen(seeds.begin(), seeds.end());
  std::vector<Vec<Int>> layer(seeds.begin(), seeds.end());
  for (int d = 0; d < depth && !layer.empty(); ++d) {
    std::vector<Vec<Int>> next;
    for (const auto& v : layer)
      for (const auto& l : letters) {
        Vec<Int> u = act(l, v);
        if (seen.insert(u).second) next.push_back(u);
      }
    layer = std::move(next);
  }
  return seen;
}

// Greedy word reduction: multiply by the letter that shrinks the entries
// most until the identity or a letter is reached. Short prefixes are tried
// first because a product like T^n s only shrinks after s is stripped.
// Exact when it succeeds; failure means no word was found.
inline bool greedy_reduces(const Mat<Int>& x, const std::vector<Mat<Int>>& letters,
                           int max_steps) {
  Mat<Int> cur = x;
  for (int s = 0; s < max_steps; ++s) {
    if (is_identity(cur)) return true;
    for (const auto& l : letters)
      if (cur == l) return true;
    std::optional<Mat<Int>> best;
    for (const auto& l : letters) {
      Mat<Int> c = mat_mul(cur, l);
      if (!best || max_abs_entry(c) < max_abs_entry(*best)) best = c;
    }
    if (!best || max_abs_entry(*best) >= max_abs_entry(cur)) return false;
    cur = *best;
  }
  return false;
}

inline bool in_generated_group(const GramLattice& L, const Mat<Int>& x,
                               const std::vector<Mat<Int>>& gens, int max_steps = 400) {
  // Elementary groups have few elements below any entry bound, so a
  // bounded closure settles most cases outright.
  Int cap = max_abs_entry(x);
  for (const auto& g : gens) cap = std::max(cap, max_abs_entry(g));
  if (bounded_closure(L, gens, cap * 100, 200000).count(x)) return true;
  auto letters = letters_of(L, gens);
  std::vector<Mat<Int>> starts{x};
  for (const auto& a : letters) {
    starts.push_back(mat_mul(x, a));
    for (const auto& b : letters) starts.push_back(mat_mul(mat_mul(x, a), b));
  }
  for (const auto& s : starts)
    if (greedy_reduces(s, letters, max_steps)) return true;
  return false;
}

inline Mat<Int> conjugate(const GramLattice& L, const Mat<Int>& g, const Mat<Int>& c) {
  return mat_mul(mat_mul(g, c), isometry_inverse(L, g));
}

// Simultaneous permutation taking a to b, if any.
inline std::optional<std::vector<std::size_t>> gram_permutation(const Mat<Int>& a,
                                                                const Mat<Int>& b) {
  std::size_t n = a.size();
  if (b.size() != n) return std::nullopt;
  std::vector<std::size_t> p(n);
  std::vector<bool> used(n, false);
  std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
    if (i == n) return true;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j] || a[i][i] != b[j][j]) continue;
      bool ok = true;
      for (std::size_t r = 0; r < i && ok; ++r) ok = a[i][r] == b[j][p[r]];
      if (!ok) continue;
      used[j] = true;
      p[i] = j;
      if (rec(i + 1)) return true;
      used[j] = false;
    }
    return false;
  };
  if (rec(0)) return p;
  return std::nullopt;
}

// Indices of the first linearly independent family of full rank.
inline std::optional<std::vector<std::size_t>> independent_subset(
    const std::vector<Vec<Int>>& vs, std::size_t n) {
  std::vector<std::size_t> pick;
  std::vector<Vec<Int>> rows;
  for (std::size_t i = 0; i < vs.size() && pick.size() < n; ++i) {
    rows.push_back(vs[i]);
    if (hermite_rows(Mat<Int>(rows.begin(), rows.end())).size() == rows.size())
      pick.push_back(i);
    else
      rows.pop_back();
  }
  if (pick.size() != n) return std::nullopt;
  return pick;
}

// An isometry g with g(p) a wall for every printed wall p. Identity first,
// then maps sending a basis of printed walls onto pool vectors with the same
// Gram matrix.
inline std::optional<Mat<Int>> wall_matching_isometry(
    const GramLattice& L, const std::vector<Vec<Int>>& printed,
    const std::vector<Vec<Int>>& pool, const std::function<bool(const Vec<Int>&)>& is_wall) {
  std::size_t n = L.rank();
  auto all_walls = [&](const Mat<Int>& g) {
    for (const auto& p : printed)
      if (!is_wall(act(g, p))) return false;
    return true;
  };
  Mat<Int> id = identity_matrix<Int>(n);
  if (all_walls(id)) return id;
  auto basis = independent_subset(printed, n);
  if (!basis) return std::nullopt;
  std::vector<Vec<Int>> src;
  for (auto i : *basis) src.push_back(printed[i]);
  Mat<Int> gs = gram_of(L, src);
  Mat<Rat> src_inv = inverse(to_rational(from_columns(src)));
  std::vector<Vec<Int>> pick(n);
  std::optional<Mat<Int>> found;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (found) return;
    if (i == n) {
      Mat<Rat> g = mat_mul(to_rational(from_columns(pick)), src_inv);
      if (!is_integral(g)) return;
      Mat<Int> gi = to_integer(g);
      if (is_isometry(L, gi) && all_walls(gi)) found = gi;
      return;
    }
    for (const auto& q : pool) {
      if (norm(L, q) != gs[i][i]) continue;
      bool ok = true;
      for (std::size_t r = 0; r < i && ok; ++r) ok = inner_product(L, pick[r], q) == gs[i][r];
      if (!ok) continue;
      pick[i] = q;
      rec(i + 1);
      if (found) return;
    }
  };
  rec(0);
  return found;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Computed against printed

enum class VerifyStatus { pass, fail, discrepancy };

inline const char* to_string(VerifyStatus s) {
  switch (s) {
    case VerifyStatus::pass: return "PASS";
    case VerifyStatus::fail: return "FAIL";
    case VerifyStatus::discrepancy: return "DISCREPANCY";
  }
  return "?";
}

struct Verdict {
  long k = 0;
  VerifyStatus status = VerifyStatus::pass;
  std::string computed_type, printed_type;
  std::vector<std::string> failures;
  std::vector<std::string> notes;
  std::optional<Mat<Int>> conjugator;  // printed data -> computed chamber
};

inline Verdict verify_record(const RunRecord& r, const RefEntry& ref,
                             const std::vector<CheckResult>& source_checks) {
  Verdict v;
  v.k = ref.k;
  const ReflectivityReport& rep = r.report;
  const GramLattice& L = rep.chamber.lattice;
  v.computed_type = to_string(rep.type);
  v.printed_type = ref.type;
  auto fail = [&](std::string s) { v.failures.push_back(std::move(s)); };

  if (v.computed_type != ref.type)
    fail("type: computed " + v.computed_type + ", printed " + ref.type);

  std::vector<Vec<Int>> accepted;
  for (const auto& x : rep.chamber.roots) accepted.push_back(x.coords);

  if (ref.type == "elliptic" && rep.type == ReflectivityType::elliptic) {
    Mat<Int> mine = gram_of(L, accepted);
    auto perm = detail::gram_permutation(ref.gram, mine);
    if (!perm) fail("Gram matrix differs from the printed one under every permutation");
    std::set<Vec<Int>> walls(accepted.begin(), accepted.end());
    auto g = detail::wall_matching_isometry(
        L, ref.roots, accepted, [&](const Vec<Int>& x) { return walls.count(x) > 0; });
    if (!g || ref.roots.size() != accepted.size())
      fail("no isometry of the lattice maps the printed walls onto the computed ones");
    else
      v.conjugator = *g;
  }

  if (ref.type == "hyperbolic" && rep.type == ReflectivityType::hyperbolic && rep.w) {
    Int q = norm(L, *rep.w);
    if (!ref.w_norm || q != *ref.w_norm)
      fail("(w,w): computed " + q.str() + ", printed " +
           (ref.w_norm ? ref.w_norm->str() : std::string("none")));
    std::vector<Mat<Int>> mine;
    for (const auto& s : rep.generators) mine.push_back(s.matrix);
    std::vector<Vec<Int>> base = rep.orbits.base_e;
    base.insert(base.end(), rep.orbits.base_f.begin(), rep.orbits.base_f.end());
    std::set<Vec<Int>> known = detail::orbit_ball(L, mine, accepted, 6);
    std::vector<Vec<Int>> printed = ref.e;
    printed.insert(printed.end(), ref.f.begin(), ref.f.end());
    auto g = detail::wall_matching_isometry(
        L, printed, accepted, [&](const Vec<Int>& x) { return known.count(x) > 0; });
    if (!g) {
      fail("printed e and f are not walls of the computed chamber up to isometry");
    } else {
      v.conjugator = *g;
      std::vector<Mat<Int>> theirs;
      for (const auto& c : ref.generators) theirs.push_back(detail::conjugate(L, *g, c.matrix));
      for (std::size_t i = 0; i < theirs.size(); ++i)
        if (!detail::in_generated_group(L, theirs[i], mine))
          fail("printed " + ref.generators[i].name + " not found in the computed group");
      std::vector<std::string> extra;
      for (const auto& s : rep.generators)
        if (!detail::in_generated_group(L, s.matrix, theirs)) extra.push_back(to_string(s.kind));
      if (!extra.empty()) {
        std::string d = "computed A(M) is strictly larger than the printed group (extra ";
        for (std::size_t i = 0; i < extra.size(); ++i) d += (i ? ", " : "") + extra[i];
        v.notes.push_back(d + ")");
      }
      // Both presentations must describe the same walls.
      std::vector<Vec<Int>> mapped;
      for (const auto& p : printed) mapped.push_back(act(*g, p));
      std::set<Vec<Int>> printed_orbit = detail::orbit_ball(L, theirs, mapped, 8);
      for (const auto& b : base)
        if (!printed_orbit.count(b)) {
          fail("computed base wall " + detail::vec_text(b) + " outside the printed orbit");
          break;
        }
    }
  }

  for (const auto& c : source_checks)
    if (c.k == ref.k && c.status == CheckStatus::discrepancy_in_source)
      v.notes.push_back("source: " + c.detail);

  if (!v.failures.empty())
    v.status = VerifyStatus::fail;
  else if (std::any_of(source_checks.begin(), source_checks.end(), [&](const CheckResult& c) {
             return c.k == ref.k && c.status != CheckStatus::pass;
           }))
    v.status = VerifyStatus::discrepancy;
  return v;
}

inline std::vector<Verdict> verify_against_reference(const std::vector<RunRecord>& records,
                                                     const ReferenceTable& table) {
  std::vector<CheckResult> checks = self_check(table);
  std::vector<Verdict> out;
  for (const auto& r : records) {
    if (!r.series_k || r.policy != RootPolicy::all_norms) continue;
    auto it = table.entries.find(*r.series_k);
    if (it == table.entries.end()) continue;
    out.push_back(verify_record(r, it->second, checks));
  }
  return out;
}

inline std::string emit_verification(const std::vector<Verdict>& vs,
                                     const std::vector<CheckResult>& checks, ReportFormat fmt) {
  if (fmt == ReportFormat::markdown) {
    std::ostringstream os;
    os << "| k | status | computed | printed | details |\n|---|---|---|---|---|\n";
    for (const auto& v : vs) {
      os << "| " << v.k << " | " << to_string(v.status) << " | " << v.computed_type << " | "
         << v.printed_type << " | ";
      std::string d;
      for (const auto& f : v.failures) d += (d.empty() ? "" : "; ") + f;
      for (const auto& n : v.notes) d += (d.empty() ? "" : "; ") + n;
      os << d << " |\n";
    }
    for (const auto& c : checks)
      if (c.status != CheckStatus::pass)
        os << "\nreference k=" << c.k << " " << c.item << ": " << to_string(c.status) << " ("
           << c.detail << ")";
    os << "\n";
    return os.str();
  }
  ojson doc;
  ojson arr = ojson::array();
  for (const auto& v : vs) {
    ojson j;
    j["k"] = v.k;
    j["status"] = to_string(v.status);
    j["computed_type"] = v.computed_type;
    j["printed_type"] = v.printed_type;
    j["failures"] = v.failures;
    j["notes"] = v.notes;
    j["conjugator"] = v.conjugator ? mat_json(*v.conjugator) : ojson(nullptr);
    arr.push_back(j);
  }
  doc["verdicts"] = arr;
  ojson rc = ojson::array();
  for (const auto& c : checks) {
    if (c.status == CheckStatus::pass) continue;
    ojson j;
    j["k"] = c.k;
    j["item"] = c.item;
    j["status"] = to_string(c.status);
    j["detail"] = c.detail;
    rc.push_back(j);
  }
  doc["reference_checks"] = rc;
  std::size_t passed = 0;
  for (const auto& c : checks) passed += c.status == CheckStatus::pass;
  doc["reference_checks_passed"] = passed;
  doc["reference_checks_total"] = checks.size();
  return doc.dump(2) + "\n";
}

}  // namespace reflat
