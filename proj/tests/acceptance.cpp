// One verdict line per acceptance criterion. The process exits 0 once every
// check has run; pass --strict to exit with the number of failed criteria.

#include <chrono>
#include <cstring>
#include <iostream>
#include <random>

#include "reflat/k3.hpp"
#include "reflat/reference.hpp"

using namespace reflat;

namespace {

const std::string kTable = std::string(REFLAT_DATA_DIR) + "/reference_table.json";

int failures = 0;

void verdict(int n, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::cout << "criterion " << n << ": " << (ok ? "PASS" : "FAIL") << " (" << detail << ")"
            << std::endl;
}

std::string join(const std::vector<long>& ks) {
  std::string s;
  for (auto k : ks) s += (s.empty() ? "" : ",") + std::to_string(k);
  return s.empty() ? "none" : s;
}

std::vector<long> diff(const std::vector<long>& a, const std::vector<long>& b) {
  std::vector<long> out;
  for (auto x : a)
    if (std::find(b.begin(), b.end(), x) == b.end()) out.push_back(x);
  return out;
}

bool proportional(const Vec<Int>& a, const Vec<Int>& b) {
  return canonical_line(a) == canonical_line(b);
}

// ---------------------------------------------------------------------------

void series_lists(const ReferenceTable& table, std::vector<RunRecord>& records) {
  auto t0 = std::chrono::steady_clock::now();
  records = run_series(1, 60, {}, 1);
  double serial = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  t0 = std::chrono::steady_clock::now();
  auto par = run_series(1, 60, {}, 4);
  double four = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool same = emit_report(par, ReportFormat::json) == emit_report(records, ReportFormat::json);

  auto lists = classification_lists(records);
  auto want_e = table.summary.at("elliptic");
  auto want_n = table.summary.at("not_reflective");
  std::vector<long> want_h;
  for (long k = 1; k <= 60; ++k)
    if (std::find(want_e.begin(), want_e.end(), k) == want_e.end() &&
        std::find(want_n.begin(), want_n.end(), k) == want_n.end())
      want_h.push_back(k);
  auto checks = self_check(table);
  bool k57 = std::any_of(checks.begin(), checks.end(), [](const CheckResult& c) {
    return c.k == 57 && c.status == CheckStatus::discrepancy_in_source;
  });
  bool ok = lists["elliptic"] == want_e && lists["not_reflective"] == want_n &&
            lists["hyperbolic"] == want_h && lists["undecided"].empty() &&
            lists["parabolic"].empty() && k57 && same && serial < 1800 && four < 600;
  std::ostringstream d;
  d << "elliptic missing " << join(diff(want_e, lists["elliptic"])) << " extra "
    << join(diff(lists["elliptic"], want_e)) << "; not_reflective missing "
    << join(diff(want_n, lists["not_reflective"])) << " extra "
    << join(diff(lists["not_reflective"], want_n)) << "; hyperbolic missing "
    << join(diff(want_h, lists["hyperbolic"])) << " extra "
    << join(diff(lists["hyperbolic"], want_h)) << "; undecided " << join(lists["undecided"])
    << "; k=57 summary discrepancy " << (k57 ? "surfaced" : "NOT surfaced") << "; "
    << serial << " s serial, " << four << " s with 4 jobs, outputs "
    << (same ? "identical" : "differ");
  verdict(1, ok, d.str());
}

void exact_chambers(const ReferenceTable& table, const std::vector<RunRecord>& records) {
  auto checks = self_check(table);
  std::vector<long> bad;
  for (long k : {1, 2, 5, 11, 17, 23}) {
    const RunRecord& r = records[k - 1];
    Verdict v = verify_record(r, table.entries.at(k), checks);
    bool ok = v.status == VerifyStatus::pass && v.conjugator.has_value();
    if (r.report.type == ReflectivityType::elliptic) {
      std::vector<Vec<Int>> mine;
      for (const auto& x : r.report.chamber.roots) mine.push_back(x.coords);
      ok = ok && detail::gram_permutation(table.entries.at(k).gram,
                                          gram_of(r.report.chamber.lattice, mine));
    }
    if (!ok) bad.push_back(k);
  }
  verdict(2, bad.empty(), "k in {1,2,5,11,17,23}; failing: " + join(bad));
}

void hyperbolic_witnesses(const ReferenceTable& table, const std::vector<RunRecord>& records) {
  std::vector<long> bad;
  std::size_t n = 0;
  for (const auto& [k, e] : table.entries) {
    if (e.type != "hyperbolic" || k < 23) continue;
    ++n;
    const auto& rep = records[k - 1].report;
    const GramLattice& L = rep.chamber.lattice;
    bool ok = rep.type == ReflectivityType::hyperbolic && rep.w && e.w_norm &&
              norm(L, *rep.w) == *e.w_norm && !rep.generators.empty();
    if (ok)
      for (const auto& g : rep.generators) {
        Vec<Int> cw = act(g.matrix, *rep.w);
        ok = ok && is_isometry(L, g.matrix) && (cw == *rep.w || cw == negated(*rep.w));
      }
    if (!ok) bad.push_back(k);
  }
  verdict(3, bad.empty(),
          std::to_string(n) + " printed hyperbolic entries; failing: " + join(bad));
}

void two_reflective() {
  struct Case {
    std::string name;
    GramLattice lattice;
    std::vector<Vec<Int>> basis;  // rows in S_k coordinates
    GramLattice ambient;          // that S_k
  };
  std::vector<Case> cases;
  GramLattice s2 = series_lattice(2);
  cases.push_back({"S2", s2, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, s2});
  auto rs = root_sublattice_span(s2);
  for (const auto& m : intermediate_lattices(s2, rs.span))
    if (m.index == 2 || m.index == 4)
      cases.push_back({"S2," + m.index.str(), m.lattice, m.basis, s2});
  for (long k : {3, 5, 7, 13})
    cases.push_back({"S" + std::to_string(k), series_lattice(k),
                     {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, series_lattice(k)});

  std::vector<std::string> bad;
  std::string info;
  for (const auto& c : cases) {
    // The default center of S_k, rewritten in the basis of M, so every
    // lattice is searched from the same point of hyperbolic space.
    Vec<Int> rho = default_center(c.ambient, RootPolicy::two_only).rho;
    Mat<Rat> binv = inverse(to_rational(c.basis));
    Vec<Rat> xr(3);
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t i = 0; i < 3; ++i) xr[j] += Rat(rho[i]) * binv[i][j];
    Int den = 1;
    for (const auto& q : xr) den = boost::multiprecision::lcm(den, Int(denominator(q)));
    Vec<Int> x(3);
    for (std::size_t j = 0; j < 3; ++j) x[j] = Int(numerator(Rat(xr[j] * den)));
    std::vector<std::string> why;
    ReflectivityReport r;
    try {
      r = classify_type(c.lattice, make_center(c.lattice, primitive_part(x)),
                        RootPolicy::two_only);
    } catch (const engine_error& e) {
      bad.push_back(c.name + ": " + e.what());
      info += (info.empty() ? "" : " ") + c.name;
      continue;
    }
    if (r.type != ReflectivityType::parabolic) why.push_back(std::string("type ") + to_string(r.type));
    if (r.orbits.base_e.size() != 1)
      why.push_back(std::to_string(r.orbits.base_e.size()) + " wall orbits");
    bool dihedral = r.generators.size() == 2 && r.generators[0].order == 2 &&
                    r.generators[1].order == 2;
    if (dihedral) {
      auto p = classify_isometry(c.lattice, mat_mul(r.generators[0].matrix, r.generators[1].matrix));
      dihedral = p.kind == SymmetryKind::parabolic_translation;
    }
    if (!dihedral) why.push_back("not two involutions with parabolic product");
    if (r.c) {
      Vec<Int> cl(3, 0);
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) cl[j] += (*r.c)[i] * c.basis[i][j];
      if (!proportional(cl, {2, 0, 0})) why.push_back("c not proportional to (2,0,0)");
      for (const auto& g : r.generators)
        if (act(g.matrix, *r.c) != *r.c) why.push_back("generator moves c");
    } else {
      why.push_back("no c");
    }
    if (r.cusp_orbits.size() != 1)
      why.push_back(std::to_string(r.cusp_orbits.size()) + " cusp orbits");
    if (!why.empty()) {
      std::string s = c.name + ":";
      for (std::size_t i = 0; i < why.size(); ++i) s += (i ? ", " : " ") + why[i];
      bad.push_back(s);
    }
    info += (info.empty() ? "" : " ") + c.name;
  }
  std::string d = "checked " + info;
  for (const auto& b : bad) d += "; " + b;
  verdict(4, bad.empty() && cases.size() == 7, d);
}

void u11(const ReferenceTable& table) {
  const ScaledExample* ex = nullptr;
  for (const auto& e : table.scaled)
    if (e.lattice == "U(11) + <-2>") ex = &e;
  if (!ex) {
    verdict(5, false, "U(11) + <-2> missing from the reference file");
    return;
  }
  GramLattice L = construct(ex->lattice);
  auto full = classify_type(L, RootPolicy::all_norms);
  std::vector<Vec<Int>> mine;
  for (const auto& x : full.chamber.roots) mine.push_back(x.coords);
  bool six = full.type == ReflectivityType::elliptic && mine.size() == 6;
  bool gram = detail::gram_permutation(ex->gram, gram_of(L, mine)).has_value();
  std::set<Vec<Int>> walls(mine.begin(), mine.end());
  bool iso = detail::wall_matching_isometry(L, ex->roots, mine, [&](const Vec<Int>& v) {
               return walls.count(v) > 0;
             }).has_value();
  auto two = classify_type(L, RootPolicy::two_only);
  bool hyp = two.type == ReflectivityType::hyperbolic && two.w && norm(L, *two.w) == ex->w_norm;
  bool s0 = two.s0 && two.s0->generators.size() == 1 &&
            norm(L, two.s0->generators[0]) == ex->w_norm;
  bool w = false;
  if (two.w) {
    w = proportional(*two.w, ex->w);
    if (!w) {
      // up to an isometry preserving the lattice
      auto g = detail::wall_matching_isometry(L, {ex->w}, {*two.w, negated(*two.w)},
                                              [&](const Vec<Int>& v) { return proportional(v, *two.w); });
      w = g.has_value();
    }
  }
  std::ostringstream d;
  d << "full policy: " << to_string(full.type) << " with " << mine.size() << " walls, Gram "
    << (gram ? "matches" : "differs") << ", walls " << (iso ? "isometric" : "not isometric")
    << "; -2 policy: " << to_string(two.type);
  if (two.w) d << ", w = " << detail::vec_text(*two.w) << ", w^2 = " << norm(L, *two.w);
  d << ", S0 " << (s0 ? "spanned by one norm -10 vector" : "not as printed");
  verdict(5, six && gram && iso && hyp && s0 && w, d.str());
}

void lemma_constants() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> dist(-100000, 100000);
  bool det_ok = true;
  for (int i = 0; i < 1000; ++i) {
    Int b = dist(rng), x = dist(rng);
    det_ok = det_ok && lemma2_gram_det(b, x) == x * x * (b * b - 4) - 16 * x - 4 * b * b - 16;
  }
  LemmaConstants c = LemmaConstants::compute();
  Rat tol = ratio(1, 1000000000000);
  Interval f = LemmaConstants::bound_fn(c.a0);
  Interval target{2 + c.a0_squared.lo, 2 + c.a0_squared.hi};
  // the two enclosures of the same number must meet, and be narrow
  bool bound_ok = f.overlaps(target) && f.width() <= tol && target.width() <= tol;
  Rat lo = c.a0_squared.lo, hi = c.a0_squared.hi;
  bool root_ok = lo * lo - 16 * lo - 16 < 0 && hi * hi - 16 * hi - 16 > 0 &&
                 c.a0_squared.width() <= tol;
  Rat mid = (c.narrow_bound.lo + c.narrow_bound.hi) / 2;
  bool approx_ok = abs(mid - ratio(1894427191, 100000000)) < ratio(5, 1000000000);
  std::ostringstream d;
  d << "1000 determinant pairs " << (det_ok ? "exact" : "MISMATCH") << "; bound_fn(a0) = 2 + a0^2 "
    << (bound_ok ? "within 1e-12" : "not enclosed") << "; a0^2 root of y^2-16y-16 "
    << (root_ok ? "enclosed" : "not enclosed") << "; 10+4 sqrt5 = "
    << std::setprecision(12) << to_double(mid);
  verdict(6, det_ok && bound_ok && root_ok && approx_ok, d.str());
}

void reference_consistency(const ReferenceTable& table) {
  auto checks = self_check(table);
  std::size_t pass = 0, fail = 0, disc = 0;
  std::string where;
  for (const auto& c : checks) {
    if (c.status == CheckStatus::pass) ++pass;
    if (c.status == CheckStatus::fail) {
      ++fail;
      where += " k=" + std::to_string(c.k) + " " + c.item + ";";
    }
    if (c.status == CheckStatus::discrepancy_in_source) {
      ++disc;
      where += " k=" + std::to_string(c.k) + " " + c.item + " DISCREPANCY-IN-SOURCE (" + c.detail + ");";
    }
  }
  verdict(7, fail == 0 && pass > 0,
          std::to_string(pass) + " checks pass, " + std::to_string(fail) + " fail, " +
              std::to_string(disc) + " source discrepancies reported:" + where);
}

// Invariants on one run.
bool chamber_invariants(const RunRecord& r, std::string& why) {
  const GramLattice& L = r.report.chamber.lattice;
  const auto& roots = r.report.chamber.roots;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j)
      if (inner_product(L, roots[i].coords, roots[j].coords) < 0) {
        why = "negative pair";
        return false;
      }
    for (std::size_t b = 0; b < L.rank(); ++b) {
      Vec<Int> e(L.rank(), 0);
      e[b] = 1;
      if ((2 * inner_product(L, e, roots[i].coords)) % roots[i].norm != 0) {
        why = "reflection not integral";
        return false;
      }
    }
  }
  return true;
}

GramLattice random_lattice(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> diag(-10, 6), off(-5, 5);
  while (true) {
    Mat<Int> g(3, Vec<Int>(3));
    for (int i = 0; i < 3; ++i) {
      g[i][i] = 2 * diag(rng);
      for (int j = 0; j < i; ++j) g[i][j] = g[j][i] = off(rng);
    }
    GramLattice L(g);
    if (L.det() != 0 && is_hyperbolic(L)) return L;
  }
}

void properties(const std::vector<RunRecord>& series) {
  std::vector<std::string> bad;
  std::size_t runs = 0, certified = 0;
  auto check = [&](const std::string& name, const std::function<RunRecord(const Budgets&)>& run,
                   const Budgets& base) {
    RunRecord a = run(base), b = run(base);
    ++runs;
    if (emit_report({a}, ReportFormat::json) != emit_report({b}, ReportFormat::json))
      bad.push_back(name + " nondeterministic");
    std::string why;
    if (!chamber_invariants(a, why)) bad.push_back(name + " " + why);
    if (a.report.certified) {
      ++certified;
      Budgets dbl = base;
      dbl.max_height = base.max_height * 2;
      dbl.initial_height = base.initial_height * 2;
      RunRecord c = run(dbl);
      if (c.report.type != a.report.type) bad.push_back(name + " type changes when budget doubles");
    }
  };
  for (const auto& r : series) {
    long k = *r.series_k;
    check("k=" + std::to_string(k),
          [&](const Budgets& b) {
            RunOptions o;
            o.budgets = b;
            return run_one(series_expression(k), o);
          },
          Budgets{});
  }
  std::mt19937_64 rng(20260101);
  std::size_t random_certified = 0;
  for (int i = 0; i < 20; ++i) {
    GramLattice L = random_lattice(rng);
    std::ostringstream name;
    name << "random " << detail::mat_text(L.gram());
    Budgets small;
    small.max_height = 512;
    small.max_roots = 400;
    std::size_t before = certified;
    check(name.str(),
          [&](const Budgets& b) {
            RunOptions o;
            o.budgets = b;
            return run_lattice("[random]", L, o);
          },
          small);
    random_certified += certified - before;
  }
  std::string d = std::to_string(runs) + " lattices (60 series + 20 random), " +
                  std::to_string(certified) + " certified, " +
                  std::to_string(random_certified) + " of the random ones";
  for (const auto& b : bad) d += "; " + b;
  verdict(8, bad.empty(), d);
}

void two_elementary() {
  struct Case {
    const char* expr;
    int g, k;  // -1: exceptional
    TwoElementaryCase kind;
  };
  const Case cases[] = {
      {"U", 10, 1, TwoElementaryCase::generic},
      {"U(2)", 9, 0, TwoElementaryCase::generic},
      {"U + <-2>", 9, 1, TwoElementaryCase::generic},
      {"U(2) + <-2>", 8, 0, TwoElementaryCase::generic},
      {"U + <-2> + <-2>", 8, 1, TwoElementaryCase::generic},
      {"U + E8", 6, 5, TwoElementaryCase::generic},
      {"U + E8 + <-2>", 5, 5, TwoElementaryCase::generic},
      {"U + E8 + E8 + <-2>", 1, 9, TwoElementaryCase::generic},
      {"U(2) + E8(2)", -1, -1, TwoElementaryCase::exception_U2E82},
      {"U + E8(2)", 1, 0, TwoElementaryCase::exception_UE82},
  };
  std::vector<std::string> bad;
  for (const auto& c : cases) {
    auto d = two_elementary_data(construct(c.expr));
    bool ok = d.kind == c.kind;
    if (c.g >= 0) ok = ok && d.g && *d.g == c.g && d.k_curves && *d.k_curves == c.k;
    if (c.kind == TwoElementaryCase::generic)
      ok = ok && *d.g == (22 - d.r - d.a) / 2 && *d.k_curves == (d.r - d.a) / 2;
    if (!ok) bad.push_back(c.expr);
  }
  std::string d = "10 lattices, both exceptional cases included";
  for (const auto& b : bad) d += "; wrong: " + b;
  verdict(9, bad.empty(), d);
}

}  // namespace

int main(int argc, char** argv) {
  bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
  try {
    ReferenceTable table = load_reference(kTable);
    std::vector<RunRecord> records;
    series_lists(table, records);
    exact_chambers(table, records);
    hyperbolic_witnesses(table, records);
    two_reflective();
    u11(table);
    lemma_constants();
    reference_consistency(table);
    properties(records);
    two_elementary();
  } catch (const std::exception& e) {
    std::cout << "acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  std::cout << failures << " of 9 criteria failed" << std::endl;
  return strict ? failures : 0;
}
