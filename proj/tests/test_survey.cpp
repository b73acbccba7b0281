#include <filesystem>

#include <gtest/gtest.h>

#include "reflat/reference.hpp"

using namespace reflat;

namespace {

const std::string kTable = std::string(REFLAT_DATA_DIR) + "/reference_table.json";

std::filesystem::path fresh_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("reflat-test-" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(Hash, Fnv1a) {
  EXPECT_EQ(content_hash(""), "cbf29ce484222325");
  EXPECT_EQ(content_hash("a"), "af63dc4c8601ec8c");
}

TEST(Hash, CoversInputs) {
  GramLattice L = series_lattice(3);
  Budgets b;
  std::string k1 = run_key("U + <-6>", L, RootPolicy::all_norms, std::nullopt, b);
  EXPECT_NE(k1, run_key("U + <-6>", L, RootPolicy::two_only, std::nullopt, b));
  EXPECT_NE(k1, run_key("U + <-6>", L, RootPolicy::all_norms, Vec<Int>{1, 1, 0}, b));
  Budgets c = b;
  c.max_roots = 7;
  EXPECT_NE(k1, run_key("U + <-6>", L, RootPolicy::all_norms, std::nullopt, c));
}

TEST(RunOne, Examples) {
  auto a = run_one("U + <-4>");
  EXPECT_EQ(a.report.type, ReflectivityType::elliptic);
  EXPECT_EQ(a.report.chamber.roots.size(), 3u);
  EXPECT_EQ(run_one("U + <-54>").report.type, ReflectivityType::not_reflective);
  auto h = run_one("U + <-70>");
  ASSERT_EQ(h.report.type, ReflectivityType::hyperbolic);
  EXPECT_EQ(norm(h.report.chamber.lattice, *h.report.w), -30);
  EXPECT_EQ(a.lattice, "U + <-4>");
}

TEST(RunOne, Errors) {
  EXPECT_THROW(run_one("U + <->"), parse_error);
  EXPECT_THROW(run_one("U + <-3>"), lattice_error);
}

TEST(Report, JsonRoundTrip) {
  for (const char* e : {"U + <-2>", "U + <-46>", "U + <-54>", "U + <-80>"}) {
    RunRecord r = run_one(e);
    ojson j = record_json(r);
    RunRecord back = record_from_json(j);
    EXPECT_EQ(record_json(back).dump(), j.dump()) << e;
  }
}

TEST(Report, FieldNames) {
  RunRecord r = run_one("U + <-2>");
  ojson j = record_json(r);
  for (const char* f : {"lattice", "policy", "type", "roots", "gram", "symmetries", "w", "w_norm",
                        "cusp_orbits", "budgets", "certified"})
    EXPECT_TRUE(j.contains(f)) << f;
  EXPECT_EQ(j["type"], "elliptic");
  EXPECT_EQ(j["roots"].size(), 3u);
}

TEST(Report, K35SymmetryKinds) {
  ojson j = record_json(run_one("U + <-70>"));
  std::set<std::string> kinds;
  for (const auto& s : j["symmetries"]) kinds.insert(s["kind"].get<std::string>());
  EXPECT_TRUE(kinds.count("central_symmetry"));
  EXPECT_TRUE(kinds.count("hyperbolic_translation"));
}

TEST(Report, EmptyDocument) {
  std::string doc = emit_report({}, ReportFormat::json);
  auto j = nlohmann::json::parse(doc);
  EXPECT_TRUE(j["records"].empty());
  std::string md = emit_report({}, ReportFormat::markdown);
  EXPECT_NE(md.find("| lattice |"), std::string::npos);
}

TEST(Cache, HitIsByteIdentical) {
  auto dir = fresh_dir("cache");
  ResultCache cache(dir);
  RunOptions opt;
  opt.cache = &cache;
  RunRecord a = run_one("U + <-58>", opt);
  RunRecord b = run_one("U + <-58>", opt);
  EXPECT_FALSE(a.cache_hit);
  EXPECT_TRUE(b.cache_hit);
  EXPECT_EQ(emit_report({a}, ReportFormat::json), emit_report({b}, ReportFormat::json));
  EXPECT_EQ(emit_report({a}, ReportFormat::markdown), emit_report({b}, ReportFormat::markdown));
  // different budgets miss
  opt.budgets.max_roots = 9999;
  EXPECT_FALSE(run_one("U + <-58>", opt).cache_hit);
  std::filesystem::remove_all(dir);
}

TEST(Series, ParallelMatchesSerial) {
  RunOptions opt;
  auto a = run_series(20, 32, opt, 1);
  auto b = run_series(20, 32, opt, 4);
  EXPECT_EQ(emit_report(a, ReportFormat::json), emit_report(b, ReportFormat::json));
  ASSERT_EQ(a.size(), 13u);
  EXPECT_EQ(*a.front().series_k, 20);
  EXPECT_THROW(run_series(0, 3, opt), std::invalid_argument);
}

TEST(Series, ListsPartition) {
  auto recs = run_series(1, 30, {}, 2);
  auto lists = classification_lists(recs);
  std::size_t total = 0;
  for (const auto& [t, ks] : lists) total += ks.size();
  EXPECT_EQ(total, 30u);
  EXPECT_TRUE(lists["undecided"].empty());
}

TEST(Reference, SelfCheck) {
  auto t = load_reference(kTable);
  EXPECT_EQ(t.entries.size(), 60u);
  auto checks = self_check(t);
  std::size_t fails = 0;
  bool k57 = false, k43 = false, k37 = false;
  for (const auto& c : checks) {
    if (c.status == CheckStatus::fail) ++fails;
    if (c.k == 57 && c.item == "summary") k57 = c.status == CheckStatus::discrepancy_in_source;
    if (c.k == 43 && c.item == "axis_C") k43 = c.status == CheckStatus::pass && c.detail == "C w = -w";
    if (c.k == 37 && c.item == "w_norm") k37 = c.status == CheckStatus::pass;
  }
  EXPECT_EQ(fails, 0u);
  EXPECT_TRUE(k57);
  EXPECT_TRUE(k43);
  EXPECT_TRUE(k37);
}

TEST(Reference, SelfCheckCatchesTranscriptionErrors) {
  auto t = load_reference(kTable);
  t.entries[11].gram[0][1] += 1;
  t.entries[23].generators[0].matrix[0][0] += 1;
  auto checks = self_check(t);
  bool gram = false, iso = false;
  for (const auto& c : checks) {
    if (c.k == 11 && c.item == "gram_P") gram = c.status == CheckStatus::fail;
    if (c.k == 23 && c.item == "isometry_C") iso = c.status == CheckStatus::fail;
  }
  EXPECT_TRUE(gram);
  EXPECT_TRUE(iso);
}

TEST(Verify, ElliptAndHyperbolicPass) {
  auto t = load_reference(kTable);
  std::vector<RunRecord> recs;
  for (long k : {11, 23}) {
    recs.push_back(run_one(series_expression(k)));
    recs.back().series_k = k;
  }
  auto vs = verify_against_reference(recs, t);
  ASSERT_EQ(vs.size(), 2u);
  for (const auto& v : vs) {
    EXPECT_EQ(v.status, VerifyStatus::pass) << v.k;
    EXPECT_TRUE(v.conjugator);
  }
}

TEST(Verify, TypeMismatchFails) {
  auto t = load_reference(kTable);
  RunRecord r = run_one(series_expression(5));
  r.series_k = 5;
  r.report.type = ReflectivityType::hyperbolic;
  auto vs = verify_against_reference({r}, t);
  ASSERT_EQ(vs.size(), 1u);
  EXPECT_EQ(vs[0].status, VerifyStatus::fail);
}

TEST(Verify, GramPermutation) {
  Mat<Int> a{{-2, 1}, {1, -4}}, b{{-4, 1}, {1, -2}}, c{{-4, 2}, {2, -2}};
  EXPECT_TRUE(detail::gram_permutation(a, b));
  EXPECT_FALSE(detail::gram_permutation(a, c));
}
