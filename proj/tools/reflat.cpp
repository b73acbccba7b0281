// Command-line front end: single lattices, the U + <-2k> series, and
// comparison with the transcribed reference table.

#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "reflat/k3.hpp"
#include "reflat/reference.hpp"

namespace {

enum Exit { ok = 0, operational = 1, discrepancies = 2, undecided = 3 };

std::vector<reflat::Int> parse_center(const std::string& s) {
  std::vector<reflat::Int> v;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) v.emplace_back(part);
  return v;
}

std::pair<long, long> parse_range(const std::string& s) {
  auto dash = s.find_first_of("-.");
  if (dash == std::string::npos) return {std::stol(s), std::stol(s)};
  auto last = s.find_first_not_of("-.", dash);
  return {std::stol(s.substr(0, dash)), std::stol(s.substr(last))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vinberg chambers and reflectivity types of hyperbolic lattices"};
  std::string lattice, series = "1-60", policy = "all", center, format = "json";
  std::string max_height = "1000000", cache_dir, verify;
  std::size_t max_roots = 10000;
  unsigned jobs = 1;
  bool timing = false;
  app.add_option("--lattice", lattice, "lattice expression, e.g. \"U + <-46>\"")
      ->envname("REFLAT_LATTICE");
  app.add_option("--series", series, "k range for U + <-2k> when no lattice is given")
      ->envname("REFLAT_SERIES");
  app.add_option("--policy", policy, "root norms: two (only -2) or all")
      ->check(CLI::IsMember({"two", "all"}))
      ->envname("REFLAT_POLICY");
  app.add_option("--center", center, "center vector x,y,z")->envname("REFLAT_CENTER");
  app.add_option("--max-height", max_height, "height budget (rational)")
      ->envname("REFLAT_MAX_HEIGHT");
  app.add_option("--max-roots", max_roots, "root budget")->envname("REFLAT_MAX_ROOTS");
  app.add_option("--jobs", jobs, "worker threads for series runs")->envname("REFLAT_JOBS");
  app.add_option("--format", format, "json or md")
      ->check(CLI::IsMember({"json", "md", "markdown"}))
      ->envname("REFLAT_FORMAT");
  app.add_option("--cache-dir", cache_dir, "result cache directory")
      ->envname("REFLAT_CACHE_DIR");
  app.add_option("--verify", verify, "reference table to compare the series against")
      ->envname("REFLAT_VERIFY");
  app.add_flag("--timing", timing, "include wall-clock seconds in JSON output")
      ->envname("REFLAT_TIMING");
  CLI11_PARSE(app, argc, argv);

  try {
    reflat::RunOptions opt;
    opt.policy = policy == "two" ? reflat::RootPolicy::two_only : reflat::RootPolicy::all_norms;
    if (!center.empty()) opt.center = parse_center(center);
    opt.budgets.max_height = reflat::rat_from_string(max_height);
    opt.budgets.max_roots = max_roots;
    std::unique_ptr<reflat::ResultCache> cache;
    if (!cache_dir.empty()) {
      cache = std::make_unique<reflat::ResultCache>(cache_dir);
      opt.cache = cache.get();
    }
    auto fmt = reflat::parse_format(format);

    std::vector<reflat::RunRecord> records;
    if (!lattice.empty()) {
      records.push_back(reflat::run_one(lattice, opt));
    } else {
      auto [a, b] = parse_range(series);
      records = reflat::run_series(a, b, opt, jobs);
    }
    std::cout << reflat::emit_report(records, fmt, timing);

    int code = Exit::ok;
    for (const auto& r : records)
      if (r.report.type == reflat::ReflectivityType::undecided) code = Exit::undecided;

    if (!verify.empty()) {
      auto table = reflat::load_reference(verify);
      auto checks = reflat::self_check(table);
      auto verdicts = reflat::verify_against_reference(records, table);
      std::cout << reflat::emit_verification(verdicts, checks, fmt);
      bool bad = false;
      for (const auto& v : verdicts) bad |= v.status != reflat::VerifyStatus::pass;
      for (const auto& c : checks) bad |= c.status != reflat::CheckStatus::pass;
      if (bad) code = Exit::discrepancies;
    }
    return code;
  } catch (const reflat::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::operational;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::operational;
  }
}
