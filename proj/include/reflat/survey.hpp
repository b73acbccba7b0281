#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "reflat/expr.hpp"
#include "reflat/report.hpp"

namespace reflat {

// FNV-1a, 64 bit. Only used to name cache entries, so collisions are
// guarded by comparing the stored key text as well.
inline std::string content_hash(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[i] = hex[h & 15];
  return out;
}

// Everything that can change a report.
inline std::string run_key(const std::string& lattice, const GramLattice& L,
                           RootPolicy policy, const std::optional<Vec<Int>>& center,
                           const Budgets& b) {
  std::string s = std::string("version=") + kToolVersion + ";lattice=" + lattice + ";gram=";
  for (const auto& row : L.gram()) {
    for (const auto& x : row) s += x.str() + ",";
    s += ";";
  }
  s += "policy=" + std::string(to_string(policy)) + ";center=";
  if (center)
    for (const auto& x : *center) s += x.str() + ",";
  else
    s += "default";
  s += ";max_height=" + to_string(b.max_height) + ";max_roots=" +
       std::to_string(b.max_roots) + ";initial=" + to_string(b.initial_height);
  return s;
}

// File cache keyed by content hash. One mutex serializes all access, so
// parallel series runs share it safely.
class ResultCache {
 public:
  explicit ResultCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  std::optional<RunRecord> load(const std::string& hash, const std::string& key) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto p = dir_ / (hash + ".json");
    std::ifstream in(p);
    if (!in) return std::nullopt;
    try {
      ojson j = ojson::parse(in);
      if (j.value("key", "") != key) return std::nullopt;
      RunRecord r = record_from_json(j.at("record"));
      r.cache_hit = true;
      return r;
    } catch (const std::exception&) {
      return std::nullopt;  // unreadable entries are recomputed
    }
  }

  void store(const RunRecord& r, const std::string& key) {
    std::lock_guard<std::mutex> lock(mutex_);
    ojson j;
    j["key"] = key;
    j["record"] = record_json(r, true);
    auto tmp = dir_ / (r.hash + ".json.tmp");
    {
      std::ofstream out(tmp);
      out << j.dump(1) << "\n";
    }
    std::filesystem::rename(tmp, dir_ / (r.hash + ".json"));
  }

 private:
  std::filesystem::path dir_;
  std::mutex mutex_;
};

struct RunOptions {
  RootPolicy policy = RootPolicy::all_norms;
  std::optional<Vec<Int>> center;
  Budgets budgets;
  ResultCache* cache = nullptr;
};

inline RunRecord run_lattice(const std::string& canonical, const GramLattice& L,
                             const RunOptions& opt) {
  std::string key = run_key(canonical, L, opt.policy, opt.center, opt.budgets);
  std::string hash = content_hash(key);
  if (opt.cache)
    if (auto hit = opt.cache->load(hash, key)) return *hit;
  RunRecord r;
  r.lattice = canonical;
  r.policy = opt.policy;
  r.center = opt.center;
  r.budgets = opt.budgets;
  r.hash = hash;
  auto t0 = std::chrono::steady_clock::now();
  Center c = opt.center ? make_center(L, *opt.center) : default_center(L, opt.policy);
  r.report = classify_type(L, c, opt.policy, opt.budgets);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (opt.cache) opt.cache->store(r, key);
  return r;
}

// Parse, build, enumerate, analyze. Budget exhaustion gives type undecided.
inline RunRecord run_one(const std::string& expr, const RunOptions& opt = {}) {
  LatticeExpression e = parse_lattice(expr);
  GramLattice L = construct(e, true);
  return run_lattice(print(e), L, opt);
}

inline std::string series_expression(long k) {
  return "U + <" + std::to_string(-2 * k) + ">";
}

// U + <-2k> for k_from..k_to on `jobs` threads; output in k order.
inline std::vector<RunRecord> run_series(long k_from, long k_to, const RunOptions& opt,
                                         unsigned jobs = 1) {
  if (k_from < 1 || k_to < k_from) throw std::invalid_argument("need 1 <= k_from <= k_to");
  std::size_t n = static_cast<std::size_t>(k_to - k_from + 1);
  std::vector<RunRecord> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      long k = k_from + static_cast<long>(i);
      try {
        out[i] = run_one(series_expression(k), opt);
        out[i].series_k = k;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

// k values per reflectivity type.
inline std::map<std::string, std::vector<long>> classification_lists(
    const std::vector<RunRecord>& records) {
  std::map<std::string, std::vector<long>> lists;
  for (auto t : {ReflectivityType::elliptic, ReflectivityType::parabolic,
                 ReflectivityType::hyperbolic, ReflectivityType::not_reflective,
                 ReflectivityType::undecided})
    lists[to_string(t)];
  for (const auto& r : records)
    if (r.series_k) lists[to_string(r.report.type)].push_back(*r.series_k);
  return lists;
}

}  // namespace reflat
