#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "reflat/chamber.hpp"

namespace reflat {

inline constexpr const char* kToolVersion = "1.0.0";

using ojson = nlohmann::ordered_json;

struct RunRecord {
  std::string lattice;                 // canonical expression text
  std::optional<long> series_k;        // set for U + <-2k> runs
  RootPolicy policy = RootPolicy::all_norms;
  std::optional<Vec<Int>> center;      // explicit center, if one was given
  Budgets budgets;
  ReflectivityReport report;
  double seconds = 0;
  std::string tool_version = kToolVersion;
  std::string hash;
  bool cache_hit = false;  // never serialized
};

// ---------------------------------------------------------------------------
// Exact numbers in JSON: integers as numbers while they fit in 64 bits,
// otherwise as decimal strings; rationals always as "p/q" strings.

inline ojson int_json(const Int& x) {
  if (x >= Int(std::numeric_limits<std::int64_t>::min()) &&
      x <= Int(std::numeric_limits<std::int64_t>::max()))
    return ojson(static_cast<std::int64_t>(x));
  return ojson(x.str());
}

template <class J>
Int int_from_json(const J& j) {
  if (j.is_number_integer()) return Int(j.template get<std::int64_t>());
  if (j.is_string()) return Int(j.template get<std::string>());
  throw std::invalid_argument("expected an integer");
}

inline Rat rat_from_string(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rat(Int(s));
  return Rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
}

inline ojson vec_json(const Vec<Int>& v) {
  ojson a = ojson::array();
  for (const auto& x : v) a.push_back(int_json(x));
  return a;
}

template <class J>
Vec<Int> vec_from_json(const J& j) {
  Vec<Int> v;
  for (const auto& x : j) v.push_back(int_from_json(x));
  return v;
}

inline ojson mat_json(const Mat<Int>& m) {
  ojson a = ojson::array();
  for (const auto& r : m) a.push_back(vec_json(r));
  return a;
}

template <class J>
Mat<Int> mat_from_json(const J& j) {
  Mat<Int> m;
  for (const auto& r : j) m.push_back(vec_from_json(r));
  return m;
}

inline ojson vecs_json(const std::vector<Vec<Int>>& vs) {
  ojson a = ojson::array();
  for (const auto& v : vs) a.push_back(vec_json(v));
  return a;
}

inline ojson opt_vec_json(const std::optional<Vec<Int>>& v) {
  return v ? vec_json(*v) : ojson(nullptr);
}

inline ojson symmetry_json(const ChamberSymmetry& s) {
  ojson j;
  j["matrix"] = mat_json(s.matrix);
  j["kind"] = to_string(s.kind);
  j["witness"] = s.witness.empty() ? ojson(nullptr) : vec_json(s.witness);
  j["order"] = s.order;
  return j;
}

inline SymmetryKind parse_symmetry_kind(const std::string& s) {
  for (auto k : {SymmetryKind::finite_order, SymmetryKind::parabolic_translation,
                 SymmetryKind::hyperbolic_translation, SymmetryKind::central_symmetry,
                 SymmetryKind::skew_symmetry})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown symmetry kind: " + s);
}

inline ReflectivityType parse_reflectivity_type(const std::string& s) {
  for (auto t : {ReflectivityType::elliptic, ReflectivityType::parabolic,
                 ReflectivityType::hyperbolic, ReflectivityType::not_reflective,
                 ReflectivityType::undecided})
    if (s == to_string(t)) return t;
  throw std::invalid_argument("unknown type: " + s);
}

inline ChamberStatus parse_chamber_status(const std::string& s) {
  for (auto t : {ChamberStatus::closed_finite_volume, ChamberStatus::open_with_symmetry,
                 ChamberStatus::open_budget_exhausted})
    if (s == to_string(t)) return t;
  throw std::invalid_argument("unknown chamber status: " + s);
}

template <class J>
ChamberSymmetry symmetry_from_json(const J& j) {
  ChamberSymmetry s;
  s.matrix = mat_from_json(j.at("matrix"));
  s.kind = parse_symmetry_kind(j.at("kind").template get<std::string>());
  if (!j.at("witness").is_null()) s.witness = vec_from_json(j.at("witness"));
  s.order = j.at("order").template get<int>();
  return s;
}

inline ojson budgets_json(const Budgets& b) {
  ojson j;
  j["max_height"] = to_string(b.max_height);
  j["max_roots"] = b.max_roots;
  j["initial_height"] = to_string(b.initial_height);
  return j;
}

// ---------------------------------------------------------------------------
// One record. Field order is fixed so identical records print identically.

inline ojson record_json(const RunRecord& r, bool with_timing = false) {
  const ReflectivityReport& rep = r.report;
  const GramLattice& L = rep.chamber.lattice;
  ojson j;
  j["lattice"] = r.lattice;
  if (r.series_k) j["k"] = *r.series_k;
  j["policy"] = to_string(r.policy);
  j["center"] = vec_json(rep.chamber.center.rho);
  j["center_given"] = r.center.has_value();
  j["type"] = to_string(rep.type);
  std::vector<Vec<Int>> roots;
  for (const auto& x : rep.chamber.roots) roots.push_back(x.coords);
  j["roots"] = vecs_json(roots);
  j["gram"] = mat_json(gram_of(L, roots));
  ojson detail = ojson::array();
  for (const auto& x : rep.chamber.roots) {
    ojson d;
    d["norm"] = int_json(x.norm);
    d["height"] = to_string(x.height);
    d["step"] = x.step_index;
    detail.push_back(d);
  }
  j["root_data"] = detail;
  ojson syms = ojson::array();
  for (const auto& s : rep.symmetries) syms.push_back(symmetry_json(s));
  j["symmetries"] = syms;
  ojson gens = ojson::array();
  for (const auto& s : rep.generators) gens.push_back(symmetry_json(s));
  j["generators"] = gens;
  j["w"] = opt_vec_json(rep.w);
  j["w_norm"] = rep.w ? int_json(norm(L, *rep.w)) : ojson(nullptr);
  j["c"] = opt_vec_json(rep.c);
  if (rep.s0) {
    ojson s;
    s["generators"] = vecs_json(rep.s0->generators);
    s["saturated_rank"] = rep.s0->saturated_rank;
    s["index"] = rep.s0->index ? int_json(*rep.s0->index) : ojson(nullptr);
    j["s0"] = s;
  } else {
    j["s0"] = nullptr;
  }
  j["base_e"] = vecs_json(rep.orbits.base_e);
  j["base_f"] = vecs_json(rep.orbits.base_f);
  j["cusp_orbits"] = vecs_json(rep.cusp_orbits);
  j["axes"] = vecs_json(rep.axes);
  j["budgets"] = budgets_json(r.budgets);
  j["frontier"] = to_string(rep.chamber.frontier);
  j["status"] = to_string(rep.chamber.status);
  j["certified"] = rep.certified;
  j["note"] = rep.note;
  j["lattice_gram"] = mat_json(L.gram());
  j["tool_version"] = r.tool_version;
  j["hash"] = r.hash;
  if (with_timing) j["seconds"] = r.seconds;
  return j;
}

template <class J>
RunRecord record_from_json(const J& j) {
  RunRecord r;
  r.lattice = j.at("lattice").template get<std::string>();
  if (j.contains("k")) r.series_k = j.at("k").template get<long>();
  r.policy = parse_policy(j.at("policy").template get<std::string>());
  const auto& b = j.at("budgets");
  r.budgets.max_height = rat_from_string(b.at("max_height").template get<std::string>());
  r.budgets.max_roots = b.at("max_roots").template get<std::size_t>();
  r.budgets.initial_height =
      rat_from_string(b.at("initial_height").template get<std::string>());
  r.tool_version = j.at("tool_version").template get<std::string>();
  r.hash = j.at("hash").template get<std::string>();
  if (j.contains("seconds")) r.seconds = j.at("seconds").template get<double>();

  ReflectivityReport& rep = r.report;
  GramLattice L(mat_from_json(j.at("lattice_gram")));
  rep.chamber.lattice = L;
  rep.chamber.policy = r.policy;
  rep.chamber.center.rho = vec_from_json(j.at("center"));
  rep.chamber.center.isotropic = norm(L, rep.chamber.center.rho) == 0;
  if (j.at("center_given").template get<bool>()) r.center = rep.chamber.center.rho;
  rep.type = parse_reflectivity_type(j.at("type").template get<std::string>());
  const auto& roots = j.at("roots");
  const auto& data = j.at("root_data");
  for (std::size_t i = 0; i < roots.size(); ++i) {
    RootVector rv;
    rv.coords = vec_from_json(roots[i]);
    rv.norm = int_from_json(data[i].at("norm"));
    rv.height = rat_from_string(data[i].at("height").template get<std::string>());
    rv.step_index = data[i].at("step").template get<int>();
    rep.chamber.roots.push_back(std::move(rv));
  }
  for (const auto& s : j.at("symmetries")) rep.symmetries.push_back(symmetry_from_json(s));
  for (const auto& s : j.at("generators")) rep.generators.push_back(symmetry_from_json(s));
  if (!j.at("w").is_null()) rep.w = vec_from_json(j.at("w"));
  if (!j.at("c").is_null()) rep.c = vec_from_json(j.at("c"));
  if (!j.at("s0").is_null()) {
    SublatticeSpan s;
    for (const auto& g : j.at("s0").at("generators")) s.generators.push_back(vec_from_json(g));
    s.saturated_rank = j.at("s0").at("saturated_rank").template get<std::size_t>();
    if (!j.at("s0").at("index").is_null()) s.index = int_from_json(j.at("s0").at("index"));
    rep.s0 = s;
  }
  for (const auto& v : j.at("base_e")) rep.orbits.base_e.push_back(vec_from_json(v));
  for (const auto& v : j.at("base_f")) rep.orbits.base_f.push_back(vec_from_json(v));
  for (const auto& v : j.at("cusp_orbits")) rep.cusp_orbits.push_back(vec_from_json(v));
  for (const auto& v : j.at("axes")) rep.axes.push_back(vec_from_json(v));
  rep.chamber.frontier = rat_from_string(j.at("frontier").template get<std::string>());
  rep.chamber.status = parse_chamber_status(j.at("status").template get<std::string>());
  rep.certified = j.at("certified").template get<bool>();
  rep.orbits.certified = rep.certified && rep.type != ReflectivityType::not_reflective;
  rep.orbits.checked_height = rep.chamber.frontier;
  rep.note = j.at("note").template get<std::string>();
  return r;
}

// ---------------------------------------------------------------------------
// Documents

enum class ReportFormat { json, markdown };

inline ReportFormat parse_format(const std::string& s) {
  if (s == "json") return ReportFormat::json;
  if (s == "md" || s == "markdown") return ReportFormat::markdown;
  throw std::invalid_argument("unknown format: " + s);
}

namespace detail {

inline std::string vec_text(const Vec<Int>& v) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ")";
  return os.str();
}

inline std::string mat_text(const Mat<Int>& m) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < m.size(); ++i) os << (i ? "; " : "") << vec_text(m[i]);
  os << "]";
  return os.str();
}

inline std::string vecs_text(const std::vector<Vec<Int>>& vs) {
  std::string s;
  for (std::size_t i = 0; i < vs.size(); ++i) s += (i ? " " : "") + vec_text(vs[i]);
  return s;
}

}  // namespace detail

inline std::string markdown_report(const std::vector<RunRecord>& records) {
  std::ostringstream os;
  os << "| lattice | type | walls | details |\n";
  os << "|---|---|---|---|\n";
  for (const auto& r : records) {
    const auto& rep = r.report;
    const GramLattice& L = rep.chamber.lattice;
    os << "| " << (r.series_k ? "k=" + std::to_string(*r.series_k) + " " : "")
       << r.lattice << " | " << to_string(rep.type) << " | ";
    switch (rep.type) {
      case ReflectivityType::elliptic:
        os << "P(M): " << detail::vecs_text(rep.orbits.base_e) << " | "
           << rep.orbits.base_e.size() << " walls";
        break;
      case ReflectivityType::hyperbolic:
      case ReflectivityType::parabolic: {
        os << "e: " << detail::vecs_text(rep.orbits.base_e);
        if (!rep.orbits.base_f.empty()) os << "; f: " << detail::vecs_text(rep.orbits.base_f);
        os << " | ";
        if (rep.w) os << "w = " << detail::vec_text(*rep.w) << ", (w,w) = " << norm(L, *rep.w);
        if (rep.c) os << "c = " << detail::vec_text(*rep.c);
        for (const auto& g : rep.generators)
          os << "; " << to_string(g.kind) << " " << detail::mat_text(g.matrix);
        break;
      }
      case ReflectivityType::not_reflective:
        os << " | " << rep.axes.size() << " distinct axes";
        break;
      case ReflectivityType::undecided:
        os << " | " << rep.note;
        break;
    }
    os << " |\n";
  }
  return os.str();
}

inline std::string emit_report(const std::vector<RunRecord>& records, ReportFormat fmt,
                               bool with_timing = false) {
  if (fmt == ReportFormat::markdown) return markdown_report(records);
  ojson doc;
  doc["tool_version"] = kToolVersion;
  ojson arr = ojson::array();
  for (const auto& r : records) arr.push_back(record_json(r, with_timing));
  doc["records"] = arr;
  return doc.dump(2) + "\n";
}

}  // namespace reflat
