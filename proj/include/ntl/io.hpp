#pragma once

// Output helpers: JSON with 17 significant digits, CSV tables, atomic writes.

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ntl/error.hpp"
#include "ntl/harness.hpp"
#include "ntl/solver.hpp"
#include "ntl/verify.hpp"

namespace ntl {

using Json = nlohmann::ordered_json;

/// Round-trip safe decimal form of a double.
inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void dump_json(const Json& j, std::ostringstream& out, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string pad_end(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << '{' << nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ',' << nl;
        first = false;
        out << pad << Json(it.key()).dump() << (indent > 0 ? ": " : ":");
        dump_json(it.value(), out, indent, depth + 1);
      }
      out << nl << pad_end << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      out << '[' << nl;
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out << ',' << nl;
        out << pad;
        dump_json(j[i], out, indent, depth + 1);
      }
      out << nl << pad_end << ']';
      return;
    }
    case Json::value_t::number_float:
      out << format_double(j.get<double>());
      return;
    default:
      out << j.dump();
  }
}

}  // namespace detail

/// Like Json::dump, but floats are written with %.17g.
inline std::string dump_json(const Json& j, int indent = 2) {
  std::ostringstream out;
  detail::dump_json(j, out, indent, 0);
  if (indent > 0) out << '\n';
  return out.str();
}

/// Writes `content` to a sibling temporary file and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

/// CSV with a header row; numbers in %.17g.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(const std::vector<double>& row) {
    if (row.size() != header_.size()) throw std::logic_error("csv row width mismatch");
    rows_.push_back(row);
  }

  std::string str() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < header_.size(); ++i) out << (i ? "," : "") << header_[i];
    out << '\n';
    for (const auto& r : rows_) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_double(r[i]);
      out << '\n';
    }
    return out.str();
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

inline Json to_json(const NamedValues& v) {
  Json j = Json::object();
  for (const auto& [k, x] : v) j[k] = x;
  return j;
}

inline Json to_json(const CheckResult& r) {
  Json j;
  j["name"] = r.name;
  j["params"] = to_json(r.params);
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["relation"] = r.relation;
  j["pass"] = r.pass;
  Json rows = Json::array();
  for (const auto& row : r.rows) rows.push_back(to_json(row));
  j["rows"] = rows;
  return j;
}

inline Json to_json(const EnergyBreakdown& e) {
  return Json{{"part1_energy", e.part1_energy}, {"part2_energy", e.part2_energy}, {"load_term", e.load_term},
              {"total", e.total}};
}

inline Json to_json(const ModelParams& mp) {
  return Json{{"d", mp.d}, {"s", mp.s}, {"p", mp.p}, {"delta", mp.delta}, {"mode", std::string(to_string(mp.mode))}};
}

/// Solve report without timing, so that reruns are byte-identical.
inline Json to_json(const SolveReport& r) {
  Json j;
  j["method"] = r.method;
  j["iterations"] = r.iterations;
  j["residual"] = r.residual;
  j["breakdown"] = to_json(r.breakdown);
  j["penalty_term"] = r.penalty_term;
  j["transmission_residual"] = transmission_residual(r.pair);
  j["shared_interface"] = r.pair.shared_interface();
  return j;
}

/// Nodal values as (x, part, u).
inline CsvTable solution_table(const FieldPair& u) {
  CsvTable t({"x", "part", "u"});
  for (Part P : {Part::one, Part::two}) {
    for (int i = 0; i <= u.mesh().elements(P); ++i) {
      t.add({u.mesh().x(P, i), static_cast<double>(static_cast<int>(P)), u.nodal(P, i)});
    }
  }
  return t;
}

inline CsvTable sweep_table(const SweepReport& r) {
  std::vector<std::string> h{"s", "delta", "distance", "energy", "limit_energy"};
  if (r.case_id == CaseId::b) {
    h.push_back("weak_gap");
    for (std::size_t k = 0; k < r.limit_moments.size(); ++k) h.push_back("moment" + std::to_string(k));
  }
  CsvTable t(h);
  for (const auto& row : r.rows) {
    std::vector<double> v{row.s, row.delta, row.distance, row.energy, row.limit_energy};
    if (r.case_id == CaseId::b) {
      v.push_back(row.weak_gap);
      v.insert(v.end(), row.moments.begin(), row.moments.end());
    }
    t.add(v);
  }
  return t;
}

inline Json to_json(const SweepReport& r) {
  Json j;
  j["case"] = std::string(to_string(r.case_id));
  j["limit"] = Json{{"s", r.limit.s}, {"delta", r.limit.delta}};
  j["reference"] = r.reference;
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json x{{"s", row.s}, {"delta", row.delta}, {"distance", row.distance}, {"energy", row.energy},
           {"limit_energy", row.limit_energy}};
    if (r.case_id == CaseId::b) {
      x["weak_gap"] = row.weak_gap;
      x["moments"] = row.moments;
    }
    rows.push_back(x);
  }
  j["rows"] = rows;
  j["fitted_slope"] = r.fitted_slope ? Json(*r.fitted_slope) : Json(nullptr);
  if (r.case_id == CaseId::b) j["limit_moments"] = r.limit_moments;
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace ntl
