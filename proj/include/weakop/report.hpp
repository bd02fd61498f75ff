#pragma once

// Report plumbing: deterministic CSV/JSON serialization, atomic file writes
// (write-temp-then-rename), and the pass/fail check records aggregated into
// run manifests.

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "weakop/diagnostics.hpp"
#include "weakop/errors.hpp"

namespace weakop {

using Json = nlohmann::ordered_json;

/// 17 significant digits: lossless and deterministic.
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open '" + tmp.string() + "' for writing");
    os << content;
    if (!os) throw IoError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path);
}

inline std::string csv_from_table(const DiagnosticsTable& table) {
  std::string out = "param,value\n";
  for (const auto& [p, v] : table.rows) {
    out += fmt_double(p);
    out += ',';
    out += fmt_double(v);
    out += '\n';
  }
  return out;
}

/// One named pass/fail record; `value cmp threshold` documents the check.
struct CheckRecord {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string cmp = "<=";
  bool pass = false;
};

inline CheckRecord check_le(std::string name, double value, double threshold) {
  return CheckRecord{std::move(name), value, threshold, "<=", value <= threshold};
}

inline CheckRecord check_ge(std::string name, double value, double threshold) {
  return CheckRecord{std::move(name), value, threshold, ">=", value >= threshold};
}

inline CheckRecord check_in(std::string name, double value, double lo, double hi) {
  CheckRecord r{std::move(name), value, hi, "in", value >= lo && value <= hi};
  return r;
}

inline bool all_pass(const std::vector<CheckRecord>& checks) {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

inline Json to_json(const std::vector<CheckRecord>& checks) {
  Json arr = Json::array();
  for (const auto& c : checks) {
    Json j;
    j["name"] = c.name;
    j["value"] = c.value;
    j["cmp"] = c.cmp;
    j["threshold"] = c.threshold;
    j["pass"] = c.pass;
    arr.push_back(std::move(j));
  }
  return arr;
}

inline Json table_meta_json(const DiagnosticsTable& t) {
  Json j;
  j["fitted_rate"] = t.fitted_rate;
  j["first_value"] = t.first_value();
  j["last_value"] = t.last_value();
  j["max_value"] = t.max_value();
  j["rows"] = t.rows.size();
  return j;
}

}  // namespace weakop
