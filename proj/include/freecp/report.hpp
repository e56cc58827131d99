#pragma once

// Schema-versioned experiment reports: a summary object, one flat table and
// the seeds needed for replay. JSON keeps everything; CSV carries the table.
// Timestamps live only in `metadata`, so two runs of one plan differ there and
// nowhere else.

#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "freecp/errors.hpp"
#include "freecp/plan.hpp"
#include "freecp/random.hpp"

namespace freecp {

using Json = nlohmann::json;

inline constexpr int kReportSchemaVersion = 1;

enum class ReportFormat { json, csv };

inline ReportFormat parse_format(const std::string& s) {
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  throw DomainError("unknown format '" + s + "' (expected json or csv)");
}

struct Report {
  std::string kind;
  int schema_version = kReportSchemaVersion;
  Json plan = nullptr;  ///< plan echo (config text) when the run came from a plan
  std::vector<SeedSpec> seeds;
  Json summary = Json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
  Json metadata = Json::object();

  void add_row(std::vector<Json> row) {
    if (row.size() != columns.size()) throw DimensionError("Report: row width differs from column count");
    rows.push_back(std::move(row));
  }

  /// Everything except metadata; the part that must be reproducible.
  Json content_json() const {
    Json j;
    j["schema_version"] = schema_version;
    j["kind"] = kind;
    j["plan"] = plan;
    Json seeds_j = Json::array();
    for (const auto& s : seeds) seeds_j.push_back({{"master_seed", s.master_seed}, {"stream_index", s.stream_index}});
    j["seeds"] = seeds_j;
    j["summary"] = summary;
    j["columns"] = columns;
    Json rows_j = Json::array();
    for (const auto& r : rows) rows_j.push_back(r);
    j["rows"] = rows_j;
    return j;
  }

  Json to_json() const {
    Json j = content_json();
    j["metadata"] = metadata;
    return j;
  }

  static Report from_json(const Json& j) {
    Report r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion) {
      throw Error("unsupported report schema version " + std::to_string(r.schema_version));
    }
    r.kind = j.at("kind").get<std::string>();
    r.plan = j.value("plan", Json(nullptr));
    for (const auto& s : j.at("seeds")) {
      r.seeds.push_back(SeedSpec{s.at("master_seed").get<std::uint64_t>(), s.at("stream_index").get<std::uint64_t>()});
    }
    r.summary = j.at("summary");
    r.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& row : j.at("rows")) r.rows.push_back(row.get<std::vector<Json>>());
    r.metadata = j.value("metadata", Json::object());
    return r;
  }

  friend bool operator==(const Report&, const Report&) = default;
};

inline void stamp_metadata(Report& r) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  r.metadata["generated_at"] = os.str();
}

inline Json plan_json(const ExperimentPlan& plan) { return Json(echo_plan(plan)); }

namespace csv {

inline std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline Json parse_cell(const std::string& s, bool quoted) {
  if (quoted) return Json(s);
  if (s.empty()) return Json(nullptr);
  if (s == "true") return Json(true);
  if (s == "false") return Json(false);
  Json v = Json::parse(s, nullptr, false);
  if (!v.is_discarded() && v.is_number()) return v;
  return Json(s);
}

/// Strings that would read back as another type are always quoted.
inline std::string cell(const Json& v) {
  if (v.is_string()) {
    const std::string& s = v.get_ref<const std::string&>();
    if (!parse_cell(s, false).is_string()) return "\"" + s + "\"";
    return quote(s);
  }
  if (v.is_null()) return "";
  return v.dump();
}

inline std::string header_line(const std::vector<std::string>& columns) {
  std::string line;
  for (std::size_t i = 0; i < columns.size(); ++i) line += (i ? "," : "") + quote(columns[i]);
  return line;
}

inline std::string row_line(const std::vector<Json>& row) {
  std::string line;
  for (std::size_t i = 0; i < row.size(); ++i) line += (i ? "," : "") + cell(row[i]);
  return line;
}

/// Splits one CSV record; the second element marks which fields were quoted.
inline std::vector<std::pair<std::string, bool>> split_record(const std::string& line) {
  std::vector<std::pair<std::string, bool>> out;
  std::string cur;
  bool quoted = false, in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      in_quotes = quoted = true;
    } else if (c == ',') {
      out.emplace_back(cur, quoted);
      cur.clear();
      quoted = false;
    } else {
      cur += c;
    }
  }
  if (in_quotes) throw Error("csv: unterminated quoted field");
  out.emplace_back(cur, quoted);
  return out;
}

}  // namespace csv

/// Table only. An empty report gives the header line alone.
inline void write_csv(const Report& r, std::ostream& os) {
  os << csv::header_line(r.columns) << "\n";
  for (const auto& row : r.rows) os << csv::row_line(row) << "\n";
}

/// Reads a table written by write_csv into columns and rows.
inline Report read_csv(std::istream& is) {
  Report r;
  std::string line;
  if (!std::getline(is, line)) throw Error("csv: missing header");
  for (const auto& [name, q] : csv::split_record(line)) r.columns.push_back(name);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<Json> row;
    for (const auto& [s, q] : csv::split_record(line)) row.push_back(csv::parse_cell(s, q));
    r.add_row(std::move(row));
  }
  return r;
}

inline void write_json(const Report& r, std::ostream& os) { os << r.to_json().dump(2) << "\n"; }

/// Writes to `path`, or to `fallback` when path is empty or "-".
inline void emit(const Report& r, ReportFormat format, const std::string& path, std::ostream& fallback) {
  auto write = [&](std::ostream& os) {
    if (format == ReportFormat::json) {
      write_json(r, os);
    } else {
      write_csv(r, os);
    }
  };
  if (path.empty() || path == "-") {
    write(fallback);
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing: " + std::strerror(errno));
  write(out);
  out.flush();
  if (!out) throw Error("write to '" + path + "' failed: " + std::strerror(errno));
}

}  // namespace freecp
