#include "psh/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "psh/error.hpp"

namespace psh {

using ojson = nlohmann::ordered_json;

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "pass") return Verdict::pass;
  if (s == "fail") return Verdict::fail;
  if (s == "inconclusive") return Verdict::inconclusive;
  throw LabError(ErrorKind::config, "unknown verdict '" + s + "'");
}

Verdict Report::overall() const {
  Verdict v = Verdict::pass;
  for (const auto& c : checks) {
    if (c.verdict == Verdict::fail) return Verdict::fail;
    if (c.verdict == Verdict::inconclusive) v = Verdict::inconclusive;
  }
  return v;
}

void Report::add(Check c) {
  if (c.verdict == Verdict::fail && c.locator.empty()) c.locator = "-";
  checks.push_back(std::move(c));
}

namespace {

ojson number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number(const ojson& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    if (s == "nan") return std::nan("");
  }
  throw LabError(ErrorKind::config, "expected a number in report JSON");
}

}  // namespace

ojson to_json(const Report& r) {
  ojson j;
  j["schema_version"] = kReportSchemaVersion;
  j["kind"] = r.kind;
  j["subcommand"] = r.subcommand;
  j["verdict"] = to_string(r.overall());
  ojson checks = ojson::array();
  for (const auto& c : r.checks) {
    ojson o;
    o["id"] = c.id;
    o["verdict"] = to_string(c.verdict);
    o["value"] = number(c.value);
    o["bound"] = number(c.bound);
    o["locator"] = c.locator;
    o["detail"] = c.detail;
    checks.push_back(std::move(o));
  }
  j["checks"] = std::move(checks);
  j["columns"] = r.columns;
  ojson rows = ojson::array();
  for (const auto& row : r.rows) {
    ojson a = ojson::array();
    for (double v : row) a.push_back(number(v));
    rows.push_back(std::move(a));
  }
  j["rows"] = std::move(rows);
  j["provenance"] = r.provenance;
  return j;
}

Report report_from_json(const ojson& j) {
  if (!j.contains("schema_version") || j["schema_version"] != kReportSchemaVersion)
    throw LabError(ErrorKind::config, "unsupported report schema version");
  Report r;
  r.kind = j.at("kind").get<std::string>();
  r.subcommand = j.at("subcommand").get<std::string>();
  for (const auto& o : j.at("checks")) {
    Check c;
    c.id = o.at("id").get<std::string>();
    c.verdict = verdict_from_string(o.at("verdict").get<std::string>());
    c.value = number(o.at("value"));
    c.bound = number(o.at("bound"));
    c.locator = o.at("locator").get<std::string>();
    c.detail = o.at("detail").get<std::string>();
    r.checks.push_back(std::move(c));
  }
  r.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& row : j.at("rows")) {
    std::vector<double> v;
    for (const auto& x : row) v.push_back(number(x));
    r.rows.push_back(std::move(v));
  }
  r.provenance = j.at("provenance");
  return r;
}

std::string to_json_string(const Report& r) { return to_json(r).dump(2) + "\n"; }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string to_csv(const Report& r) {
  std::string out;
  for (std::size_t c = 0; c < r.columns.size(); ++c) out += (c ? "," : "") + r.columns[c];
  out += '\n';
  for (const auto& row : r.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_number(row[c]);
    out += '\n';
  }
  return out;
}

void table_from_csv(const std::string& text, std::vector<std::string>& columns,
                    std::vector<std::vector<double>>& rows) {
  columns.clear();
  rows.clear();
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(cells, cell, ',')) {
      if (header) {
        columns.push_back(cell);
        continue;
      }
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') throw LabError(ErrorKind::config, "bad CSV number '" + cell + "'");
      row.push_back(v);
    }
    if (!header) {
      if (row.size() != columns.size()) throw LabError(ErrorKind::config, "CSV row width differs from the header");
      rows.push_back(std::move(row));
    }
    header = false;
  }
}

std::vector<std::filesystem::path> emit(const Report& r, const std::filesystem::path& dir, const std::string& stem,
                                        Format f) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw LabError(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
  auto write = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
    out.close();
    if (!out) throw LabError(ErrorKind::io, "cannot write " + p.string());
  };
  std::vector<std::filesystem::path> written;
  written.push_back(dir / (stem + ".json"));
  write(written.back(), to_json_string(r));
  if (f == Format::csv) {
    written.push_back(dir / (stem + ".csv"));
    write(written.back(), to_csv(r));
  }
  return written;
}

}  // namespace psh
