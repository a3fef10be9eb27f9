#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace psh {

inline constexpr int kReportSchemaVersion = 1;

enum class Verdict { pass, fail, inconclusive };

const char* to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct Check {
  std::string id;
  Verdict verdict = Verdict::pass;
  double value = 0.0;
  double bound = 0.0;
  std::string locator;  // required when the verdict is fail
  std::string detail;

  bool operator==(const Check&) const = default;
};

// One run of one subcommand. `kind` selects the table layout (scan, profile,
// acceptance, ...); columns and rows form the CSV payload.
struct Report {
  std::string kind;
  std::string subcommand;
  std::vector<Check> checks;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  nlohmann::ordered_json provenance = nlohmann::ordered_json::object();

  // fail beats inconclusive beats pass; an empty check list passes
  Verdict overall() const;
  void add(Check c);

  bool operator==(const Report&) const = default;
};

// Non-finite numbers are written as the strings "inf", "-inf", "nan".
nlohmann::ordered_json to_json(const Report& r);
Report report_from_json(const nlohmann::ordered_json& j);
std::string to_json_string(const Report& r);

// Header line then one line per row, 12 significant digits.
std::string to_csv(const Report& r);
// Parses a CSV produced by to_csv into columns and rows.
void table_from_csv(const std::string& text, std::vector<std::string>& columns, std::vector<std::vector<double>>& rows);
std::string format_number(double v);

enum class Format { json, csv };

// Writes <dir>/<stem>.json or .csv (the csv format also writes the json).
// Throws io when the directory cannot be created or the file cannot be written.
std::vector<std::filesystem::path> emit(const Report& r, const std::filesystem::path& dir, const std::string& stem,
                                        Format f);

}  // namespace psh
