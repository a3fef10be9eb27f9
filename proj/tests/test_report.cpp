#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "psh/catalog.hpp"
#include "psh/error.hpp"
#include "psh/report.hpp"

using namespace psh;

namespace {

Report sample(const std::string& kind) {
  Report r;
  r.kind = kind;
  r.subcommand = kind == "acceptance" ? "verify-all" : "psh-scan";
  if (kind == "scan") {
    r.columns = {"t_re", "t_im", "field", "laplacian"};
    r.rows = {{-0.25, 0.0, -0.644907238980123, 1.25e-7}, {0.0, 0.25, -1.14483444949, -3.0e-9}};
    r.add({"min discrete Laplacian >= -tol", Verdict::pass, -3e-9, -1e-4, "", ""});
  } else if (kind == "profile") {
    r.columns = {"x", "phi_tilde", "second_difference"};
    r.rows = {{-1.0, 0.177, 1.5}, {0.1, -0.56486, 1.4999999999}, {1.0, 0.1773, 1.5000000001}};
    r.add({"marginal is convex", Verdict::fail, -2.5, -1e-6, "x=0.1", "indefinite"});
  } else {
    r.columns = {"criterion", "verdict", "checks", "failed", "seconds"};
    r.rows = {{1, 1, 2, 0, 0}, {2, 0.5, 5, 0, 0}};
    r.add({"2/index bisection conclusive", Verdict::inconclusive, 0.0, 0.0, "", "coarse"});
  }
  r.provenance["h"] = 0.025;
  r.provenance["seed"] = 7;
  return r;
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("psh_report_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("JSON round trip for the three report kinds") {
  for (const char* kind : {"scan", "profile", "acceptance"}) {
    const auto r = sample(kind);
    const auto back = report_from_json(nlohmann::ordered_json::parse(to_json_string(r)));
    CHECK_MESSAGE(back == r, kind);
    CHECK(to_json_string(back) == to_json_string(r));
  }
}

TEST_CASE("CSV round trip keeps 12 significant digits") {
  for (const char* kind : {"scan", "profile", "acceptance"}) {
    const auto r = sample(kind);
    std::vector<std::string> cols;
    std::vector<std::vector<double>> rows;
    table_from_csv(to_csv(r), cols, rows);
    CHECK(cols == r.columns);
    REQUIRE(rows.size() == r.rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < rows[i].size(); ++j) {
        CHECK(std::abs(rows[i][j] - r.rows[i][j]) <= 1e-11 * std::max(1.0, std::abs(r.rows[i][j])));
        CHECK(format_number(rows[i][j]) == format_number(r.rows[i][j]));
      }
  }
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
}

TEST_CASE("non-finite values survive both formats") {
  Report r = sample("scan");
  r.rows.push_back({0.5, 0.5, -HUGE_VAL, std::nan("")});
  const auto back = report_from_json(to_json(r));
  CHECK(back.rows.back()[2] == -HUGE_VAL);
  CHECK(std::isnan(back.rows.back()[3]));
  std::vector<std::string> cols;
  std::vector<std::vector<double>> rows;
  table_from_csv(to_csv(r), cols, rows);
  CHECK(rows.back()[2] == -HUGE_VAL);
  CHECK(std::isnan(rows.back()[3]));
}

TEST_CASE("overall verdict: fail beats inconclusive beats pass") {
  Report r;
  CHECK(r.overall() == Verdict::pass);
  r.add({"a", Verdict::inconclusive, 0, 0, "", ""});
  CHECK(r.overall() == Verdict::inconclusive);
  r.add({"b", Verdict::fail, 0, 0, "", ""});
  CHECK(r.overall() == Verdict::fail);
  // every fail carries a locator
  CHECK_FALSE(r.checks.back().locator.empty());
  CHECK(to_json(r)["verdict"] == "fail");
}

TEST_CASE("schema version is checked") {
  auto j = to_json(sample("scan"));
  CHECK(j["schema_version"] == kReportSchemaVersion);
  j["schema_version"] = 99;
  CHECK_THROWS_AS(report_from_json(j), LabError);
}

TEST_CASE("emit writes json and csv, and reports unwritable paths") {
  const auto dir = scratch("emit");
  auto files = emit(sample("profile"), dir / "nested", "prekopa", Format::csv);
  REQUIRE(files.size() == 2);
  CHECK(std::filesystem::exists(files[0]));
  CHECK(files[1].extension() == ".csv");
  std::ofstream(dir / "blocker") << "x";
  try {
    emit(sample("profile"), dir / "blocker" / "sub", "prekopa", Format::json);
    FAIL("expected io");
  } catch (const LabError& e) {
    CHECK(e.kind() == ErrorKind::io);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("catalog content") {
  const auto& c = catalog();
  CHECK(c.size() >= 12);
  std::set<std::string> names;
  for (const auto& e : c) {
    CHECK(names.insert(e.name).second);
    CHECK_FALSE(e.claim.empty());
    CHECK_FALSE(e.tags.empty());
    const auto j = nlohmann::json::parse(e.config);
    CHECK(j.at("subcommand") == e.subcommand);
  }
  const auto* h = find_catalog_entry("hartogs");
  REQUIRE(h);
  CHECK(h->fields[0] == std::pair<std::string, std::string>{"rho", "abs2(z) - exp(2*re(t))"});
  CHECK(h->fields[1].first == "phi");
  CHECK(h->tags[0] == "log-psh-variation");
  const auto* t = find_catalog_entry("tau-log");
  REQUIRE(t);
  bool ladder = false;
  for (const auto& [k, v] : t->fields) ladder = ladder || k == "tau ladder";
  CHECK(ladder);
  CHECK(std::count(t->tags.begin(), t->tags.end(), "attenuation-dichotomy") == 1);
  CHECK(find_catalog_entry("nope") == nullptr);
  // the spec'd subsets are all present
  for (const char* n : {"translate-oka", "gaussian-prekopa", "ball-robin", "box-robin"}) CHECK(find_catalog_entry(n));
}
