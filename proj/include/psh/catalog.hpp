#pragma once

#include <string>
#include <utility>
#include <vector>

namespace psh {

// A shipped family, weight or domain together with the claim it exercises and
// a runnable CLI config.
struct CatalogEntry {
  std::string name;
  std::string subcommand;
  std::string claim;
  std::vector<std::string> tags;
  std::vector<std::pair<std::string, std::string>> fields;  // rho, phi, tau ladder, ...
  std::string config;                                        // JSON accepted by `subcommand`
};

const std::vector<CatalogEntry>& catalog();
// nullptr when absent
const CatalogEntry* find_catalog_entry(const std::string& name);

}  // namespace psh
