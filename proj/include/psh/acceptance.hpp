#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psh/kernels.hpp"
#include "psh/report.hpp"

namespace psh {

struct CriterionInfo {
  int id;
  const char* module;
  const char* title;
};

// The fourteen desk-scale acceptance criteria in order.
const std::vector<CriterionInfo>& acceptance_criteria();

struct AcceptanceOptions {
  std::uint64_t seed = 7;  // drives the randomized problem sets
  Exec mode = Exec::parallel;
};

struct CriterionOutcome {
  CriterionInfo info;
  std::vector<Check> checks;
  std::string error;  // set when the criterion threw; the verdict is then fail
  double seconds = 0.0;

  Verdict verdict() const;
};

CriterionOutcome run_criterion(int id, const AcceptanceOptions& opt = {});

// One row per criterion: id, verdict (1 pass, 0 fail, 0.5 inconclusive), checks, failed checks, seconds.
Report acceptance_report(const std::vector<CriterionOutcome>& outcomes, const AcceptanceOptions& opt,
                         bool record_time);

}  // namespace psh
