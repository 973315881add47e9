#pragma once

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hfavg/scenarios.hpp"

namespace hfavg {

struct CriterionResult {
  int id = 0;                 // 0 for checks outside the numbered list
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit = 0.0;    // seconds, 0 = none
  nlohmann::json metrics = nlohmann::json::object();

  nlohmann::json to_json() const;
  /// "PASS [3] name: detail (1.2 s)".
  std::string line() const;
};

struct ValidationOptions {
  bool quick = false;
  int jobs = 1;
  unsigned seed = 0;
  ScenarioCatalog catalog = default_catalog();
  /// Replaceable for fault-injection tests.
  std::function<BuiltScenario(const ScenarioConfig&)> builder = build_scenario;

  BuiltScenario build(const std::string& name) const;
};

inline constexpr int kNumCriteria = 9;

/// Criterion ids of a suite: invariants, oracles, convergence or all.
std::vector<int> suite_criteria(const std::string& suite);
bool is_suite(const std::string& suite);

CriterionResult run_criterion(int id, const ValidationOptions& options);

/// Every catalog scenario with a closed-form oracle agrees with its
/// assembled averaged system (relative 1e-6) on a fixed grid.
CriterionResult check_catalog_oracles(const ValidationOptions& options);

/// Numbered criteria of the suite, followed by the catalog oracle check for
/// the oracles and all suites.
std::vector<CriterionResult> run_suite(const std::string& suite, const ValidationOptions& options);

nlohmann::json summary_json(const std::string& suite, const std::vector<CriterionResult>& results);

}  // namespace hfavg
