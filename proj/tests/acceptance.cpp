// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance            all criteria
//   acceptance 3 7        selected criteria
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "hfavg/validation.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
  if (ids.empty()) ids = hfavg::suite_criteria("all");

  hfavg::ValidationOptions options;
  int failed = 0;
  for (int id : ids) {
    const hfavg::CriterionResult r = hfavg::run_criterion(id, options);
    std::printf("%s\n", r.line().c_str());
    std::fflush(stdout);
    if (!r.passed) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(ids.size()) - failed, ids.size());
  return failed == 0 ? 0 : 1;
}
