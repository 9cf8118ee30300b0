#pragma once

// The end-to-end acceptance suite: twelve numbered criteria, each a
// deterministic experiment with pinned tolerances. Shared by the
// acceptance test binary and `skt verify paper`.

#include <functional>
#include <string>
#include <vector>

namespace skt {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  unsigned threads = 0;  // 0 reads SKT_THREADS
  std::vector<int> only;  // empty runs every criterion
};

int acceptance_criterion_count();

CriterionResult run_criterion(int id, const AcceptanceOptions& opts = {});

/// Runs the selected criteria in order, calling `on_result` after each.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {},
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS  3  name: detail (0.12 s)"
std::string format_result(const CriterionResult& r);

}  // namespace skt
