#pragma once

// Cross-module consistency suites run by `qcp verify`.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace qcp {

struct SuiteCase {
  std::size_t n = 0;
  double c = 0.0;
  std::size_t position = 0;  // 0 when the failure is not tied to a position
};

struct SuiteResult {
  std::string name;
  bool passed = true;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::size_t cases = 0;
  std::optional<SuiteCase> failure;  // first failing case

  /// Records one comparison; the first residual above tolerance marks the failure.
  void record(double residual, SuiteCase where);
  /// Records a pass/fail check that has no numeric residual.
  void require(bool ok, SuiteCase where);
};

struct VerifyOptions {
  std::size_t n_max = 25;
  std::size_t oracle_n_max = 8;
  std::size_t random_schedules = 100;
  std::uint64_t seed = 1;
  /// Negative control: perturbs one closed-form strength before the
  /// central-equality comparison, which must then fail.
  bool inject_fault = false;
};

SuiteResult verify_oracle_equivalence(const VerifyOptions& o);
SuiteResult verify_central_equality(const VerifyOptions& o);
SuiteResult verify_recursion_agreement(const VerifyOptions& o);
SuiteResult verify_optimizer_agreement(const VerifyOptions& o);
SuiteResult verify_global_means(const VerifyOptions& o);
SuiteResult verify_gram_feasibility(const VerifyOptions& o);

std::vector<SuiteResult> run_verification(const VerifyOptions& o);

nlohmann::json to_json(const SuiteResult& r);

}  // namespace qcp
