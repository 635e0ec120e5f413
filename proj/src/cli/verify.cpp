#include "qcp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "qcp/core.hpp"
#include "qcp/errors.hpp"
#include "qcp/global_bound.hpp"
#include "qcp/online_opt.hpp"

namespace qcp {

namespace {

/// {0, step, 2 step, ...} up to hi inclusive, without accumulated drift.
std::vector<double> overlap_grid(double step, double hi) {
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double c = std::round(i * step * 1e12) / 1e12;
    if (c > hi + 1e-12) break;
    out.push_back(c);
  }
  return out;
}

void compare_profiles(SuiteResult& r, const DetectionProfile& got,
                      const std::vector<double>& expected, std::size_t n, double c) {
  for (std::size_t k = 1; k <= n; ++k) {
    r.record(std::abs(got.at(k) - expected[k - 1]), {n, c, k});
  }
}

}  // namespace

void SuiteResult::record(double residual, SuiteCase where) {
  ++cases;
  if (!(residual <= max_residual))
    max_residual = std::isnan(residual) ? std::numeric_limits<double>::infinity() : residual;
  if (!(residual <= tolerance)) {
    passed = false;
    if (!failure) failure = where;
  }
}

void SuiteResult::require(bool ok, SuiteCase where) {
  ++cases;
  if (!ok) {
    passed = false;
    if (!failure) failure = where;
  }
}

SuiteResult verify_oracle_equivalence(const VerifyOptions& o) {
  SuiteResult r{"oracle_equivalence", true, 0.0, 1e-12, 0, std::nullopt};
  std::mt19937_64 rng(o.seed);
  const auto cs = overlap_grid(0.05, 0.95);
  std::uniform_int_distribution<std::size_t> pick(0, cs.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const std::size_t top = std::min(o.n_max, o.oracle_n_max);
  for (std::size_t n = 2; n <= top; ++n) {
    for (std::size_t trial = 0; trial < o.random_schedules; ++trial) {
      const double cv = cs[pick(rng)];
      const Overlap c(cv);
      // Log-uniform strengths over the admissible interval.
      const double log_hi = cv == 0.0 ? std::log(10.0) : -std::log(cv);
      std::vector<double> x(n - 1);
      for (auto& xi : x) xi = std::exp(log_hi * (2.0 * unit(rng) - 1.0));
      const StrengthSchedule s(c, std::move(x));

      const auto brute = enumerate_outcomes(s);
      const auto dp = evaluate_strategy(s);
      compare_profiles(r, dp, brute.profile.per_position, n, cv);
      r.record(brute.misidentified, {n, cv, 0});
    }
  }
  return r;
}

SuiteResult verify_central_equality(const VerifyOptions& o) {
  SuiteResult r{"central_equality", true, 0.0, 1e-10, 0, std::nullopt};
  const std::size_t fault_n = std::min<std::size_t>(6, o.n_max);
  for (std::size_t n = 2; n <= o.n_max; ++n) {
    for (double cv : overlap_grid(0.05, kClosedFormLimit)) {
      const Overlap c(cv);
      auto schedule = closed_form_strengths(n, c).schedule;
      if (o.inject_fault && n == fault_n && cv == 0.3) {
        schedule = schedule.with_strength(1, 1.0);
      }
      const auto profile = evaluate_strategy(schedule);
      compare_profiles(r, profile, global_efficiencies(n, c).gammas, n, cv);
      r.record(std::abs(profile.average - global_success(n, c)), {n, cv, 0});
    }
  }
  return r;
}

SuiteResult verify_recursion_agreement(const VerifyOptions& o) {
  SuiteResult r{"recursion_agreement", true, 0.0, 1e-10, 0, std::nullopt};
  for (std::size_t n = 2; n <= o.n_max; ++n) {
    for (double cv : overlap_grid(0.05, kClosedFormLimit)) {
      const Overlap c(cv);
      const auto closed = closed_form_strengths(n, c).schedule;
      const auto rec = recursive_strengths(n, c).schedule;
      for (std::size_t j = 1; j < n; ++j) {
        r.record(std::abs(closed.strength(j) - rec.strength(j)), {n, cv, j});
      }
    }
  }
  return r;
}

SuiteResult verify_optimizer_agreement(const VerifyOptions& o) {
  SuiteResult r{"optimizer_agreement", true, 0.0, 1e-9, 0, std::nullopt};
  for (std::size_t n = 2; n <= o.n_max; ++n) {
    for (double cv : overlap_grid(0.05, kClosedFormLimit)) {
      const Overlap c(cv);
      const auto closed = closed_form_strengths(n, c).schedule;
      const auto numeric = optimize_strengths(n, c).schedule;
      for (std::size_t j = 1; j < n; ++j) {
        r.record(std::abs(closed.strength(j) - numeric.strength(j)), {n, cv, j});
      }
    }
  }
  return r;
}

SuiteResult verify_global_means(const VerifyOptions& o) {
  SuiteResult r{"global_mean_consistency", true, 0.0, 1e-12, 0, std::nullopt};
  for (std::size_t n = 2; n <= o.n_max; ++n) {
    for (double cv : overlap_grid(0.05, 1.0)) {
      const Overlap c(cv);
      r.record(std::abs(global_efficiencies(n, c).mean() - global_success(n, c)), {n, cv, 0});
      if (n < 3) continue;
      try {
        r.record(std::abs(primed_efficiencies(n, c).mean() - primed_success(n, c)), {n, cv, 0});
      } catch (const SingularityError&) {
        // 1 + (-c)^(n-3) = 0 at c = 1 for even n; nothing to compare.
      }
    }
  }
  return r;
}

SuiteResult verify_gram_feasibility(const VerifyOptions& o) {
  SuiteResult r{"gram_feasibility", true, 0.0, kPsdTolerance, 0, std::nullopt};
  const std::size_t top = std::min<std::size_t>(31, o.n_max);
  for (std::size_t n = 5; n <= top; n += 2) {
    const double threshold = *critical_overlap(n);
    for (double cv : overlap_grid(0.01, 0.99)) {
      const Overlap c(cv);
      const auto report =
          validate_unambiguous(GramMatrix::source_states(n, c), global_efficiencies(n, c));
      if (cv < threshold - 0.01) {
        r.record(std::max(0.0, -report.min_eigenvalue), {n, cv, 0});
        r.require(report.feasible, {n, cv, 0});
      } else if (cv > threshold + 0.01) {
        r.require(!report.gamma_range_ok, {n, cv, 2});
      }
    }
  }
  return r;
}

std::vector<SuiteResult> run_verification(const VerifyOptions& o) {
  if (o.n_max < 2) throw DomainError("verification needs n_max >= 2");
  return {verify_oracle_equivalence(o),  verify_central_equality(o), verify_recursion_agreement(o),
          verify_optimizer_agreement(o), verify_global_means(o),     verify_gram_feasibility(o)};
}

nlohmann::json to_json(const SuiteResult& r) {
  nlohmann::json j{{"name", r.name},
                   {"passed", r.passed},
                   {"max_residual", r.max_residual},
                   {"tolerance", r.tolerance},
                   {"cases", r.cases}};
  if (r.failure) {
    j["failure"] = {{"n", r.failure->n}, {"c", r.failure->c}, {"position", r.failure->position}};
  } else {
    j["failure"] = nullptr;
  }
  return j;
}

}  // namespace qcp
