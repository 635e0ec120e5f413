#pragma once

// Seeded simulation of outcome trajectories under an online strategy.
// Every trial draws from its own counter-based stream keyed by
// (seed, trial index), so results do not depend on how trials are split
// across threads.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "qcp/core.hpp"

namespace qcp {

/// Counter-based generator: output i of stream (seed, trial) is a fixed
/// function of (seed, trial, i). Satisfies UniformRandomBitGenerator.
class TrialStream {
 public:
  using result_type = std::uint64_t;

  TrialStream(std::uint64_t seed, std::uint64_t trial) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

struct TrialResult {
  std::size_t true_change_point = 0;
  std::optional<std::size_t> detected;  // nullopt: inconclusive

  bool inconclusive() const noexcept { return !detected.has_value(); }
  bool correct() const noexcept { return !detected || *detected == true_change_point; }
};

/// Draws k uniformly from 1..n and walks positions 1..n-1 with the adaptive rule.
TrialResult simulate_trial(const StrengthSchedule& s, TrialStream& rng);

struct SimulationReport {
  std::size_t n = 0;
  double c = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> detections_per_position;  // [k-1]: correct detections of k
  std::vector<std::uint64_t> change_points_drawn;      // [k-1]: trials whose true point was k
  std::uint64_t inconclusive = 0;
  std::uint64_t wrong_identifications = 0;
  double empirical_success = 0.0;
  double standard_error = 0.0;  // binomial, sqrt(p(1-p)/trials)

  std::uint64_t total_detections() const noexcept;
};

/// threads = 0 picks std::thread::hardware_concurrency(). Throws DomainError for trials = 0.
SimulationReport run_experiment(const StrengthSchedule& s, std::uint64_t trials, std::uint64_t seed,
                                unsigned threads = 0);

struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t degrees_of_freedom = 0;
  double p_value = 1.0;
};

/// Pearson test of the outcome categories {detected at 1..n, no detection}
/// against the exact probabilities D_n(k)/n and 1 - P_s^L.
ChiSquareResult chi_square_test(const SimulationReport& r, const DetectionProfile& exact);

/// (empirical - exact) / standard error of the overall success.
double success_z_score(const SimulationReport& r, double exact_success);

/// Per-position z-scores of the joint detection frequencies against D_n(k)/n.
/// Positions with zero exact probability report 0 when nothing was observed.
std::vector<double> position_z_scores(const SimulationReport& r, const DetectionProfile& exact);

}  // namespace qcp
