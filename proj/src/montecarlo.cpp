#include "qcp/montecarlo.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <random>
#include <thread>

#include "qcp/errors.hpp"

namespace qcp {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Outcome sample(const OutcomeDistribution& d, double u) {
  if (u < d.zero) return Outcome::Zero;
  if (u < d.zero + d.phi) return Outcome::Phi;
  return Outcome::Inconclusive;
}

struct Tally {
  std::vector<std::uint64_t> detections;
  std::vector<std::uint64_t> drawn;
  std::uint64_t inconclusive = 0;
  std::uint64_t wrong = 0;

  explicit Tally(std::size_t n) : detections(n, 0), drawn(n, 0) {}

  void add(const TrialResult& t) {
    ++drawn[t.true_change_point - 1];
    if (!t.detected) {
      ++inconclusive;
    } else if (*t.detected == t.true_change_point) {
      ++detections[t.true_change_point - 1];
    } else {
      ++wrong;
    }
  }

  void merge(const Tally& o) {
    for (std::size_t i = 0; i < detections.size(); ++i) {
      detections[i] += o.detections[i];
      drawn[i] += o.drawn[i];
    }
    inconclusive += o.inconclusive;
    wrong += o.wrong;
  }
};

}  // namespace

TrialStream::TrialStream(std::uint64_t seed, std::uint64_t trial) noexcept
    : base_(mix64(mix64(seed) + trial * kGolden)) {}

TrialStream::result_type TrialStream::operator()() noexcept {
  ++counter_;
  return mix64(base_ + counter_ * kGolden);
}

double TrialStream::uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

TrialResult simulate_trial(const StrengthSchedule& s, TrialStream& rng) {
  const std::size_t n = s.length();
  const Overlap c = s.overlap();

  TrialResult result;
  result.true_change_point = std::uniform_int_distribution<std::size_t>(1, n)(rng);

  Outcome previous = Outcome::Zero;
  for (std::size_t pos = 1; pos <= n - 1; ++pos) {
    const ParticleState state =
        pos < result.true_change_point ? ParticleState::Zero : ParticleState::Phi;
    const double x = previous == Outcome::Inconclusive ? c.value() : s.strength(pos);
    const Outcome o = sample(outcome_distribution(LocalMeasurement(x, c), state), rng.uniform());

    if (o == Outcome::Phi) {
      if (previous == Outcome::Zero) result.detected = pos;
      return result;
    }
    if (o == Outcome::Zero && pos == n - 1) {
      result.detected = n;
      return result;
    }
    previous = o;
  }
  return result;
}

std::uint64_t SimulationReport::total_detections() const noexcept {
  std::uint64_t sum = 0;
  for (auto d : detections_per_position) sum += d;
  return sum;
}

SimulationReport run_experiment(const StrengthSchedule& s, std::uint64_t trials, std::uint64_t seed,
                                unsigned threads) {
  if (trials == 0) throw DomainError("an experiment needs at least one trial");
  const std::size_t n = s.length();

  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, trials));

  std::vector<Tally> partial(threads, Tally(n));
  const auto work = [&](unsigned part) {
    const std::uint64_t begin = trials * part / threads;
    const std::uint64_t end = trials * (part + 1) / threads;
    for (std::uint64_t t = begin; t < end; ++t) {
      TrialStream rng(seed, t);
      partial[part].add(simulate_trial(s, rng));
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned p = 0; p < threads; ++p) pool.emplace_back(work, p);
  }

  Tally total(n);
  for (const auto& t : partial) total.merge(t);

  SimulationReport r;
  r.n = n;
  r.c = s.overlap().value();
  r.trials = trials;
  r.seed = seed;
  r.detections_per_position = std::move(total.detections);
  r.change_points_drawn = std::move(total.drawn);
  r.inconclusive = total.inconclusive;
  r.wrong_identifications = total.wrong;
  const double tr = static_cast<double>(trials);
  r.empirical_success = static_cast<double>(r.total_detections()) / tr;
  r.standard_error = std::sqrt(r.empirical_success * (1.0 - r.empirical_success) / tr);
  return r;
}

ChiSquareResult chi_square_test(const SimulationReport& r, const DetectionProfile& exact) {
  if (exact.length() != r.n) {
    throw ContractViolation(
        fmt::format("report has n = {} but profile has {} positions", r.n, exact.length()));
  }
  const double tr = static_cast<double>(r.trials);
  const double nd = static_cast<double>(r.n);

  std::vector<std::pair<double, double>> cells;  // (observed, expected probability)
  for (std::size_t k = 0; k < r.n; ++k) {
    cells.emplace_back(static_cast<double>(r.detections_per_position[k]),
                       exact.per_position[k] / nd);
  }
  cells.emplace_back(static_cast<double>(r.trials - r.total_detections()), 1.0 - exact.average);

  ChiSquareResult out;
  std::size_t used = 0;
  for (const auto& [observed, p] : cells) {
    const double expected = p * tr;
    if (expected <= 0.0) {
      if (observed > 0.0) {
        out.statistic = std::numeric_limits<double>::infinity();
        out.p_value = 0.0;
        return out;
      }
      continue;
    }
    out.statistic += (observed - expected) * (observed - expected) / expected;
    ++used;
  }
  out.degrees_of_freedom = used > 1 ? used - 1 : 0;
  if (out.degrees_of_freedom == 0) return out;
  const boost::math::chi_squared dist(static_cast<double>(out.degrees_of_freedom));
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

double success_z_score(const SimulationReport& r, double exact_success) {
  const double se =
      std::sqrt(exact_success * (1.0 - exact_success) / static_cast<double>(r.trials));
  if (se == 0.0)
    return r.empirical_success == exact_success
               ? 0.0
               : std::copysign(std::numeric_limits<double>::infinity(),
                               r.empirical_success - exact_success);
  return (r.empirical_success - exact_success) / se;
}

std::vector<double> position_z_scores(const SimulationReport& r, const DetectionProfile& exact) {
  if (exact.length() != r.n) {
    throw ContractViolation(
        fmt::format("report has n = {} but profile has {} positions", r.n, exact.length()));
  }
  const double tr = static_cast<double>(r.trials);
  std::vector<double> z(r.n, 0.0);
  for (std::size_t k = 0; k < r.n; ++k) {
    const double q = exact.per_position[k] / static_cast<double>(r.n);
    const double observed = static_cast<double>(r.detections_per_position[k]) / tr;
    const double se = std::sqrt(q * (1.0 - q) / tr);
    if (se == 0.0) {
      z[k] = observed == q ? 0.0 : std::numeric_limits<double>::infinity();
    } else {
      z[k] = (observed - q) / se;
    }
  }
  return z;
}

}  // namespace qcp
