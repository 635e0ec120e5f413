#include "qcp/core.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "qcp/errors.hpp"

namespace qcp {

Overlap::Overlap(double c) : c_(c) {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw DomainError(fmt::format("overlap must lie in [0, 1], got {}", c));
  }
}

double Overlap::max_strength() const noexcept {
  return c_ == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / c_;
}

bool admissible_strength(double x, Overlap c) noexcept {
  if (!std::isfinite(x) || x <= 0.0) return false;
  const double cv = c.value();
  if (cv == 0.0) return true;
  return x >= cv * (1.0 - kStrengthSlack) && x <= (1.0 / cv) * (1.0 + kStrengthSlack);
}

LocalMeasurement::LocalMeasurement(double strength, Overlap c) : x_(strength), c_(c) {
  if (!admissible_strength(strength, c)) {
    throw InvalidMeasurement(fmt::format("strength {} outside the admissible interval [{}, {}]",
                                         strength, c.value(), c.max_strength()));
  }
}

OutcomeDistribution outcome_distribution(const LocalMeasurement& m, ParticleState state) {
  const double c = m.overlap().value();
  const double x = m.strength();
  OutcomeDistribution d;
  // Boundary strengths accepted within kStrengthSlack may leave a rounding
  // residue of the wrong sign; clamp back into [0, 1].
  if (state == ParticleState::Zero) {
    d.inconclusive = std::clamp(c * x, 0.0, 1.0);
    d.zero = 1.0 - d.inconclusive;
  } else {
    d.inconclusive = std::clamp(c / x, 0.0, 1.0);
    d.phi = 1.0 - d.inconclusive;
  }
  return d;
}

StrengthSchedule::StrengthSchedule(Overlap c, std::vector<double> strengths)
    : c_(c), strengths_(std::move(strengths)) {
  if (strengths_.empty()) {
    throw DomainError("a schedule needs at least one strength (string length n >= 2)");
  }
  for (std::size_t j = 0; j < strengths_.size(); ++j) {
    if (!admissible_strength(strengths_[j], c_)) {
      throw InvalidMeasurement(fmt::format("strength x({}) = {} outside [{}, {}]", j + 1,
                                           strengths_[j], c_.value(), c_.max_strength()),
                               j + 1);
    }
  }
}

double StrengthSchedule::strength(std::size_t position) const {
  if (position == 0 || position > strengths_.size()) {
    throw DomainError(
        fmt::format("schedule position {} outside 1..{}", position, strengths_.size()));
  }
  return strengths_[position - 1];
}

StrengthSchedule StrengthSchedule::with_strength(std::size_t position, double x) const {
  std::vector<double> copy = strengths_;
  if (position == 0 || position > copy.size()) {
    throw DomainError(fmt::format("schedule position {} outside 1..{}", position, copy.size()));
  }
  copy[position - 1] = x;
  return StrengthSchedule(c_, std::move(copy));
}

DetectionProfile DetectionProfile::from_per_position(std::vector<double> d) {
  DetectionProfile p;
  double sum = 0.0;
  for (double v : d) sum += v;
  p.average = d.empty() ? 0.0 : sum / static_cast<double>(d.size());
  p.per_position = std::move(d);
  return p;
}

AliveState alive_step(AliveState s, Overlap c, double x_next) {
  if (!(s.p0 >= 0.0 && s.p0 <= 1.0 && s.p_inconclusive >= 0.0 && s.p_inconclusive <= 1.0) ||
      std::abs(s.p0 + s.p_inconclusive - 1.0) > kTolerance) {
    throw DomainError(
        fmt::format("invalid alive state (p0 = {}, pI = {})", s.p0, s.p_inconclusive));
  }
  const auto after_zero = outcome_distribution(LocalMeasurement(x_next, c), ParticleState::Zero);
  const double cv = c.value();
  const double c2 = cv * cv;
  AliveState next;
  next.p0 = s.p0 * after_zero.zero + s.p_inconclusive * (1.0 - c2);
  next.p_inconclusive = s.p0 * after_zero.inconclusive + s.p_inconclusive * c2;
  // Rescale so rounding does not accumulate over long strings.
  const double total = next.p0 + next.p_inconclusive;
  next.p0 /= total;
  next.p_inconclusive /= total;
  return next;
}

DetectionProfile evaluate_strategy(const StrengthSchedule& s) {
  const std::size_t n = s.length();
  const Overlap c = s.overlap();
  std::vector<double> d(n, 0.0);

  AliveState alive;  // position 0 counts as a conclusive 0
  for (std::size_t k = 1; k <= n - 1; ++k) {
    const double x = s.strength(k);
    const auto on_phi = outcome_distribution(LocalMeasurement(x, c), ParticleState::Phi);
    d[k - 1] = alive.p0 * on_phi.phi;
    alive = alive_step(alive, c, x);
  }
  // Particle n is |phi> by promise: a 0 at position n-1 already identifies k = n.
  d[n - 1] = alive.p0;
  return DetectionProfile::from_per_position(std::move(d));
}

namespace {

class OutcomeWalker {
 public:
  OutcomeWalker(const StrengthSchedule& s, std::size_t change_point)
      : s_(s), n_(s.length()), k_(change_point), c_(s.overlap().value()) {}

  void run() { walk(1, Outcome::Zero, 1.0); }

  double detected = 0.0;
  double misidentified = 0.0;
  std::size_t visited = 0;

 private:
  OutcomeDistribution distribution(std::size_t pos, Outcome previous) const {
    const ParticleState state = pos < k_ ? ParticleState::Zero : ParticleState::Phi;
    const double x = previous == Outcome::Inconclusive ? c_ : s_.strength(pos);
    return outcome_distribution(LocalMeasurement(x, s_.overlap()), state);
  }

  void declare(std::size_t position, double prob) {
    ++visited;
    if (position == k_) {
      detected += prob;
    } else {
      misidentified += prob;
    }
  }

  void walk(std::size_t pos, Outcome previous, double prob) {
    const auto dist = distribution(pos, previous);
    for (Outcome o : {Outcome::Zero, Outcome::Phi, Outcome::Inconclusive}) {
      const double p = prob * dist[o];
      if (p == 0.0) continue;
      switch (o) {
        case Outcome::Phi:
          if (pos == 1 || previous == Outcome::Zero) {
            declare(pos, p);
          } else {
            ++visited;  // I followed by phi: inconclusive
          }
          break;
        case Outcome::Zero:
          if (pos == n_ - 1) {
            declare(n_, p);
          } else {
            walk(pos + 1, Outcome::Zero, p);
          }
          break;
        case Outcome::Inconclusive:
          if (pos == n_ - 1) {
            ++visited;
          } else {
            walk(pos + 1, Outcome::Inconclusive, p);
          }
          break;
      }
    }
  }

  const StrengthSchedule& s_;
  std::size_t n_;
  std::size_t k_;
  double c_;
};

}  // namespace

EnumerationResult enumerate_outcomes(const StrengthSchedule& s, std::size_t cap) {
  const std::size_t n = s.length();
  if (n > cap) {
    throw DomainError(fmt::format("brute-force enumeration refused for n = {} (cap {})", n, cap));
  }
  EnumerationResult result;
  std::vector<double> d(n, 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    OutcomeWalker walker(s, k);
    walker.run();
    d[k - 1] = walker.detected;
    result.misidentified += walker.misidentified;
    result.strings_visited += walker.visited;
  }
  result.profile = DetectionProfile::from_per_position(std::move(d));
  return result;
}

DetectionProfile enumerate_strategy(const StrengthSchedule& s, std::size_t cap) {
  return enumerate_outcomes(s, cap).profile;
}

}  // namespace qcp
