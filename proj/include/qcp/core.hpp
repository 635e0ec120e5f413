#pragma once

// Single-particle measurement model and exact evaluation of online
// (one-way adaptive) strategies for locating a change point in a string of
// n particles: the first k-1 particles are |0>, the rest are |phi>.
//
// Positions are 1-based throughout the public interface, matching the
// physical labelling of particles. Containers are 0-based underneath.

#include <cstddef>
#include <span>
#include <vector>

namespace qcp {

/// Absolute tolerance used for equality checks on probabilities.
inline constexpr double kTolerance = 1e-12;

/// Relative slack applied when checking c <= x <= 1/c, so that closed-form
/// strengths landing on a boundary up to rounding are still accepted.
inline constexpr double kStrengthSlack = 1e-12;

/// Overlap c = <0|phi>, real and in [0, 1].
class Overlap {
 public:
  explicit Overlap(double c);

  double value() const noexcept { return c_; }
  /// 1/c, or +inf at c = 0.
  double max_strength() const noexcept;
  double min_strength() const noexcept { return c_; }

 private:
  double c_;
};

enum class ParticleState { Zero, Phi };
enum class Outcome { Zero, Phi, Inconclusive };

struct OutcomeDistribution {
  double zero = 0.0;
  double phi = 0.0;
  double inconclusive = 0.0;

  double operator[](Outcome o) const noexcept {
    switch (o) {
      case Outcome::Zero:
        return zero;
      case Outcome::Phi:
        return phi;
      case Outcome::Inconclusive:
        return inconclusive;
    }
    return 0.0;
  }
};

/// True when x is an admissible strength for overlap c. For c = 0 any
/// finite x > 0 is admissible.
bool admissible_strength(double x, Overlap c) noexcept;

/// Optimal unambiguous two-state measurement with bias x = sqrt(eta_phi/eta_0).
class LocalMeasurement {
 public:
  /// Throws InvalidMeasurement when x is outside [c, 1/c].
  LocalMeasurement(double strength, Overlap c);

  double strength() const noexcept { return x_; }
  Overlap overlap() const noexcept { return c_; }

 private:
  double x_;
  Overlap c_;
};

/// Pr(0|0) = 1 - cx, Pr(I|0) = cx, Pr(phi|phi) = 1 - c/x, Pr(I|phi) = c/x.
OutcomeDistribution outcome_distribution(const LocalMeasurement& m, ParticleState state);

/// Strengths x_n(1..n-1) used after a conclusive-0 outcome (position 1 is
/// treated as preceded by 0). After an inconclusive outcome the next
/// measurement always uses strength c; that rule is implicit.
class StrengthSchedule {
 public:
  /// Throws DomainError for fewer than one strength and InvalidMeasurement
  /// (carrying the 1-based position) for an inadmissible entry.
  StrengthSchedule(Overlap c, std::vector<double> strengths);

  /// Number of particles n.
  std::size_t length() const noexcept { return strengths_.size() + 1; }
  Overlap overlap() const noexcept { return c_; }
  /// x_n(position), position in 1..n-1.
  double strength(std::size_t position) const;
  std::span<const double> strengths() const noexcept { return strengths_; }

  /// Copy with one entry replaced; validates the new value.
  StrengthSchedule with_strength(std::size_t position, double x) const;

 private:
  Overlap c_;
  std::vector<double> strengths_;
};

/// Per-position detection probabilities D_n(k) and their uniform average.
struct DetectionProfile {
  std::vector<double> per_position;  // per_position[k-1] = D_n(k)
  double average = 0.0;

  static DetectionProfile from_per_position(std::vector<double> d);

  std::size_t length() const noexcept { return per_position.size(); }
  double at(std::size_t k) const { return per_position.at(k - 1); }
};

/// Distribution of the last outcome while every measured particle is |0>.
/// p_inconclusive after j steps is G(j) in the fixed-strength analysis.
struct AliveState {
  double p0 = 1.0;
  double p_inconclusive = 0.0;
};

/// One measurement on a |0> particle: strength x_next after a 0 and c after an I.
AliveState alive_step(AliveState s, Overlap c, double x_next);

/// Exact D_n(k) by forward recursion over the alive state, O(n).
DetectionProfile evaluate_strategy(const StrengthSchedule& s);

inline constexpr std::size_t kDefaultEnumerationCap = 12;

struct EnumerationResult {
  DetectionProfile profile;
  /// Total probability, summed over hypotheses, of outcome strings that
  /// declare a wrong change point. Zero for every valid schedule.
  double misidentified = 0.0;
  std::size_t strings_visited = 0;
};

/// Brute-force oracle: walks every outcome string under each hypothesis and
/// applies the detection rule literally. Exponential in n; refuses n > cap.
EnumerationResult enumerate_outcomes(const StrengthSchedule& s,
                                     std::size_t cap = kDefaultEnumerationCap);

DetectionProfile enumerate_strategy(const StrengthSchedule& s,
                                    std::size_t cap = kDefaultEnumerationCap);

}  // namespace qcp
