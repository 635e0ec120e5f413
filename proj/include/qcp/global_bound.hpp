#pragma once

// Optimal collective-measurement bounds: efficiencies gamma_n(k), success
// probabilities in both optimal regimes, the critical overlap separating
// them, and a feasibility certificate for the unambiguous POVM expressed on
// the n x n Gram matrix of the source states.

#include <cstddef>
#include <optional>
#include <vector>

#include "qcp/core.hpp"

namespace qcp {

enum class Regime { Plain, Primed };

struct EfficiencyVector {
  std::size_t n = 0;
  std::vector<double> gammas;  // gammas[k-1] = gamma_n(k)
  Regime regime = Regime::Plain;

  double at(std::size_t k) const { return gammas.at(k - 1); }
  double mean() const;
};

/// Gram matrix of the source states, G[k][l] = <Psi_k|Psi_l> = c^|k-l|.
class GramMatrix {
 public:
  static GramMatrix source_states(std::size_t n, Overlap c);

  /// Arbitrary row-major n x n matrix; symmetry is checked where it matters.
  GramMatrix(std::size_t n, std::vector<double> entries);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t row, std::size_t col) const { return entries_[row * n_ + col]; }
  bool is_symmetric(double tol = 0.0) const;

 private:
  std::size_t n_;
  std::vector<double> entries_;
};

inline constexpr double kPsdTolerance = 1e-9;

struct ValidityReport {
  double min_eigenvalue = 0.0;
  bool gamma_range_ok = false;
  bool feasible = false;
  double tolerance = kPsdTolerance;
};

/// gamma_n(k) = sum_j (-c)^|k-j|, evaluated through its closed form.
EfficiencyVector global_efficiencies(std::size_t n, Overlap c);

/// The defining O(n) sum for a single position; kept as an independent route.
double global_efficiency_sum(std::size_t n, Overlap c, std::size_t k);

/// (1-c)/(1+c) + 2c(1-(-c)^n) / (n(1+c)^2).
double global_success(std::size_t n, Overlap c);

/// Efficiencies above the critical overlap; defined for n >= 3.
/// Throws SingularityError when 1 + (-c)^(n-3) vanishes.
EfficiencyVector primed_efficiencies(std::size_t n, Overlap c);
double primed_success(std::size_t n, Overlap c);

/// Root in (0,1) of gamma_n(2) = 0, i.e. 1 - c - c^2 - (-c)^(n-1) = 0.
/// std::nullopt when gamma_n(2) stays non-negative (n = 2 and n = 4).
std::optional<double> critical_overlap(std::size_t n);

struct GlobalOptimum {
  EfficiencyVector efficiencies;
  double success = 0.0;
};

/// Piecewise optimum: plain regime up to the critical overlap, primed above.
GlobalOptimum optimal_global(std::size_t n, Overlap c);

/// Success of optimal_global without materialising the vector.
double optimal_global_success(std::size_t n, Overlap c);

/// Checks G - diag(gamma) >= 0 (within tol) and gamma in [-tol, 1 + tol].
ValidityReport validate_unambiguous(const GramMatrix& g, const EfficiencyVector& e,
                                    double tol = kPsdTolerance);

}  // namespace qcp
