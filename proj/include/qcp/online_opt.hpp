#pragma once

// Construction of online strategies: the closed-form optimal schedule for
// c <= 1/2 and its recursive derivation, a backward one-variable optimizer
// that handles saturated strengths, and the fixed-strength (FL) and
// saturated (SL) families with their asymptotic success probabilities.

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "qcp/core.hpp"

namespace qcp {

enum class Method { ClosedForm, Recursive, NumericBackward, FixedFL, SaturatedSL };

std::string_view to_string(Method m) noexcept;

struct OnlineSolution {
  StrengthSchedule schedule;
  DetectionProfile profile;
  Method method;
  /// 1-based positions whose strength sits at the upper bound 1/c.
  std::vector<std::size_t> saturated_positions;

  double success() const noexcept { return profile.average; }
};

/// P(x) = alpha + beta x + delta / x: the average success as a function of
/// a single strength with every other strength held fixed.
struct RationalCoefficients {
  double alpha = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  /// |P(x4) - evaluate_strategy| at a fourth sample point.
  double residual = 0.0;

  double operator()(double x) const noexcept { return alpha + beta * x + delta / x; }
  /// Stationary point sqrt(delta/beta) when the restriction is concave, else nullopt.
  std::optional<double> stationary_point() const noexcept;
};

/// Largest c for which the closed-form schedule is admissible.
inline constexpr double kClosedFormLimit = 0.5;

/// x_n(j) = (1+c)/(1-(-c)^(n-j)). Throws OutOfValidity for c > 1/2.
OnlineSolution closed_form_strengths(std::size_t n, Overlap c);

/// Same schedule obtained by matching D_n(k) = gamma_n(k) one position at a time.
/// Throws OutOfValidity for c > 1/2 and NumericDomainError on a vanishing denominator.
OnlineSolution recursive_strengths(std::size_t n, Overlap c);

/// Fits the rational restriction in the strength at `position` from three
/// exact evaluations and certifies it at a fourth.
RationalCoefficients coordinate_objective(const StrengthSchedule& s, std::size_t position);

/// Backward pass over subproblem lengths m = 2..n, maximizing the first
/// strength of each subproblem with the tail fixed and clipping to [c, 1/c].
OnlineSolution optimize_strengths(std::size_t n, Overlap c);

/// Root in (0,1) of c^3 - 2c^2 - 2c + 2, beyond which every strength but
/// the last one saturates.
double total_saturation_point();

/// Unclipped optimum 1/sqrt(c(2-c)(1-c^2)) of x_n(n-3) when x_n(n-2) = 1/c.
double third_from_last_optimum(double c);

/// 1 + c clipped to the admissible interval.
double fl_default_strength(Overlap c);

/// Constant strength x at positions 1..n-2, balanced last measurement.
OnlineSolution fl_solution(std::size_t n, Overlap c, double x);
OnlineSolution fl_solution(std::size_t n, Overlap c);

/// Finite-n FL success through the G(k) closed form (independent of the DP).
double fl_exact_success(std::size_t n, Overlap c, double x);

/// (1-c^2)(1-c/x)/(1+cx-c^2); maximal value (1-c)/(1+c) at x = 1+c.
double fl_success_asymptotic(Overlap c, double x);

/// Every strength at 1/c except the balanced last one. Throws DomainError at c = 0.
OnlineSolution sl_solution(std::size_t n, Overlap c);

/// (1-c^2)^2 / (2-c^2).
double sl_success_asymptotic(Overlap c);

/// Large-n optimum (1-c)/(1+c), shared by both global regimes.
double asymptotic_optimal_success(Overlap c);

/// Closed form for c <= 1/2, backward optimizer above.
OnlineSolution best_online(std::size_t n, Overlap c);

}  // namespace qcp
