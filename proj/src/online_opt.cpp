#include "qcp/online_opt.hpp"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "qcp/errors.hpp"
#include "qcp/global_bound.hpp"
#include "qcp/numeric.hpp"

namespace qcp {

namespace {

void require_length(std::size_t n, const char* what) {
  if (n < 2) throw DomainError(fmt::format("{} requires n >= 2, got {}", what, n));
}

void require_closed_form_range(Overlap c, const char* what) {
  if (c.value() > kClosedFormLimit) {
    throw OutOfValidity(fmt::format(
        "{} is only valid for c <= 1/2 (got c = {}); use the numeric optimizer", what, c.value()));
  }
}

std::vector<std::size_t> saturated_positions(const StrengthSchedule& s) {
  std::vector<std::size_t> out;
  const double c = s.overlap().value();
  if (c == 0.0) return out;
  const double bound = 1.0 / c;
  for (std::size_t j = 1; j < s.length(); ++j) {
    if (s.strength(j) >= bound * (1.0 - kStrengthSlack)) out.push_back(j);
  }
  return out;
}

OnlineSolution make_solution(StrengthSchedule s, Method method) {
  DetectionProfile profile = evaluate_strategy(s);
  auto saturated = saturated_positions(s);
  return OnlineSolution{std::move(s), std::move(profile), method, std::move(saturated)};
}

double clip_strength(double x, Overlap c) {
  return std::clamp(x, c.min_strength(), c.max_strength());
}

double average_success(const StrengthSchedule& s) { return evaluate_strategy(s).average; }

}  // namespace

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::ClosedForm:
      return "closed_form";
    case Method::Recursive:
      return "recursive";
    case Method::NumericBackward:
      return "numeric_backward";
    case Method::FixedFL:
      return "fixed_fl";
    case Method::SaturatedSL:
      return "saturated_sl";
  }
  return "unknown";
}

std::optional<double> RationalCoefficients::stationary_point() const noexcept {
  if (beta < 0.0 && delta < 0.0) return std::sqrt(delta / beta);
  return std::nullopt;
}

OnlineSolution closed_form_strengths(std::size_t n, Overlap c) {
  require_length(n, "closed_form_strengths");
  require_closed_form_range(c, "closed_form_strengths");
  const double cv = c.value();
  std::vector<double> x(n - 1);
  for (std::size_t j = 1; j <= n - 1; ++j) {
    x[j - 1] = (1.0 + cv) / (1.0 - signed_power(-cv, n - j));
  }
  return make_solution(StrengthSchedule(c, std::move(x)), Method::ClosedForm);
}

OnlineSolution recursive_strengths(std::size_t n, Overlap c) {
  require_length(n, "recursive_strengths");
  require_closed_form_range(c, "recursive_strengths");
  const double cv = c.value();
  if (cv == 0.0) {
    // Every ratio below degenerates to 0/0; the limit is the balanced schedule.
    return make_solution(StrengthSchedule(c, std::vector<double>(n - 1, 1.0)), Method::Recursive);
  }

  const auto gamma = global_efficiencies(n, c).gammas;
  std::vector<double> x(n - 1);

  const double first_den = 1.0 - gamma[0];
  if (first_den == 0.0) throw NumericDomainError("vanishing denominator at position 1", 1);
  x[0] = cv / first_den;

  for (std::size_t k = 1; k + 1 <= n - 1; ++k) {
    // x(k+1) = c [1 - gamma(k+1) / ((1-c^2) - c gamma(k) x(k))]^-1
    const double reach = (1.0 - cv * cv) - cv * gamma[k - 1] * x[k - 1];
    if (std::abs(reach) <= kTolerance && std::abs(gamma[k]) <= kTolerance) {
      // No conclusive-0 mass reaches position k+1, so its strength is free.
      x[k] = (1.0 + cv) / (1.0 - signed_power(-cv, n - k - 1));
      continue;
    }
    const double inner = reach == 0.0 ? 0.0 : 1.0 - gamma[k] / reach;
    const double next = cv / inner;
    if (reach == 0.0 || inner == 0.0 || !std::isfinite(next)) {
      throw NumericDomainError(
          fmt::format("vanishing denominator in the strength recursion at position {}", k + 1),
          k + 1);
    }
    x[k] = next;
  }
  return make_solution(StrengthSchedule(c, std::move(x)), Method::Recursive);
}

RationalCoefficients coordinate_objective(const StrengthSchedule& s, std::size_t position) {
  const Overlap c = s.overlap();
  double lo = c.min_strength();
  double hi = c.max_strength();
  if (c.value() == 0.0) {
    lo = 0.5;
    hi = 2.0;
  }
  if (!(hi - lo > 1e-6)) {
    throw ContractViolation(
        fmt::format("admissible strength interval [{}, {}] too narrow to sample", lo, hi));
  }
  (void)s.strength(position);  // range check

  const auto sample = [&](double t) {
    const double x = lo + (hi - lo) * t;
    return std::pair{x, average_success(s.with_strength(position, x))};
  };
  const std::array<std::pair<double, double>, 3> pts{sample(0.1), sample(0.5), sample(0.9)};

  Eigen::Matrix3d a;
  Eigen::Vector3d b;
  for (int i = 0; i < 3; ++i) {
    const auto [x, p] = pts[static_cast<std::size_t>(i)];
    a(i, 0) = 1.0;
    a(i, 1) = x;
    a(i, 2) = 1.0 / x;
    b(i) = p;
  }
  const Eigen::Vector3d coef = a.colPivHouseholderQr().solve(b);

  RationalCoefficients r{coef(0), coef(1), coef(2), 0.0};
  const auto [x4, p4] = sample(0.3);
  r.residual = std::abs(r(x4) - p4);
  return r;
}

OnlineSolution optimize_strengths(std::size_t n, Overlap c) {
  require_length(n, "optimize_strengths");
  const double cv = c.value();
  if (cv == 0.0 || cv == 1.0) {
    // c = 0: every schedule is perfect; c = 1: the interval collapses to {1}.
    return make_solution(StrengthSchedule(c, std::vector<double>(n - 1, 1.0)),
                         Method::NumericBackward);
  }

  // first[m] is the optimal first strength of a length-m subproblem; after a
  // conclusive 0 at position j-1 the remaining problem has length n-j+1, so
  // x_n(j) = first[n-j+1].
  std::vector<double> first(n + 1, 1.0);
  for (std::size_t m = 2; m <= n; ++m) {
    std::vector<double> x(m - 1);
    x[0] = 1.0;
    for (std::size_t j = 2; j <= m - 1; ++j) x[j - 1] = first[m - j + 1];
    const StrengthSchedule sub(c, std::move(x));

    const RationalCoefficients p = coordinate_objective(sub, 1);
    std::vector<double> candidates{c.min_strength(), c.max_strength()};
    if (auto stationary = p.stationary_point()) candidates.push_back(clip_strength(*stationary, c));

    double best_x = candidates.front();
    double best_p = -1.0;
    for (double cand : candidates) {
      const double value = average_success(sub.with_strength(1, cand));
      if (value > best_p) {
        best_p = value;
        best_x = cand;
      }
    }
    first[m] = best_x;
  }

  std::vector<double> x(n - 1);
  for (std::size_t j = 1; j <= n - 1; ++j) x[j - 1] = first[n - j + 1];
  return make_solution(StrengthSchedule(c, std::move(x)), Method::NumericBackward);
}

double total_saturation_point() {
  return bisect_root([](double c) { return c * c * c - 2.0 * c * c - 2.0 * c + 2.0; }, 0.0, 1.0);
}

double third_from_last_optimum(double c) { return 1.0 / std::sqrt(c * (2.0 - c) * (1.0 - c * c)); }

double fl_default_strength(Overlap c) { return clip_strength(1.0 + c.value(), c); }

OnlineSolution fl_solution(std::size_t n, Overlap c, double x) {
  require_length(n, "fl_solution");
  if (!admissible_strength(x, c)) {
    throw InvalidMeasurement(
        fmt::format("fixed strength {} outside [{}, {}]", x, c.value(), c.max_strength()));
  }
  std::vector<double> strengths(n - 1, x);
  strengths.back() = 1.0;
  return make_solution(StrengthSchedule(c, std::move(strengths)), Method::FixedFL);
}

OnlineSolution fl_solution(std::size_t n, Overlap c) {
  return fl_solution(n, c, fl_default_strength(c));
}

double fl_exact_success(std::size_t n, Overlap c, double x) {
  require_length(n, "fl_exact_success");
  if (!admissible_strength(x, c)) {
    throw InvalidMeasurement(
        fmt::format("fixed strength {} outside [{}, {}]", x, c.value(), c.max_strength()));
  }
  const double cv = c.value();
  if (cv == 0.0) return 1.0;
  if (x == cv) throw DomainError("the G(k) closed form is singular at x = c");

  const double q = cv * cv - cv * x;
  const double scale = cv * x / (1.0 + cv * x - cv * cv);
  // G(k) = cx (1 - q^k) / (1 + cx - c^2), also evaluated formally at k = -1, 0.
  const auto g = [&](long k) {
    const double qk = k >= 0 ? signed_power(q, static_cast<std::size_t>(k))
                             : 1.0 / signed_power(q, static_cast<std::size_t>(-k));
    return scale * (1.0 - qk);
  };

  const double detect = 1.0 - cv / x;
  double sum = 0.0;
  for (long k = 1; k <= static_cast<long>(n) - 2; ++k) {
    const double gk = g(k - 2);
    sum += (gk * (1.0 - cv * cv) + (1.0 - gk) * (1.0 - cv * x)) * detect;
  }
  sum += (1.0 - cv) * (2.0 - (1.0 - cv) * g(static_cast<long>(n) - 2));
  return sum / static_cast<double>(n);
}

double fl_success_asymptotic(Overlap c, double x) {
  if (!admissible_strength(x, c)) {
    throw InvalidMeasurement(
        fmt::format("fixed strength {} outside [{}, {}]", x, c.value(), c.max_strength()));
  }
  const double cv = c.value();
  return (1.0 - cv * cv) * (1.0 - cv / x) / (1.0 + cv * x - cv * cv);
}

OnlineSolution sl_solution(std::size_t n, Overlap c) {
  require_length(n, "sl_solution");
  if (c.value() == 0.0) throw DomainError("saturated strengths 1/c are unbounded at c = 0");
  std::vector<double> strengths(n - 1, 1.0 / c.value());
  strengths.back() = 1.0;
  return make_solution(StrengthSchedule(c, std::move(strengths)), Method::SaturatedSL);
}

double sl_success_asymptotic(Overlap c) {
  const double c2 = c.value() * c.value();
  return (1.0 - c2) * (1.0 - c2) / (2.0 - c2);
}

double asymptotic_optimal_success(Overlap c) { return (1.0 - c.value()) / (1.0 + c.value()); }

OnlineSolution best_online(std::size_t n, Overlap c) {
  require_length(n, "best_online");
  if (c.value() <= kClosedFormLimit) return closed_form_strengths(n, c);
  return optimize_strengths(n, c);
}

}  // namespace qcp
