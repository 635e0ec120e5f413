#pragma once

#include <boost/math/tools/roots.hpp>
#include <cstddef>
#include <utility>

namespace qcp {

/// base^exp for a non-negative integer exponent, by repeated squaring.
/// Keeps the sign of negative bases exact, unlike std::pow with a double exponent.
constexpr double signed_power(double base, std::size_t exp) noexcept {
  double result = 1.0;
  while (exp > 0) {
    if (exp & 1U) result *= base;
    base *= base;
    exp >>= 1U;
  }
  return result;
}

/// Bisection to an absolute bracket width of 1e-13; f(lo) and f(hi) must differ in sign.
template <typename F>
double bisect_root(F&& f, double lo, double hi) {
  const auto converged = [](double a, double b) { return b - a <= 1e-13; };
  const auto bracket = boost::math::tools::bisect(std::forward<F>(f), lo, hi, converged);
  return 0.5 * (bracket.first + bracket.second);
}

}  // namespace qcp
