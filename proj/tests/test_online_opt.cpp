#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "qcp/errors.hpp"
#include "qcp/global_bound.hpp"
#include "qcp/online_opt.hpp"

using namespace qcp;

namespace {

std::vector<double> overlap_grid(double step, double lo, double hi) {
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double c = std::round((lo + i * step) * 1e12) / 1e12;
    if (c > hi + 1e-12) break;
    out.push_back(c);
  }
  return out;
}

// Golden-section maximization of a unimodal function on [lo, hi].
template <typename F>
double golden_section_max(F f, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > 1e-12) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    }
  }
  return 0.5 * (a + b);
}

double sl_gap(double c) { return (1 - c) / (1 + c) - (1 - c * c) * (1 - c * c) / (2 - c * c); }

}  // namespace

TEST_CASE("closed_form_strengths for four particles") {
  for (double c : {0.0, 0.1, 0.3, 0.49, 0.5}) {
    const auto sol = closed_form_strengths(4, Overlap(c));
    CHECK(sol.method == Method::ClosedForm);
    CHECK(std::abs(sol.schedule.strength(1) - 1 / (1 - c + c * c)) <= 1e-12);
    CHECK(std::abs(sol.schedule.strength(2) - 1 / (1 - c)) <= 1e-12);
    CHECK(std::abs(sol.schedule.strength(3) - 1.0) <= 1e-12);
  }
  // x(2) = 1/(1-c) reaches 1/c exactly at c = 1/2.
  const auto edge = closed_form_strengths(4, Overlap(0.5));
  REQUIRE(edge.saturated_positions.size() == 1);
  CHECK(edge.saturated_positions[0] == 2);

  CHECK_THROWS_AS(closed_form_strengths(4, Overlap(0.51)), OutOfValidity);
  CHECK_THROWS_AS(closed_form_strengths(1, Overlap(0.2)), DomainError);
}

TEST_CASE("closed_form_strengths with orthogonal states") {
  for (std::size_t n : {2, 9, 40}) {
    const auto sol = closed_form_strengths(n, Overlap(0.0));
    for (double x : sol.schedule.strengths()) CHECK(x == 1.0);
    CHECK(sol.success() == 1.0);
  }
}

TEST_CASE("online efficiencies match the global ones for c <= 1/2") {
  const auto sol = closed_form_strengths(20, Overlap(0.4));
  const auto gamma = global_efficiencies(20, Overlap(0.4));
  for (std::size_t k = 1; k <= 20; ++k) CHECK(std::abs(sol.profile.at(k) - gamma.at(k)) <= 1e-12);

  double worst = 0.0;
  for (std::size_t n = 2; n <= 25; ++n) {
    for (double cv : overlap_grid(0.05, 0.0, 0.5)) {
      const Overlap c(cv);
      const auto p = closed_form_strengths(n, c).profile;
      const auto g = global_efficiencies(n, c);
      for (std::size_t k = 1; k <= n; ++k) worst = std::max(worst, std::abs(p.at(k) - g.at(k)));
      worst = std::max(worst, std::abs(p.average - global_success(n, c)));
      // The last efficiency follows from the second to last one.
      if (n >= 3) {
        worst = std::max(worst, std::abs(p.at(n) - ((1 - cv * cv) - cv * g.at(n - 1))));
      }
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("recursive_strengths") {
  const auto sol = recursive_strengths(4, Overlap(0.3));
  CHECK(sol.method == Method::Recursive);
  CHECK(std::abs(sol.schedule.strength(1) - 1.0 / 0.79) <= 1e-10);
  CHECK(std::abs(sol.schedule.strength(2) - 1.0 / 0.7) <= 1e-10);
  CHECK(std::abs(sol.schedule.strength(3) - 1.0) <= 1e-10);
  CHECK(std::abs(sol.schedule.strength(1) - 1.265823) <= 1e-6);
  CHECK(std::abs(sol.schedule.strength(2) - 1.428571) <= 1e-6);

  for (double cv : overlap_grid(0.05, 0.0, 0.5)) {
    CHECK(std::abs(recursive_strengths(2, Overlap(cv)).schedule.strength(1) - 1.0) <= 1e-12);
  }

  for (std::size_t n = 2; n <= 25; ++n) {
    for (double cv : overlap_grid(0.05, 0.0, 0.5)) {
      const Overlap c(cv);
      const auto closed = closed_form_strengths(n, c).schedule;
      const auto rec = recursive_strengths(n, c).schedule;
      for (std::size_t j = 1; j < n; ++j) {
        CHECK(std::abs(closed.strength(j) - rec.strength(j)) <= 1e-10);
        // Shift identity: x_n(j) = x_{n-j+1}(1).
        CHECK(std::abs(closed.strength(j) -
                       closed_form_strengths(n - j + 1, c).schedule.strength(1)) <= 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(recursive_strengths(6, Overlap(0.7)), OutOfValidity);

  // n = 3, c = 1/2: x(1) = 1/c leaves no conclusive-0 mass at position 2.
  const auto three = recursive_strengths(3, Overlap(0.5)).schedule;
  CHECK(std::abs(three.strength(1) - 2.0) <= 1e-12);
  CHECK(std::abs(three.strength(2) - 1.0) <= 1e-12);
}

TEST_CASE("coordinate_objective") {
  for (double c : {0.1, 0.5, 0.9}) {
    const auto r = coordinate_objective(StrengthSchedule(Overlap(c), {1.0}), 1);
    CHECK(std::abs(r.alpha - 1.0) <= 1e-10);
    CHECK(std::abs(r.beta + c / 2) <= 1e-10);
    CHECK(std::abs(r.delta + c / 2) <= 1e-10);
    REQUIRE(r.stationary_point().has_value());
    CHECK(std::abs(*r.stationary_point() - 1.0) <= 1e-8);
  }

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int probe = 0; probe < 300; ++probe) {
    const std::size_t n = 2 + static_cast<std::size_t>(unit(rng) * 30);
    const double c = 0.02 + 0.96 * unit(rng);
    std::vector<double> x(n - 1);
    for (auto& xi : x) xi = c + (1 / c - c) * unit(rng);
    const StrengthSchedule s(Overlap(c), x);
    const std::size_t j = 1 + static_cast<std::size_t>(unit(rng) * static_cast<double>(n - 1));
    worst = std::max(worst, coordinate_objective(s, j).residual);
  }
  CHECK(worst <= 1e-10);

  CHECK_THROWS_AS(coordinate_objective(StrengthSchedule(Overlap(1.0), {1.0, 1.0}), 1),
                  ContractViolation);
}

TEST_CASE("optimize_strengths reproduces the closed form below c = 1/2") {
  const auto numeric = optimize_strengths(10, Overlap(0.4)).schedule;
  const auto closed = closed_form_strengths(10, Overlap(0.4)).schedule;
  for (std::size_t j = 1; j < 10; ++j) {
    CHECK(std::abs(numeric.strength(j) - closed.strength(j)) <= 1e-9);
  }
  for (double c : {0.1, 0.2, 0.3, 0.4, 0.49}) {
    const auto s = optimize_strengths(4, Overlap(c)).schedule;
    CHECK(std::abs(s.strength(1) - 1 / (1 - c + c * c)) <= 1e-9);
    CHECK(std::abs(s.strength(2) - 1 / (1 - c)) <= 1e-9);
    CHECK(std::abs(s.strength(3) - 1.0) <= 1e-9);
  }
}

TEST_CASE("optimize_strengths saturation structure") {
  const double cs = total_saturation_point();
  for (std::size_t n : {4, 5, 10, 31}) {
    for (double cv : overlap_grid(0.01, 0.01, 0.99)) {
      const Overlap c(cv);
      const auto s = optimize_strengths(n, c).schedule;
      CHECK(std::abs(s.strength(n - 1) - 1.0) <= 1e-9);
      CHECK(std::abs(s.strength(n - 2) - std::min(1 / (1 - cv), 1 / cv)) <= 1e-9);
      if (n >= 4 && cv > 0.5 && cv < cs) {
        CHECK(std::abs(s.strength(n - 3) - std::min(third_from_last_optimum(cv), 1 / cv)) <= 1e-9);
      }
    }
  }

  const auto s6 = optimize_strengths(10, Overlap(0.6)).schedule;
  CHECK(std::abs(s6.strength(7) - std::min(third_from_last_optimum(0.6), 1 / 0.6)) <= 1e-9);

  const auto sol = optimize_strengths(10, Overlap(0.75));
  for (std::size_t j = 1; j <= 8; ++j) CHECK(std::abs(sol.schedule.strength(j) - 1 / 0.75) <= 1e-9);
  CHECK(std::abs(sol.schedule.strength(9) - 1.0) <= 1e-9);
  CHECK(sol.saturated_positions.size() == 8);
}

TEST_CASE("optimize_strengths is a local maximum") {
  for (std::size_t n : {3, 6, 12, 31}) {
    for (double cv : overlap_grid(0.05, 0.05, 0.95)) {
      const Overlap c(cv);
      const auto sol = optimize_strengths(n, c);
      for (std::size_t j = 1; j < n; ++j) {
        const double x = sol.schedule.strength(j);
        for (double dx : {-1e-3, 1e-3}) {
          if (!admissible_strength(x + dx, c)) continue;
          const double perturbed = evaluate_strategy(sol.schedule.with_strength(j, x + dx)).average;
          CHECK(perturbed <= sol.success() + 1e-15);
        }
      }
    }
  }
}

TEST_CASE("optimize_strengths shift property") {
  for (double cv : {0.3, 0.55, 0.62, 0.68, 0.8}) {
    const Overlap c(cv);
    const auto big = optimize_strengths(25, c).schedule;
    for (std::size_t j = 1; j < 25; ++j) {
      const double sub_first = optimize_strengths(25 - j + 1, c).schedule.strength(1);
      CHECK(std::abs(big.strength(j) - sub_first) <= 1e-9);
    }
  }
}

TEST_CASE("golden-section cross-check of the backward step") {
  for (double cv : {0.2, 0.55, 0.65, 0.72}) {
    const Overlap c(cv);
    const std::size_t n = 9;
    const auto sol = optimize_strengths(n, c);
    const auto objective = [&](double x) {
      return evaluate_strategy(sol.schedule.with_strength(1, x)).average;
    };
    const double x = golden_section_max(objective, cv, 1 / cv);
    CHECK(std::abs(objective(x) - sol.success()) <= 1e-12);
    CHECK(std::abs(x - sol.schedule.strength(1)) <= 1e-5);
  }
}

TEST_CASE("total saturation point") {
  const double cs = total_saturation_point();
  CHECK(std::abs(cs - 0.69) <= 0.005);
  const auto f = [](double c) { return c * c * c - 2 * c * c - 2 * c + 2; };
  CHECK(f(0.6) > 0);
  CHECK(f(0.7) < 0);
  CHECK(std::abs(third_from_last_optimum(cs) - 1 / cs) <= 1e-10);
}

TEST_CASE("fixed local strategy") {
  const auto fl = fl_solution(200, Overlap(0.3), 1.3);
  CHECK(fl.method == Method::FixedFL);
  CHECK(std::abs(fl.success() - 0.7 / 1.3) <= 2.0 / 200);
  CHECK(std::abs(0.7 / 1.3 - 0.538462) <= 1e-6);

  CHECK(fl_solution(10, Overlap(0.0)).success() == 1.0);
  CHECK(fl_exact_success(10, Overlap(0.0), 1.0) == 1.0);

  CHECK(std::abs(fl_solution(31, Overlap(0.55)).success() -
                 optimal_global_success(31, Overlap(0.55))) <= 0.001);

  for (std::size_t n : {2, 3, 4, 5, 10, 50, 200}) {
    for (double c : {0.1, 0.3, 0.5, 0.6}) {
      for (double x : {1 + c, 1.0, 0.5 * (c + 1 / c)}) {
        if (x > 1 / c) continue;
        CHECK(std::abs(fl_exact_success(n, Overlap(c), x) -
                       fl_solution(n, Overlap(c), x).success()) <= 1e-10);
      }
    }
  }

  for (double c : {0.1, 0.4, 0.6}) {
    const double best = fl_success_asymptotic(Overlap(c), 1 + c);
    CHECK(std::abs(best - (1 - c) / (1 + c)) <= 1e-12);
    CHECK(fl_success_asymptotic(Overlap(c), 1 + c - 0.01) < best);
    CHECK(fl_success_asymptotic(Overlap(c), 1 + c + 0.01) < best);
  }

  CHECK(std::abs(fl_default_strength(Overlap(0.7)) - 1 / 0.7) <= 1e-15);
  CHECK(std::abs(fl_default_strength(Overlap(0.4)) - 1.4) <= 1e-15);
  CHECK_THROWS_AS(fl_solution(10, Overlap(0.7), 1.7), InvalidMeasurement);
  CHECK_THROWS_AS(fl_success_asymptotic(Overlap(0.7), 1.7), InvalidMeasurement);
}

TEST_CASE("saturated local strategy") {
  for (std::size_t n : {4, 8, 31}) {
    for (double c : {0.2, 0.62, 0.9}) {
      const auto sol = sl_solution(n, Overlap(c));
      CHECK(sol.method == Method::SaturatedSL);
      CHECK(std::abs(sol.profile.at(1) - (1 - c * c)) <= 1e-12);
      CHECK(std::abs(sol.profile.at(2)) <= 1e-12);
      // D_n(k) = (1-c^2)^2 F(k-2) for 3 <= k <= n-2, F the x = 1/c inconclusive probability.
      for (std::size_t k = 3; k + 2 <= n; ++k) {
        const double kk = static_cast<double>(k) - 2;
        const double f = (1 - std::pow(c * c - 1, kk)) / (2 - c * c);
        CHECK(std::abs(sol.profile.at(k) - (1 - c * c) * (1 - c * c) * f) <= 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(sl_solution(10, Overlap(0.0)), DomainError);

  // Finite-n success approaches the asymptote.
  for (double c : {0.3, 0.7, 0.9}) {
    CHECK(std::abs(sl_solution(2000, Overlap(c)).success() - sl_success_asymptotic(Overlap(c))) <=
          2e-3);
  }

  const double golden = (std::sqrt(5.0) - 1) / 2;
  CHECK(std::abs(sl_gap(golden)) <= 1e-12);
  CHECK(std::abs(sl_success_asymptotic(Overlap(0.89)) -
                 (1 - 0.7921) * (1 - 0.7921) / (2 - 0.7921)) <= 1e-15);
}

TEST_CASE("best_online") {
  CHECK(std::abs(best_online(31, Overlap(0.4)).success() - global_success(31, Overlap(0.4))) <=
        1e-12);

  const double online = best_online(31, Overlap(0.8)).success();
  const double global = optimal_global_success(31, Overlap(0.8));
  CHECK(online < global);
  CHECK(global - online <= 0.03);

  CHECK(best_online(31, Overlap(1.0)).success() == 0.0);
  CHECK(best_online(31, Overlap(0.999)).success() < 1e-3);
}

TEST_CASE("ordering SL <= best online <= global optimum") {
  for (std::size_t n = 3; n <= 31; n += 2) {
    for (double cv : overlap_grid(0.05, 0.05, 0.95)) {
      const Overlap c(cv);
      const double best = best_online(n, c).success();
      CHECK(sl_solution(n, c).success() <= best + 1e-12);
      CHECK(best <= optimal_global_success(n, c) + 1e-12);
    }
  }
  for (std::size_t n = 4; n <= 30; n += 2) {
    for (double cv : overlap_grid(0.05, 0.05, 0.95)) {
      const Overlap c(cv);
      CHECK(best_online(n, c).success() <= optimal_global_success(n, c) + 1e-12);
    }
  }
}
