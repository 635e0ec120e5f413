#include "qcp/global_bound.hpp"

#include <fmt/format.h>

#include <Eigen/Eigenvalues>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <utility>

#include "qcp/errors.hpp"
#include "qcp/numeric.hpp"

namespace qcp {

namespace {

void require_length(std::size_t n, std::size_t min_n, const char* what) {
  if (n < min_n) {
    throw DomainError(fmt::format("{} requires n >= {}, got {}", what, min_n, n));
  }
}

std::size_t abs_diff(std::size_t a, std::size_t b) { return a > b ? a - b : b - a; }

}  // namespace

double EfficiencyVector::mean() const {
  if (gammas.empty()) return 0.0;
  return std::accumulate(gammas.begin(), gammas.end(), 0.0) / static_cast<double>(gammas.size());
}

GramMatrix GramMatrix::source_states(std::size_t n, Overlap c) {
  std::vector<double> entries(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t l = 0; l < n; ++l) {
      entries[k * n + l] = signed_power(c.value(), abs_diff(k, l));
    }
  }
  return GramMatrix(n, std::move(entries));
}

GramMatrix::GramMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), entries_(std::move(entries)) {
  if (entries_.size() != n_ * n_) {
    throw ContractViolation(fmt::format("Gram matrix of order {} needs {} entries, got {}", n_,
                                        n_ * n_, entries_.size()));
  }
}

bool GramMatrix::is_symmetric(double tol) const {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    }
  }
  return true;
}

double global_efficiency_sum(std::size_t n, Overlap c, std::size_t k) {
  require_length(n, 2, "global_efficiency_sum");
  if (k == 0 || k > n) throw DomainError(fmt::format("position {} outside 1..{}", k, n));
  double sum = 0.0;
  for (std::size_t j = 1; j <= n; ++j) sum += signed_power(-c.value(), abs_diff(k, j));
  return sum;
}

EfficiencyVector global_efficiencies(std::size_t n, Overlap c) {
  require_length(n, 2, "global_efficiencies");
  const double cv = c.value();
  EfficiencyVector e;
  e.n = n;
  e.regime = Regime::Plain;
  e.gammas.resize(n);
  for (std::size_t k = 1; k <= n; ++k) {
    e.gammas[k - 1] = (1.0 - cv - signed_power(-cv, k) - signed_power(-cv, n - k + 1)) / (1.0 + cv);
  }
  return e;
}

double global_success(std::size_t n, Overlap c) {
  require_length(n, 2, "global_success");
  const double cv = c.value();
  const double nd = static_cast<double>(n);
  return (1.0 - cv) / (1.0 + cv) +
         2.0 * cv * (1.0 - signed_power(-cv, n)) / (nd * (1.0 + cv) * (1.0 + cv));
}

namespace {

double primed_denominator(std::size_t n, Overlap c) {
  const double den = 1.0 + signed_power(-c.value(), n - 3);
  if (std::abs(den) < 1e-12) {
    throw SingularityError(fmt::format("1 + (-c)^(n-3) vanishes at n = {}, c = {}", n, c.value()));
  }
  return den;
}

}  // namespace

EfficiencyVector primed_efficiencies(std::size_t n, Overlap c) {
  require_length(n, 3, "primed_efficiencies");
  const double cv = c.value();
  const double den = primed_denominator(n, c);
  EfficiencyVector e = global_efficiencies(n, c);
  const double gamma2 = e.gammas[1];
  for (std::size_t k = 1; k <= n; ++k) {
    const double shape = signed_power(-cv, abs_diff(k, 2)) + signed_power(-cv, abs_diff(n, k + 1));
    e.gammas[k - 1] -= gamma2 * shape / den;
  }
  e.regime = Regime::Primed;
  return e;
}

double primed_success(std::size_t n, Overlap c) {
  require_length(n, 3, "primed_success");
  const double den = primed_denominator(n, c);
  const double gamma2 = global_efficiencies(n, c).gammas[1];
  return global_success(n, c) - 2.0 / static_cast<double>(n) * gamma2 * gamma2 / den;
}

std::optional<double> critical_overlap(std::size_t n) {
  require_length(n, 2, "critical_overlap");
  // (1 + c) gamma_n(2); shares its roots in (0, 1) with gamma_n(2).
  const auto f = [n](double c) { return 1.0 - c - c * c - signed_power(-c, n - 1); };

  // For even n the polynomial also vanishes at c = 1, so bracket by a scan
  // that stays strictly inside (0, 1).
  constexpr int kScan = 1000;
  double lo = 0.0;
  for (int i = 1; i < kScan; ++i) {
    const double hi = static_cast<double>(i) / kScan;
    if (f(hi) <= 0.0) {
      if (f(hi) == 0.0) return hi;
      return bisect_root(f, lo, hi);
    }
    lo = hi;
  }
  return std::nullopt;
}

GlobalOptimum optimal_global(std::size_t n, Overlap c) {
  require_length(n, 2, "optimal_global");
  const auto threshold = critical_overlap(n);
  if (!threshold || c.value() <= *threshold) {
    return {global_efficiencies(n, c), global_success(n, c)};
  }
  return {primed_efficiencies(n, c), primed_success(n, c)};
}

double optimal_global_success(std::size_t n, Overlap c) {
  require_length(n, 2, "optimal_global_success");
  const auto threshold = critical_overlap(n);
  if (!threshold || c.value() <= *threshold) return global_success(n, c);
  return primed_success(n, c);
}

ValidityReport validate_unambiguous(const GramMatrix& g, const EfficiencyVector& e, double tol) {
  const std::size_t n = g.size();
  if (e.gammas.size() != n) {
    throw ContractViolation(
        fmt::format("Gram matrix of order {} but {} efficiencies", n, e.gammas.size()));
  }
  if (!g.is_symmetric(kTolerance)) {
    throw ContractViolation("Gram matrix is not symmetric");
  }

  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = g(i, j);
    m(i, i) -= e.gammas[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ContractViolation("symmetric eigensolver did not converge");
  }

  ValidityReport r;
  r.tolerance = tol;
  r.min_eigenvalue = solver.eigenvalues().minCoeff();
  r.gamma_range_ok = true;
  for (double gamma : e.gammas) {
    if (!(gamma >= -tol && gamma <= 1.0 + tol)) r.gamma_range_ok = false;
  }
  r.feasible = r.min_eigenvalue >= -tol && r.gamma_range_ok;
  return r;
}

}  // namespace qcp
