#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "panomatch/errors.hpp"
#include "panomatch/matrix.hpp"

namespace panomatch {

/// Diagonal regularization policy for Gram solves.
///   Off      -> solve with ridge 0, fail hard on singularity
///   Auto     -> try ridge 0, retry once with 1e-6 * trace(A)/n on failure
///   Fixed(v) -> solve with ridge v, no retry
struct RidgePolicy {
  enum class Mode { Off, Auto, Fixed };

  Mode mode = Mode::Auto;
  double value = 0.0;

  static RidgePolicy off() { return {Mode::Off, 0.0}; }
  static RidgePolicy automatic() { return {Mode::Auto, 0.0}; }
  static RidgePolicy fixed(double v) {
    if (!(v >= 0.0)) throw ValidationError("ridge: value must be nonnegative");
    return {Mode::Fixed, v};
  }
};

/// Ridge used by the automatic retry: 1e-6 * trace(A) / n.
inline double auto_ridge_value(const GramMatrix& a) {
  if (a.n == 0) return 0.0;
  return 1e-6 * a.trace() / static_cast<double>(a.n);
}

namespace detail {

/// Lower Cholesky factor of A + ridge*I. Declares singularity when a pivot
/// drops below n * eps * max(diag), which catches exactly rank-deficient
/// Grams that roundoff would otherwise let through with garbage factors.
inline Matrix cholesky_factor(const GramMatrix& a, double ridge) {
  const std::size_t n = a.n;
  Matrix l(n, n);
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a.at(i, i)) + ridge);
  const double pivot_tol =
      static_cast<double>(n) * std::numeric_limits<double>::epsilon() * max_diag;
  for (std::size_t j = 0; j < n; ++j) {
    double d = a.at(j, j) + ridge;
    for (std::size_t k = 0; k < j; ++k) d -= l.at(j, k) * l.at(j, k);
    if (!(d > pivot_tol))
      throw SingularityError("cholesky: matrix not positive definite at pivot " + std::to_string(j),
                             static_cast<std::ptrdiff_t>(j));
    const double ljj = std::sqrt(d);
    l.at(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a.at(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
      l.at(i, j) = s / ljj;
    }
  }
  return l;
}

}  // namespace detail

/// Solves (A + ridge*I) S = B for symmetric positive definite A via Cholesky.
inline Matrix solve_spd(const GramMatrix& a, const Matrix& b, double ridge = 0.0) {
  if (b.rows != a.n) throw ValidationError("solve_spd: B must have " + std::to_string(a.n) + " rows");
  if (!(ridge >= 0.0)) throw ValidationError("solve_spd: ridge must be nonnegative");
  const Matrix l = detail::cholesky_factor(a, ridge);
  const std::size_t n = a.n;
  Matrix s = b;
  // forward substitution L y = b, then back substitution L^T x = y
  for (std::size_t c = 0; c < b.cols; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double v = s.at(i, c);
      for (std::size_t k = 0; k < i; ++k) v -= l.at(i, k) * s.at(k, c);
      s.at(i, c) = v / l.at(i, i);
    }
    for (std::size_t ii = n; ii > 0; --ii) {
      const std::size_t i = ii - 1;
      double v = s.at(i, c);
      for (std::size_t k = i + 1; k < n; ++k) v -= l.at(k, i) * s.at(k, c);
      s.at(i, c) = v / l.at(i, i);
    }
  }
  return s;
}

/// Solves A S = B by Gaussian elimination with partial pivoting. Kept as an
/// independent route from solve_spd; exercised by tests as its cross-check.
inline Matrix solve_oracle(const GramMatrix& a, const Matrix& b) {
  if (b.rows != a.n) throw ValidationError("solve_oracle: B must have " + std::to_string(a.n) + " rows");
  const std::size_t n = a.n;
  Matrix aug(n, n + b.cols);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug.at(i, j) = a.at(i, j);
    for (std::size_t j = 0; j < b.cols; ++j) aug.at(i, n + j) = b.at(i, j);
  }
  double max_abs = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) max_abs = std::max(max_abs, std::abs(aug.at(i, j)));
  const double pivot_tol =
      static_cast<double>(n) * std::numeric_limits<double>::epsilon() * max_abs;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot_row = k;
    double best = std::abs(aug.at(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double cand = std::abs(aug.at(i, k));
      if (cand > best) {
        best = cand;
        pivot_row = i;
      }
    }
    if (!(best > pivot_tol))
      throw SingularityError("solve_oracle: zero pivot at column " + std::to_string(k),
                             static_cast<std::ptrdiff_t>(k));
    if (pivot_row != k)
      for (std::size_t j = 0; j < aug.cols; ++j) std::swap(aug.at(k, j), aug.at(pivot_row, j));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = aug.at(i, k) / aug.at(k, k);
      if (f == 0.0) continue;
      for (std::size_t j = k; j < aug.cols; ++j) aug.at(i, j) -= f * aug.at(k, j);
    }
  }
  Matrix s(n, b.cols);
  for (std::size_t c = 0; c < b.cols; ++c) {
    for (std::size_t ii = n; ii > 0; --ii) {
      const std::size_t i = ii - 1;
      double v = aug.at(i, n + c);
      for (std::size_t j = i + 1; j < n; ++j) v -= aug.at(i, j) * s.at(j, c);
      s.at(i, c) = v / aug.at(i, i);
    }
  }
  return s;
}

/// Solve under a ridge policy. Reports the ridge actually used through
/// `ridge_used`; Auto retries once with auto_ridge_value on failure.
inline Matrix solve_spd_with_policy(const GramMatrix& a, const Matrix& b, const RidgePolicy& policy,
                                    double* ridge_used = nullptr) {
  const auto record = [&](double r) {
    if (ridge_used) *ridge_used = r;
  };
  switch (policy.mode) {
    case RidgePolicy::Mode::Off:
      record(0.0);
      return solve_spd(a, b, 0.0);
    case RidgePolicy::Mode::Fixed:
      record(policy.value);
      return solve_spd(a, b, policy.value);
    case RidgePolicy::Mode::Auto:
      try {
        record(0.0);
        return solve_spd(a, b, 0.0);
      } catch (const SingularityError&) {
        const double r = auto_ridge_value(a);
        record(r);
        return solve_spd(a, b, r);
      }
  }
  throw ValidationError("solve_spd_with_policy: unknown ridge mode");
}

}  // namespace panomatch
