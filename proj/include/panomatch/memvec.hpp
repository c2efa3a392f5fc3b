#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "panomatch/errors.hpp"
#include "panomatch/matrix.hpp"
#include "panomatch/solve.hpp"

namespace panomatch {

/// How a group of descriptors was collapsed into one vector.
///   Sum         -> column sum of the group matrix
///   Pinv        -> pseudo-inverse aggregation (Gram-weighted column sum)
///   Precomputed -> single externally supplied vector per group
enum class AggMethod : std::uint8_t { Sum = 0, Pinv = 1, Precomputed = 2 };

inline std::string to_string(AggMethod m) {
  switch (m) {
    case AggMethod::Sum: return "sum";
    case AggMethod::Pinv: return "pinv";
    case AggMethod::Precomputed: return "precomputed";
  }
  return "unknown";
}

inline AggMethod parse_agg_method(const std::string& s) {
  if (s == "sum") return AggMethod::Sum;
  if (s == "pinv") return AggMethod::Pinv;
  if (s == "precomputed") return AggMethod::Precomputed;
  throw ValidationError("unknown aggregation method '" + s + "'");
}

/// One aggregated group representative.
struct MemoryVector {
  std::vector<double> values;
  AggMethod method = AggMethod::Sum;
  std::size_t source_count = 0;
  double ridge_used = 0.0;
};

/// m(X) = X 1_n: the column sum of the group matrix.
inline MemoryVector sum_vector(const Matrix& x) {
  if (x.empty()) throw ValidationError("sum_vector: empty descriptor matrix");
  if (!x.is_finite()) throw ValidationError("sum_vector: non-finite entries");
  MemoryVector m;
  m.values.assign(x.rows, 0.0);
  for (std::size_t r = 0; r < x.rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < x.cols; ++c) s += x.at(r, c);
    m.values[r] = s;
  }
  m.method = AggMethod::Sum;
  m.source_count = x.cols;
  return m;
}

namespace detail {

/// Resolves the ridge policy for a pinv solve on X. Sets with n >= d have an
/// exactly singular Gram, so they are forced through a positive ridge; Off
/// (or Fixed 0) refuses them. The forced Auto value is 1e-6 * trace(G)/n,
/// the same as the retry ridge of the n x n solve.
inline RidgePolicy pinv_policy(const Matrix& x, const RidgePolicy& policy, double gram_trace) {
  if (x.cols < x.rows) return policy;
  const bool disabled = policy.mode == RidgePolicy::Mode::Off ||
                        (policy.mode == RidgePolicy::Mode::Fixed && policy.value == 0.0);
  if (disabled)
    throw SingularityError("pinv aggregation: set has n >= d (" + std::to_string(x.cols) + " >= " +
                           std::to_string(x.rows) + "), singular Gram requires a ridge");
  if (policy.mode == RidgePolicy::Mode::Auto)
    return RidgePolicy::fixed(1e-6 * gram_trace / static_cast<double>(x.cols));
  return policy;
}

/// X (X^T X + ridge I)^{-1} as a d x n matrix. For n < d this solves against
/// the Gram; for n >= d it uses the identity
///   X (X^T X + r I)^{-1} = (X X^T + r I)^{-1} X,
/// whose d x d system stays well conditioned where the rank-deficient Gram
/// plus a tiny ridge would amplify roundoff.
inline Matrix ridge_basis(const Matrix& x, const RidgePolicy& policy, double* ridge_used = nullptr) {
  if (x.cols < x.rows) {
    const GramMatrix g = gram(x);
    const Matrix z = solve_spd_with_policy(g, transpose(x), policy, ridge_used);  // n x d
    return transpose(z);
  }
  const GramMatrix outer = gram(transpose(x));  // X X^T, trace equals trace(X^T X)
  const RidgePolicy effective = pinv_policy(x, policy, outer.trace());
  return solve_spd_with_policy(outer, x, effective, ridge_used);
}

}  // namespace detail

/// m+(X) = X (X^T X + ridge I)^{-1} 1_n. With ridge 0 and linearly
/// independent columns this is the pseudo-inverse memory vector.
inline MemoryVector pinv_vector(const Matrix& x, const RidgePolicy& policy = RidgePolicy::automatic()) {
  if (x.empty()) throw ValidationError("pinv_vector: empty descriptor matrix");
  if (!x.is_finite()) throw ValidationError("pinv_vector: non-finite entries");
  MemoryVector m;
  m.method = AggMethod::Pinv;
  m.source_count = x.cols;
  if (x.cols < x.rows) {
    const GramMatrix g = gram(x);
    Matrix ones(x.cols, 1);
    for (std::size_t i = 0; i < x.cols; ++i) ones.at(i, 0) = 1.0;
    const Matrix w = solve_spd_with_policy(g, ones, policy, &m.ridge_used);
    m.values = matvec(x, w.column(0));
  } else {
    const GramMatrix outer = gram(transpose(x));
    const RidgePolicy effective = detail::pinv_policy(x, policy, outer.trace());
    Matrix rhs(x.rows, 1);
    rhs.set_column(0, sum_vector(x).values);
    m.values = solve_spd_with_policy(outer, rhs, effective, &m.ridge_used).column(0);
  }
  return m;
}

inline MemoryVector pinv_vector(const Matrix& x, double ridge) {
  return pinv_vector(x, ridge == 0.0 ? RidgePolicy::off() : RidgePolicy::fixed(ridge));
}

/// Aggregates one group with the requested method. Precomputed groups must
/// contain exactly one vector, which passes through unchanged.
inline MemoryVector aggregate(const Matrix& x, AggMethod method,
                              const RidgePolicy& policy = RidgePolicy::automatic()) {
  switch (method) {
    case AggMethod::Sum: return sum_vector(x);
    case AggMethod::Pinv: return pinv_vector(x, policy);
    case AggMethod::Precomputed: {
      if (x.cols != 1)
        throw ValidationError("precomputed aggregation expects exactly one vector per group, got " +
                              std::to_string(x.cols));
      MemoryVector m;
      m.values = x.column(0);
      m.method = AggMethod::Precomputed;
      m.source_count = 1;
      return m;
    }
  }
  throw ValidationError("aggregate: unknown method");
}

namespace detail {

inline double checked_inner_product(const MemoryVector& a, const MemoryVector& b, AggMethod expected) {
  if (a.method != expected || b.method != expected)
    throw ValidationError("similarity: both memory vectors must use method '" + to_string(expected) + "'");
  if (a.values.size() != b.values.size())
    throw ValidationError("similarity: dimension mismatch (" + std::to_string(a.values.size()) + " vs " +
                          std::to_string(b.values.size()) + ")");
  return dot(a.values, b.values);
}

}  // namespace detail

/// Inner product of two sum-vectors; expands to the all-pairs dot-product sum
/// 1_n^T X^T Y 1_k.
inline double similarity_sum(const MemoryVector& mx, const MemoryVector& my) {
  return detail::checked_inner_product(mx, my, AggMethod::Sum);
}

/// Inner product of two pinv-vectors; expands to the Gram-weighted
/// cross-matching sum 1_n^T G_X^{-1} X^T Y G_Y^{-1} 1_k at ridge 0.
inline double similarity_pinv(const MemoryVector& mx, const MemoryVector& my) {
  return detail::checked_inner_product(mx, my, AggMethod::Pinv);
}

/// Inner product for any matching pair of methods. Mixed methods are
/// rejected, never silently computed.
inline double similarity(const MemoryVector& mx, const MemoryVector& my) {
  if (mx.method != my.method)
    throw ValidationError("similarity: mixed aggregation methods (" + to_string(mx.method) + " vs " +
                          to_string(my.method) + ")");
  return detail::checked_inner_product(mx, my, mx.method);
}

/// Per-pair weighted cross-matching matrix G_X^{-1} X^T Y G_Y^{-1}. Its grand
/// sum equals similarity_pinv of the two pinv-vectors built under the same
/// ridge policy. Entry (i, j) is the democratized contribution of the pair
/// (x_i, y_j).
inline Matrix cross_weight_matrix(const Matrix& x, const Matrix& y,
                                  const RidgePolicy& policy = RidgePolicy::automatic()) {
  if (x.empty() || y.empty()) throw ValidationError("cross_weight_matrix: empty descriptor matrix");
  if (x.rows != y.rows) throw ValidationError("cross_weight_matrix: descriptor dimensions disagree");

  // (G_X^{-1} X^T)(Y G_Y^{-1}) = A_X^T A_Y with A_S = S (G_S + r I)^{-1}, the
  // same per-side solves that produce the pinv-vectors.
  const Matrix ax = detail::ridge_basis(x, policy);
  const Matrix ay = detail::ridge_basis(y, policy);
  return transpose_times(ax, ay);
}

inline double grand_sum(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data) s += v;
  return s;
}

}  // namespace panomatch
