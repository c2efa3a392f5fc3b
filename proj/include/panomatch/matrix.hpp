#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "panomatch/errors.hpp"

namespace panomatch {

/// Dense real matrix, row-major. Descriptor sets are stored with one
/// descriptor per column (a d x n matrix holds n vectors of dimension d).
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  Matrix(std::size_t r, std::size_t c, std::vector<double> d) : rows(r), cols(c), data(std::move(d)) {
    if (data.size() != rows * cols)
      throw ValidationError("matrix: data length " + std::to_string(data.size()) + " does not match " +
                            std::to_string(rows) + "x" + std::to_string(cols));
  }

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  bool empty() const { return rows == 0 || cols == 0; }

  bool is_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }

  std::vector<double> column(std::size_t c) const {
    std::vector<double> v(rows);
    for (std::size_t r = 0; r < rows; ++r) v[r] = at(r, c);
    return v;
  }

  void set_column(std::size_t c, const std::vector<double>& v) {
    for (std::size_t r = 0; r < rows; ++r) at(r, c) = v[r];
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : data) s += v * v;
    return std::sqrt(s);
  }
};

inline Matrix from_columns(const std::vector<std::vector<double>>& columns) {
  if (columns.empty()) return Matrix();
  Matrix m(columns.front().size(), columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != m.rows) throw ValidationError("from_columns: ragged column lengths");
    m.set_column(c, columns[c]);
  }
  return m;
}

/// Symmetric matrix of pairwise column inner products.
struct GramMatrix {
  std::size_t n = 0;
  std::vector<double> data;  // n x n, row-major, symmetric

  GramMatrix() = default;
  explicit GramMatrix(std::size_t size) : n(size), data(size * size, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return data[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * n + j]; }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) t += at(i, i);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : data) s += v * v;
    return std::sqrt(s);
  }
};

/// Pairwise inner products of the columns of X. The upper triangle is
/// computed and mirrored, so the result is exactly symmetric.
inline GramMatrix gram(const Matrix& x) {
  if (!x.is_finite()) throw ValidationError("gram: input contains non-finite entries");
  GramMatrix g(x.cols);
  for (std::size_t i = 0; i < x.cols; ++i) {
    for (std::size_t j = i; j < x.cols; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < x.rows; ++r) s += x.at(r, i) * x.at(r, j);
      g.at(i, j) = s;
      g.at(j, i) = s;
    }
  }
  return g;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw ValidationError("multiply: inner dimensions disagree");
  Matrix c(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a.at(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c.at(i, j) += aik * b.at(k, j);
    }
  return c;
}

/// A^T * B without forming the transpose.
inline Matrix transpose_times(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows) throw ValidationError("transpose_times: row counts disagree");
  Matrix c(a.cols, b.cols);
  for (std::size_t r = 0; r < a.rows; ++r)
    for (std::size_t i = 0; i < a.cols; ++i) {
      const double ari = a.at(r, i);
      if (ari == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) c.at(i, j) += ari * b.at(r, j);
    }
  return c;
}

inline Matrix transpose(const Matrix& a) {
  Matrix t(a.cols, a.rows);
  for (std::size_t r = 0; r < a.rows; ++r)
    for (std::size_t c = 0; c < a.cols; ++c) t.at(c, r) = a.at(r, c);
  return t;
}

inline std::vector<double> matvec(const Matrix& a, const std::vector<double>& v) {
  if (a.cols != v.size()) throw ValidationError("matvec: dimension mismatch");
  std::vector<double> y(a.rows, 0.0);
  for (std::size_t r = 0; r < a.rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.cols; ++c) s += a.at(r, c) * v[c];
    y[r] = s;
  }
  return y;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ValidationError("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double l2_norm(const std::vector<double>& v) { return std::sqrt(dot(v, v)); }

/// Scales to unit L2 norm; the zero vector is left untouched.
inline std::vector<double> l2_normalized(std::vector<double> v) {
  const double n = l2_norm(v);
  if (n > 0.0)
    for (auto& x : v) x /= n;
  return v;
}

}  // namespace panomatch
