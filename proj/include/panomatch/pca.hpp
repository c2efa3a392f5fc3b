#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "panomatch/errors.hpp"
#include "panomatch/io.hpp"
#include "panomatch/matrix.hpp"

namespace panomatch {

/// Centering + rotation model. `components` holds d_out orthonormal rows;
/// `explained_variance` and `total_variance` are fit-time metadata and are
/// not serialized.
struct PcaModel {
  std::vector<double> mean;
  Matrix components;  // d_out x d
  std::vector<double> explained_variance;
  double total_variance = 0.0;

  std::size_t d() const { return components.cols; }
  std::size_t d_out() const { return components.rows; }
};

struct PcaOptions {
  bool whiten = false;
};

namespace detail {

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// eigenvalues and the matching eigenvectors as matrix columns, unordered.
inline void jacobi_eigh(Matrix a, std::vector<double>& eigenvalues, Matrix& eigenvectors) {
  const std::size_t n = a.rows;
  eigenvectors = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) eigenvectors.at(i, i) = 1.0;

  const double norm = a.frobenius_norm();
  const double stop = 1e-14 * (norm > 0.0 ? norm : 1.0);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a.at(p, q) * a.at(p, q);
    if (std::sqrt(2.0 * off) <= stop) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a.at(p, q);
        if (apq == 0.0) continue;
        const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a.at(k, p);
          const double akq = a.at(k, q);
          a.at(k, p) = c * akp - s * akq;
          a.at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a.at(p, k);
          const double aqk = a.at(q, k);
          a.at(p, k) = c * apk - s * aqk;
          a.at(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = eigenvectors.at(k, p);
          const double vkq = eigenvectors.at(k, q);
          eigenvectors.at(k, p) = c * vkp - s * vkq;
          eigenvectors.at(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = a.at(i, i);
}

/// Flips each row so its largest-magnitude entry is positive (first such
/// entry on exact ties), keeping serialized models byte-stable.
inline void fix_row_signs(Matrix& rows) {
  for (std::size_t r = 0; r < rows.rows; ++r) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t c = 0; c < rows.cols; ++c) {
      const double mag = std::abs(rows.at(r, c));
      if (mag > best) {
        best = mag;
        arg = c;
      }
    }
    if (rows.at(r, arg) < 0.0)
      for (std::size_t c = 0; c < rows.cols; ++c) rows.at(r, c) = -rows.at(r, c);
  }
}

}  // namespace detail

/// Fits plain PCA (center + rotate) on the columns of `data` (d x N, one
/// sample per column). Components are the top-d_out eigenvectors of the
/// sample covariance, ordered by descending eigenvalue. Whitening scales each
/// row by 1/sqrt(eigenvalue) and is off by default.
inline PcaModel pca_fit(const Matrix& data, std::size_t d_out, const PcaOptions& options = {}) {
  const std::size_t d = data.rows;
  const std::size_t samples = data.cols;
  if (d_out < 1) throw ValidationError("pca_fit: d_out must be at least 1");
  if (d_out > std::min(d, samples))
    throw ValidationError("pca_fit: d_out " + std::to_string(d_out) + " exceeds min(d, samples) = " +
                          std::to_string(std::min(d, samples)));
  if (!data.is_finite()) throw ValidationError("pca_fit: non-finite entries");

  PcaModel model;
  model.mean.assign(d, 0.0);
  for (std::size_t r = 0; r < d; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < samples; ++c) s += data.at(r, c);
    model.mean[r] = s / static_cast<double>(samples);
  }

  Matrix centered = data;
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < samples; ++c) centered.at(r, c) -= model.mean[r];

  const double scale = samples > 1 ? 1.0 / static_cast<double>(samples - 1) : 1.0;
  Matrix cov(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < samples; ++c) s += centered.at(i, c) * centered.at(j, c);
      cov.at(i, j) = s * scale;
      cov.at(j, i) = s * scale;
    }

  std::vector<double> eigenvalues;
  Matrix eigenvectors;
  detail::jacobi_eigh(cov, eigenvalues, eigenvectors);

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (eigenvalues[i] != eigenvalues[j]) return eigenvalues[i] > eigenvalues[j];
    return i < j;
  });

  model.components = Matrix(d_out, d);
  model.explained_variance.resize(d_out);
  for (std::size_t k = 0; k < d_out; ++k) {
    const std::size_t src = order[k];
    model.explained_variance[k] = eigenvalues[src];
    for (std::size_t r = 0; r < d; ++r) model.components.at(k, r) = eigenvectors.at(r, src);
  }
  detail::fix_row_signs(model.components);
  model.total_variance = 0.0;
  for (double v : eigenvalues) model.total_variance += v;

  if (options.whiten) {
    const double floor = 1e-12 * std::max(model.total_variance, 1.0);
    for (std::size_t k = 0; k < d_out; ++k) {
      const double s = 1.0 / std::sqrt(std::max(model.explained_variance[k], floor));
      for (std::size_t r = 0; r < d; ++r) model.components.at(k, r) *= s;
    }
  }
  return model;
}

/// components * (v - mean); optionally rescaled to unit L2 norm (the zero
/// vector stays zero).
inline std::vector<double> pca_apply(const PcaModel& model, const std::vector<double>& v,
                                     bool renormalize = true) {
  if (v.size() != model.d())
    throw ValidationError("pca_apply: vector has dimension " + std::to_string(v.size()) + ", model expects " +
                          std::to_string(model.d()));
  std::vector<double> centered(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) centered[i] = v[i] - model.mean[i];
  std::vector<double> projected = matvec(model.components, centered);
  return renormalize ? l2_normalized(std::move(projected)) : projected;
}

/// Projects every column of a descriptor matrix.
inline Matrix pca_apply_matrix(const PcaModel& model, const Matrix& m, bool renormalize = true) {
  Matrix out(model.d_out(), m.cols);
  for (std::size_t c = 0; c < m.cols; ++c) out.set_column(c, pca_apply(model, m.column(c), renormalize));
  return out;
}

// PMPC model file: magic "PMPC", u32 version=1, u32 d, u32 d_out,
// mean (d f32), components (d_out*d f32, row-major). Little-endian.

inline std::string serialize_pca(const PcaModel& model) {
  io::ByteWriter w;
  w.magic("PMPC");
  w.u32(1);
  w.u32(static_cast<std::uint32_t>(model.d()));
  w.u32(static_cast<std::uint32_t>(model.d_out()));
  for (double v : model.mean) w.f32(static_cast<float>(v));
  for (double v : model.components.data) w.f32(static_cast<float>(v));
  return w.buffer();
}

inline PcaModel deserialize_pca(const std::string& bytes) {
  io::ByteReader r(bytes);
  r.expect_magic("PMPC");
  const std::uint32_t version = r.u32();
  if (version != 1) throw FormatError("unsupported PMPC version " + std::to_string(version), r.offset() - 4);
  const std::uint32_t d = r.u32();
  const std::uint32_t d_out = r.u32();
  if (d_out > d) throw FormatError("PMPC header has d_out > d", r.offset() - 4);
  PcaModel model;
  model.mean.resize(d);
  for (auto& v : model.mean) v = r.f32();
  model.components = Matrix(d_out, d);
  for (auto& v : model.components.data) {
    const std::size_t at = r.offset();
    v = r.f32();
    if (!std::isfinite(v)) throw FormatError("non-finite component entry", at);
  }
  return model;
}

inline void save_pca(const std::string& path, const PcaModel& model) {
  io::write_file(path, serialize_pca(model));
}

inline PcaModel load_pca(const std::string& path) { return deserialize_pca(io::read_file(path)); }

}  // namespace panomatch
