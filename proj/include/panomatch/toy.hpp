#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "panomatch/errors.hpp"
#include "panomatch/io.hpp"
#include "panomatch/matrix.hpp"
#include "panomatch/memvec.hpp"
#include "panomatch/solve.hpp"

namespace panomatch {

/// 2D point layout for the democratization demo: two point sets with
/// annotated near-duplicate clusters. Clusters are index lists into the
/// point arrays; `matched_x` and `matched_y` pick the cluster pair that sits
/// close across the two sets (the bursty cross-matching block).
struct ToyLayout {
  std::vector<std::array<double, 2>> x_points;
  std::vector<std::array<double, 2>> y_points;
  std::vector<std::vector<std::size_t>> x_clusters;
  std::vector<std::vector<std::size_t>> y_clusters;
  std::size_t matched_x = 0;  // index into x_clusters
  std::size_t matched_y = 0;  // index into y_clusters
};

/// Default layout: each set has one tight triple near the middle (the matched
/// pair), one more triple elsewhere, and two isolated points.
inline ToyLayout default_toy_layout() {
  ToyLayout layout;
  layout.x_points = {{1.2, 9.2}, {2.0, 9.2}, {2.8, 9.2}, {9.0, 9.0},
                     {5.0, 4.2}, {5.0, 5.0}, {5.0, 5.8}, {9.2, 1.0}};
  layout.y_points = {{2.0, 10.0}, {5.8, 4.2}, {5.8, 5.0}, {5.8, 5.8},
                     {10.0, 1.0}, {1.2, 1.0}, {2.0, 1.0}, {2.0, 1.8}};
  layout.x_clusters = {{0, 1, 2}, {4, 5, 6}};
  layout.y_clusters = {{1, 2, 3}, {5, 6, 7}};
  layout.matched_x = 1;
  layout.matched_y = 0;
  return layout;
}

struct ToyResult {
  ToyLayout layout;
  Matrix unweighted;      // X^T Y: raw pairwise inner products
  Matrix weighted;        // G_X^{-1} X^T Y G_Y^{-1}: democratized contributions
  Matrix display_kernel;  // exp(-dist^2 / bandwidth) on raw point distances
  double bandwidth = 0.0;
};

namespace detail {

inline Matrix points_to_matrix(const std::vector<std::array<double, 2>>& points) {
  Matrix m(2, points.size());
  for (std::size_t c = 0; c < points.size(); ++c) {
    m.at(0, c) = points[c][0];
    m.at(1, c) = points[c][1];
  }
  return m;
}

inline void validate_clusters(const std::vector<std::vector<std::size_t>>& clusters, std::size_t point_count,
                              const char* side) {
  for (const auto& cluster : clusters) {
    if (cluster.empty()) throw ValidationError(std::string("toy: empty cluster on side ") + side);
    for (const std::size_t i : cluster)
      if (i >= point_count)
        throw ValidationError(std::string("toy: cluster index out of range on side ") + side);
  }
}

}  // namespace detail

/// Computes the unweighted and Gram-weighted cross-matching matrices of the
/// layout, plus a proximity heat map exp(-||x-y||^2 / bandwidth). The kernel
/// exists only for display; the matching math uses raw inner products
/// throughout.
inline ToyResult toy_demo(const ToyLayout& layout, double bandwidth = 25.0,
                          const RidgePolicy& policy = RidgePolicy::automatic()) {
  if (layout.x_points.empty() || layout.y_points.empty())
    throw ValidationError("toy: both point sets must be nonempty");
  if (bandwidth <= 0.0) throw ValidationError("toy: bandwidth must be positive");
  detail::validate_clusters(layout.x_clusters, layout.x_points.size(), "X");
  detail::validate_clusters(layout.y_clusters, layout.y_points.size(), "Y");
  if (!layout.x_clusters.empty() && layout.matched_x >= layout.x_clusters.size())
    throw ValidationError("toy: matched_x out of range");
  if (!layout.y_clusters.empty() && layout.matched_y >= layout.y_clusters.size())
    throw ValidationError("toy: matched_y out of range");

  ToyResult result;
  result.layout = layout;
  result.bandwidth = bandwidth;

  const Matrix x = detail::points_to_matrix(layout.x_points);
  const Matrix y = detail::points_to_matrix(layout.y_points);
  result.unweighted = transpose_times(x, y);
  result.weighted = cross_weight_matrix(x, y, policy);

  result.display_kernel = Matrix(layout.x_points.size(), layout.y_points.size());
  for (std::size_t i = 0; i < layout.x_points.size(); ++i)
    for (std::size_t j = 0; j < layout.y_points.size(); ++j) {
      const double dx = layout.x_points[i][0] - layout.y_points[j][0];
      const double dy = layout.x_points[i][1] - layout.y_points[j][1];
      result.display_kernel.at(i, j) = std::exp(-(dx * dx + dy * dy) / bandwidth);
    }
  return result;
}

/// Mean of the matrix block formed by the given row and column index sets.
inline double block_mean(const Matrix& m, const std::vector<std::size_t>& rows,
                         const std::vector<std::size_t>& cols) {
  if (rows.empty() || cols.empty()) throw ValidationError("block_mean: empty index set");
  double sum = 0.0;
  for (const std::size_t i : rows)
    for (const std::size_t j : cols) sum += m.at(i, j);
  return sum / static_cast<double>(rows.size() * cols.size());
}

/// Mean contribution of the matched cluster pair in the unweighted and
/// weighted matrices. Democratization shows as weighted < unweighted.
inline std::pair<double, double> matched_cluster_means(const ToyResult& result) {
  if (result.layout.x_clusters.empty() || result.layout.y_clusters.empty())
    throw ValidationError("matched_cluster_means: layout has no clusters");
  const auto& rows = result.layout.x_clusters[result.layout.matched_x];
  const auto& cols = result.layout.y_clusters[result.layout.matched_y];
  return {block_mean(result.unweighted, rows, cols), block_mean(result.weighted, rows, cols)};
}

inline std::string toy_to_csv(const ToyResult& result) {
  std::string csv = "i,j,unweighted,weighted\n";
  for (std::size_t i = 0; i < result.unweighted.rows; ++i)
    for (std::size_t j = 0; j < result.unweighted.cols; ++j) {
      csv += std::to_string(i);
      csv += ',';
      csv += std::to_string(j);
      csv += ',';
      csv += io::format_g(result.unweighted.at(i, j), 17);
      csv += ',';
      csv += io::format_g(result.weighted.at(i, j), 17);
      csv += '\n';
    }
  return csv;
}

/// Companion heat-map data for plotting; kept separate so the main CSV stays
/// exactly the pairwise-contribution table.
inline std::string toy_display_to_csv(const ToyResult& result) {
  std::string csv = "i,j,kernel\n";
  for (std::size_t i = 0; i < result.display_kernel.rows; ++i)
    for (std::size_t j = 0; j < result.display_kernel.cols; ++j) {
      csv += std::to_string(i);
      csv += ',';
      csv += std::to_string(j);
      csv += ',';
      csv += io::format_g(result.display_kernel.at(i, j), 17);
      csv += '\n';
    }
  return csv;
}

}  // namespace panomatch
