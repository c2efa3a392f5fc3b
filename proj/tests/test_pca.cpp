#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <catch2/catch_amalgamated.hpp>

#include "panomatch/pca.hpp"
#include "panomatch/rng.hpp"
#include "support/oracles.hpp"

using namespace panomatch;
using testsupport::random_matrix;
using testsupport::TempDir;

namespace {

/// Covariance eigenvalues via Eigen, descending. Independent of the Jacobi
/// route inside pca_fit.
std::vector<double> eigen_variances(const Matrix& data) {
  const Eigen::Index d = static_cast<Eigen::Index>(data.rows);
  const Eigen::Index n = static_cast<Eigen::Index>(data.cols);
  Eigen::MatrixXd m(d, n);
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = data.at(r, c);
  const Eigen::VectorXd mean = m.rowwise().mean();
  m.colwise() -= mean;
  const Eigen::MatrixXd cov = m * m.transpose() / static_cast<double>(n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  std::vector<double> values(solver.eigenvalues().data(), solver.eigenvalues().data() + d);
  std::reverse(values.begin(), values.end());
  return values;
}

}  // namespace

TEST_CASE("pca recovers an axis-aligned dominant direction", "[pca]") {
  // Strong variance on coordinate 0, weak on coordinate 1, none elsewhere.
  Matrix data(4, 40);
  CounterRng rng(rng_key(600));
  for (std::size_t c = 0; c < data.cols; ++c) {
    data.at(0, c) = 10.0 * rng.next_gaussian();
    data.at(1, c) = 0.01 * rng.next_gaussian();
  }
  const PcaModel model = pca_fit(data, 1);
  REQUIRE(std::abs(model.components.at(0, 0)) == Catch::Approx(1.0).margin(1e-6));
  REQUIRE(model.components.at(0, 0) > 0.0);
  REQUIRE(std::abs(model.components.at(0, 1)) < 1e-3);
}

TEST_CASE("pca components are orthonormal rows", "[pca]") {
  const Matrix data = random_matrix(rng_key(601), 8, 60);
  const PcaModel model = pca_fit(data, 5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      const double expected = i == j ? 1.0 : 0.0;
      double s = 0.0;
      for (std::size_t c = 0; c < model.components.cols; ++c)
        s += model.components.at(i, c) * model.components.at(j, c);
      REQUIRE(s == Catch::Approx(expected).margin(1e-8));
    }
}

TEST_CASE("full-dimensional pca preserves centered geometry", "[pca]") {
  const Matrix data = random_matrix(rng_key(602), 6, 30);
  const PcaModel model = pca_fit(data, 6);
  for (std::size_t a = 0; a < 5; ++a) {
    const std::vector<double> pa = pca_apply(model, data.column(a), false);
    const std::vector<double> pb = pca_apply(model, data.column(a + 1), false);
    const double before = testsupport::vector_distance(data.column(a), data.column(a + 1));
    const double after = testsupport::vector_distance(pa, pb);
    REQUIRE(after == Catch::Approx(before).margin(1e-8));
  }
}

TEST_CASE("explained variance matches an independent eigensolver", "[pca]") {
  const Matrix data = random_matrix(rng_key(603), 10, 80);
  const PcaModel model = pca_fit(data, 10);
  const std::vector<double> reference = eigen_variances(data);
  double total = 0.0;
  for (double v : reference) total += v;
  REQUIRE(model.total_variance == Catch::Approx(total).epsilon(1e-9));
  for (std::size_t k = 0; k < 10; ++k)
    REQUIRE(model.explained_variance[k] == Catch::Approx(reference[k]).epsilon(1e-6));
}

TEST_CASE("explained variance is ordered and nonnegative", "[pca]") {
  const Matrix data = random_matrix(rng_key(604), 7, 50);
  const PcaModel model = pca_fit(data, 7);
  for (std::size_t k = 0; k < 7; ++k) {
    REQUIRE(model.explained_variance[k] >= 0.0);
    if (k > 0) REQUIRE(model.explained_variance[k] <= model.explained_variance[k - 1]);
  }
}

TEST_CASE("component rows follow the sign rule", "[pca]") {
  const Matrix data = random_matrix(rng_key(605), 9, 40);
  const PcaModel model = pca_fit(data, 6);
  for (std::size_t r = 0; r < 6; ++r) {
    double best = -1.0;
    double at_best = 0.0;
    for (std::size_t c = 0; c < 9; ++c) {
      const double mag = std::abs(model.components.at(r, c));
      if (mag > best) {
        best = mag;
        at_best = model.components.at(r, c);
      }
    }
    REQUIRE(at_best > 0.0);
  }
}

TEST_CASE("whitening equalizes projected variance", "[pca]") {
  Matrix data(3, 200);
  CounterRng rng(rng_key(606));
  for (std::size_t c = 0; c < data.cols; ++c) {
    data.at(0, c) = 5.0 * rng.next_gaussian();
    data.at(1, c) = 2.0 * rng.next_gaussian();
    data.at(2, c) = 1.0 * rng.next_gaussian();
  }
  PcaOptions options;
  options.whiten = true;
  const PcaModel model = pca_fit(data, 3, options);
  const Matrix projected = pca_apply_matrix(model, data, false);
  for (std::size_t r = 0; r < 3; ++r) {
    double mean = 0.0;
    for (std::size_t c = 0; c < projected.cols; ++c) mean += projected.at(r, c);
    mean /= static_cast<double>(projected.cols);
    double var = 0.0;
    for (std::size_t c = 0; c < projected.cols; ++c) {
      const double d = projected.at(r, c) - mean;
      var += d * d;
    }
    var /= static_cast<double>(projected.cols - 1);
    REQUIRE(var == Catch::Approx(1.0).margin(1e-6));
  }
}

TEST_CASE("pca_apply renormalizes by default", "[pca]") {
  const Matrix data = random_matrix(rng_key(607), 5, 25);
  const PcaModel model = pca_fit(data, 3);
  const std::vector<double> v = pca_apply(model, data.column(0));
  REQUIRE(l2_norm(v) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("pca model survives a file round trip", "[pca]") {
  const Matrix data = random_matrix(rng_key(608), 6, 30);
  const PcaModel model = pca_fit(data, 4);
  TempDir dir("pca_roundtrip");
  const std::string path = dir.file("model.pmpc");
  save_pca(path, model);
  const PcaModel loaded = load_pca(path);
  REQUIRE(loaded.d() == model.d());
  REQUIRE(loaded.d_out() == model.d_out());
  // Stored as f32, so reload then re-save must reproduce identical bytes.
  const std::string once = serialize_pca(loaded);
  const std::string twice = serialize_pca(deserialize_pca(once));
  REQUIRE(once == twice);
  for (std::size_t i = 0; i < model.mean.size(); ++i)
    REQUIRE(loaded.mean[i] == Catch::Approx(model.mean[i]).margin(1e-6));
}

TEST_CASE("pca_fit validates its arguments", "[pca]") {
  const Matrix data = random_matrix(rng_key(609), 4, 10);
  REQUIRE_THROWS_AS(pca_fit(data, 0), ValidationError);
  REQUIRE_THROWS_AS(pca_fit(data, 5), ValidationError);
  Matrix bad = data;
  bad.at(0, 0) = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_AS(pca_fit(bad, 2), ValidationError);
  const PcaModel model = pca_fit(data, 2);
  REQUIRE_THROWS_AS(pca_apply(model, std::vector<double>(3, 0.0)), ValidationError);
}
