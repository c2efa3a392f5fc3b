#include <limits>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "panomatch/matrix.hpp"
#include "support/oracles.hpp"

using namespace panomatch;
using testsupport::random_matrix;

TEST_CASE("matrix constructor validates data length", "[matrix]") {
  REQUIRE_NOTHROW(Matrix(2, 3, {1, 2, 3, 4, 5, 6}));
  REQUIRE_THROWS_AS(Matrix(2, 3, {1, 2, 3}), ValidationError);
}

TEST_CASE("column round-trips through set_column", "[matrix]") {
  Matrix m(3, 2);
  m.set_column(0, {1.0, 2.0, 3.0});
  m.set_column(1, {-4.0, 0.5, 9.0});
  REQUIRE(m.column(0) == std::vector<double>{1.0, 2.0, 3.0});
  REQUIRE(m.column(1) == std::vector<double>{-4.0, 0.5, 9.0});
  REQUIRE(m.at(1, 1) == 0.5);
}

TEST_CASE("gram of a hand-worked matrix", "[matrix]") {
  // Columns (1, 2) and (2, 4): inner products 5, 10, 20.
  const Matrix x(2, 2, {1.0, 2.0, 2.0, 4.0});
  const GramMatrix g = gram(x);
  REQUIRE(g.at(0, 0) == 5.0);
  REQUIRE(g.at(0, 1) == 10.0);
  REQUIRE(g.at(1, 0) == 10.0);
  REQUIRE(g.at(1, 1) == 20.0);
  REQUIRE(g.trace() == 25.0);
}

TEST_CASE("gram is exactly symmetric and PSD on the diagonal", "[matrix]") {
  const Matrix x = random_matrix(101, 6, 5);
  const GramMatrix g = gram(x);
  for (std::size_t i = 0; i < g.n; ++i) {
    REQUIRE(g.at(i, i) >= 0.0);
    for (std::size_t j = 0; j < g.n; ++j) REQUIRE(g.at(i, j) == g.at(j, i));
  }
}

TEST_CASE("gram of a zero column is zero", "[matrix]") {
  Matrix x(3, 2);
  x.set_column(0, {1.0, 1.0, 1.0});
  const GramMatrix g = gram(x);
  REQUIRE(g.at(1, 1) == 0.0);
  REQUIRE(g.at(0, 1) == 0.0);
}

TEST_CASE("gram rejects non-finite input", "[matrix]") {
  Matrix x(2, 1);
  x.at(0, 0) = std::numeric_limits<double>::infinity();
  REQUIRE_THROWS_AS(gram(x), ValidationError);
}

TEST_CASE("transpose_times equals multiply of the transpose", "[matrix]") {
  const Matrix a = random_matrix(102, 4, 3);
  const Matrix b = random_matrix(103, 4, 5);
  const Matrix direct = transpose_times(a, b);
  const Matrix reference = multiply(transpose(a), b);
  REQUIRE(direct.rows == 3);
  REQUIRE(direct.cols == 5);
  for (std::size_t i = 0; i < direct.data.size(); ++i)
    REQUIRE(direct.data[i] == Catch::Approx(reference.data[i]).margin(1e-12));
}

TEST_CASE("matvec against scalar loops", "[matrix]") {
  const Matrix a = random_matrix(104, 3, 4);
  const std::vector<double> v = {1.0, -2.0, 0.5, 3.0};
  const std::vector<double> y = matvec(a, v);
  for (std::size_t r = 0; r < 3; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < 4; ++c) s += a.at(r, c) * v[c];
    REQUIRE(y[r] == Catch::Approx(s).margin(1e-15));
  }
  REQUIRE_THROWS_AS(matvec(a, {1.0, 2.0}), ValidationError);
}

TEST_CASE("dot and l2 helpers", "[matrix]") {
  REQUIRE(dot({1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}) == 32.0);
  REQUIRE_THROWS_AS(dot({1.0}, {1.0, 2.0}), ValidationError);
  REQUIRE(l2_norm({3.0, 4.0}) == 5.0);
  const std::vector<double> u = l2_normalized({3.0, 4.0});
  REQUIRE(u[0] == Catch::Approx(0.6));
  REQUIRE(u[1] == Catch::Approx(0.8));
  REQUIRE(l2_normalized({0.0, 0.0}) == std::vector<double>{0.0, 0.0});
}

TEST_CASE("from_columns builds the expected layout", "[matrix]") {
  const Matrix m = from_columns({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}});
  REQUIRE(m.rows == 2);
  REQUIRE(m.cols == 3);
  REQUIRE(m.at(0, 2) == 5.0);
  REQUIRE(m.at(1, 0) == 2.0);
  REQUIRE_THROWS_AS(from_columns({{1.0, 2.0}, {3.0}}), ValidationError);
}

TEST_CASE("frobenius norm", "[matrix]") {
  const Matrix m(2, 2, {1.0, 2.0, 2.0, 4.0});
  REQUIRE(m.frobenius_norm() == 5.0);
}
