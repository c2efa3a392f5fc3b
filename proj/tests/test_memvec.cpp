#include <cmath>
#include <limits>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "panomatch/memvec.hpp"
#include "panomatch/rng.hpp"
#include "support/oracles.hpp"

using namespace panomatch;
using testsupport::orthonormal_columns;
using testsupport::pinv_similarity_oracle;
using testsupport::pinv_vector_oracle;
using testsupport::random_matrix;
using testsupport::random_unit_columns;
using testsupport::relative_error;
using testsupport::similarity_sum_oracle;
using testsupport::sum_oracle;

TEST_CASE("sum_vector on a hand-worked matrix", "[memvec]") {
  // Columns (1, 2), (3, 4), (5, 6) sum to (9, 12).
  const Matrix x = from_columns({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}});
  const MemoryVector m = sum_vector(x);
  REQUIRE(m.values == std::vector<double>{9.0, 12.0});
  REQUIRE(m.method == AggMethod::Sum);
  REQUIRE(m.source_count == 3);
  REQUIRE(m.ridge_used == 0.0);
}

TEST_CASE("sum_vector matches scalar loops on random input", "[memvec]") {
  const Matrix x = random_matrix(rng_key(700), 17, 9);
  REQUIRE(sum_vector(x).values == sum_oracle(x));
}

TEST_CASE("sum_vector is invariant to column order", "[memvec]") {
  const Matrix x = random_matrix(rng_key(701), 8, 6);
  Matrix shuffled(8, 6);
  const std::vector<std::size_t> perm = CounterRng(rng_key(702)).permutation(6);
  for (std::size_t c = 0; c < 6; ++c) shuffled.set_column(c, x.column(perm[c]));
  const std::vector<double> a = sum_vector(x).values;
  const std::vector<double> b = sum_vector(shuffled).values;
  REQUIRE(relative_error(b, a) <= 1e-10);
}

TEST_CASE("sum_vector scales exactly with its input", "[memvec]") {
  const Matrix x = random_matrix(rng_key(703), 5, 4);
  Matrix doubled = x;
  for (double& v : doubled.data) v *= 2.0;
  const std::vector<double> base = sum_vector(x).values;
  const std::vector<double> twice = sum_vector(doubled).values;
  for (std::size_t i = 0; i < base.size(); ++i) REQUIRE(twice[i] == 2.0 * base[i]);
}

TEST_CASE("aggregation rejects empty and non-finite input", "[memvec]") {
  REQUIRE_THROWS_AS(sum_vector(Matrix()), ValidationError);
  REQUIRE_THROWS_AS(pinv_vector(Matrix()), ValidationError);
  Matrix bad(2, 2);
  bad.at(0, 1) = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_AS(sum_vector(bad), ValidationError);
  REQUIRE_THROWS_AS(pinv_vector(bad), ValidationError);
}

TEST_CASE("pinv_vector on a single unit vector returns it unchanged", "[memvec]") {
  const Matrix x = from_columns({{0.6, 0.8, 0.0}});
  const MemoryVector m = pinv_vector(x, RidgePolicy::off());
  REQUIRE(m.values[0] == Catch::Approx(0.6).margin(1e-12));
  REQUIRE(m.values[1] == Catch::Approx(0.8).margin(1e-12));
  REQUIRE(m.values[2] == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(m.method == AggMethod::Pinv);
  REQUIRE(m.source_count == 1);
}

TEST_CASE("pinv_vector on a single vector divides by its squared norm", "[memvec]") {
  // m+ = x (x^T x)^{-1} = x / 25 for x = (3, 4, 0).
  const Matrix x = from_columns({{3.0, 4.0, 0.0}});
  const MemoryVector m = pinv_vector(x, RidgePolicy::off());
  REQUIRE(m.values[0] == Catch::Approx(0.12).margin(1e-12));
  REQUIRE(m.values[1] == Catch::Approx(0.16).margin(1e-12));
  REQUIRE(m.values[2] == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("pinv_vector satisfies the unit-membership identity", "[memvec]") {
  const Matrix x = random_unit_columns(rng_key(704), 32, 10);
  const MemoryVector m = pinv_vector(x, RidgePolicy::off());
  for (std::size_t c = 0; c < x.cols; ++c)
    REQUIRE(dot(x.column(c), m.values) == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("pinv_vector matches the elimination oracle", "[memvec]") {
  for (std::uint64_t trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + trial % 12;
    const Matrix x = random_unit_columns(rng_key(705, trial), 24, n);
    const MemoryVector m = pinv_vector(x, RidgePolicy::off());
    REQUIRE(relative_error(m.values, pinv_vector_oracle(x, 0.0)) <= 1e-8);
  }
}

TEST_CASE("orthonormal groups collapse pinv onto sum", "[memvec]") {
  const Matrix x = orthonormal_columns(rng_key(706), 20, 7);
  const MemoryVector ms = sum_vector(x);
  const MemoryVector mp = pinv_vector(x, RidgePolicy::off());
  const double scale = testsupport::vector_norm(ms.values);
  REQUIRE(testsupport::vector_distance(mp.values, ms.values) <= 1e-10 * scale);
}

TEST_CASE("pinv respects the ridge policy on overcomplete groups", "[memvec]") {
  const Matrix x = random_unit_columns(rng_key(707), 4, 9);
  REQUIRE_THROWS_AS(pinv_vector(x, RidgePolicy::off()), SingularityError);
  REQUIRE_THROWS_AS(pinv_vector(x, RidgePolicy::fixed(0.0)), SingularityError);
  const MemoryVector m = pinv_vector(x, RidgePolicy::automatic());
  REQUIRE(m.ridge_used > 0.0);
  REQUIRE(m.values.size() == 4);
  for (double v : m.values) REQUIRE(std::isfinite(v));
}

TEST_CASE("overcomplete pinv agrees with the n-sized oracle system", "[memvec]") {
  // Same ridge, two routes: the library solves a d x d system through the
  // push-through identity, the oracle eliminates the full n x n one.
  const Matrix x = random_unit_columns(rng_key(708), 5, 12);
  const double ridge = 1e-4;
  const MemoryVector m = pinv_vector(x, RidgePolicy::fixed(ridge));
  REQUIRE(m.ridge_used == ridge);
  REQUIRE(relative_error(m.values, pinv_vector_oracle(x, ridge)) <= 1e-8);
}

TEST_CASE("ridge value carries into the solved system", "[memvec]") {
  const Matrix x = random_unit_columns(rng_key(709), 16, 5);
  const double ridge = 1e-3;
  const MemoryVector m = pinv_vector(x, RidgePolicy::fixed(ridge));
  REQUIRE(m.ridge_used == ridge);
  REQUIRE(relative_error(m.values, pinv_vector_oracle(x, ridge)) <= 1e-10);
}

TEST_CASE("similarity_sum equals the all-pairs double loop", "[memvec]") {
  const Matrix x = random_matrix(rng_key(710), 12, 6);
  const Matrix y = random_matrix(rng_key(711), 12, 8);
  const double direct = similarity_sum(sum_vector(x), sum_vector(y));
  REQUIRE(direct == Catch::Approx(similarity_sum_oracle(x, y)).margin(1e-10));
}

TEST_CASE("similarity_pinv equals its explicit expansion", "[memvec]") {
  const Matrix x = random_unit_columns(rng_key(712), 20, 6);
  const Matrix y = random_unit_columns(rng_key(713), 20, 9);
  const double direct = similarity_pinv(pinv_vector(x, RidgePolicy::off()), pinv_vector(y, RidgePolicy::off()));
  const double expansion = pinv_similarity_oracle(x, y, 0.0, 0.0);
  REQUIRE(direct == Catch::Approx(expansion).margin(1e-8 * std::max(1.0, std::abs(expansion))));
}

TEST_CASE("similarities are symmetric", "[memvec]") {
  const Matrix x = random_unit_columns(rng_key(714), 15, 5);
  const Matrix y = random_unit_columns(rng_key(715), 15, 7);
  REQUIRE(similarity_sum(sum_vector(x), sum_vector(y)) ==
          Catch::Approx(similarity_sum(sum_vector(y), sum_vector(x))).margin(1e-12));
  const MemoryVector px = pinv_vector(x, RidgePolicy::off());
  const MemoryVector py = pinv_vector(y, RidgePolicy::off());
  REQUIRE(similarity_pinv(px, py) == Catch::Approx(similarity_pinv(py, px)).margin(1e-12));
}

TEST_CASE("mixed aggregation methods are rejected", "[memvec]") {
  const Matrix x = random_unit_columns(rng_key(716), 10, 4);
  const MemoryVector s = sum_vector(x);
  const MemoryVector p = pinv_vector(x, RidgePolicy::off());
  REQUIRE_THROWS_AS(similarity(s, p), ValidationError);
  REQUIRE_THROWS_AS(similarity_sum(s, p), ValidationError);
  REQUIRE_THROWS_AS(similarity_pinv(s, p), ValidationError);
  MemoryVector short_sum = s;
  short_sum.values.pop_back();
  REQUIRE_THROWS_AS(similarity(s, short_sum), ValidationError);
}

TEST_CASE("aggregate dispatches on the method", "[memvec]") {
  const Matrix x = random_unit_columns(rng_key(717), 10, 4);
  REQUIRE(aggregate(x, AggMethod::Sum).values == sum_vector(x).values);
  REQUIRE(aggregate(x, AggMethod::Pinv, RidgePolicy::off()).values ==
          pinv_vector(x, RidgePolicy::off()).values);
  REQUIRE_THROWS_AS(aggregate(x, AggMethod::Precomputed), ValidationError);
  const Matrix single = from_columns({{1.0, 2.0}});
  const MemoryVector pre = aggregate(single, AggMethod::Precomputed);
  REQUIRE(pre.method == AggMethod::Precomputed);
  REQUIRE(pre.values == std::vector<double>{1.0, 2.0});
}

TEST_CASE("method names round-trip through parsing", "[memvec]") {
  for (const AggMethod m : {AggMethod::Sum, AggMethod::Pinv, AggMethod::Precomputed})
    REQUIRE(parse_agg_method(to_string(m)) == m);
  REQUIRE_THROWS_AS(parse_agg_method("median"), ValidationError);
}

TEST_CASE("cross weights of orthonormal sides reduce to raw inner products", "[memvec]") {
  const Matrix x = orthonormal_columns(rng_key(718), 18, 5);
  const Matrix y = orthonormal_columns(rng_key(719), 18, 6);
  const Matrix weighted = cross_weight_matrix(x, y, RidgePolicy::off());
  const Matrix raw = transpose_times(x, y);
  for (std::size_t i = 0; i < weighted.data.size(); ++i)
    REQUIRE(weighted.data[i] == Catch::Approx(raw.data[i]).margin(1e-10));
}

TEST_CASE("grand sum of cross weights equals similarity_pinv", "[memvec]") {
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    const Matrix x = random_unit_columns(rng_key(720, trial), 16, 4 + trial % 4);
    const Matrix y = random_unit_columns(rng_key(721, trial), 16, 3 + trial % 5);
    const double total = grand_sum(cross_weight_matrix(x, y, RidgePolicy::off()));
    const double sim = similarity_pinv(pinv_vector(x, RidgePolicy::off()), pinv_vector(y, RidgePolicy::off()));
    REQUIRE(total == Catch::Approx(sim).margin(1e-8 * std::max(1.0, std::abs(sim))));
  }
}

TEST_CASE("near-duplicate vectors are down-weighted per pair", "[memvec]") {
  // X holds three near-copies of u and one v; Y holds one of each. With raw
  // inner products the burst contributes ~3x per pair; democratized weights
  // shrink each duplicated pair's share instead.
  CounterRng rng(rng_key(722));
  const std::vector<double> u = l2_normalized(rng.gaussian_vector(12));
  std::vector<double> w = rng.gaussian_vector(12);
  // Make v orthogonal to u so the two aspects are cleanly separated.
  const double proj = dot(w, u);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= proj * u[i];
  const std::vector<double> v = l2_normalized(w);

  auto jitter = [&](const std::vector<double>& base) {
    std::vector<double> out = base;
    const std::vector<double> noise = rng.gaussian_vector(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += 0.05 * noise[i];
    return l2_normalized(out);
  };
  const Matrix x = from_columns({jitter(u), jitter(u), jitter(u), v});
  const Matrix y = from_columns({jitter(u), jitter(v)});

  const Matrix raw = transpose_times(x, y);
  const Matrix weighted = cross_weight_matrix(x, y, RidgePolicy::automatic());

  // Mean contribution of the bursty (u-copy, u) pairs versus the unique
  // (v, v) pair, before and after democratization.
  const double raw_burst = (raw.at(0, 0) + raw.at(1, 0) + raw.at(2, 0)) / 3.0;
  const double weighted_burst = (weighted.at(0, 0) + weighted.at(1, 0) + weighted.at(2, 0)) / 3.0;
  const double raw_unique = raw.at(3, 1);
  const double weighted_unique = weighted.at(3, 1);
  REQUIRE(raw_burst / raw_unique > 0.9);
  REQUIRE(weighted_burst / weighted_unique < raw_burst / raw_unique);
  REQUIRE(weighted_burst < raw_burst);
}

TEST_CASE("dual and primal pinv routes agree near the square case", "[memvec]") {
  // n = d - 1 goes through the n x n Gram solve, n = d + 1 through the d x d
  // outer solve. Both must match the elimination oracle at the same ridge.
  const double ridge = 1e-6;
  const Matrix tall = random_unit_columns(rng_key(723), 10, 9);
  const Matrix wide = random_unit_columns(rng_key(724), 10, 11);
  REQUIRE(relative_error(pinv_vector(tall, RidgePolicy::fixed(ridge)).values,
                         pinv_vector_oracle(tall, ridge)) <= 1e-8);
  REQUIRE(relative_error(pinv_vector(wide, RidgePolicy::fixed(ridge)).values,
                         pinv_vector_oracle(wide, ridge)) <= 1e-8);
}

TEST_CASE("grand_sum adds every entry", "[memvec]") {
  const Matrix m(2, 2, {1.0, -2.0, 3.5, 0.5});
  REQUIRE(grand_sum(m) == 3.0);
}
