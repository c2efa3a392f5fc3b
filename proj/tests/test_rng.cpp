#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "panomatch/rng.hpp"

using namespace panomatch;

TEST_CASE("same key gives an identical stream", "[rng]") {
  CounterRng a(rng_key(42, "stream"));
  CounterRng b(rng_key(42, "stream"));
  for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("different key parts give different streams", "[rng]") {
  CounterRng a(rng_key(42, "latent", std::size_t{0}));
  CounterRng b(rng_key(42, "latent", std::size_t{1}));
  CounterRng c(rng_key(42, "noise", std::size_t{0}));
  CounterRng d(rng_key(43, "latent", std::size_t{0}));
  const std::uint64_t ra = a.next_u64();
  REQUIRE(ra != b.next_u64());
  REQUIRE(ra != c.next_u64());
  REQUIRE(ra != d.next_u64());
}

TEST_CASE("key depends on argument order", "[rng]") {
  REQUIRE(rng_key(1, std::size_t{2}, std::size_t{3}) != rng_key(1, std::size_t{3}, std::size_t{2}));
}

TEST_CASE("string keys hash by content", "[rng]") {
  const std::string id = "loc_0001";
  REQUIRE(rng_key(7, id) == rng_key(7, "loc_0001"));
  REQUIRE(rng_key(7, id) != rng_key(7, "loc_0002"));
}

TEST_CASE("next_double stays in the unit interval", "[rng]") {
  CounterRng rng(rng_key(9));
  for (int i = 0; i < 10000; ++i) {
    const double v = rng.next_double();
    REQUIRE(v >= 0.0);
    REQUIRE(v < 1.0);
  }
}

TEST_CASE("next_below respects its bound and covers small ranges", "[rng]") {
  CounterRng rng(rng_key(11));
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t v = rng.next_below(7);
    REQUIRE(v < 7);
    seen.insert(v);
  }
  REQUIRE(seen.size() == 7);
}

TEST_CASE("permutation is a valid shuffle", "[rng]") {
  CounterRng rng(rng_key(13));
  for (const std::size_t n : {1u, 2u, 8u, 33u}) {
    std::vector<std::size_t> p = rng.permutation(n);
    REQUIRE(p.size() == n);
    std::sort(p.begin(), p.end());
    for (std::size_t i = 0; i < n; ++i) REQUIRE(p[i] == i);
  }
}

TEST_CASE("permutations vary with the key", "[rng]") {
  bool any_different = false;
  const std::vector<std::size_t> base = CounterRng(rng_key(1, std::size_t{0})).permutation(16);
  for (std::size_t rep = 1; rep < 8; ++rep)
    if (CounterRng(rng_key(1, rep)).permutation(16) != base) any_different = true;
  REQUIRE(any_different);
}

TEST_CASE("gaussian samples have sane moments", "[rng]") {
  CounterRng rng(rng_key(17));
  const std::size_t n = 50000;
  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = rng.next_gaussian();
    sum += v;
    sq += v * v;
  }
  const double mean = sum / static_cast<double>(n);
  const double var = sq / static_cast<double>(n) - mean * mean;
  REQUIRE(std::abs(mean) < 0.03);
  REQUIRE(std::abs(var - 1.0) < 0.03);
}

TEST_CASE("gaussian_vector matches repeated scalar draws", "[rng]") {
  CounterRng a(rng_key(19));
  CounterRng b(rng_key(19));
  const std::vector<double> v = a.gaussian_vector(9);
  for (std::size_t i = 0; i < 9; ++i) REQUIRE(v[i] == b.next_gaussian());
}
