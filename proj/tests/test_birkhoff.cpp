#include <random>

#include "doctest.h"
#include "qms/birkhoff.hpp"

using namespace qms;
using namespace qms::birkhoff;

namespace {

DoublyStochasticMatrix random_doubly_stochastic(std::mt19937& rng, std::size_t n) {
  std::uniform_int_distribution<std::size_t> terms(1, 2 * n);
  std::uniform_int_distribution<long> w(1, 20);
  std::vector<Rational> m(n * n);
  std::vector<Rational> weights(terms(rng));
  Rational total = 0;
  for (auto& x : weights) {
    x = w(rng);
    total += x;
  }
  std::vector<std::size_t> img(n);
  for (auto& x : weights) {
    for (std::size_t i = 0; i < n; ++i) img[i] = i;
    std::shuffle(img.begin(), img.end(), rng);
    for (std::size_t i = 0; i < n; ++i) m[i * n + img[i]] += x / total;
  }
  return DoublyStochasticMatrix(n, m);
}

// Row-by-row lexicographic search over all permutations.
Permutation lex_first_supported(const std::vector<Rational>& m, std::size_t n) {
  for (const auto& p : all_permutations(n)) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) ok = sgn(m[i * n + p(i)]) > 0;
    if (ok) return p;
  }
  throw std::logic_error("no supported permutation");
}

}  // namespace

TEST_CASE("decomposition examples") {
  const auto half = Rational(1, 2);
  const auto m = DoublyStochasticMatrix::from_rows({{half, half}, {half, half}});
  const auto terms = decompose(m);
  REQUIRE(terms.size() == 2);
  CHECK(terms[0].perm == Permutation::identity(2));
  CHECK(terms[0].weight == half);
  CHECK(terms[1].perm == Permutation({1, 0}));
  CHECK(terms[1].weight == half);

  const auto p = Permutation({2, 0, 1});
  std::vector<Rational> pm(9);
  for (std::size_t i = 0; i < 3; ++i) pm[i * 3 + p(i)] = 1;
  const auto single = decompose(DoublyStochasticMatrix(3, pm));
  REQUIRE(single.size() == 1);
  CHECK(single[0].perm == p);
  CHECK(single[0].weight == 1);

  std::vector<Rational> id(16);
  for (std::size_t i = 0; i < 4; ++i) id[i * 5] = 1;
  const auto id_terms = decompose(DoublyStochasticMatrix(4, id));
  REQUIRE(id_terms.size() == 1);
  CHECK(id_terms[0].perm == Permutation::identity(4));

  const auto thirds = DoublyStochasticMatrix(3, std::vector<Rational>(9, Rational(1, 3)));
  const auto tt = decompose(thirds);
  CHECK(tt.size() <= 5);
  CHECK(reconstruct(tt, 3) == thirds.entries());
  CHECK_FALSE(is_extreme_point(thirds));
  CHECK_FALSE(is_extreme_point(m));

  CHECK_THROWS_AS(DoublyStochasticMatrix::from_rows({{1, 0}, {1, 0}}), Error);
  CHECK_THROWS_AS(DoublyStochasticMatrix::from_rows({{Rational(3, 2), Rational(-1, 2)}, {Rational(-1, 2), Rational(3, 2)}}),
                  Error);
}

TEST_CASE("decompositions of random doubly stochastic matrices") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const auto m = random_doubly_stochastic(rng, n);
    const auto terms = decompose(m);
    CHECK(terms.size() <= (n - 1) * (n - 1) + 1);
    Rational total = 0;
    for (const auto& t : terms) {
      CHECK(sgn(t.weight) > 0);
      total += t.weight;
    }
    CHECK(total == 1);
    CHECK(reconstruct(terms, n) == m.entries());
    // The first term is the lexicographically smallest supported permutation.
    CHECK(terms.front().perm == lex_first_supported(m.entries(), n));
  }
}

TEST_CASE("magic space dimension matches (n-1)^2 + 1") {
  for (std::size_t n = 1; n <= 6; ++n) CHECK(magic_space_dimension(n) == (n - 1) * (n - 1) + 1);
  CHECK_THROWS_AS(magic_space_dimension(7), Error);
}

TEST_CASE("extreme points are permutation matrices") {
  for (const auto& p : all_permutations(4)) {
    std::vector<Rational> pm(16);
    for (std::size_t i = 0; i < 4; ++i) pm[i * 4 + p(i)] = 1;
    CHECK(is_extreme_point(DoublyStochasticMatrix(4, pm)));
  }
  std::mt19937 rng(5);
  int mixed = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = random_doubly_stochastic(rng, 4);
    const bool extreme = is_extreme_point(m);
    CHECK(extreme == (decompose(m).size() == 1));
    mixed += extreme ? 0 : 1;
  }
  CHECK(mixed > 0);
}
