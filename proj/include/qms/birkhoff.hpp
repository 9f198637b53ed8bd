#pragma once

// The classical (s = 1) case: doubly stochastic matrices over Q and their
// Birkhoff-von Neumann decompositions.

#include <cstddef>
#include <vector>

#include "qms/exact.hpp"
#include "qms/permutation.hpp"

namespace qms::birkhoff {

class DoublyStochasticMatrix {
 public:
  /// Row-major entries; throws NotDoublyStochastic on negative entries or
  /// row/column sums different from 1.
  DoublyStochasticMatrix(std::size_t n, std::vector<Rational> entries);
  static DoublyStochasticMatrix from_rows(const std::vector<std::vector<Rational>>& rows);

  std::size_t n() const { return n_; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
  const std::vector<Rational>& entries() const { return entries_; }

 private:
  std::size_t n_;
  std::vector<Rational> entries_;
};

struct Term {
  Permutation perm;
  Rational weight;
};

/// Greedy decomposition: repeatedly take the lexicographically smallest
/// permutation supported on the remainder, weighted by its minimum entry.
/// The weights are positive, sum to 1, and there are at most (n-1)^2 + 1 terms.
std::vector<Term> decompose(const DoublyStochasticMatrix& m);

/// Sum_k weight_k P_k as a dense rational matrix (row-major).
std::vector<Rational> reconstruct(const std::vector<Term>& terms, std::size_t n);

/// Rank of the span of all n! permutation matrices (n <= 6).
std::size_t magic_space_dimension(std::size_t n);

/// True exactly for permutation matrices.
bool is_extreme_point(const DoublyStochasticMatrix& m);

}  // namespace qms::birkhoff
