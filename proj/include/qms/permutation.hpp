#pragma once

#include <cstddef>
#include <vector>

#include "qms/exact.hpp"
#include "qms/numeric.hpp"

namespace qms {

/// A bijection on {0..n-1} in one-line notation: image[i] = sigma(i).
/// Serialized 1-based, matching the usual {1..n} convention.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<std::size_t> image);

  static Permutation identity(std::size_t n);

  std::size_t size() const { return image_.size(); }
  std::size_t operator()(std::size_t i) const { return image_[i]; }
  const std::vector<std::size_t>& image() const { return image_; }

  /// P with P(i, sigma(i)) = 1.
  ExactMatrix matrix() const;
  CMatrix matrix_numeric() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation& a, const Permutation& b) { return a.image_ <=> b.image_; }

 private:
  std::vector<std::size_t> image_;
};

/// All n! permutations in lexicographic order; position k is the fixed
/// bijection S_n -> {0..n!-1}. Throws TooLarge above n = 8.
const std::vector<Permutation>& all_permutations(std::size_t n);

/// Lexicographic rank of sigma among all_permutations(sigma.size()).
std::size_t lex_rank(const Permutation& sigma);

std::size_t factorial(std::size_t n);

}  // namespace qms
