#pragma once

// Quantum magic squares over Mat_s(C): n x n arrays of s x s Hermitian
// blocks, PSD, with every row and column summing to I_s. Blocks are held
// either exactly (over Q[i]) or in floating point, never mixed.

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "qms/exact.hpp"
#include "qms/numeric.hpp"
#include "qms/permutation.hpp"

namespace qms {

enum class Repr { Exact, Float };

std::string_view to_string(Repr r);

/// Raw n x n array of s x s blocks, stored row-major. Only the shape is
/// checked here; see validate_magic for the magic-square conditions.
class BlockArray {
 public:
  BlockArray() = default;
  static BlockArray exact(std::size_t n, std::vector<ExactMatrix> blocks);
  static BlockArray floating(std::size_t n, std::vector<CMatrix> blocks);

  std::size_t n() const { return n_; }
  std::size_t s() const { return s_; }
  Repr repr() const { return std::holds_alternative<std::vector<ExactMatrix>>(blocks_) ? Repr::Exact : Repr::Float; }
  bool is_exact() const { return repr() == Repr::Exact; }

  /// Block a_ij in its exact form; RepresentationMismatch on float arrays.
  const ExactMatrix& exact(std::size_t i, std::size_t j) const;
  /// Block a_ij in its float form; RepresentationMismatch on exact arrays.
  const CMatrix& floating(std::size_t i, std::size_t j) const;
  /// Block a_ij converted to floating point regardless of representation.
  CMatrix numeric(std::size_t i, std::size_t j) const;

  BlockArray to_float() const;

  const std::vector<ExactMatrix>& exact_blocks() const;
  const std::vector<CMatrix>& float_blocks() const;

 private:
  std::size_t n_ = 0;
  std::size_t s_ = 0;
  std::variant<std::vector<ExactMatrix>, std::vector<CMatrix>> blocks_;
};

struct Violation {
  enum class Kind { NotHermitian, NotPsd, RowSum, ColumnSum, NotProjector, RowOrthogonality, ColumnOrthogonality };
  Kind kind;
  // Block coordinates (0-based). For sums only `i` is meaningful; for
  // orthogonality (i, j, k) names the pair a_ij a_ik (rows) or a_ji a_ki.
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;
  // Min eigenvalue (exact: Rayleigh quotient of the witness) for PSD
  // violations, Frobenius residual otherwise.
  double margin = 0.0;
};

std::string_view to_string(Violation::Kind kind);

struct ValidationReport {
  bool ok = true;
  Repr repr = Repr::Exact;
  double tol = 0.0;  // unused (0) for exact reports
  std::vector<Violation> violations;

  bool has(Violation::Kind kind, std::size_t i, std::size_t j) const;
};

ValidationReport validate_magic(const BlockArray& a, double tol = kDefaultTol);

/// An n x n array that passed validate_magic at construction.
class QuantumMagicSquare : public BlockArray {
 public:
  /// Throws InvalidSquare if validate_magic(blocks, tol) fails.
  explicit QuantumMagicSquare(BlockArray blocks, double tol = kDefaultTol);

  QuantumMagicSquare to_float() const;
};

ValidationReport validate_quantum_permutation(const QuantumMagicSquare& a, double tol = kDefaultTol);

/// A quantum magic square whose entries are projectors.
class QuantumPermutationMatrix : public QuantumMagicSquare {
 public:
  explicit QuantumPermutationMatrix(QuantumMagicSquare square, double tol = kDefaultTol);
};

/// Largest Frobenius norm of a commutator [a_ij, a_kl] over all block pairs.
double max_commutator(const BlockArray& a);

/// (V* a_ij V)_ij for a t x s isometry V. The exact overload requires an
/// exact array; the float overload a float one.
BlockArray compress(const BlockArray& a, const CMatrix& v, double tol = kDefaultTol);
BlockArray compress(const BlockArray& a, const ExactMatrix& v);

/// Blockwise diag(a_ij, b_ij): block size s_A + s_B, same n.
QuantumMagicSquare direct_sum(const QuantumMagicSquare& a, const QuantumMagicSquare& b);

/// [[A, 0], [0, B]] in the outer index: size n_A + n_B, same s.
QuantumMagicSquare block_diagonal_sum(const QuantumMagicSquare& a, const QuantumMagicSquare& b);

/// A' = [[A, 0], [0, I_s]] of size n + 1.
QuantumMagicSquare embed_pad(const QuantumMagicSquare& a);

/// Unique n = 3 completion of a 2 x 2 corner of Hermitian blocks. Throws
/// CompletionNotPSD naming every completed block that fails PSD.
QuantumMagicSquare complete_corner(const BlockArray& corner, double tol = kDefaultTol);

/// The n = 2 square [[a, 1 - a], [1 - a, a]].
QuantumMagicSquare two_by_two(const ExactMatrix& a);
QuantumMagicSquare two_by_two(const CMatrix& a, double tol = kDefaultTol);

/// (1/n) I_s everywhere, exact.
QuantumMagicSquare constant_square(std::size_t n, std::size_t s);

/// A permutation matrix lifted to block size s (entries 0 or I_s), exact.
QuantumMagicSquare permutation_square(const Permutation& sigma, std::size_t s);

}  // namespace qms
