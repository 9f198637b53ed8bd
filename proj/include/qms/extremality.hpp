#pragma once

// Splitting of projector dilations, the resulting Arveson extremality of
// quantum permutation matrices, and the one-step dilation extension of a
// quantum magic square satisfying the weak constraint.

#include <cstddef>
#include <vector>

#include "qms/structures.hpp"

namespace qms::extremality {

/// u = v* w v with u an s x s projector, 0 <= w <= I_t and v a t x s isometry.
struct DilationTriple {
  CMatrix u;
  CMatrix w;
  CMatrix v;
};

/// Throws InvariantViolated naming the first failed condition.
void validate_triple(const DilationTriple& d, double tol = kDefaultTol);

struct SplitResult {
  CMatrix basis;  // [v, v_perp], unitary
  CMatrix p;      // (t-s) x (t-s) lower-right block
  CMatrix r;      // s x (t-s) off-block
  double residual = 0.0;  // ||r||_F
  double p_margin = 0.0;  // min eigenvalue of p - p^2
  bool split = false;     // residual and p_margin within tol
};

/// w = [[u, r], [r*, p]] in the basis [v, v_perp].
SplitResult split_decompose(const DilationTriple& d, double tol = kDefaultTol);

struct ArvesonReport {
  bool ok = false;
  double max_residual = 0.0;
  CMatrix basis;                     // common to every entry
  std::vector<SplitResult> entries;  // row-major
};

/// Splits every a_ij = diag(u_ij, c_ij) for u_ij = V* a_ij V. `a` is taken
/// unvalidated so entries outside [0, I] reach split_decompose.
ArvesonReport arveson_split_check(const QuantumPermutationMatrix& u, const BlockArray& a, const CMatrix& v,
                                  double tol = kDefaultTol);

struct ExtensionOptions {
  double tol = 1e-8;
  /// Relative spectral cutoff for the pseudo-inverse of a_ij^(1/2).
  double pinv_cutoff = 1e-10;
};

struct ExtensionStep {
  std::vector<CMatrix> b;   // t x s, row-major in (i, j); phi(A) + X = B B*
  CVector v;                // v* b_11* b_11 v = 1
  std::vector<CMatrix> p;   // pseudo-inverse of a_ij^(1/2)
  std::vector<double> row_sums;     // s_{i*}
  std::vector<double> column_sums;  // s_{*j}
  double slack = 0.0;               // s
  std::vector<double> c;            // c_ij
  double relation_residual = 0.0;
  QuantumMagicSquare extended;      // A', block size s + 1
};

/// Builds A' from A and X with phi(A) + X >= 0 and X supported on Z (x) Z.
/// DegenerateTopLeft if a_11 - a_11^2 vanishes, InvariantViolated if
/// phi(A) + X is not PSD, RelationViolated if the Gram relations fail.
ExtensionStep extend_dilation_step(const QuantumMagicSquare& a, const CMatrix& x, const ExtensionOptions& options = {});

}  // namespace qms::extremality
