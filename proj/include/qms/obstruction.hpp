#pragma once

// A necessary condition for membership in the matrix convex hull of the
// quantum permutation matrices:
//
//   weak:   exists X in Her(Z (x) Z (x) Mat_s)     with phi(A) + X >= 0
//   strong: exists X in Her(Z_e (x) Z_e (x) Mat_s) with phi(A) + psi(A) + X >= 0
//
// where Z is the zero-diagonal n x n matrices and Z_e those with vanishing
// row and column sums. Infeasibility is certified by a PSD Y orthogonal to
// every direction with tr(Y B_0) < 0, made exact over Q[i].

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qms/sdp.hpp"
#include "qms/structures.hpp"
#include "qms/verdict.hpp"

namespace qms::obstruction {

enum class Mode { Weak, Strong };

std::string_view to_string(Mode m);
Mode parse_mode(std::string_view text);

/// col(A): rows (i, j) in lexicographic order, block a_ij. n^2 s x s.
ExactMatrix col_matrix(const QuantumMagicSquare& a);
/// diag(A): block diagonal with a_ij at (i, j). n^2 s x n^2 s.
ExactMatrix diag_matrix(const QuantumMagicSquare& a);

/// diag(A) - col(A) col(A)*. The exact constructions need an exact square;
/// the numeric ones below take either representation.
ExactMatrix phi_matrix(const QuantumMagicSquare& a);
/// Throws NotDefinedForSmallN for n < 3.
ExactMatrix psi_matrix(const QuantumMagicSquare& a);

CMatrix phi_numeric(const QuantumMagicSquare& a);
CMatrix psi_numeric(const QuantumMagicSquare& a);

struct PsiConstants {
  Rational alpha, beta, gamma;
};
PsiConstants psi_constants(std::size_t n);

/// E_ij for i != j, row-major.
std::vector<ExactMatrix> z_basis(std::size_t n);
/// Real basis of Her(Z): E_ij + E_ji and -i E_ij + i E_ji for i < j.
std::vector<ExactMatrix> z_hermitian_basis(std::size_t n);
/// Real basis of Her(Z_e) from the exact nullspace of the sum constraints,
/// each scaled by a real factor so its first nonzero entry is 1 or i.
/// For n = 3 this is the single generator [[0,i,-i],[-i,0,i],[i,-i,0]].
std::vector<ExactMatrix> ze_basis(std::size_t n);

/// One direction h_a (x) h_b (x) k_p of the pencil.
struct DirectionIndex {
  std::size_t a, b, p;
};

class ObstructionProblem {
 public:
  ObstructionProblem(QuantumMagicSquare a, Mode mode);

  const QuantumMagicSquare& square() const { return a_; }
  Mode mode() const { return mode_; }
  const sdp::SdpProblem& pencil() const { return pencil_; }
  std::size_t dimension() const { return pencil_.dimension(); }

  const std::vector<ExactMatrix>& generators() const { return gens_; }
  const std::vector<ExactMatrix>& hermitian() const { return herm_; }
  const std::vector<DirectionIndex>& index() const { return index_; }

  /// B_0 and B_j over Q[i]. Needs an exact square.
  ExactMatrix constant_exact() const;
  ExactMatrix direction_exact(std::size_t j) const;
  /// tr(B_j B_k), from the tensor factors.
  GaussianRational direction_gram(std::size_t j, std::size_t k) const;

 private:
  QuantumMagicSquare a_;
  Mode mode_;
  std::vector<ExactMatrix> gens_;  // z_hermitian_basis or ze_basis
  std::vector<ExactMatrix> herm_;  // hermitian_basis(s)
  std::vector<DirectionIndex> index_;
  sdp::SdpProblem pencil_;
};

/// Builds the pencil; in strong mode the kernel identity
/// (phi + psi)(e (x) e_i (x) I) = 0 is checked and InvariantViolated thrown
/// if it fails (exactly for exact squares, to 1e-9 otherwise).
ObstructionProblem build_obstruction(const QuantumMagicSquare& a, Mode mode);

struct ObstructionResult {
  /// Yes: the formula holds (no obstruction; not a membership proof).
  /// No: it fails, so A is outside the matrix convex hull.
  Verdict verdict = Verdict::Inconclusive;
  std::optional<CMatrix> x;  // Yes: the X found
  std::optional<CMatrix> y;  // No: numeric dual certificate
  sdp::SdpResult sdp;
};

ObstructionResult check_mconv_obstruction(const QuantumMagicSquare& a, Mode mode, double eps = 1e-7, int max_iter = 150);

/// The n = 3, s = 2 square whose strong formula fails.
QuantumMagicSquare counterexample_m2_3();

struct NumericCertificate {
  CMatrix y;  // Hermitian, trace 1, positive definite
  double pairing = 0.0;         // tr(Y B_0)
  double trace_residual = 0.0;  // max |tr(Y B_j)|
  double min_eig = 0.0;
};

/// Throws NotFound when the formula is feasible and Inconclusive when the
/// solver cannot decide. The solver's Y is blended with I/d so it is
/// positive definite while tr(Y B_0) keeps half its value.
NumericCertificate find_dual_certificate(const ObstructionProblem& p, double eps = 1e-7, int max_iter = 150);

struct ObstructionCertificate {
  std::size_t n = 0, s = 0;
  Mode mode = Mode::Strong;
  ExactMatrix y;
  GaussianRational pairing_b0;             // tr(Y B_0) < 0
  std::vector<GaussianRational> pairings;  // tr(Y B_j) = 0
};

/// Rationalize, symmetrize, project onto {tr(Y B_j) = 0} and verify, all
/// exactly. Throws CertificationFailed naming the condition that broke.
ObstructionCertificate exact_certify(const CMatrix& y, const ObstructionProblem& p, unsigned long max_denominator);

/// exact_certify with each bound in turn until one passes.
ObstructionCertificate exact_certify(const CMatrix& y, const ObstructionProblem& p,
                                     const std::vector<unsigned long>& ladder = {1000ul, 1000000ul, 1000000000ul});

struct CertificateCheck {
  bool ok = false;
  std::string reason;  // empty when ok
};

/// Exact re-verification against the problem rebuilt from `a`.
CertificateCheck verify_certificate(const ObstructionCertificate& cert, const QuantumMagicSquare& a);

/// v (x) v (x) I_s with v = [I_{n-1}; 0]: compresses the pencil of
/// embed_pad(A) to that of A.
CMatrix pad_compression(std::size_t n, std::size_t s);

/// X = B B* - phi(A) for A = V* U V, with B stacking the b_ij* read off
/// [V, V_perp]* u_ij [V, V_perp]. phi(A) + X = B B* >= 0.
CMatrix mconv_witness(const QuantumMagicSquare& u, const CMatrix& v);

}  // namespace qms::obstruction
