#pragma once

// Semiclassical squares: A = sum_pi P_pi (x) q_pi with q_pi >= 0 summing to
// I. Decided by a linear matrix inequality, produced in closed form for
// squares deep enough inside, and dilated to commuting quantum permutations.

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qms/sdp.hpp"
#include "qms/structures.hpp"
#include "qms/verdict.hpp"

namespace qms::semiclassical {

/// Weights q_pi indexed by lexicographic rank of pi.
class Decomposition {
 public:
  Decomposition() = default;
  static Decomposition exact(std::size_t n, std::vector<ExactMatrix> q);
  static Decomposition floating(std::size_t n, std::vector<CMatrix> q);

  std::size_t n() const { return n_; }
  std::size_t s() const { return s_; }
  bool is_exact() const { return std::holds_alternative<std::vector<ExactMatrix>>(q_); }

  const ExactMatrix& exact(std::size_t rank) const;
  const CMatrix& floating(std::size_t rank) const;
  CMatrix numeric(std::size_t rank) const;
  std::size_t size() const;

  /// Sum_pi P_pi (x) q_pi as a block array (same representation).
  BlockArray reconstruct() const;

 private:
  std::size_t n_ = 0;
  std::size_t s_ = 0;
  std::variant<std::vector<ExactMatrix>, std::vector<CMatrix>> q_;
};

/// u_ij = diag(p_ij^pi I_s : pi) and V the stacked square roots of q_pi.
struct CommutingDilation {
  QuantumMagicSquare u;  // exact, block size n! s
  CMatrix v;             // (n! s) x s isometry
};

/// The LMI  B (x) 1 + sum C_ij (x) a_ij + sum D_pi (x) q_pi >= 0 with q_pi
/// expanded in hermitian_basis(s); direction pi_rank * s^2 + p carries
/// D_pi (x) h_p. Throws TooLarge for n > 5.
sdp::SdpProblem build_semiclassical_lmi(const QuantumMagicSquare& a);

/// Reads q_pi off a primal point of build_semiclassical_lmi.
std::vector<CMatrix> weights_from_lmi_point(std::size_t n, std::size_t s, const RVector& x);

struct CheckResult {
  Verdict verdict = Verdict::Inconclusive;
  std::optional<Decomposition> decomposition;  // Yes
  std::optional<CMatrix> dual;                 // No: LMI certificate
  sdp::SdpResult sdp;
  std::string note;
};

struct CheckOptions {
  double eps = 1e-7;
  int max_iter = 150;
  /// Denominator bounds tried in turn during exact repair.
  std::vector<unsigned long> denominators{1000ul, 1000000ul, 1000000000ul};
};

/// Exact inputs get an exact decomposition or Inconclusive.
CheckResult check_semiclassical(const QuantumMagicSquare& a, const CheckOptions& options = {});

/// Projects a family of weights onto {sum_{pi(i)=j} q_pi = a_ij}, exactly.
/// The result is Hermitian whenever the inputs are.
std::vector<ExactMatrix> project_weights(const QuantumMagicSquare& a, const std::vector<ExactMatrix>& q);
std::vector<CMatrix> project_weights(const QuantumMagicSquare& a, const std::vector<CMatrix>& q);

/// Same, moving only the weights not marked frozen; nullopt when the
/// constraints cannot be met that way.
std::optional<std::vector<ExactMatrix>> project_weights(const QuantumMagicSquare& a, const std::vector<ExactMatrix>& q,
                                                        const std::vector<bool>& frozen);

/// Closed-form decomposition valid when sum_k a_{k,pi(k)} >= (n-2)/(n-1) I
/// for every pi. Throws BoundViolated naming the offending permutations.
Decomposition interior_map_decomposition(const QuantumMagicSquare& a);

CommutingDilation synthesize_commuting_dilation(const Decomposition& dec);

struct MapReport {
  bool ok = true;
  std::vector<std::size_t> not_positive;  // ranks pi with q_pi not PSD
  bool unital = true;
  double unital_residual = 0.0;  // 0 in exact mode
  std::vector<std::pair<std::size_t, std::size_t>> mismatched;  // (i, j) with phi(f_ij) != a_ij
};

/// q_pi >= 0, sum q_pi = I, and sum_{pi(i)=j} q_pi = a_ij. Exact when both
/// inputs are exact, otherwise to tol.
MapReport verify_positive_unital_map(const Decomposition& dec, const QuantumMagicSquare& a, double tol = kDefaultTol);

}  // namespace qms::semiclassical
