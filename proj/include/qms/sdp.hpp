#pragma once

// Dense Hermitian pencil feasibility:
//
//   decide sup { t : F0 + sum_i x_i F_i - t I >= 0, x real }  versus 0.
//
// Solved as the primal-dual pair
//
//   (P)  min tr(F0 Y)  s.t.  tr(F_i Y) = 0, tr(Y) = 1, Y >= 0
//   (D)  max t         s.t.  F0 + sum_i x_i F_i - t I >= 0
//
// with an infeasible-primal / feasible-dual path-following interior point
// method (HKM direction, Mehrotra predictor-corrector). A primal point x with
// lambda_min >= -eps certifies feasibility; a PSD Y with tr(F0 Y) < 0 that is
// trace-orthogonal to every F_i certifies infeasibility.

#include <cstddef>
#include <string>
#include <vector>

#include "qms/numeric.hpp"

namespace qms::sdp {

struct EigenDecomposition {
  RVector values;   // ascending
  CMatrix vectors;  // unitary, columns are eigenvectors
};

/// Throws NonHermitianInput when the Hermiticity residual exceeds 1e-9.
EigenDecomposition herm_eig(const CMatrix& m);

/// [[Re M, -Im M], [Im M, Re M]]
RMatrix realify(const CMatrix& m);

class SdpProblem {
 public:
  /// Directions that are linearly dependent on earlier ones (Gram-Schmidt,
  /// relative drop tolerance 1e-10) are kept in the list but excluded from
  /// the solve; their coefficient in any returned x is zero.
  SdpProblem(CMatrix constant, std::vector<CMatrix> directions);

  std::size_t dimension() const { return static_cast<std::size_t>(constant_.rows()); }
  const CMatrix& constant() const { return constant_; }
  const std::vector<CMatrix>& directions() const { return directions_; }
  const std::vector<std::size_t>& independent() const { return independent_; }

  /// F0 + sum_i x_i F_i
  CMatrix evaluate(const RVector& x) const;

 private:
  CMatrix constant_;
  std::vector<CMatrix> directions_;
  std::vector<std::size_t> independent_;
};

enum class Status { Feasible, Infeasible, Inconclusive };

std::string_view to_string(Status s);

struct Diagnostics {
  int iterations = 0;
  double primal_min_eig = 0.0;     // lambda_min(F0 + sum x_i F_i) at the returned x
  double dual_min_eig = 0.0;       // lambda_min(Y)
  double dual_trace_residual = 0.0;  // max_i |tr(Y F_i)|
  double dual_pairing = 0.0;       // tr(Y F0)
  double gap = 0.0;                // last duality gap estimate
  std::string note;
};

struct SdpResult {
  Status status = Status::Inconclusive;
  // Feasible: lambda_min at the returned x (a lower bound on the optimum).
  // Infeasible: tr(Y F0) (an upper bound). Otherwise the last estimate.
  double t_star = 0.0;
  RVector x;  // when Feasible, one coefficient per direction
  CMatrix y;  // when Infeasible: Hermitian, PSD, trace 1
  Diagnostics diagnostics;
};

struct Options {
  double eps = 1e-7;
  int max_iter = 150;
};

/// Owns the scratch space of one solve at a time; use one instance per thread.
class FeasibilitySolver {
 public:
  explicit FeasibilitySolver(Options options = {}) : options_(options) {}

  SdpResult solve(const SdpProblem& problem);

  const Options& options() const { return options_; }

 private:
  Options options_;
  std::vector<CMatrix> scaled_;  // normalized independent directions, then I
  std::vector<CMatrix> work_;
};

SdpResult solve_feasibility(const SdpProblem& problem, double eps = 1e-7, int max_iter = 150);

/// lambda_min(F0 + sum x_i F_i) >= -eps, by an independent eigensolve.
bool verify_primal(const SdpProblem& problem, const RVector& x, double eps);

/// Y >= -eps I, |tr(Y F_i)| <= eps, tr(Y F0) <= -10 eps, tr(Y) = 1.
bool verify_dual(const SdpProblem& problem, const CMatrix& y, double eps);

}  // namespace qms::sdp
