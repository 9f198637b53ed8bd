#pragma once

// Floating-point helpers shared by every module. Dense complex matrices are
// Eigen::MatrixXcd throughout.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qms/exact.hpp"

namespace qms {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Default floating tolerance for PSD margins and identity residuals.
inline constexpr double kDefaultTol = 1e-9;

CMatrix to_complex(const ExactMatrix& m);

/// max |M - M*| entrywise.
double hermitian_residual(const CMatrix& m);

/// (M + M*) / 2
CMatrix hermitian_part(const CMatrix& m);

/// Smallest eigenvalue of the Hermitian part of M.
double min_eigenvalue(const CMatrix& m);

CMatrix kron(const CMatrix& a, const CMatrix& b);

CMatrix block_diagonal(const std::vector<CMatrix>& blocks);

/// Hermitian PSD square root; negative eigenvalues are clipped to zero.
CMatrix psd_sqrt(const CMatrix& m);

/// Moore-Penrose inverse of a Hermitian matrix with a relative spectral
/// cutoff: eigenvalues below cutoff * max|lambda| count as zero.
CMatrix hermitian_pinv(const CMatrix& m, double cutoff);

/// A t x (t-s) matrix W with [V, W] unitary, for a t x s isometry V.
CMatrix orthogonal_complement(const CMatrix& v);

/// Frobenius norm of V*V - I.
double isometry_residual(const CMatrix& v);

}  // namespace qms
