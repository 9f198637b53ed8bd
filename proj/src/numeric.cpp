#include "qms/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace qms {

CMatrix to_complex(const ExactMatrix& m) {
  CMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).to_complex();
  return out;
}

double hermitian_residual(const CMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

CMatrix hermitian_part(const CMatrix& m) { return (m + m.adjoint()) / 2.0; }

double min_eigenvalue(const CMatrix& m) {
  if (m.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

CMatrix block_diagonal(const std::vector<CMatrix>& blocks) {
  Eigen::Index r = 0, c = 0;
  for (const auto& b : blocks) {
    r += b.rows();
    c += b.cols();
  }
  CMatrix m = CMatrix::Zero(r, c);
  r = c = 0;
  for (const auto& b : blocks) {
    m.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return m;
}

CMatrix psd_sqrt(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m));
  RVector lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix hermitian_pinv(const CMatrix& m, double cutoff) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m));
  const RVector& lam = es.eigenvalues();
  const double top = lam.size() == 0 ? 0.0 : lam.cwiseAbs().maxCoeff();
  CVector inv(lam.size());
  for (Eigen::Index k = 0; k < lam.size(); ++k)
    inv(k) = (top > 0 && std::abs(lam(k)) > cutoff * top) ? Complex(1.0 / lam(k)) : Complex(0.0);
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix orthogonal_complement(const CMatrix& v) {
  const Eigen::Index t = v.rows(), s = v.cols();
  // Projector onto range(V)^perp; its top eigenvectors span the complement.
  const CMatrix proj = CMatrix::Identity(t, t) - v * v.adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(proj));
  return es.eigenvectors().rightCols(t - s);
}

double isometry_residual(const CMatrix& v) {
  return (v.adjoint() * v - CMatrix::Identity(v.cols(), v.cols())).norm();
}

}  // namespace qms
