#include "qms/extremality.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qms/obstruction.hpp"
#include "qms/sdp.hpp"

namespace qms::extremality {

namespace {

[[noreturn]] void violated(const std::string& what, double value) {
  std::ostringstream out;
  out << what << " (residual " << value << ")";
  throw Error(ErrorCode::InvariantViolated, out.str());
}

double max_eigenvalue(const CMatrix& m) { return -min_eigenvalue(-m); }

}  // namespace

void validate_triple(const DilationTriple& d, double tol) {
  const auto s = d.u.rows(), t = d.w.rows();
  if (d.u.cols() != s || d.w.cols() != t || d.v.rows() != t || d.v.cols() != s || t < s)
    throw Error(ErrorCode::ShapeMismatch, "dilation triple needs u s x s, w t x t, v t x s with t >= s");
  if (hermitian_residual(d.u) > tol) violated("u is not Hermitian", hermitian_residual(d.u));
  if (const double e = (d.u * d.u - d.u).norm(); e > tol) violated("u is not a projector", e);
  if (hermitian_residual(d.w) > tol) violated("w is not Hermitian", hermitian_residual(d.w));
  if (const double e = min_eigenvalue(d.w); e < -tol) violated("w is not PSD", -e);
  if (const double e = max_eigenvalue(d.w) - 1.0; e > tol) violated("w exceeds I", e);
  if (const double e = isometry_residual(d.v); e > tol) violated("v is not an isometry", e);
  if (const double e = (d.v.adjoint() * d.w * d.v - d.u).norm(); e > tol) violated("u != v* w v", e);
}

SplitResult split_decompose(const DilationTriple& d, double tol) {
  validate_triple(d, tol);
  const auto s = d.u.rows(), t = d.w.rows();
  SplitResult out;
  out.basis.resize(t, t);
  out.basis << d.v, orthogonal_complement(d.v);
  const CMatrix rotated = out.basis.adjoint() * d.w * out.basis;
  out.r = rotated.topRightCorner(s, t - s);
  out.p = hermitian_part(rotated.bottomRightCorner(t - s, t - s));
  out.residual = out.r.norm();
  out.p_margin = t == s ? 0.0 : min_eigenvalue(out.p - out.p * out.p);
  out.split = out.residual <= tol && out.p_margin >= -tol;
  return out;
}

ArvesonReport arveson_split_check(const QuantumPermutationMatrix& u, const BlockArray& a, const CMatrix& v, double tol) {
  const std::size_t n = u.n();
  if (a.n() != n) throw Error(ErrorCode::SizeMismatch, "U and A must have the same n");
  ArvesonReport report;
  report.ok = true;
  for (std::size_t k = 0; k < n * n; ++k) {
    auto r = split_decompose({u.numeric(k / n, k % n), a.numeric(k / n, k % n), v}, tol);
    report.max_residual = std::max(report.max_residual, r.residual);
    report.ok = report.ok && r.split;
    if (k == 0) report.basis = r.basis;
    report.entries.push_back(std::move(r));
  }
  return report;
}

ExtensionStep extend_dilation_step(const QuantumMagicSquare& a, const CMatrix& x, const ExtensionOptions& options) {
  const std::size_t n = a.n();
  const auto s = static_cast<Eigen::Index>(a.s());
  const auto d = static_cast<Eigen::Index>(n * n) * s;
  const double tol = options.tol;
  if (x.rows() != d || x.cols() != d) throw Error(ErrorCode::ShapeMismatch, "X must be n^2 s x n^2 s");

  std::vector<CMatrix> blocks;
  for (std::size_t k = 0; k < n * n; ++k) blocks.push_back(a.numeric(k / n, k % n));
  const auto at = [&](std::size_t i, std::size_t j) -> const CMatrix& { return blocks[i * n + j]; };

  const CMatrix top_left = at(0, 0) - at(0, 0) * at(0, 0);
  const auto top = sdp::herm_eig(top_left);
  if (top.values(s - 1) <= tol)
    throw Error(ErrorCode::DegenerateTopLeft, "a_11 - a_11^2 vanishes; permute rows and columns first");

  const CMatrix gram = hermitian_part(obstruction::phi_numeric(a) + x);
  const auto eig = sdp::herm_eig(gram);
  if (eig.values(0) < -tol) violated("phi(A) + X is not PSD", -eig.values(0));

  // B = Q Lambda^(1/2) keeping the positive part; row block (i, j) is b_ij*.
  Eigen::Index rank = 0;
  const double cut = tol * std::max(1.0, eig.values(d - 1));
  for (Eigen::Index k = 0; k < d; ++k) rank += eig.values(k) > cut;
  CMatrix big_b(d, rank);
  for (Eigen::Index k = d - rank, c = 0; k < d; ++k, ++c) big_b.col(c) = eig.vectors.col(k) * std::sqrt(eig.values(k));

  ExtensionStep step{{}, {}, {}, {}, {}, 0.0, {}, 0.0, a};
  for (std::size_t k = 0; k < n * n; ++k)
    step.b.push_back(big_b.block(static_cast<Eigen::Index>(k) * s, 0, s, rank).adjoint());
  const auto b = [&](std::size_t i, std::size_t j) -> const CMatrix& { return step.b[i * n + j]; };

  const auto note = [&](double e, const std::string& what) {
    step.relation_residual = std::max(step.relation_residual, e);
    if (e > tol) {
      std::ostringstream out;
      out << what << " fails by " << e;
      throw Error(ErrorCode::RelationViolated, out.str());
    }
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::string at_ij = "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
      note((b(i, j).adjoint() * b(i, j) - (at(i, j) - at(i, j) * at(i, j))).norm(), "b*b = a - a^2 at " + at_ij);
      for (std::size_t k = 0; k < n; ++k) {
        if (k == j) continue;
        note((b(i, j).adjoint() * b(i, k) + at(i, j) * at(i, k)).norm(), "row relation at " + at_ij);
        note((b(j, i).adjoint() * b(k, i) + at(j, i) * at(k, i)).norm(), "column relation at " + at_ij);
      }
    }
  for (std::size_t i = 0; i < n; ++i) {
    CMatrix row = CMatrix::Zero(rank, s), col = CMatrix::Zero(rank, s);
    for (std::size_t j = 0; j < n; ++j) {
      row += b(i, j);
      col += b(j, i);
    }
    note(row.norm(), "row sum of b at " + std::to_string(i + 1));
    note(col.norm(), "column sum of b at " + std::to_string(i + 1));
  }

  // Top eigenvector of b_11* b_11 = a_11 - a_11^2.
  step.v = top.vectors.col(s - 1) / std::sqrt(top.values(s - 1));
  const CVector anchor = b(0, 0) * step.v;

  std::vector<CVector> coupling;
  std::vector<double> corner;
  for (std::size_t k = 0; k < n * n; ++k) {
    step.p.push_back(hermitian_pinv(psd_sqrt(blocks[k]), options.pinv_cutoff));
    coupling.push_back(step.b[k].adjoint() * anchor);
    corner.push_back((step.p[k] * coupling.back()).squaredNorm());
  }
  step.row_sums.assign(n, 0.0);
  step.column_sums.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      step.row_sums[i] += corner[i * n + j];
      step.column_sums[j] += corner[i * n + j];
    }
  for (std::size_t j = 0; j < n; ++j) step.slack += 1.0 - step.column_sums[j];

  std::vector<CMatrix> grown;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double c = step.slack > tol ? (1.0 - step.row_sums[i]) * (1.0 - step.column_sums[j]) / step.slack : 0.0;
      step.c.push_back(c);
      CMatrix g(s + 1, s + 1);
      g.topLeftCorner(s, s) = at(i, j);
      g.topRightCorner(s, 1) = coupling[i * n + j];
      g.bottomLeftCorner(1, s) = coupling[i * n + j].adjoint();
      g(s, s) = corner[i * n + j] + c;
      grown.push_back(std::move(g));
    }
  step.extended = QuantumMagicSquare(BlockArray::floating(n, std::move(grown)), tol);
  return step;
}

}  // namespace qms::extremality
