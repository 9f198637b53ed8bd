#include "qms/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qms::sdp {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Feasible: return "feasible";
    case Status::Infeasible: return "infeasible";
    case Status::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

EigenDecomposition herm_eig(const CMatrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::NonHermitianInput, "herm_eig needs a square matrix");
  if (hermitian_residual(m) > 1e-9) throw Error(ErrorCode::NonHermitianInput, "herm_eig input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m));
  return {es.eigenvalues(), es.eigenvectors()};
}

RMatrix realify(const CMatrix& m) {
  const Eigen::Index d = m.rows();
  RMatrix r(2 * d, 2 * d);
  r.topLeftCorner(d, d) = m.real();
  r.topRightCorner(d, d) = -m.imag();
  r.bottomLeftCorner(d, d) = m.imag();
  r.bottomRightCorner(d, d) = m.real();
  return r;
}

namespace {

// Re tr(A B) for Hermitian A.
double pair(const CMatrix& a, const CMatrix& b) { return (a.conjugate().cwiseProduct(b)).sum().real(); }

double max_step(const CMatrix& x, const CMatrix& dx) {
  Eigen::LLT<CMatrix> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  const auto l = llt.matrixL();
  CMatrix w = l.solve(dx);
  w = l.solve(w.adjoint()).adjoint();
  const double lam = min_eigenvalue(w);
  return lam >= 0 ? std::numeric_limits<double>::infinity() : -1.0 / lam;
}

}  // namespace

SdpProblem::SdpProblem(CMatrix constant, std::vector<CMatrix> directions)
    : constant_(std::move(constant)), directions_(std::move(directions)) {
  const auto d = constant_.rows();
  if (constant_.cols() != d) throw Error(ErrorCode::DimensionMismatch, "constant term must be square");
  if (hermitian_residual(constant_) > 1e-9) throw Error(ErrorCode::NonHermitianInput, "constant term is not Hermitian");
  std::vector<CMatrix> basis;  // orthonormal w.r.t. Re tr(A* B)
  for (std::size_t k = 0; k < directions_.size(); ++k) {
    const auto& f = directions_[k];
    if (f.rows() != d || f.cols() != d) throw Error(ErrorCode::DimensionMismatch, "direction size differs from constant term");
    if (hermitian_residual(f) > 1e-9) throw Error(ErrorCode::NonHermitianInput, "direction is not Hermitian");
    const double norm = f.norm();
    if (norm == 0.0) continue;
    CMatrix r = f / norm;
    for (const auto& q : basis) r -= pair(q, r) * q;
    for (const auto& q : basis) r -= pair(q, r) * q;  // second pass for stability
    const double rn = r.norm();
    if (rn < 1e-10) continue;
    basis.push_back(r / rn);
    independent_.push_back(k);
  }
}

CMatrix SdpProblem::evaluate(const RVector& x) const {
  CMatrix s = constant_;
  for (std::size_t k = 0; k < directions_.size(); ++k)
    if (x(k) != 0.0) s += x(k) * directions_[k];
  return s;
}

bool verify_primal(const SdpProblem& problem, const RVector& x, double eps) {
  if (static_cast<std::size_t>(x.size()) != problem.directions().size()) return false;
  return min_eigenvalue(problem.evaluate(x)) >= -eps;
}

bool verify_dual(const SdpProblem& problem, const CMatrix& y, double eps) {
  if (static_cast<std::size_t>(y.rows()) != problem.dimension()) return false;
  if (hermitian_residual(y) > 1e-9) return false;
  if (std::abs(y.trace().real() - 1.0) > 1e-9) return false;
  if (min_eigenvalue(y) < -eps) return false;
  for (const auto& f : problem.directions())
    if (std::abs(pair(f, y)) > eps) return false;
  return pair(problem.constant(), y) <= -10.0 * eps;
}

SdpResult FeasibilitySolver::solve(const SdpProblem& problem) {
  const double eps = options_.eps;
  if (!(eps > 0)) throw Error(ErrorCode::DimensionMismatch, "eps must be positive");
  const auto d = static_cast<Eigen::Index>(problem.dimension());
  const auto& idx = problem.independent();
  const std::size_t m = idx.size();
  const std::size_t K = m + 1;
  SdpResult result;
  result.x = RVector::Zero(static_cast<Eigen::Index>(problem.directions().size()));

  // Scaled data: C = F0 / c0, A_k = F_k / |F_k|, A_K = I / sqrt(d).
  const double c0 = problem.constant().norm() > 0 ? problem.constant().norm() : 1.0;
  const CMatrix c = problem.constant() / c0;
  std::vector<double> fnorm(m);
  scaled_.clear();
  for (std::size_t k = 0; k < m; ++k) {
    fnorm[k] = problem.directions()[idx[k]].norm();
    scaled_.push_back(problem.directions()[idx[k]] / fnorm[k]);
  }
  const double sqd = std::sqrt(static_cast<double>(d));
  scaled_.push_back(CMatrix::Identity(d, d) / sqd);
  RVector b = RVector::Zero(static_cast<Eigen::Index>(K));
  b(static_cast<Eigen::Index>(m)) = 1.0 / sqd;

  auto op = [&](const CMatrix& x) {
    RVector r(static_cast<Eigen::Index>(K));
    for (std::size_t k = 0; k < K; ++k) r(static_cast<Eigen::Index>(k)) = pair(scaled_[k], x);
    return r;
  };
  auto adj = [&](const RVector& y) {
    CMatrix s = CMatrix::Zero(d, d);
    for (std::size_t k = 0; k < K; ++k) s += y(static_cast<Eigen::Index>(k)) * scaled_[k];
    return s;
  };

  // Gram matrix of the constraints, for projecting candidate dual certificates.
  RMatrix gram(K, K);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t l = 0; l <= k; ++l)
      gram(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) =
          gram(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) = pair(scaled_[k], scaled_[l]);
  const Eigen::LDLT<RMatrix> gram_ldlt(gram);

  auto unscaled_x = [&](const RVector& y) {
    RVector x = RVector::Zero(static_cast<Eigen::Index>(problem.directions().size()));
    for (std::size_t k = 0; k < m; ++k) x(static_cast<Eigen::Index>(idx[k])) = -y(static_cast<Eigen::Index>(k)) * c0 / fnorm[k];
    return x;
  };

  // Dual-feasible start: Z = C - y_K A_K >= I.
  CMatrix x_mat = CMatrix::Identity(d, d) / static_cast<double>(d);
  RVector y = RVector::Zero(static_cast<Eigen::Index>(K));
  y(static_cast<Eigen::Index>(m)) = (min_eigenvalue(c) - 1.0) * sqd;
  CMatrix z = c - adj(y);

  auto try_primal = [&](const RVector& yy) {
    const RVector x = unscaled_x(yy);
    const double lam = min_eigenvalue(problem.evaluate(x));
    if (lam >= -eps) {
      result.status = Status::Feasible;
      result.x = x;
      result.t_star = lam;
      result.diagnostics.primal_min_eig = lam;
      return true;
    }
    return false;
  };

  // Project X / tr X onto the trace constraints and test it as a certificate.
  auto try_dual = [&]() {
    CMatrix cand = hermitian_part(x_mat) / x_mat.trace().real();
    RVector r = op(cand) - b;
    const RVector coef = gram_ldlt.solve(r);
    cand -= adj(coef);
    cand = hermitian_part(cand);
    const double lam = min_eigenvalue(cand);
    const double p = pair(problem.constant(), cand);
    double tres = 0.0;
    for (const auto& f : problem.directions()) tres = std::max(tres, std::abs(pair(f, cand)));
    if (lam >= -eps && p <= -10.0 * eps && tres <= eps) {
      result.status = Status::Infeasible;
      result.y = cand;
      result.t_star = p;
      result.diagnostics.dual_min_eig = lam;
      result.diagnostics.dual_pairing = p;
      result.diagnostics.dual_trace_residual = tres;
      return true;
    }
    return false;
  };

  const double gamma = 0.95;
  int stalls = 0;
  for (int it = 0; it < options_.max_iter; ++it) {
    result.diagnostics.iterations = it;
    if (try_primal(y)) return result;

    Eigen::LLT<CMatrix> zllt(z);
    if (zllt.info() != Eigen::Success) {
      result.diagnostics.note = "dual slack lost definiteness";
      break;
    }
    const CMatrix zinv = zllt.solve(CMatrix::Identity(d, d));
    const RVector rp = b - op(x_mat);
    const CMatrix rd = c - z - adj(y);
    const double mu = pair(x_mat, z) / static_cast<double>(d);
    const double pobj = pair(c, x_mat);
    const double dobj = b.dot(y);
    result.diagnostics.gap = pobj - dobj;
    result.t_star = dobj * c0;

    const double rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (rel_gap < 1e-13 && rp.norm() < 1e-12) {
      if (try_dual()) return result;
      result.diagnostics.note = "converged without a certificate";
      break;
    }

    RMatrix schur(K, K);
    work_.resize(K);
    for (std::size_t l = 0; l < K; ++l) work_[l] = x_mat * scaled_[l] * zinv;
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t l = 0; l <= k; ++l) {
        const double v = 0.5 * (pair(scaled_[k], work_[l]) + pair(scaled_[l], work_[k]));
        schur(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = v;
        schur(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) = v;
      }
    Eigen::LLT<RMatrix> sllt(schur);
    if (sllt.info() != Eigen::Success) {
      schur.diagonal().array() += 1e-14 * (1.0 + schur.diagonal().cwiseAbs().maxCoeff());
      sllt.compute(schur);
      if (sllt.info() != Eigen::Success) {
        result.diagnostics.note = "Schur complement not positive definite";
        break;
      }
    }

    const CMatrix xrdz = x_mat * rd * zinv;
    auto direction = [&](double target, const CMatrix* corr, CMatrix& dx, RVector& dy, CMatrix& dz) {
      CMatrix h = target * zinv - x_mat;
      if (corr) h -= (*corr) * zinv;
      const RVector rhs = rp - op(h - xrdz);
      dy = sllt.solve(rhs);
      dz = rd - adj(dy);
      dx = hermitian_part(h - x_mat * dz * zinv);
    };

    CMatrix dx, dz;
    RVector dy;
    direction(0.0, nullptr, dx, dy, dz);
    double ap = std::min(1.0, max_step(x_mat, dx));
    double ad = std::min(1.0, max_step(z, dz));
    const double mu_aff = pair(x_mat + ap * dx, z + ad * dz) / static_cast<double>(d);
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);
    const CMatrix corr = dx * dz;
    direction(sigma * mu, &corr, dx, dy, dz);
    ap = std::min(1.0, gamma * max_step(x_mat, dx));
    ad = std::min(1.0, gamma * max_step(z, dz));
    if (ap < 1e-10 && ad < 1e-10) {
      if (++stalls > 3) {
        result.diagnostics.note = "step length stalled";
        break;
      }
    }
    x_mat = hermitian_part(x_mat + ap * dx);
    y += ad * dy;
    z = hermitian_part(z + ad * dz);
  }
  if (try_primal(y)) return result;
  if (try_dual()) return result;
  result.status = Status::Inconclusive;
  if (result.diagnostics.note.empty()) result.diagnostics.note = "iteration limit";
  result.diagnostics.primal_min_eig = min_eigenvalue(problem.evaluate(unscaled_x(y)));
  return result;
}

SdpResult solve_feasibility(const SdpProblem& problem, double eps, int max_iter) {
  FeasibilitySolver solver(Options{eps, max_iter});
  return solver.solve(problem);
}

}  // namespace qms::sdp
