#include "qms/semiclassical.hpp"

#include <sstream>

#include "qms/permutation.hpp"

namespace qms::semiclassical {

namespace {

// Lexicographic rank of every permutation with pi(i) = j, for each (i, j).
std::vector<std::vector<std::size_t>> fibres(std::size_t n) {
  std::vector<std::vector<std::size_t>> out(n * n);
  const auto& perms = all_permutations(n);
  for (std::size_t r = 0; r < perms.size(); ++r)
    for (std::size_t i = 0; i < n; ++i) out[i * n + perms[r](i)].push_back(r);
  return out;
}

// Gram matrix of the fibre incidence: #{pi : pi(i) = j, pi(k) = l}, over
// the permutations not frozen.
ExactMatrix incidence_gram(std::size_t n, const std::vector<bool>& frozen) {
  ExactMatrix m(n * n, n * n);
  const auto& perms = all_permutations(n);
  for (std::size_t r = 0; r < perms.size(); ++r) {
    if (frozen[r]) continue;
    const auto& p = perms[r];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) m(i * n + p(i), k * n + p(k)) += GaussianRational(1);
  }
  return m;
}

ExactMatrix exact_from_numeric(const CMatrix& m, unsigned long den) {
  const auto r = static_cast<std::size_t>(m.rows()), c = static_cast<std::size_t>(m.cols());
  ExactMatrix out(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      const Complex z = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      out(i, j) = GaussianRational(rationalize(z.real(), den), rationalize(z.imag(), den));
    }
  return out;
}

ExactMatrix exact_hermitian_part(const ExactMatrix& m) {
  ExactMatrix h = m + m.adjoint();
  h *= GaussianRational(Rational(1, 2));
  return h;
}

}  // namespace

Decomposition Decomposition::exact(std::size_t n, std::vector<ExactMatrix> q) {
  if (q.size() != factorial(n) || q.empty()) throw Error(ErrorCode::ShapeMismatch, "need one weight per permutation");
  Decomposition d;
  d.n_ = n;
  d.s_ = q.front().rows();
  for (const auto& m : q)
    if (m.rows() != d.s_ || m.cols() != d.s_) throw Error(ErrorCode::ShapeMismatch, "weights must share one square size");
  d.q_ = std::move(q);
  return d;
}

Decomposition Decomposition::floating(std::size_t n, std::vector<CMatrix> q) {
  if (q.size() != factorial(n) || q.empty()) throw Error(ErrorCode::ShapeMismatch, "need one weight per permutation");
  Decomposition d;
  d.n_ = n;
  d.s_ = static_cast<std::size_t>(q.front().rows());
  for (const auto& m : q)
    if (static_cast<std::size_t>(m.rows()) != d.s_ || static_cast<std::size_t>(m.cols()) != d.s_)
      throw Error(ErrorCode::ShapeMismatch, "weights must share one square size");
  d.q_ = std::move(q);
  return d;
}

const ExactMatrix& Decomposition::exact(std::size_t rank) const {
  if (!is_exact()) throw Error(ErrorCode::RepresentationMismatch, "decomposition is floating point");
  return std::get<0>(q_)[rank];
}

const CMatrix& Decomposition::floating(std::size_t rank) const {
  if (is_exact()) throw Error(ErrorCode::RepresentationMismatch, "decomposition is exact");
  return std::get<1>(q_)[rank];
}

CMatrix Decomposition::numeric(std::size_t rank) const {
  return is_exact() ? to_complex(exact(rank)) : floating(rank);
}

std::size_t Decomposition::size() const {
  return is_exact() ? std::get<0>(q_).size() : std::get<1>(q_).size();
}

BlockArray Decomposition::reconstruct() const {
  const auto fib = fibres(n_);
  if (is_exact()) {
    std::vector<ExactMatrix> blocks(n_ * n_, ExactMatrix(s_, s_));
    for (std::size_t k = 0; k < n_ * n_; ++k)
      for (auto r : fib[k]) blocks[k] += exact(r);
    return BlockArray::exact(n_, std::move(blocks));
  }
  std::vector<CMatrix> blocks(n_ * n_, CMatrix::Zero(static_cast<Eigen::Index>(s_), static_cast<Eigen::Index>(s_)));
  for (std::size_t k = 0; k < n_ * n_; ++k)
    for (auto r : fib[k]) blocks[k] += floating(r);
  return BlockArray::floating(n_, std::move(blocks));
}

sdp::SdpProblem build_semiclassical_lmi(const QuantumMagicSquare& a) {
  const std::size_t n = a.n(), s = a.s();
  if (n > 5) throw Error(ErrorCode::TooLarge, "semiclassical LMI supports n <= 5");
  const std::size_t nf = factorial(n);
  const std::size_t slots = nf + 2 * n + 2;
  const auto dim = static_cast<Eigen::Index>(slots * s);
  const std::size_t o3 = 2, o4 = 2 + nf, o5 = 2 + nf + n;
  const auto es = static_cast<Eigen::Index>(s);
  auto blk = [&](CMatrix& m, std::size_t r, std::size_t c) {
    return m.block(static_cast<Eigen::Index>(r) * es, static_cast<Eigen::Index>(c) * es, es, es);
  };

  CMatrix f0 = CMatrix::Zero(dim, dim);
  const CMatrix id = CMatrix::Identity(es, es);
  blk(f0, 0, 1) = id;
  blk(f0, 1, 0) = id;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const CMatrix aij = a.numeric(i, j);
      blk(f0, o4 + i, o5 + j) = aij;
      blk(f0, o5 + j, o4 + i) = aij;
    }

  std::vector<CMatrix> basis;
  for (const auto& h : hermitian_basis(s)) basis.push_back(to_complex(h));
  std::vector<CMatrix> dirs;
  dirs.reserve(nf * basis.size());
  const auto& perms = all_permutations(n);
  for (std::size_t r = 0; r < nf; ++r)
    for (const auto& h : basis) {
      CMatrix f = CMatrix::Zero(dim, dim);
      blk(f, 0, 1) = -h;
      blk(f, 1, 0) = -h;
      blk(f, o3 + r, o3 + r) = h;
      for (std::size_t i = 0; i < n; ++i) {
        blk(f, o4 + i, o5 + perms[r](i)) = -h;
        blk(f, o5 + perms[r](i), o4 + i) = -h;
      }
      dirs.push_back(std::move(f));
    }
  return {std::move(f0), std::move(dirs)};
}

std::vector<CMatrix> weights_from_lmi_point(std::size_t n, std::size_t s, const RVector& x) {
  const std::size_t nf = factorial(n), m = s * s;
  if (static_cast<std::size_t>(x.size()) != nf * m) throw Error(ErrorCode::DimensionMismatch, "LMI point has the wrong length");
  std::vector<CMatrix> basis;
  for (const auto& h : hermitian_basis(s)) basis.push_back(to_complex(h));
  std::vector<CMatrix> q(nf, CMatrix::Zero(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)));
  for (std::size_t r = 0; r < nf; ++r)
    for (std::size_t p = 0; p < m; ++p) q[r] += x(static_cast<Eigen::Index>(r * m + p)) * basis[p];
  return q;
}

std::vector<ExactMatrix> project_weights(const QuantumMagicSquare& a, const std::vector<ExactMatrix>& q) {
  auto out = project_weights(a, q, std::vector<bool>(q.size(), false));
  if (!out) throw Error(ErrorCode::InvariantViolated, "weight projection system is inconsistent");
  return std::move(*out);
}

std::optional<std::vector<ExactMatrix>> project_weights(const QuantumMagicSquare& a, const std::vector<ExactMatrix>& q,
                                                        const std::vector<bool>& frozen) {
  if (!a.is_exact()) throw Error(ErrorCode::RepresentationMismatch, "exact projection needs an exact square");
  const std::size_t n = a.n(), s = a.s();
  const auto fib = fibres(n);
  ExactMatrix residual(n * n, s * s);
  for (std::size_t k = 0; k < n * n; ++k) {
    ExactMatrix sum = a.exact(k / n, k % n) * GaussianRational(-1);
    for (auto r : fib[k]) sum += q[r];
    for (std::size_t e = 0; e < s * s; ++e) residual(k, e) = sum(e / s, e % s);
  }
  const auto w = solve_exact(incidence_gram(n, frozen), residual);
  if (!w) return std::nullopt;
  std::vector<ExactMatrix> out = q;
  const auto& perms = all_permutations(n);
  for (std::size_t r = 0; r < out.size(); ++r)
    if (!frozen[r])
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = i * n + perms[r](i);
        for (std::size_t e = 0; e < s * s; ++e) out[r](e / s, e % s) -= (*w)(k, e);
      }
  return out;
}

std::vector<CMatrix> project_weights(const QuantumMagicSquare& a, const std::vector<CMatrix>& q) {
  const std::size_t n = a.n(), s = a.s();
  const auto nn = static_cast<Eigen::Index>(n * n), ss = static_cast<Eigen::Index>(s * s);
  const auto fib = fibres(n);
  CMatrix residual(nn, ss);
  for (std::size_t k = 0; k < n * n; ++k) {
    CMatrix sum = -a.numeric(k / n, k % n);
    for (auto r : fib[k]) sum += q[r];
    residual.row(static_cast<Eigen::Index>(k)) = sum.transpose().reshaped().transpose();
  }
  const CMatrix gram = to_complex(incidence_gram(n, std::vector<bool>(q.size(), false)));
  const CMatrix w = gram.completeOrthogonalDecomposition().solve(residual);
  std::vector<CMatrix> out = q;
  const auto& perms = all_permutations(n);
  for (std::size_t r = 0; r < out.size(); ++r)
    for (std::size_t i = 0; i < n; ++i) {
      const auto k = static_cast<Eigen::Index>(i * n + perms[r](i));
      const CMatrix corr = w.row(k).transpose().reshaped(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)).transpose();
      out[r] -= corr;
    }
  for (auto& m : out) m = hermitian_part(m);
  return out;
}

CheckResult check_semiclassical(const QuantumMagicSquare& a, const CheckOptions& options) {
  CheckResult out;
  const auto problem = build_semiclassical_lmi(a);
  sdp::FeasibilitySolver solver({options.eps, options.max_iter});
  out.sdp = solver.solve(problem);
  switch (out.sdp.status) {
    case sdp::Status::Infeasible:
      out.verdict = Verdict::No;
      out.dual = out.sdp.y;
      return out;
    case sdp::Status::Inconclusive:
      out.note = "solver: " + out.sdp.diagnostics.note;
      return out;
    case sdp::Status::Feasible:
      break;
  }
  std::vector<CMatrix> q = weights_from_lmi_point(a.n(), a.s(), out.sdp.x);
  if (!a.is_exact()) {
    q = project_weights(a, q);
    for (std::size_t r = 0; r < q.size(); ++r)
      if (min_eigenvalue(q[r]) < -options.eps) {
        out.note = "projected weight " + std::to_string(r) + " is not PSD";
        return out;
      }
    out.verdict = Verdict::Yes;
    out.decomposition = Decomposition::floating(a.n(), std::move(q));
    return out;
  }
  for (auto den : options.denominators) {
    std::vector<ExactMatrix> eq;
    eq.reserve(q.size());
    std::vector<bool> frozen;
    for (const auto& m : q) {
      eq.push_back(exact_hermitian_part(exact_from_numeric(m, den)));
      frozen.push_back(eq.back().is_zero());
    }
    // Weights that round to zero stay zero; fall back to the full affine set
    // if that leaves the constraints unsatisfiable.
    auto projected = project_weights(a, eq, frozen);
    eq = projected ? std::move(*projected) : project_weights(a, eq);
    bool psd = true;
    for (const auto& m : eq)
      if (!psd_check_exact(m).is_psd) {
        psd = false;
        break;
      }
    if (psd) {
      out.verdict = Verdict::Yes;
      out.decomposition = Decomposition::exact(a.n(), std::move(eq));
      return out;
    }
  }
  out.note = "exact repair of the weights broke positivity";
  return out;
}

Decomposition interior_map_decomposition(const QuantumMagicSquare& a) {
  const std::size_t n = a.n(), s = a.s();
  const auto& perms = all_permutations(n);
  if (n == 1) {
    if (a.is_exact()) return Decomposition::exact(1, {a.exact(0, 0)});
    return Decomposition::floating(1, {a.floating(0, 0)});
  }
  std::ostringstream bad;
  bool violated = false;
  if (a.is_exact()) {
    const ExactMatrix shift = ExactMatrix::identity(s) * GaussianRational(Rational(n - 2, n - 1));
    const GaussianRational scale(Rational(1, factorial(n - 2) * n));
    std::vector<ExactMatrix> q;
    q.reserve(perms.size());
    for (const auto& p : perms) {
      ExactMatrix sum = shift * GaussianRational(-1);
      for (std::size_t k = 0; k < n; ++k) sum += a.exact(k, p(k));
      if (!psd_check_exact(sum).is_psd) {
        violated = true;
        bad << " [";
        for (std::size_t k = 0; k < n; ++k) bad << (k ? "," : "") << p(k) + 1;
        bad << "] margin " << min_eigenvalue(to_complex(sum)) << ";";
      }
      q.push_back(sum * scale);
    }
    if (violated) throw Error(ErrorCode::BoundViolated, "sum_k a_{k,pi(k)} < (n-2)/(n-1) I at" + bad.str());
    return Decomposition::exact(n, std::move(q));
  }
  const double shift = static_cast<double>(n - 2) / static_cast<double>(n - 1);
  const double scale = 1.0 / static_cast<double>(factorial(n - 2) * n);
  const auto es = static_cast<Eigen::Index>(s);
  std::vector<CMatrix> q;
  for (const auto& p : perms) {
    CMatrix sum = -shift * CMatrix::Identity(es, es);
    for (std::size_t k = 0; k < n; ++k) sum += a.floating(k, p(k));
    const double margin = min_eigenvalue(sum);
    if (margin < -kDefaultTol) {
      violated = true;
      bad << " [";
      for (std::size_t k = 0; k < n; ++k) bad << (k ? "," : "") << p(k) + 1;
      bad << "] margin " << margin << ";";
    }
    q.push_back(scale * sum);
  }
  if (violated) throw Error(ErrorCode::BoundViolated, "sum_k a_{k,pi(k)} < (n-2)/(n-1) I at" + bad.str());
  return Decomposition::floating(n, std::move(q));
}

CommutingDilation synthesize_commuting_dilation(const Decomposition& dec) {
  const std::size_t n = dec.n(), s = dec.s(), nf = factorial(n);
  const auto& perms = all_permutations(n);
  std::vector<ExactMatrix> blocks(n * n, ExactMatrix(nf * s, nf * s));
  for (std::size_t r = 0; r < nf; ++r)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t t = 0; t < s; ++t) blocks[i * n + perms[r](i)](r * s + t, r * s + t) = 1;
  CommutingDilation out{QuantumMagicSquare(BlockArray::exact(n, std::move(blocks))),
                        CMatrix(static_cast<Eigen::Index>(nf * s), static_cast<Eigen::Index>(s))};
  const auto es = static_cast<Eigen::Index>(s);
  for (std::size_t r = 0; r < nf; ++r) out.v.block(static_cast<Eigen::Index>(r) * es, 0, es, es) = psd_sqrt(dec.numeric(r));
  return out;
}

MapReport verify_positive_unital_map(const Decomposition& dec, const QuantumMagicSquare& a, double tol) {
  MapReport rep;
  if (dec.n() != a.n() || dec.s() != a.s()) throw Error(ErrorCode::SizeMismatch, "decomposition and square differ in shape");
  const std::size_t n = a.n(), s = a.s();
  const auto fib = fibres(n);
  if (dec.is_exact() && a.is_exact()) {
    ExactMatrix total(s, s);
    for (std::size_t r = 0; r < dec.size(); ++r) {
      if (!psd_check_exact(dec.exact(r)).is_psd) rep.not_positive.push_back(r);
      total += dec.exact(r);
    }
    rep.unital = total == ExactMatrix::identity(s);
    rep.unital_residual = rep.unital ? 0.0 : (to_complex(total) - CMatrix::Identity(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s))).norm();
    for (std::size_t k = 0; k < n * n; ++k) {
      ExactMatrix sum(s, s);
      for (auto r : fib[k]) sum += dec.exact(r);
      if (!(sum == a.exact(k / n, k % n))) rep.mismatched.emplace_back(k / n, k % n);
    }
  } else {
    const auto es = static_cast<Eigen::Index>(s);
    CMatrix total = CMatrix::Zero(es, es);
    for (std::size_t r = 0; r < dec.size(); ++r) {
      const CMatrix q = dec.numeric(r);
      if (hermitian_residual(q) > tol || min_eigenvalue(q) < -tol) rep.not_positive.push_back(r);
      total += q;
    }
    rep.unital_residual = (total - CMatrix::Identity(es, es)).norm();
    rep.unital = rep.unital_residual <= tol;
    for (std::size_t k = 0; k < n * n; ++k) {
      CMatrix sum = CMatrix::Zero(es, es);
      for (auto r : fib[k]) sum += dec.numeric(r);
      if ((sum - a.numeric(k / n, k % n)).norm() > tol) rep.mismatched.emplace_back(k / n, k % n);
    }
  }
  rep.ok = rep.not_positive.empty() && rep.unital && rep.mismatched.empty();
  return rep;
}

}  // namespace qms::semiclassical
