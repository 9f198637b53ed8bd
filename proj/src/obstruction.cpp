#include "qms/obstruction.hpp"

#include <cmath>
#include <sstream>

namespace qms::obstruction {

std::string_view to_string(Mode m) { return m == Mode::Weak ? "weak" : "strong"; }

Mode parse_mode(std::string_view text) {
  if (text == "weak") return Mode::Weak;
  if (text == "strong") return Mode::Strong;
  throw Error(ErrorCode::ParseError, "mode must be 'weak' or 'strong', got '" + std::string(text) + "'");
}

namespace {

void require_exact(const QuantumMagicSquare& a) {
  if (!a.is_exact()) throw Error(ErrorCode::RepresentationMismatch, "exact construction needs an exact square");
}

// Every (i, k), (j, l) block pair with i != j and k != l, as flat indices.
template <typename F>
void for_each_zz_block(std::size_t n, F&& f) {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          if (k != l) f(i, j, k, l);
    }
}

// Real coordinates (re and im of every entry) of a matrix, as a row.
ExactMatrix real_coordinates(const ExactMatrix& m) {
  const std::size_t n = m.rows() * m.cols();
  ExactMatrix row(1, 2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    row(0, 2 * k) = GaussianRational(m(k / m.cols(), k % m.cols()).re());
    row(0, 2 * k + 1) = GaussianRational(m(k / m.cols(), k % m.cols()).im());
  }
  return row;
}

ExactMatrix stack_rows(const std::vector<ExactMatrix>& rows) {
  ExactMatrix out(rows.size(), rows.empty() ? 0 : rows.front().cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.set_block(r, 0, rows[r]);
  return out;
}

// Scale by a real factor so the first nonzero coordinate is +1.
ExactMatrix normalize_generator(ExactMatrix m) {
  for (std::size_t k = 0; k < m.rows() * m.cols(); ++k) {
    const auto& z = m(k / m.cols(), k % m.cols());
    if (sgn(z.re()) != 0) return m * GaussianRational(Rational(1) / z.re());
    if (sgn(z.im()) != 0) return m * GaussianRational(Rational(1) / z.im());
  }
  return m;
}

ExactMatrix kron3(const ExactMatrix& a, const ExactMatrix& b, const ExactMatrix& c) { return kron(kron(a, b), c); }

// (e (x) e_i (x) I_s) for every i, side by side: n^2 s x n s.
ExactMatrix kernel_vectors(std::size_t n, std::size_t s) {
  ExactMatrix v(n * n * s, n * s);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t t = 0; t < s; ++t) v((k * n + i) * s + t, i * s + t) = 1;
  return v;
}

}  // namespace

ExactMatrix col_matrix(const QuantumMagicSquare& a) {
  require_exact(a);
  const std::size_t n = a.n(), s = a.s();
  ExactMatrix c(n * n * s, s);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) c.set_block((i * n + j) * s, 0, a.exact(i, j));
  return c;
}

ExactMatrix diag_matrix(const QuantumMagicSquare& a) {
  require_exact(a);
  return block_diagonal(a.exact_blocks());
}

ExactMatrix phi_matrix(const QuantumMagicSquare& a) {
  const ExactMatrix c = col_matrix(a);
  return diag_matrix(a) - c * c.adjoint();
}

PsiConstants psi_constants(std::size_t n) {
  if (n < 3) throw Error(ErrorCode::NotDefinedForSmallN, "psi needs n >= 3");
  return {Rational(1, (n - 1) * (n - 2)), Rational(n - 1, n * (n - 2)), Rational(1, n * (n - 2))};
}

ExactMatrix psi_matrix(const QuantumMagicSquare& a) {
  require_exact(a);
  const std::size_t n = a.n(), s = a.s();
  const auto [alpha, beta, gamma] = psi_constants(n);
  const ExactMatrix shift = ExactMatrix::identity(s) * GaussianRational(-alpha);
  const GaussianRational b(beta), g(gamma);
  ExactMatrix psi(n * n * s, n * n * s);
  for_each_zz_block(n, [&](std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    const ExactMatrix blk = shift + (a.exact(i, k) + a.exact(j, l)) * b + (a.exact(i, l) + a.exact(j, k)) * g;
    psi.set_block((i * n + k) * s, (j * n + l) * s, blk);
  });
  return psi;
}

CMatrix phi_numeric(const QuantumMagicSquare& a) {
  const std::size_t n = a.n();
  const auto s = static_cast<Eigen::Index>(a.s());
  const auto d = static_cast<Eigen::Index>(n * n) * s;
  CMatrix col(d, s), diag = CMatrix::Zero(d, d);
  for (std::size_t k = 0; k < n * n; ++k) {
    const CMatrix b = a.numeric(k / n, k % n);
    col.block(static_cast<Eigen::Index>(k) * s, 0, s, s) = b;
    diag.block(static_cast<Eigen::Index>(k) * s, static_cast<Eigen::Index>(k) * s, s, s) = b;
  }
  return diag - col * col.adjoint();
}

CMatrix psi_numeric(const QuantumMagicSquare& a) {
  const std::size_t n = a.n();
  const auto s = static_cast<Eigen::Index>(a.s());
  const auto [alpha, beta, gamma] = psi_constants(n);
  const double al = alpha.get_d(), be = beta.get_d(), ga = gamma.get_d();
  const auto d = static_cast<Eigen::Index>(n * n) * s;
  CMatrix psi = CMatrix::Zero(d, d);
  for_each_zz_block(n, [&](std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    psi.block(static_cast<Eigen::Index>(i * n + k) * s, static_cast<Eigen::Index>(j * n + l) * s, s, s) =
        -al * CMatrix::Identity(s, s) + be * (a.numeric(i, k) + a.numeric(j, l)) + ga * (a.numeric(i, l) + a.numeric(j, k));
  });
  return psi;
}

std::vector<ExactMatrix> z_basis(std::size_t n) {
  std::vector<ExactMatrix> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) {
        ExactMatrix e(n, n);
        e(i, j) = 1;
        out.push_back(std::move(e));
      }
  return out;
}

std::vector<ExactMatrix> z_hermitian_basis(std::size_t n) {
  std::vector<ExactMatrix> out;
  for (const auto& h : hermitian_basis(n)) {
    bool diagonal = false;
    for (std::size_t i = 0; i < n; ++i) diagonal = diagonal || !h(i, i).is_zero();
    if (!diagonal) out.push_back(h);
  }
  return out;
}

std::vector<ExactMatrix> ze_basis(std::size_t n) {
  if (n < 3) throw Error(ErrorCode::NotDefinedForSmallN, "Z_e needs n >= 3");
  // Unknowns: z_ij for i != j, row-major. Constraints: row and column sums.
  const auto zb = z_basis(n);
  ExactMatrix cons(2 * n, zb.size());
  for (std::size_t v = 0; v < zb.size(); ++v) {
    std::size_t i = 0, j = 0;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        if (!zb[v](r, c).is_zero()) i = r, j = c;
    cons(i, v) = 1;
    cons(n + j, v) = 1;
  }
  const auto kernel = nullspace_exact(cons);
  std::vector<ExactMatrix> out, rows;
  std::size_t rank = 0;
  auto consider = [&](ExactMatrix h) {
    if (h.is_zero()) return;
    rows.push_back(real_coordinates(h));
    const std::size_t r = rank_exact(stack_rows(rows));
    if (r > rank) {
      rank = r;
      out.push_back(normalize_generator(std::move(h)));
    } else {
      rows.pop_back();
    }
  };
  for (const auto& k : kernel) {
    ExactMatrix z(n, n);
    for (std::size_t v = 0; v < zb.size(); ++v) z += zb[v] * k(v, 0);
    consider(z + z.adjoint());
    consider((z - z.adjoint()) * GaussianRational::i());
  }
  if (out.size() != n * n - 3 * n + 1) throw Error(ErrorCode::InvariantViolated, "unexpected dimension of Z_e");
  for (const auto& g : out) {
    ExactMatrix e(n, 1);
    for (std::size_t i = 0; i < n; ++i) e(i, 0) = 1;
    if (!(g * e).is_zero() || !(g.adjoint() * e).is_zero()) throw Error(ErrorCode::InvariantViolated, "Z_e generator has nonzero sums");
  }
  return out;
}

ObstructionProblem::ObstructionProblem(QuantumMagicSquare a, Mode mode)
    : a_(std::move(a)), mode_(mode), pencil_(CMatrix(0, 0), {}) {
  const std::size_t n = a_.n(), s = a_.s();
  if (mode_ == Mode::Strong && n < 3) throw Error(ErrorCode::NotDefinedForSmallN, "strong mode needs n >= 3");
  gens_ = mode_ == Mode::Weak ? z_hermitian_basis(n) : ze_basis(n);
  herm_ = hermitian_basis(s);
  for (std::size_t x = 0; x < gens_.size(); ++x)
    for (std::size_t y = 0; y < gens_.size(); ++y)
      for (std::size_t p = 0; p < herm_.size(); ++p) index_.push_back({x, y, p});

  CMatrix constant = phi_numeric(a_);
  if (mode_ == Mode::Strong) constant += psi_numeric(a_);
  std::vector<CMatrix> g, h, dirs;
  for (const auto& m : gens_) g.push_back(to_complex(m));
  for (const auto& m : herm_) h.push_back(to_complex(m));
  dirs.reserve(index_.size());
  for (const auto& [x, y, p] : index_) dirs.push_back(kron(kron(g[x], g[y]), h[p]));
  pencil_ = sdp::SdpProblem(std::move(constant), std::move(dirs));
}

ExactMatrix ObstructionProblem::constant_exact() const {
  ExactMatrix c = phi_matrix(a_);
  if (mode_ == Mode::Strong) c += psi_matrix(a_);
  return c;
}

ExactMatrix ObstructionProblem::direction_exact(std::size_t j) const {
  const auto& [x, y, p] = index_.at(j);
  return kron3(gens_[x], gens_[y], herm_[p]);
}

GaussianRational ObstructionProblem::direction_gram(std::size_t j, std::size_t k) const {
  const auto& u = index_.at(j);
  const auto& v = index_.at(k);
  return trace_of_product(gens_[u.a], gens_[v.a]) * trace_of_product(gens_[u.b], gens_[v.b]) *
         trace_of_product(herm_[u.p], herm_[v.p]);
}

ObstructionProblem build_obstruction(const QuantumMagicSquare& a, Mode mode) {
  ObstructionProblem p(a, mode);
  if (mode == Mode::Strong) {
    const std::size_t n = a.n(), s = a.s();
    const ExactMatrix kv = kernel_vectors(n, s);
    if (a.is_exact()) {
      if (!(p.constant_exact() * kv).is_zero())
        throw Error(ErrorCode::InvariantViolated, "(phi + psi)(e (x) e_i (x) I) is not zero");
    } else if ((p.pencil().constant() * to_complex(kv)).norm() > 1e-9) {
      throw Error(ErrorCode::InvariantViolated, "(phi + psi)(e (x) e_i (x) I) is not zero");
    }
  }
  return p;
}

ObstructionResult check_mconv_obstruction(const QuantumMagicSquare& a, Mode mode, double eps, int max_iter) {
  const auto p = build_obstruction(a, mode);
  ObstructionResult out;
  sdp::FeasibilitySolver solver({eps, max_iter});
  out.sdp = solver.solve(p.pencil());
  switch (out.sdp.status) {
    case sdp::Status::Feasible:
      out.verdict = Verdict::Yes;
      out.x = p.pencil().evaluate(out.sdp.x) - p.pencil().constant();
      break;
    case sdp::Status::Infeasible:
      out.verdict = Verdict::No;
      out.y = out.sdp.y;
      break;
    case sdp::Status::Inconclusive:
      break;
  }
  return out;
}

QuantumMagicSquare counterexample_m2_3() {
  auto gq = [](long pn, long pd, long qn = 0, long qd = 1) { return GaussianRational(Rational(pn, pd), Rational(qn, qd)); };
  auto entry = [](const ExactMatrix& h) {
    return ExactMatrix::identity(2) * GaussianRational(Rational(1, 3)) + h * GaussianRational(Rational(9, 62));
  };
  std::vector<ExactMatrix> corner{
      entry(ExactMatrix::from_rows({{gq(-34, 93), gq(4, 5, 2, 13)}, {gq(4, 5, -2, 13), gq(7, 16)}})),
      entry(ExactMatrix::from_rows({{gq(5, 6), gq(1, 3, -20, 81)}, {gq(1, 3, 20, 81), gq(-41, 55)}})),
      entry(ExactMatrix::from_rows({{gq(-2, 3), gq(-25, 92, -3, 7)}, {gq(-25, 92, 3, 7), gq(1, 34)}})),
      entry(ExactMatrix::from_rows({{gq(29, 30), gq(6, 35, -1, 1)}, {gq(6, 35, 1, 1), gq(-5, 8)}})),
  };
  return complete_corner(BlockArray::exact(2, std::move(corner)));
}

NumericCertificate find_dual_certificate(const ObstructionProblem& p, double eps, int max_iter) {
  sdp::FeasibilitySolver solver({eps, max_iter});
  const auto r = solver.solve(p.pencil());
  if (r.status == sdp::Status::Feasible) throw Error(ErrorCode::NotFound, "the formula is feasible; no certificate exists");
  if (r.status == sdp::Status::Inconclusive)
    throw Error(ErrorCode::Inconclusive, "solver could not decide: " + r.diagnostics.note);

  const auto& pencil = p.pencil();
  const auto d = static_cast<Eigen::Index>(pencil.dimension());
  CMatrix y = r.y;
  double traceless = 0.0;
  for (const auto& f : pencil.directions()) traceless = std::max(traceless, std::abs(f.trace()));
  double pairing = (y * pencil.constant()).trace().real();
  if (traceless < 1e-12) {
    const double c = pencil.constant().trace().real() / static_cast<double>(d);
    if (c + std::abs(pairing) > 0) {
      const double delta = std::abs(pairing) / (2.0 * (c + std::abs(pairing)));
      y = (1.0 - delta) * y + (delta / static_cast<double>(d)) * CMatrix::Identity(d, d);
    }
  }
  y = hermitian_part(y);
  NumericCertificate out;
  out.y = y;
  out.pairing = (y * pencil.constant()).trace().real();
  for (const auto& f : pencil.directions()) out.trace_residual = std::max(out.trace_residual, std::abs((y * f).trace()));
  out.min_eig = min_eigenvalue(y);
  return out;
}

ObstructionCertificate exact_certify(const CMatrix& y, const ObstructionProblem& p, unsigned long max_denominator) {
  const auto& a = p.square();
  require_exact(a);
  const std::size_t d = p.dimension();
  if (static_cast<std::size_t>(y.rows()) != d || static_cast<std::size_t>(y.cols()) != d)
    throw Error(ErrorCode::DimensionMismatch, "certificate size differs from the pencil");

  ExactMatrix yr(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const Complex z = y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      yr(i, j) = GaussianRational(rationalize(z.real(), max_denominator), rationalize(z.imag(), max_denominator));
    }
  ExactMatrix yh = (yr + yr.adjoint()) * GaussianRational(Rational(1, 2));

  const std::size_t m = p.index().size();
  std::vector<ExactMatrix> dirs;
  dirs.reserve(m);
  for (std::size_t j = 0; j < m; ++j) dirs.push_back(p.direction_exact(j));
  if (m > 0) {
    ExactMatrix gram(m, m), rhs(m, 1);
    for (std::size_t j = 0; j < m; ++j) {
      rhs(j, 0) = trace_of_product(yh, dirs[j]);
      for (std::size_t k = 0; k <= j; ++k) gram(j, k) = gram(k, j) = p.direction_gram(j, k);
    }
    const auto c = solve_exact(gram, rhs);
    if (!c) throw Error(ErrorCode::CertificationFailed, "trace constraints: projection system is inconsistent");
    for (std::size_t j = 0; j < m; ++j)
      if (!(*c)(j, 0).is_zero()) yh -= dirs[j] * (*c)(j, 0);
  }

  ObstructionCertificate cert;
  cert.n = a.n();
  cert.s = a.s();
  cert.mode = p.mode();
  for (std::size_t j = 0; j < m; ++j) {
    cert.pairings.push_back(trace_of_product(yh, dirs[j]));
    if (!cert.pairings.back().is_zero()) throw Error(ErrorCode::CertificationFailed, "trace constraints: tr(Y B_j) != 0 after projection");
  }
  const auto psd = psd_check_exact(yh);
  if (!psd.is_psd) {
    std::ostringstream msg;
    msg << "Y >= 0: witness gives v* Y v = " << psd.witness_value.get_d() << " at denominator bound " << max_denominator;
    throw Error(ErrorCode::CertificationFailed, msg.str());
  }
  cert.pairing_b0 = trace_of_product(yh, p.constant_exact());
  if (sgn(cert.pairing_b0.re()) >= 0 || !cert.pairing_b0.is_real()) {
    std::ostringstream msg;
    msg << "tr(Y B_0) < 0: exact pairing is " << format_rational(cert.pairing_b0.re());
    throw Error(ErrorCode::CertificationFailed, msg.str());
  }
  cert.y = std::move(yh);
  return cert;
}

ObstructionCertificate exact_certify(const CMatrix& y, const ObstructionProblem& p, const std::vector<unsigned long>& ladder) {
  std::string last = "empty denominator ladder";
  for (auto den : ladder) {
    try {
      return exact_certify(y, p, den);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::CertificationFailed) throw;
      last = e.what();
    }
  }
  throw Error(ErrorCode::CertificationFailed, last);
}

CertificateCheck verify_certificate(const ObstructionCertificate& cert, const QuantumMagicSquare& a) {
  CertificateCheck out;
  auto fail = [&](std::string why) {
    out.reason = std::move(why);
    return out;
  };
  if (!a.is_exact()) return fail("square is not exact");
  if (cert.n != a.n() || cert.s != a.s()) return fail("certificate shape does not match the square");
  if (cert.mode == Mode::Strong && a.n() < 3) return fail("strong mode needs n >= 3");
  const std::size_t d = a.n() * a.n() * a.s();
  if (cert.y.rows() != d || cert.y.cols() != d) return fail("Y has the wrong size");
  if (!cert.y.is_hermitian()) return fail("Y is not Hermitian");

  // Rebuild the exact data only; no numeric pencil is needed here.
  const auto gens = cert.mode == Mode::Weak ? z_hermitian_basis(a.n()) : ze_basis(a.n());
  const auto herm = hermitian_basis(a.s());
  ExactMatrix b0 = phi_matrix(a);
  if (cert.mode == Mode::Strong) b0 += psi_matrix(a);

  if (!psd_check_exact(cert.y).is_psd) return fail("Y is not positive semidefinite");
  std::size_t j = 0;
  for (const auto& x : gens)
    for (const auto& y : gens)
      for (const auto& h : herm) {
        const auto t = trace_of_product(cert.y, kron3(x, y, h));
        if (!t.is_zero()) return fail("tr(Y B_" + std::to_string(j + 1) + ") is not zero");
        if (j < cert.pairings.size() && !(cert.pairings[j] == t)) return fail("recorded pairing B_" + std::to_string(j + 1) + " differs");
        ++j;
      }
  if (!cert.pairings.empty() && cert.pairings.size() != j) return fail("wrong number of recorded pairings");
  const auto p0 = trace_of_product(cert.y, b0);
  if (!p0.is_real() || sgn(p0.re()) >= 0) return fail("tr(Y B_0) is not negative");
  if (!(p0 == cert.pairing_b0)) return fail("recorded pairing B_0 differs from the exact value");
  out.ok = true;
  return out;
}

CMatrix pad_compression(std::size_t n, std::size_t s) {
  if (n < 2) throw Error(ErrorCode::NotDefinedForSmallN, "padding compression needs n >= 2");
  const auto en = static_cast<Eigen::Index>(n);
  const CMatrix v = CMatrix::Identity(en, en - 1);
  const auto es = static_cast<Eigen::Index>(s);
  return kron(kron(v, v), CMatrix::Identity(es, es));
}

CMatrix mconv_witness(const QuantumMagicSquare& u, const CMatrix& v) {
  const auto a = QuantumMagicSquare(compress(u.is_exact() ? BlockArray(u.to_float()) : BlockArray(u), v));
  const std::size_t n = u.n();
  const auto s = static_cast<Eigen::Index>(v.cols()), t = static_cast<Eigen::Index>(v.rows());
  CMatrix w(t, t);
  w << v, orthogonal_complement(v);
  const auto d = static_cast<Eigen::Index>(n * n) * s;
  CMatrix big_b(d, t - s);
  for (std::size_t k = 0; k < n * n; ++k) {
    const CMatrix rotated = w.adjoint() * u.numeric(k / n, k % n) * w;
    big_b.block(static_cast<Eigen::Index>(k) * s, 0, s, t - s) = rotated.bottomLeftCorner(t - s, s).adjoint();
  }
  return big_b * big_b.adjoint() - phi_numeric(a);
}

}  // namespace qms::obstruction
