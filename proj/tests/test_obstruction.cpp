#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "qms/obstruction.hpp"
#include "qms/semiclassical.hpp"

using namespace qms;
using namespace qms::obstruction;
using fixtures::gq;

namespace {

ExactMatrix ones(std::size_t n) {
  ExactMatrix e(n, 1);
  for (std::size_t i = 0; i < n; ++i) e(i, 0) = 1;
  return e;
}

QuantumMagicSquare exact_scalar_square(std::size_t n, const std::vector<Rational>& entries) {
  std::vector<ExactMatrix> b;
  for (const auto& x : entries) b.push_back(ExactMatrix::identity(1) * GaussianRational(x));
  return QuantumMagicSquare(BlockArray::exact(n, b));
}

// (1 - t) A + t B, float.
QuantumMagicSquare mix(const QuantumMagicSquare& a, const QuantumMagicSquare& b, double t) {
  std::vector<CMatrix> out;
  for (std::size_t k = 0; k < a.n() * a.n(); ++k)
    out.push_back((1 - t) * a.numeric(k / a.n(), k % a.n()) + t * b.numeric(k / a.n(), k % a.n()));
  return QuantumMagicSquare(BlockArray::floating(a.n(), out));
}

// Quantum permutation matrix sum_pi P_pi (x) e_pi with random orthogonal
// projectors e_pi, conjugated by a random unitary.
QuantumMagicSquare random_commuting_qpm(std::mt19937& rng, std::size_t n, std::size_t t) {
  const auto& perms = all_permutations(n);
  std::uniform_int_distribution<std::size_t> pick(0, perms.size() - 1);
  const CMatrix w = fixtures::random_unitary(rng, t);
  const auto et = static_cast<Eigen::Index>(t);
  std::vector<CMatrix> b(n * n, CMatrix::Zero(et, et));
  for (std::size_t r = 0; r < t; ++r) {
    const auto& p = perms[pick(rng)];
    const CMatrix proj = w.col(static_cast<Eigen::Index>(r)) * w.col(static_cast<Eigen::Index>(r)).adjoint();
    for (std::size_t i = 0; i < n; ++i) b[i * n + p(i)] += proj;
  }
  return QuantumMagicSquare(BlockArray::floating(n, b));
}

// Zero outside the blocks ((i,k),(j,l)) with i != j and k != l.
double off_zz_norm(const CMatrix& x, std::size_t n, std::size_t s) {
  double worst = 0.0;
  const auto es = static_cast<Eigen::Index>(s);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l < n; ++l)
          if (i == j || k == l)
            worst = std::max(worst, x.block(static_cast<Eigen::Index>(i * n + k) * es, static_cast<Eigen::Index>(j * n + l) * es, es, es).norm());
  return worst;
}

}  // namespace

TEST_CASE("col and diag") {
  const auto one = exact_scalar_square(1, {Rational(1)});
  CHECK(col_matrix(one) == ExactMatrix::identity(1));
  CHECK(diag_matrix(one) == ExactMatrix::identity(1));

  const Rational a(1, 3), b(2, 3);
  const auto two = exact_scalar_square(2, {a, b, b, a});
  const auto c = col_matrix(two);
  CHECK(c.rows() == 4);
  CHECK(c(0, 0) == GaussianRational(a));
  CHECK(c(1, 0) == GaussianRational(b));
  CHECK(c(2, 0) == GaussianRational(b));
  CHECK(c(3, 0) == GaussianRational(a));
  const auto d = diag_matrix(two);
  CHECK(d(1, 1) == GaussianRational(b));
  CHECK(d(0, 1).is_zero());

  const auto ce = counterexample_m2_3();
  const auto dg = diag_matrix(ce);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(dg.block((i * 3 + j) * 2, (i * 3 + j) * 2, 2, 2) == ce.exact(i, j));
}

TEST_CASE("phi") {
  const Rational a(1, 3), b(2, 3);
  const auto two = exact_scalar_square(2, {a, b, b, a});
  const auto phi = phi_matrix(two);
  // The displayed n = 2 layout: diagonal a_ij - a_ij^2, off-diagonal -a_ij a_kl.
  const Rational e[4] = {a, b, b, a};
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) CHECK(phi(r, c) == GaussianRational(r == c ? Rational(e[r] - e[r] * e[r]) : Rational(-e[r] * e[c])));

  const auto perm = phi_matrix(permutation_square(Permutation({2, 0, 1}), 1));
  for (std::size_t k = 0; k < 9; ++k) CHECK(perm(k, k).is_zero());

  const auto cphi = phi_matrix(constant_square(3, 1));
  for (std::size_t k = 0; k < 9; ++k) CHECK(cphi(k, k) == GaussianRational(Rational(2, 9)));

  CHECK((to_complex(phi_matrix(counterexample_m2_3())) - phi_numeric(counterexample_m2_3())).norm() < 1e-14);
}

TEST_CASE("psi") {
  auto c3 = psi_constants(3);
  CHECK(c3.alpha == Rational(1, 2));
  CHECK(c3.beta == Rational(2, 3));
  CHECK(c3.gamma == Rational(1, 3));
  auto c4 = psi_constants(4);
  CHECK(c4.alpha == Rational(1, 6));
  CHECK(c4.beta == Rational(3, 8));
  CHECK(c4.gamma == Rational(1, 8));
  CHECK_THROWS_AS(psi_constants(2), Error);
  CHECK_THROWS_AS(psi_matrix(constant_square(2, 1)), Error);

  const auto ce = counterexample_m2_3();
  const auto psi = psi_matrix(ce);
  CHECK(psi.is_hermitian());
  CHECK(off_zz_norm(to_complex(psi), 3, 2) == 0.0);
  CHECK((to_complex(psi) - psi_numeric(ce)).norm() < 1e-14);
}

TEST_CASE("kernel identity holds exactly") {
  std::vector<QuantumMagicSquare> squares{counterexample_m2_3(), constant_square(3, 2), constant_square(4, 1),
                                          permutation_square(Permutation({1, 2, 0}), 2), embed_pad(counterexample_m2_3()),
                                          exact_scalar_square(3, {Rational(1, 2), Rational(1, 4), Rational(1, 4), Rational(1, 4),
                                                                  Rational(1, 2), Rational(1, 4), Rational(1, 4), Rational(1, 4),
                                                                  Rational(1, 2)})};
  for (const auto& a : squares) {
    const std::size_t n = a.n(), s = a.s();
    const ExactMatrix b0 = phi_matrix(a) + psi_matrix(a);
    for (std::size_t i = 0; i < n; ++i) {
      ExactMatrix e_ei(n * n, 1);
      for (std::size_t k = 0; k < n; ++k) e_ei(k * n + i, 0) = 1;
      CHECK((b0 * kron(e_ei, ExactMatrix::identity(s))).is_zero());
    }
  }
}

TEST_CASE("Z and Z_e bases") {
  const auto z2 = z_basis(2);
  REQUIRE(z2.size() == 2);
  CHECK(z2[0](0, 1) == GaussianRational(1));
  CHECK(z2[1](1, 0) == GaussianRational(1));
  CHECK(z_hermitian_basis(3).size() == 6);

  const auto g = ze_basis(3);
  REQUIRE(g.size() == 1);
  const GaussianRational i = GaussianRational::i(), mi = -GaussianRational::i();
  const ExactMatrix expected_g = ExactMatrix::from_rows({{0, i, mi}, {mi, 0, i}, {i, mi, 0}});
  CHECK(g[0] == expected_g);

  const auto g4 = ze_basis(4);
  CHECK(g4.size() == 5);
  for (const auto& m : g4) {
    CHECK(m.is_hermitian());
    CHECK((m * ones(4)).is_zero());
    CHECK((m.adjoint() * ones(4)).is_zero());
    for (std::size_t k = 0; k < 4; ++k) CHECK(m(k, k).is_zero());
  }
}

TEST_CASE("pencil sizes") {
  const auto ce = counterexample_m2_3();
  const auto strong = build_obstruction(ce, Mode::Strong);
  CHECK(strong.dimension() == 18);
  CHECK(strong.pencil().directions().size() == 4);
  CHECK(build_obstruction(ce, Mode::Weak).pencil().directions().size() == 144);
  CHECK(build_obstruction(constant_square(3, 1), Mode::Strong).pencil().directions().size() == 1);
  CHECK_THROWS_AS(build_obstruction(constant_square(2, 1), Mode::Strong), Error);

  // B_1..B_4 = g (x) g (x) {E11, X, Y, E22}.
  const auto g = ze_basis(3)[0];
  const auto herm = hermitian_basis(2);
  for (std::size_t j = 0; j < 4; ++j) CHECK(strong.direction_exact(j) == kron(kron(g, g), herm[j]));
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t k = 0; k < 4; ++k)
      CHECK(strong.direction_gram(j, k) == trace_of_product(strong.direction_exact(j), strong.direction_exact(k)));
}

TEST_CASE("the separating example") {
  const auto a = counterexample_m2_3();
  CHECK(validate_magic(a).ok);
  CHECK(a.exact_blocks() == fixtures::counterexample_blocks().exact_blocks());

  const auto strong = check_mconv_obstruction(a, Mode::Strong);
  CHECK(strong.verdict == Verdict::No);
  const auto weak = check_mconv_obstruction(a, Mode::Weak);
  CHECK(weak.verdict == Verdict::No);
  CHECK(check_mconv_obstruction(embed_pad(a), Mode::Strong).verdict == Verdict::No);

  const auto p = build_obstruction(a, Mode::Strong);
  const auto y = find_dual_certificate(p);
  MESSAGE("strong pairing tr(Y B0) = " << y.pairing);
  CHECK(y.pairing < 0);
  CHECK(y.min_eig > 0);
  CHECK(y.trace_residual < 1e-9);

  const auto cert = exact_certify(y.y, p, 1000000ul);
  CHECK(sgn(cert.pairing_b0.re()) < 0);
  for (const auto& t : cert.pairings) CHECK(t.is_zero());
  const auto check = verify_certificate(cert, a);
  CHECK(check.ok);

  SUBCASE("tampering is caught") {
    auto bad = cert;
    bad.y(0, 0) += GaussianRational(Rational(1, 1000));
    CHECK_FALSE(verify_certificate(bad, a).ok);
    auto wrong_pairing = cert;
    wrong_pairing.pairing_b0 = GaussianRational(Rational(-1));
    CHECK_FALSE(verify_certificate(wrong_pairing, a).ok);
    CHECK_FALSE(verify_certificate(cert, constant_square(3, 2)).ok);
  }
  SUBCASE("bad numeric inputs fail certification") {
    const auto d = static_cast<Eigen::Index>(p.dimension());
    const CMatrix flat = CMatrix::Identity(d, d) / static_cast<double>(d);
    // The exact pairing of I/d is tr(B0)/d >= 0.
    CHECK(sgn(trace_of_product(ExactMatrix::identity(18), p.constant_exact()).re()) >= 0);
    try {
      exact_certify(flat, p, 1000000ul);
      FAIL("expected CertificationFailed");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CertificationFailed);
      CHECK(std::string(e.what()).find("tr(Y B_0)") != std::string::npos);
    }
    CMatrix neg = y.y;
    const auto ed = sdp::herm_eig(neg);
    neg -= (0.1 + ed.values(0)) * ed.vectors.col(0) * ed.vectors.col(0).adjoint();
    try {
      exact_certify(neg, p, 1000000ul);
      FAIL("expected CertificationFailed");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::CertificationFailed);
      CHECK(std::string(e.what()).find("Y >= 0") != std::string::npos);
    }
  }
}

TEST_CASE("feasible instances give no certificate") {
  CHECK_THROWS_AS(find_dual_certificate(build_obstruction(constant_square(3, 2), Mode::Strong)), Error);
  try {
    find_dual_certificate(build_obstruction(permutation_square(Permutation::identity(3), 1), Mode::Strong));
    FAIL("expected NotFound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotFound);
  }
  for (auto mode : {Mode::Weak, Mode::Strong}) {
    const auto r = check_mconv_obstruction(permutation_square(Permutation::identity(3), 1), mode);
    CHECK(r.verdict == Verdict::Yes);
    REQUIRE(r.x.has_value());
    CHECK(min_eigenvalue(phi_numeric(permutation_square(Permutation::identity(3), 1)) + *r.x +
                         (mode == Mode::Strong ? psi_numeric(permutation_square(Permutation::identity(3), 1)) : CMatrix::Zero(9, 9))) >= -1e-7);
  }
}

TEST_CASE("weak and strong modes agree") {
  std::mt19937 rng(61);
  const auto ce = counterexample_m2_3();
  int yes = 0, no = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t s = 1 + trial % 2;
    QuantumMagicSquare a = constant_square(3, s);
    if (s == 2 && trial % 4 == 1) {
      a = mix(ce, constant_square(3, 2), 0.002 * static_cast<double>(trial / 4));
    } else {
      a = fixtures::random_classical_mixture(rng, 3, s);
      if (s == 2 && trial % 4 == 3) a = mix(ce, a, 0.001);
    }
    const auto w = check_mconv_obstruction(a, Mode::Weak);
    const auto st = check_mconv_obstruction(a, Mode::Strong);
    CHECK(w.verdict != Verdict::Inconclusive);
    CHECK(w.verdict == st.verdict);
    yes += st.verdict == Verdict::Yes;
    no += st.verdict == Verdict::No;
  }
  CHECK(yes > 0);
  CHECK(no > 0);
}

TEST_CASE("compressions of quantum permutation matrices pass") {
  std::mt19937 rng(67);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = trial % 5 == 4 ? 4 : 3;
    const std::size_t s = 1 + trial % 2;
    const CMatrix w = fixtures::random_unitary(rng, 2);
    QuantumMagicSquare u = n == 4 ? block_diagonal_sum(fixtures::qp2(fixtures::projector(0.3 + 0.01 * trial)),
                                                       fixtures::qp2(w * fixtures::projector(0.0) * w.adjoint()))
                                  : direct_sum(random_commuting_qpm(rng, 3, 2), random_commuting_qpm(rng, 3, 2));
    if (n == 4) u = direct_sum(u, u.to_float());
    const std::size_t t = u.s();
    const CMatrix v = fixtures::random_isometry(rng, t, s);
    const QuantumMagicSquare a(compress(u.to_float(), v));

    const CMatrix x = mconv_witness(u, v);
    CHECK(off_zz_norm(x, n, s) < 1e-9);
    CHECK(min_eigenvalue(phi_numeric(a) + x) > -1e-9);

    const auto r = check_mconv_obstruction(a, n == 4 ? Mode::Strong : Mode::Weak);
    CHECK(r.verdict == Verdict::Yes);
  }
}

TEST_CASE("padding compresses the pencil") {
  std::mt19937 rng(71);
  const auto a = counterexample_m2_3();
  const auto padded = embed_pad(a);
  const CMatrix w = pad_compression(4, 2);
  const auto gens = z_hermitian_basis(4);
  const auto herm = hermitian_basis(2);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    CMatrix xp = CMatrix::Zero(32, 32);
    for (const auto& z1 : gens)
      for (const auto& z2 : gens)
        for (const auto& h : herm) xp += g(rng) * kron(kron(to_complex(z1), to_complex(z2)), to_complex(h));
    const CMatrix x = w.adjoint() * xp * w;
    CHECK(off_zz_norm(x, 3, 2) < 1e-9);
    const CMatrix lhs = w.adjoint() * (phi_numeric(padded) + xp) * w;
    CHECK((lhs - (phi_numeric(a) + x)).norm() < 1e-9);
  }
}
