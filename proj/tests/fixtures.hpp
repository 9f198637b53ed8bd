#pragma once

// Shared test inputs, written out independently of the library code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "qms/exact.hpp"
#include "qms/numeric.hpp"
#include "qms/permutation.hpp"
#include "qms/semiclassical.hpp"
#include "qms/structures.hpp"

namespace fixtures {

inline qms::GaussianRational gq(long pn, long pd, long qn = 0, long qd = 1) {
  return {qms::Rational(pn, pd), qms::Rational(qn, qd)};
}

// (1/3) I + (9/62) h
inline qms::ExactMatrix corner_block(const qms::ExactMatrix& h) {
  return qms::ExactMatrix::identity(2) * qms::GaussianRational(qms::Rational(1, 3)) +
         h * qms::GaussianRational(qms::Rational(9, 62));
}

// The four upper-left blocks of the n = 3, s = 2 separating example.
inline std::vector<qms::ExactMatrix> counterexample_corner() {
  return {
      corner_block(qms::ExactMatrix::from_rows({{gq(-34, 93), gq(4, 5, 2, 13)}, {gq(4, 5, -2, 13), gq(7, 16)}})),
      corner_block(qms::ExactMatrix::from_rows({{gq(5, 6), gq(1, 3, -20, 81)}, {gq(1, 3, 20, 81), gq(-41, 55)}})),
      corner_block(qms::ExactMatrix::from_rows({{gq(-2, 3), gq(-25, 92, -3, 7)}, {gq(-25, 92, 3, 7), gq(1, 34)}})),
      corner_block(qms::ExactMatrix::from_rows({{gq(29, 30), gq(6, 35, -1, 1)}, {gq(6, 35, 1, 1), gq(-5, 8)}})),
  };
}

// Full 3 x 3 completion, done by hand.
inline qms::BlockArray counterexample_blocks() {
  const auto c = counterexample_corner();
  const auto id = qms::ExactMatrix::identity(2);
  std::vector<qms::ExactMatrix> b(9, qms::ExactMatrix(2, 2));
  b[0] = c[0];
  b[1] = c[1];
  b[3] = c[2];
  b[4] = c[3];
  b[2] = id - c[0] - c[1];
  b[5] = id - c[2] - c[3];
  b[6] = id - c[0] - c[2];
  b[7] = id - c[1] - c[3];
  b[8] = c[0] + c[1] + c[2] + c[3] - id;
  return qms::BlockArray::exact(3, std::move(b));
}

// Rank-one projector onto (cos t, sin t).
inline qms::CMatrix projector(double theta) {
  qms::CVector v(2);
  v << std::cos(theta), std::sin(theta);
  return v * v.adjoint();
}

// [[p, 1-p], [1-p, p]] for a projector p.
inline qms::QuantumMagicSquare qp2(const qms::CMatrix& p) { return qms::two_by_two(p); }

inline qms::CMatrix random_unitary(std::mt19937& rng, std::size_t d) {
  std::normal_distribution<double> g;
  qms::CMatrix z(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) z(i, j) = {g(rng), g(rng)};
  Eigen::HouseholderQR<qms::CMatrix> qr(z);
  return qr.householderQ() * qms::CMatrix::Identity(d, d);
}

// t x s isometry: the first s columns of a random unitary.
inline qms::CMatrix random_isometry(std::mt19937& rng, std::size_t t, std::size_t s) {
  return random_unitary(rng, t).leftCols(s);
}

// Weights of a semiclassical float square: three random permutations with
// commuting q >= 0 summing to I, indexed by lexicographic rank.
inline qms::semiclassical::Decomposition random_classical_decomposition(std::mt19937& rng, std::size_t n, std::size_t s) {
  const auto es = static_cast<Eigen::Index>(s);
  std::vector<qms::CMatrix> q(qms::all_permutations(n).size(), qms::CMatrix::Zero(es, es));
  const std::size_t terms = 3;
  const qms::CMatrix u = random_unitary(rng, s);
  std::uniform_real_distribution<double> w(0.1, 1.0);
  std::vector<double> weights(terms * s);
  std::vector<double> totals(s, 0.0);
  for (std::size_t k = 0; k < terms; ++k)
    for (std::size_t r = 0; r < s; ++r) {
      weights[k * s + r] = w(rng);
      totals[r] += weights[k * s + r];
    }
  for (std::size_t k = 0; k < terms; ++k) {
    std::vector<std::size_t> img(n);
    for (std::size_t i = 0; i < n; ++i) img[i] = i;
    std::shuffle(img.begin(), img.end(), rng);
    qms::RVector d(es);
    for (std::size_t r = 0; r < s; ++r) d(static_cast<Eigen::Index>(r)) = weights[k * s + r] / totals[r];
    q[qms::lex_rank(qms::Permutation(img))] += u * d.cast<qms::Complex>().asDiagonal() * u.adjoint();
  }
  return qms::semiclassical::Decomposition::floating(n, std::move(q));
}

inline qms::QuantumMagicSquare random_classical_mixture(std::mt19937& rng, std::size_t n, std::size_t s) {
  return qms::QuantumMagicSquare(random_classical_decomposition(rng, n, s).reconstruct());
}

}  // namespace fixtures
