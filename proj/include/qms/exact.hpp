#pragma once

// Exact arithmetic over the Gaussian rationals Q[i] and dense linear algebra
// on top of it. Nothing in this header touches floating point except the
// explicit conversion helpers (to_complex, rationalize).

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "qms/error.hpp"

namespace qms {

using Rational = mpq_class;

/// Parses "p/q" or "p" into a canonical rational. Rejects a zero or negative
/// denominator and anything that is not an integer ratio.
Rational parse_rational(const std::string& text);

/// Canonical "p/q" text with q > 0; integers are written as "p/1".
std::string format_rational(const Rational& value);

/// Best rational approximation of x with denominator at most max_denominator
/// (continued fractions with a final semiconvergent step).
Rational rationalize(double x, unsigned long max_denominator);

class GaussianRational {
 public:
  GaussianRational() = default;
  GaussianRational(long value) : re_(value) {}  // NOLINT(implicit)
  GaussianRational(Rational re) : re_(std::move(re)) { re_.canonicalize(); }  // NOLINT
  GaussianRational(Rational re, Rational im);

  static GaussianRational i() { return {Rational(0), Rational(1)}; }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }

  GaussianRational conj() const { return {re_, -im_}; }
  /// |z|^2, always a nonnegative rational.
  Rational norm2() const { return re_ * re_ + im_ * im_; }

  std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

  GaussianRational& operator+=(const GaussianRational& o);
  GaussianRational& operator-=(const GaussianRational& o);
  GaussianRational& operator*=(const GaussianRational& o);
  GaussianRational& operator/=(const GaussianRational& o);

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
  GaussianRational operator-() const { return {-re_, -im_}; }

  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

 private:
  Rational re_{0};
  Rational im_{0};
};

/// Dense row-major matrix over Q[i].
class ExactMatrix {
 public:
  ExactMatrix() = default;
  ExactMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static ExactMatrix identity(std::size_t n);
  static ExactMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  /// Builds from nested rows; all rows must have equal length.
  static ExactMatrix from_rows(const std::vector<std::vector<GaussianRational>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  GaussianRational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const GaussianRational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  ExactMatrix adjoint() const;
  ExactMatrix transpose() const;
  bool is_hermitian() const;
  bool is_zero() const;
  GaussianRational trace() const;

  ExactMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const ExactMatrix& b);

  ExactMatrix& operator+=(const ExactMatrix& o);
  ExactMatrix& operator-=(const ExactMatrix& o);
  ExactMatrix& operator*=(const GaussianRational& s);

  friend ExactMatrix operator+(ExactMatrix a, const ExactMatrix& b) { return a += b; }
  friend ExactMatrix operator-(ExactMatrix a, const ExactMatrix& b) { return a -= b; }
  friend ExactMatrix operator*(ExactMatrix a, const GaussianRational& s) { return a *= s; }
  friend ExactMatrix operator*(const GaussianRational& s, ExactMatrix a) { return a *= s; }
  friend ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b);
  friend bool operator==(const ExactMatrix& a, const ExactMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<GaussianRational> data_;
};

ExactMatrix kron(const ExactMatrix& a, const ExactMatrix& b);
ExactMatrix block_diagonal(const std::vector<ExactMatrix>& blocks);

/// tr(A B) without forming the product.
/// Real basis of the s x s Hermitian matrices, ordered by (p, q), p <= q,
/// row-major: E_pp on the diagonal, then E_pq + E_qp and -i E_pq + i E_qp.
std::vector<ExactMatrix> hermitian_basis(std::size_t s);

GaussianRational trace_of_product(const ExactMatrix& a, const ExactMatrix& b);

/// Outcome of the exact Hermitian LDL* test.
///
/// On success P M P* = L D L* with L unit lower triangular and D >= 0, where
/// P is the permutation sending row k of the permuted matrix to row perm[k] of
/// M. On failure `witness` holds v with v* M v < 0 (and `witness_value` is that
/// quadratic form).
struct PsdCheck {
  bool is_psd = false;
  std::vector<std::size_t> perm;
  ExactMatrix lower;
  std::vector<Rational> diag;
  std::optional<ExactMatrix> witness;
  Rational witness_value;

  /// Re-verifies whichever witness is present against M by multiplication.
  bool verify(const ExactMatrix& m) const;
};

PsdCheck psd_check_exact(const ExactMatrix& m);

/// Basis of ker(M) as column vectors; count = cols - rank.
std::vector<ExactMatrix> nullspace_exact(const ExactMatrix& m);

std::size_t rank_exact(const ExactMatrix& m);

/// Some solution X of A X = B, or nullopt when the system is inconsistent.
/// Free variables are set to zero.
std::optional<ExactMatrix> solve_exact(const ExactMatrix& a, const ExactMatrix& b);

}  // namespace qms
