#include "qms/exact.hpp"

#include <cmath>
#include <utility>

namespace qms {

// ---------------------------------------------------------------------------
// Rationals

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  auto is_int = [](const std::string& s, bool allow_sign) {
    if (s.empty()) return false;
    std::size_t start = 0;
    if (allow_sign && (s[0] == '-' || s[0] == '+')) start = 1;
    if (start == s.size()) return false;
    for (std::size_t k = start; k < s.size(); ++k)
      if (s[k] < '0' || s[k] > '9') return false;
    return true;
  };
  std::string num = slash == std::string::npos ? text : text.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
  if (!is_int(num, true) || !is_int(den, false))
    throw Error(ErrorCode::ParseError, "not a rational: '" + text + "'");
  if (num[0] == '+') num.erase(0, 1);
  mpz_class n(num, 10), d(den, 10);
  if (sgn(d) == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + text + "'");
  Rational q(n, d);
  q.canonicalize();
  return q;
}

std::string format_rational(const Rational& value) {
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

Rational rationalize(double x, unsigned long max_denominator) {
  if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteInput, "cannot rationalize a non-finite value");
  if (max_denominator == 0) throw Error(ErrorCode::NonFiniteInput, "max_denominator must be >= 1");
  const Rational exact(x);  // mpq_set_d is exact
  const mpz_class bound(max_denominator);
  if (exact.get_den() <= bound) return exact;

  // Convergents p0/q0, p1/q1 of the continued fraction of n/d.
  mpz_class p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  mpz_class n = exact.get_num(), d = exact.get_den();
  while (true) {
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
    const mpz_class q2 = q0 + a * q1;
    if (q2 > bound) break;
    const mpz_class p2 = p0 + a * p1;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const mpz_class r = n - a * d;
    n = d;
    d = r;
    if (sgn(d) == 0) break;
  }
  // Best semiconvergent below the bound versus the last convergent.
  mpz_class k;
  mpz_fdiv_q(k.get_mpz_t(), mpz_class(bound - q0).get_mpz_t(), q1.get_mpz_t());
  Rational semi(p0 + k * p1, q0 + k * q1);
  Rational conv(p1, q1);
  semi.canonicalize();
  conv.canonicalize();
  return abs(conv - exact) <= abs(semi - exact) ? conv : semi;
}

// ---------------------------------------------------------------------------
// GaussianRational

GaussianRational::GaussianRational(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {
  re_.canonicalize();
  im_.canonicalize();
}

GaussianRational& GaussianRational::operator+=(const GaussianRational& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator-=(const GaussianRational& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator*=(const GaussianRational& o) {
  if (o.is_real()) {
    re_ *= o.re_;
    im_ *= o.re_;
    return *this;
  }
  Rational r = re_ * o.re_ - im_ * o.im_;
  Rational i = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(r);
  im_ = std::move(i);
  return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
  if (o.is_zero()) throw std::domain_error("division by zero in Q[i]");
  if (o.is_real()) {
    re_ /= o.re_;
    im_ /= o.re_;
    return *this;
  }
  const Rational n = o.norm2();
  *this *= o.conj();
  re_ /= n;
  im_ /= n;
  return *this;
}

// ---------------------------------------------------------------------------
// ExactMatrix

ExactMatrix ExactMatrix::identity(std::size_t n) {
  ExactMatrix m(n, n);
  for (std::size_t k = 0; k < n; ++k) m(k, k) = 1;
  return m;
}

ExactMatrix ExactMatrix::from_rows(const std::vector<std::vector<GaussianRational>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows[0].size();
  ExactMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw Error(ErrorCode::ShapeMismatch, "ragged matrix rows");
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

ExactMatrix ExactMatrix::adjoint() const {
  ExactMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j).conj();
  return t;
}

ExactMatrix ExactMatrix::transpose() const {
  ExactMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool ExactMatrix::is_hermitian() const {
  if (!is_square()) return false;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = i; j < cols_; ++j)
      if (!((*this)(i, j) == (*this)(j, i).conj())) return false;
  return true;
}

bool ExactMatrix::is_zero() const {
  for (const auto& z : data_)
    if (!z.is_zero()) return false;
  return true;
}

GaussianRational ExactMatrix::trace() const {
  GaussianRational t;
  for (std::size_t k = 0; k < std::min(rows_, cols_); ++k) t += (*this)(k, k);
  return t;
}

ExactMatrix ExactMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw Error(ErrorCode::ShapeMismatch, "block out of range");
  ExactMatrix b(nr, nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

void ExactMatrix::set_block(std::size_t r0, std::size_t c0, const ExactMatrix& b) {
  if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) throw Error(ErrorCode::ShapeMismatch, "block out of range");
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
}

ExactMatrix& ExactMatrix::operator+=(const ExactMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw Error(ErrorCode::ShapeMismatch, "matrix sum shapes differ");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

ExactMatrix& ExactMatrix::operator-=(const ExactMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw Error(ErrorCode::ShapeMismatch, "matrix difference shapes differ");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}

ExactMatrix& ExactMatrix::operator*=(const GaussianRational& s) {
  for (auto& z : data_) z *= s;
  return *this;
}

ExactMatrix operator*(const ExactMatrix& a, const ExactMatrix& b) {
  if (a.cols_ != b.rows_) throw Error(ErrorCode::ShapeMismatch, "matrix product shapes differ");
  ExactMatrix c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const auto& aik = a(i, k);
      if (aik.is_zero()) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) {
        const auto& bkj = b(k, j);
        if (!bkj.is_zero()) c(i, j) += aik * bkj;
      }
    }
  return c;
}

ExactMatrix kron(const ExactMatrix& a, const ExactMatrix& b) {
  ExactMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j).is_zero()) continue;
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q)
          if (!b(p, q).is_zero()) k(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
    }
  return k;
}

ExactMatrix block_diagonal(const std::vector<ExactMatrix>& blocks) {
  std::size_t r = 0, c = 0;
  for (const auto& b : blocks) {
    r += b.rows();
    c += b.cols();
  }
  ExactMatrix m(r, c);
  r = c = 0;
  for (const auto& b : blocks) {
    m.set_block(r, c, b);
    r += b.rows();
    c += b.cols();
  }
  return m;
}

std::vector<ExactMatrix> hermitian_basis(std::size_t s) {
  std::vector<ExactMatrix> basis;
  basis.reserve(s * s);
  for (std::size_t p = 0; p < s; ++p)
    for (std::size_t q = p; q < s; ++q) {
      ExactMatrix e(s, s);
      if (p == q) {
        e(p, p) = 1;
        basis.push_back(std::move(e));
        continue;
      }
      e(p, q) = 1;
      e(q, p) = 1;
      basis.push_back(e);
      e(p, q) = -GaussianRational::i();
      e(q, p) = GaussianRational::i();
      basis.push_back(std::move(e));
    }
  return basis;
}

GaussianRational trace_of_product(const ExactMatrix& a, const ExactMatrix& b) {
  if (a.cols() != b.rows() || a.rows() != b.cols()) throw Error(ErrorCode::ShapeMismatch, "trace(AB) shapes differ");
  GaussianRational t;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      if (!a(i, k).is_zero() && !b(k, i).is_zero()) t += a(i, k) * b(k, i);
  return t;
}

// ---------------------------------------------------------------------------
// Exact PSD test

namespace {

// v* M v for a column vector v.
GaussianRational quadratic_form(const ExactMatrix& m, const ExactMatrix& v) {
  const ExactMatrix mv = m * v;
  GaussianRational acc;
  for (std::size_t k = 0; k < v.rows(); ++k) acc += v(k, 0).conj() * mv(k, 0);
  return acc;
}

}  // namespace

bool PsdCheck::verify(const ExactMatrix& m) const {
  const std::size_t d = m.rows();
  if (!is_psd) {
    if (!witness) return false;
    const auto value = quadratic_form(m, *witness);
    return value.is_real() && sgn(value.re()) < 0 && value.re() == witness_value;
  }
  if (perm.size() != d || diag.size() != d || lower.rows() != d) return false;
  for (const auto& x : diag)
    if (sgn(x) < 0) return false;
  ExactMatrix ld = lower;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) ld(i, j) *= GaussianRational(diag[j]);
  const ExactMatrix rebuilt = ld * lower.adjoint();
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      if (!(rebuilt(a, b) == m(perm[a], perm[b]))) return false;
  return true;
}

PsdCheck psd_check_exact(const ExactMatrix& m) {
  if (!m.is_hermitian()) throw Error(ErrorCode::NonHermitianInput, "psd_check_exact requires an exactly Hermitian matrix");
  const std::size_t d = m.rows();
  PsdCheck out;
  out.perm.resize(d);
  for (std::size_t k = 0; k < d; ++k) out.perm[k] = k;
  out.lower = ExactMatrix::identity(d);
  out.diag.assign(d, Rational(0));
  ExactMatrix w = m;

  // Witness from Schur coordinates: x solves L* x = y, then v = P* x.
  auto make_witness = [&](const ExactMatrix& y) {
    ExactMatrix x = y;
    for (std::size_t i = d; i-- > 0;) {
      GaussianRational acc = y(i, 0);
      for (std::size_t j = i + 1; j < d; ++j)
        if (!out.lower(j, i).is_zero()) acc -= out.lower(j, i).conj() * x(j, 0);
      x(i, 0) = acc;
    }
    ExactMatrix v(d, 1);
    for (std::size_t a = 0; a < d; ++a) v(out.perm[a], 0) = x(a, 0);
    out.is_psd = false;
    out.witness_value = quadratic_form(m, v).re();
    out.witness = std::move(v);
    return out;
  };

  for (std::size_t k = 0; k < d; ++k) {
    std::size_t best = k;
    for (std::size_t j = k + 1; j < d; ++j)
      if (abs(w(j, j).re()) > abs(w(best, best).re())) best = j;

    if (sgn(w(best, best).re()) < 0) {
      ExactMatrix y(d, 1);
      y(best, 0) = 1;
      return make_witness(y);
    }
    if (sgn(w(best, best).re()) == 0) {
      // Remaining diagonal is zero: PSD only if the whole residual block is.
      for (std::size_t i = k; i < d; ++i)
        for (std::size_t j = k; j < d; ++j)
          if (!w(i, j).is_zero()) {
            ExactMatrix y(d, 1);
            y(i, 0) = 1;
            y(j, 0) = -w(i, j).conj();
            return make_witness(y);
          }
      break;
    }

    if (best != k) {
      for (std::size_t j = 0; j < d; ++j) std::swap(w(k, j), w(best, j));
      for (std::size_t i = 0; i < d; ++i) std::swap(w(i, k), w(i, best));
      std::swap(out.perm[k], out.perm[best]);
      for (std::size_t j = 0; j < k; ++j) std::swap(out.lower(k, j), out.lower(best, j));
    }

    const Rational pivot = w(k, k).re();
    out.diag[k] = pivot;
    const GaussianRational inv_pivot(Rational(1) / pivot);
    for (std::size_t i = k + 1; i < d; ++i) {
      if (w(i, k).is_zero()) continue;
      out.lower(i, k) = w(i, k) * inv_pivot;
    }
    for (std::size_t i = k + 1; i < d; ++i) {
      const auto& lik = out.lower(i, k);
      if (lik.is_zero()) continue;
      for (std::size_t j = k + 1; j < d; ++j)
        if (!w(k, j).is_zero()) w(i, j) -= lik * w(k, j);
    }
    for (std::size_t i = k; i < d; ++i) {
      w(i, k) = 0;
      w(k, i) = 0;
    }
  }
  out.is_psd = true;
  return out;
}

// ---------------------------------------------------------------------------
// Elimination

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(ExactMatrix& a, std::size_t ncols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < ncols && row < a.rows(); ++col) {
    std::size_t p = row;
    while (p < a.rows() && a(p, col).is_zero()) ++p;
    if (p == a.rows()) continue;
    if (p != row)
      for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(p, j), a(row, j));
    const GaussianRational inv = GaussianRational(1) / a(row, col);
    for (std::size_t j = col; j < a.cols(); ++j)
      if (!a(row, j).is_zero()) a(row, j) *= inv;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (i == row || a(i, col).is_zero()) continue;
      const GaussianRational f = a(i, col);
      for (std::size_t j = col; j < a.cols(); ++j)
        if (!a(row, j).is_zero()) a(i, j) -= f * a(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

std::size_t rank_exact(const ExactMatrix& m) {
  ExactMatrix a = m;
  return rref(a, a.cols()).size();
}

std::vector<ExactMatrix> nullspace_exact(const ExactMatrix& m) {
  ExactMatrix a = m;
  const auto pivots = rref(a, a.cols());
  std::vector<bool> is_pivot(a.cols(), false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<ExactMatrix> basis;
  for (std::size_t f = 0; f < a.cols(); ++f) {
    if (is_pivot[f]) continue;
    ExactMatrix v(a.cols(), 1);
    v(f, 0) = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v(pivots[r], 0) = -a(r, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<ExactMatrix> solve_exact(const ExactMatrix& a, const ExactMatrix& b) {
  if (a.rows() != b.rows()) throw Error(ErrorCode::ShapeMismatch, "solve_exact: row counts differ");
  ExactMatrix aug(a.rows(), a.cols() + b.cols());
  aug.set_block(0, 0, a);
  aug.set_block(0, a.cols(), b);
  const auto pivots = rref(aug, a.cols());
  for (std::size_t r = pivots.size(); r < aug.rows(); ++r)
    for (std::size_t j = a.cols(); j < aug.cols(); ++j)
      if (!aug(r, j).is_zero()) return std::nullopt;
  ExactMatrix x(a.cols(), b.cols());
  for (std::size_t r = 0; r < pivots.size(); ++r)
    for (std::size_t j = 0; j < b.cols(); ++j) x(pivots[r], j) = aug(r, a.cols() + j);
  return x;
}

}  // namespace qms
