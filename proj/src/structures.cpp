#include "qms/structures.hpp"

#include <algorithm>
#include <sstream>

namespace qms {

std::string_view to_string(Repr r) { return r == Repr::Exact ? "exact" : "float"; }

std::string_view to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::NotHermitian: return "not_hermitian";
    case Violation::Kind::NotPsd: return "not_psd";
    case Violation::Kind::RowSum: return "row_sum";
    case Violation::Kind::ColumnSum: return "column_sum";
    case Violation::Kind::NotProjector: return "not_projector";
    case Violation::Kind::RowOrthogonality: return "row_orthogonality";
    case Violation::Kind::ColumnOrthogonality: return "column_orthogonality";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// BlockArray

namespace {

template <typename M>
std::size_t check_shape(std::size_t n, const std::vector<M>& blocks) {
  if (blocks.size() != n * n)
    throw Error(ErrorCode::ShapeMismatch, "expected " + std::to_string(n * n) + " blocks, got " + std::to_string(blocks.size()));
  if (n == 0) return 0;
  const std::size_t s = static_cast<std::size_t>(blocks[0].rows());
  for (const auto& b : blocks)
    if (static_cast<std::size_t>(b.rows()) != s || static_cast<std::size_t>(b.cols()) != s)
      throw Error(ErrorCode::ShapeMismatch, "blocks must all be square of equal size");
  return s;
}

double frobenius(const ExactMatrix& m) { return to_complex(m).norm(); }

}  // namespace

BlockArray BlockArray::exact(std::size_t n, std::vector<ExactMatrix> blocks) {
  BlockArray a;
  a.s_ = check_shape(n, blocks);
  a.n_ = n;
  a.blocks_ = std::move(blocks);
  return a;
}

BlockArray BlockArray::floating(std::size_t n, std::vector<CMatrix> blocks) {
  BlockArray a;
  a.s_ = check_shape(n, blocks);
  a.n_ = n;
  a.blocks_ = std::move(blocks);
  return a;
}

const ExactMatrix& BlockArray::exact(std::size_t i, std::size_t j) const {
  return exact_blocks().at(i * n_ + j);
}

const CMatrix& BlockArray::floating(std::size_t i, std::size_t j) const {
  return float_blocks().at(i * n_ + j);
}

CMatrix BlockArray::numeric(std::size_t i, std::size_t j) const {
  return is_exact() ? to_complex(exact(i, j)) : floating(i, j);
}

const std::vector<ExactMatrix>& BlockArray::exact_blocks() const {
  if (!is_exact()) throw Error(ErrorCode::RepresentationMismatch, "exact blocks requested from a float array");
  return std::get<std::vector<ExactMatrix>>(blocks_);
}

const std::vector<CMatrix>& BlockArray::float_blocks() const {
  if (is_exact()) throw Error(ErrorCode::RepresentationMismatch, "float blocks requested from an exact array");
  return std::get<std::vector<CMatrix>>(blocks_);
}

BlockArray BlockArray::to_float() const {
  if (!is_exact()) return *this;
  std::vector<CMatrix> out;
  out.reserve(n_ * n_);
  for (const auto& b : exact_blocks()) out.push_back(to_complex(b));
  return floating(n_, std::move(out));
}

// ---------------------------------------------------------------------------
// Validation

bool ValidationReport::has(Violation::Kind kind, std::size_t i, std::size_t j) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.kind == kind && v.i == i && v.j == j; });
}

ValidationReport validate_magic(const BlockArray& a, double tol) {
  ValidationReport report;
  report.repr = a.repr();
  const std::size_t n = a.n(), s = a.s();
  if (a.is_exact()) {
    const ExactMatrix id = ExactMatrix::identity(s);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const auto& b = a.exact(i, j);
        if (!b.is_hermitian()) {
          report.violations.push_back({Violation::Kind::NotHermitian, i, j, 0, frobenius(b - b.adjoint())});
          continue;
        }
        const auto check = psd_check_exact(b);
        if (!check.is_psd) {
          Rational vv = 0;
          for (std::size_t k = 0; k < s; ++k) vv += (*check.witness)(k, 0).norm2();
          report.violations.push_back({Violation::Kind::NotPsd, i, j, 0, Rational(check.witness_value / vv).get_d()});
        }
      }
    for (std::size_t i = 0; i < n; ++i) {
      ExactMatrix row(s, s), col(s, s);
      for (std::size_t j = 0; j < n; ++j) {
        row += a.exact(i, j);
        col += a.exact(j, i);
      }
      if (!(row == id)) report.violations.push_back({Violation::Kind::RowSum, i, 0, 0, frobenius(row - id)});
      if (!(col == id)) report.violations.push_back({Violation::Kind::ColumnSum, i, 0, 0, frobenius(col - id)});
    }
  } else {
    report.tol = tol;
    const CMatrix id = CMatrix::Identity(s, s);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const auto& b = a.floating(i, j);
        const double herm = (b - b.adjoint()).norm();
        if (herm > tol) report.violations.push_back({Violation::Kind::NotHermitian, i, j, 0, herm});
        const double lam = min_eigenvalue(b);
        if (lam < -tol) report.violations.push_back({Violation::Kind::NotPsd, i, j, 0, lam});
      }
    for (std::size_t i = 0; i < n; ++i) {
      CMatrix row = CMatrix::Zero(s, s), col = CMatrix::Zero(s, s);
      for (std::size_t j = 0; j < n; ++j) {
        row += a.floating(i, j);
        col += a.floating(j, i);
      }
      const double rr = (row - id).norm(), cr = (col - id).norm();
      if (rr > tol) report.violations.push_back({Violation::Kind::RowSum, i, 0, 0, rr});
      if (cr > tol) report.violations.push_back({Violation::Kind::ColumnSum, i, 0, 0, cr});
    }
  }
  report.ok = report.violations.empty();
  return report;
}

namespace {

std::string describe(const ValidationReport& r) {
  std::ostringstream os;
  for (const auto& v : r.violations) os << " " << to_string(v.kind) << "(" << v.i + 1 << "," << v.j + 1 << ")";
  return os.str();
}

}  // namespace

QuantumMagicSquare::QuantumMagicSquare(BlockArray blocks, double tol) : BlockArray(std::move(blocks)) {
  const auto report = validate_magic(*this, tol);
  if (!report.ok) throw Error(ErrorCode::InvalidSquare, "not a quantum magic square:" + describe(report));
}

QuantumMagicSquare QuantumMagicSquare::to_float() const {
  return QuantumMagicSquare(BlockArray::to_float());
}

ValidationReport validate_quantum_permutation(const QuantumMagicSquare& a, double tol) {
  ValidationReport report;
  report.repr = a.repr();
  const std::size_t n = a.n();
  if (a.is_exact()) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const auto& b = a.exact(i, j);
        const ExactMatrix r = b * b - b;
        if (!r.is_zero()) report.violations.push_back({Violation::Kind::NotProjector, i, j, 0, frobenius(r)});
      }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          if (j == k) continue;
          const ExactMatrix row = a.exact(i, j) * a.exact(i, k);
          if (!row.is_zero()) report.violations.push_back({Violation::Kind::RowOrthogonality, i, j, k, frobenius(row)});
          const ExactMatrix col = a.exact(j, i) * a.exact(k, i);
          if (!col.is_zero()) report.violations.push_back({Violation::Kind::ColumnOrthogonality, i, j, k, frobenius(col)});
        }
  } else {
    report.tol = tol;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const auto& b = a.floating(i, j);
        const double r = (b * b - b).norm();
        if (r > tol) report.violations.push_back({Violation::Kind::NotProjector, i, j, 0, r});
      }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          if (j == k) continue;
          const double row = (a.floating(i, j) * a.floating(i, k)).norm();
          if (row > tol) report.violations.push_back({Violation::Kind::RowOrthogonality, i, j, k, row});
          const double col = (a.floating(j, i) * a.floating(k, i)).norm();
          if (col > tol) report.violations.push_back({Violation::Kind::ColumnOrthogonality, i, j, k, col});
        }
  }
  report.ok = report.violations.empty();
  return report;
}

QuantumPermutationMatrix::QuantumPermutationMatrix(QuantumMagicSquare square, double tol)
    : QuantumMagicSquare(std::move(square)) {
  const auto report = validate_quantum_permutation(*this, tol);
  if (!report.ok) throw Error(ErrorCode::InvalidSquare, "not a quantum permutation matrix:" + describe(report));
}

double max_commutator(const BlockArray& a) {
  const std::size_t m = a.n() * a.n();
  std::vector<CMatrix> b;
  b.reserve(m);
  for (std::size_t i = 0; i < a.n(); ++i)
    for (std::size_t j = 0; j < a.n(); ++j) b.push_back(a.numeric(i, j));
  double worst = 0.0;
  for (std::size_t p = 0; p < m; ++p)
    for (std::size_t q = p + 1; q < m; ++q) worst = std::max(worst, (b[p] * b[q] - b[q] * b[p]).norm());
  return worst;
}

// ---------------------------------------------------------------------------
// Constructions

BlockArray compress(const BlockArray& a, const CMatrix& v, double tol) {
  if (a.is_exact()) throw Error(ErrorCode::RepresentationMismatch, "float isometry applied to an exact array");
  if (static_cast<std::size_t>(v.rows()) != a.s()) throw Error(ErrorCode::ShapeMismatch, "isometry rows must equal block size");
  if (isometry_residual(v) > tol) throw Error(ErrorCode::NotAnIsometry, "V*V != I");
  std::vector<CMatrix> out;
  out.reserve(a.n() * a.n());
  for (std::size_t i = 0; i < a.n(); ++i)
    for (std::size_t j = 0; j < a.n(); ++j) out.push_back(v.adjoint() * a.floating(i, j) * v);
  return BlockArray::floating(a.n(), std::move(out));
}

BlockArray compress(const BlockArray& a, const ExactMatrix& v) {
  if (!a.is_exact()) throw Error(ErrorCode::RepresentationMismatch, "exact isometry applied to a float array");
  if (v.rows() != a.s()) throw Error(ErrorCode::ShapeMismatch, "isometry rows must equal block size");
  const ExactMatrix vh = v.adjoint();
  if (!(vh * v == ExactMatrix::identity(v.cols()))) throw Error(ErrorCode::NotAnIsometry, "V*V != I");
  std::vector<ExactMatrix> out;
  out.reserve(a.n() * a.n());
  for (std::size_t i = 0; i < a.n(); ++i)
    for (std::size_t j = 0; j < a.n(); ++j) out.push_back(vh * a.exact(i, j) * v);
  return BlockArray::exact(a.n(), std::move(out));
}

QuantumMagicSquare direct_sum(const QuantumMagicSquare& a, const QuantumMagicSquare& b) {
  if (a.n() != b.n()) throw Error(ErrorCode::SizeMismatch, "direct_sum needs equal n");
  if (a.repr() != b.repr()) throw Error(ErrorCode::RepresentationMismatch, "direct_sum of exact and float squares");
  const std::size_t n = a.n();
  if (a.is_exact()) {
    std::vector<ExactMatrix> out;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out.push_back(block_diagonal({a.exact(i, j), b.exact(i, j)}));
    return QuantumMagicSquare(BlockArray::exact(n, std::move(out)));
  }
  std::vector<CMatrix> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.push_back(block_diagonal({a.floating(i, j), b.floating(i, j)}));
  return QuantumMagicSquare(BlockArray::floating(n, std::move(out)));
}

QuantumMagicSquare block_diagonal_sum(const QuantumMagicSquare& a, const QuantumMagicSquare& b) {
  if (a.s() != b.s()) throw Error(ErrorCode::SizeMismatch, "block_diagonal_sum needs equal block size");
  if (a.repr() != b.repr()) throw Error(ErrorCode::RepresentationMismatch, "block_diagonal_sum of exact and float squares");
  const std::size_t n = a.n() + b.n(), s = a.s();
  auto pick = [&](std::size_t i, std::size_t j, auto get_a, auto get_b, auto zero) {
    if (i < a.n() && j < a.n()) return get_a(i, j);
    if (i >= a.n() && j >= a.n()) return get_b(i - a.n(), j - a.n());
    return zero;
  };
  if (a.is_exact()) {
    std::vector<ExactMatrix> out;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        out.push_back(pick(
            i, j, [&](auto p, auto q) { return a.exact(p, q); }, [&](auto p, auto q) { return b.exact(p, q); },
            ExactMatrix(s, s)));
    return QuantumMagicSquare(BlockArray::exact(n, std::move(out)));
  }
  std::vector<CMatrix> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out.push_back(pick(
          i, j, [&](auto p, auto q) { return a.floating(p, q); }, [&](auto p, auto q) { return b.floating(p, q); },
          CMatrix(CMatrix::Zero(s, s))));
  return QuantumMagicSquare(BlockArray::floating(n, std::move(out)));
}

QuantumMagicSquare embed_pad(const QuantumMagicSquare& a) {
  const std::size_t s = a.s();
  if (a.is_exact()) {
    std::vector<ExactMatrix> id{ExactMatrix::identity(s)};
    return block_diagonal_sum(a, QuantumMagicSquare(BlockArray::exact(1, std::move(id))));
  }
  std::vector<CMatrix> id{CMatrix::Identity(s, s)};
  return block_diagonal_sum(a, QuantumMagicSquare(BlockArray::floating(1, std::move(id))));
}

QuantumMagicSquare complete_corner(const BlockArray& corner, double tol) {
  if (corner.n() != 2) throw Error(ErrorCode::ShapeMismatch, "complete_corner expects a 2 x 2 corner");
  const std::size_t s = corner.s();
  std::ostringstream bad;
  if (corner.is_exact()) {
    for (const auto& b : corner.exact_blocks())
      if (!b.is_hermitian()) throw Error(ErrorCode::NonHermitianInput, "corner blocks must be Hermitian");
    const ExactMatrix id = ExactMatrix::identity(s);
    std::vector<ExactMatrix> out(9, ExactMatrix(s, s));
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) out[i * 3 + j] = corner.exact(i, j);
    for (std::size_t i = 0; i < 2; ++i) out[i * 3 + 2] = id - out[i * 3] - out[i * 3 + 1];
    for (std::size_t j = 0; j < 2; ++j) out[6 + j] = id - out[j] - out[3 + j];
    out[8] = out[0] + out[1] + out[3] + out[4] - id;
    for (std::size_t k = 0; k < 9; ++k)
      if (!psd_check_exact(out[k]).is_psd) bad << " a" << k / 3 + 1 << k % 3 + 1;
    if (!bad.str().empty()) throw Error(ErrorCode::CompletionNotPSD, "completed blocks not PSD:" + bad.str());
    return QuantumMagicSquare(BlockArray::exact(3, std::move(out)));
  }
  for (const auto& b : corner.float_blocks())
    if (hermitian_residual(b) > tol) throw Error(ErrorCode::NonHermitianInput, "corner blocks must be Hermitian");
  const CMatrix id = CMatrix::Identity(s, s);
  std::vector<CMatrix> out(9, CMatrix::Zero(s, s));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) out[i * 3 + j] = corner.floating(i, j);
  for (std::size_t i = 0; i < 2; ++i) out[i * 3 + 2] = id - out[i * 3] - out[i * 3 + 1];
  for (std::size_t j = 0; j < 2; ++j) out[6 + j] = id - out[j] - out[3 + j];
  out[8] = out[0] + out[1] + out[3] + out[4] - id;
  for (std::size_t k = 0; k < 9; ++k)
    if (min_eigenvalue(out[k]) < -tol) bad << " a" << k / 3 + 1 << k % 3 + 1;
  if (!bad.str().empty()) throw Error(ErrorCode::CompletionNotPSD, "completed blocks not PSD:" + bad.str());
  return QuantumMagicSquare(BlockArray::floating(3, std::move(out)), tol);
}

QuantumMagicSquare two_by_two(const ExactMatrix& a) {
  const ExactMatrix b = ExactMatrix::identity(a.rows()) - a;
  return QuantumMagicSquare(BlockArray::exact(2, {a, b, b, a}));
}

QuantumMagicSquare two_by_two(const CMatrix& a, double tol) {
  const CMatrix b = CMatrix::Identity(a.rows(), a.cols()) - a;
  return QuantumMagicSquare(BlockArray::floating(2, {a, b, b, a}), tol);
}

QuantumMagicSquare constant_square(std::size_t n, std::size_t s) {
  const ExactMatrix entry = ExactMatrix::identity(s) * GaussianRational(Rational(1, static_cast<unsigned long>(n)));
  return QuantumMagicSquare(BlockArray::exact(n, std::vector<ExactMatrix>(n * n, entry)));
}

QuantumMagicSquare permutation_square(const Permutation& sigma, std::size_t s) {
  const std::size_t n = sigma.size();
  std::vector<ExactMatrix> out(n * n, ExactMatrix(s, s));
  for (std::size_t i = 0; i < n; ++i) out[i * n + sigma(i)] = ExactMatrix::identity(s);
  return QuantumMagicSquare(BlockArray::exact(n, std::move(out)));
}

}  // namespace qms
