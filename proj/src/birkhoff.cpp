#include "qms/birkhoff.hpp"

#include <functional>

namespace qms::birkhoff {

DoublyStochasticMatrix::DoublyStochasticMatrix(std::size_t n, std::vector<Rational> entries)
    : n_(n), entries_(std::move(entries)) {
  if (entries_.size() != n * n) throw Error(ErrorCode::NotDoublyStochastic, "expected n*n entries");
  for (auto& x : entries_) {
    x.canonicalize();
    if (sgn(x) < 0) throw Error(ErrorCode::NotDoublyStochastic, "negative entry");
  }
  for (std::size_t i = 0; i < n; ++i) {
    Rational row = 0, col = 0;
    for (std::size_t j = 0; j < n; ++j) {
      row += entries_[i * n + j];
      col += entries_[j * n + i];
    }
    if (row != 1) throw Error(ErrorCode::NotDoublyStochastic, "row " + std::to_string(i + 1) + " does not sum to 1");
    if (col != 1) throw Error(ErrorCode::NotDoublyStochastic, "column " + std::to_string(i + 1) + " does not sum to 1");
  }
}

DoublyStochasticMatrix DoublyStochasticMatrix::from_rows(const std::vector<std::vector<Rational>>& rows) {
  const std::size_t n = rows.size();
  std::vector<Rational> e;
  e.reserve(n * n);
  for (const auto& r : rows) {
    if (r.size() != n) throw Error(ErrorCode::NotDoublyStochastic, "matrix must be square");
    e.insert(e.end(), r.begin(), r.end());
  }
  return {n, std::move(e)};
}

namespace {

// Kuhn's augmenting paths restricted to rows >= first_row and columns not in
// `taken`; true iff those rows can all be matched inside the support.
bool has_perfect_matching(const std::vector<std::vector<bool>>& support, std::size_t first_row,
                          const std::vector<bool>& taken) {
  const std::size_t n = support.size();
  std::vector<long> match_col(n, -1);
  std::function<bool(std::size_t, std::vector<bool>&)> augment = [&](std::size_t r, std::vector<bool>& seen) {
    for (std::size_t c = 0; c < n; ++c) {
      if (!support[r][c] || taken[c] || seen[c]) continue;
      seen[c] = true;
      if (match_col[c] < 0 || augment(static_cast<std::size_t>(match_col[c]), seen)) {
        match_col[c] = static_cast<long>(r);
        return true;
      }
    }
    return false;
  };
  for (std::size_t r = first_row; r < n; ++r) {
    std::vector<bool> seen(n, false);
    if (!augment(r, seen)) return false;
  }
  return true;
}

Permutation smallest_supported_permutation(const std::vector<std::vector<bool>>& support) {
  const std::size_t n = support.size();
  std::vector<bool> taken(n, false);
  std::vector<std::size_t> image(n);
  for (std::size_t r = 0; r < n; ++r) {
    bool placed = false;
    for (std::size_t c = 0; c < n && !placed; ++c) {
      if (!support[r][c] || taken[c]) continue;
      taken[c] = true;
      if (has_perfect_matching(support, r + 1, taken)) {
        image[r] = c;
        placed = true;
      } else {
        taken[c] = false;
      }
    }
    if (!placed) throw Error(ErrorCode::NotDoublyStochastic, "support has no perfect matching");
  }
  return Permutation(std::move(image));
}

}  // namespace

std::vector<Term> decompose(const DoublyStochasticMatrix& m) {
  const std::size_t n = m.n();
  std::vector<Rational> rest = m.entries();
  std::vector<Term> terms;
  while (true) {
    std::vector<std::vector<bool>> support(n, std::vector<bool>(n, false));
    bool any = false;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (sgn(rest[i * n + j]) > 0) support[i][j] = any = true;
    if (!any) break;
    Permutation p = smallest_supported_permutation(support);
    Rational w = rest[p(0)];
    for (std::size_t i = 0; i < n; ++i) w = std::min(w, rest[i * n + p(i)]);
    for (std::size_t i = 0; i < n; ++i) rest[i * n + p(i)] -= w;
    terms.push_back({std::move(p), w});
  }
  return terms;
}

std::vector<Rational> reconstruct(const std::vector<Term>& terms, std::size_t n) {
  std::vector<Rational> out(n * n, Rational(0));
  for (const auto& t : terms)
    for (std::size_t i = 0; i < n; ++i) out[i * n + t.perm(i)] += t.weight;
  return out;
}

std::size_t magic_space_dimension(std::size_t n) {
  if (n == 0 || n > 6) throw Error(ErrorCode::TooLarge, "magic_space_dimension supports 1 <= n <= 6");
  const auto& perms = all_permutations(n);
  ExactMatrix vecs(perms.size(), n * n);
  for (std::size_t k = 0; k < perms.size(); ++k)
    for (std::size_t i = 0; i < n; ++i) vecs(k, i * n + perms[k](i)) = 1;
  return rank_exact(vecs);
}

bool is_extreme_point(const DoublyStochasticMatrix& m) {
  for (const auto& x : m.entries())
    if (sgn(x) != 0 && x != 1) return false;
  return true;
}

}  // namespace qms::birkhoff
