#include "qms/permutation.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>

namespace qms {

Permutation::Permutation(std::vector<std::size_t> image) : image_(std::move(image)) {
  std::vector<bool> seen(image_.size(), false);
  for (auto v : image_) {
    if (v >= image_.size() || seen[v]) throw Error(ErrorCode::ShapeMismatch, "not a bijection");
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> id(n);
  std::iota(id.begin(), id.end(), std::size_t{0});
  return Permutation(std::move(id));
}

ExactMatrix Permutation::matrix() const {
  ExactMatrix p(size(), size());
  for (std::size_t i = 0; i < size(); ++i) p(i, image_[i]) = 1;
  return p;
}

CMatrix Permutation::matrix_numeric() const {
  CMatrix p = CMatrix::Zero(size(), size());
  for (std::size_t i = 0; i < size(); ++i) p(i, image_[i]) = 1.0;
  return p;
}

std::size_t factorial(std::size_t n) {
  std::size_t f = 1;
  for (std::size_t k = 2; k <= n; ++k) f *= k;
  return f;
}

const std::vector<Permutation>& all_permutations(std::size_t n) {
  if (n > 8) throw Error(ErrorCode::TooLarge, "refusing to enumerate S_n for n > 8");
  static std::mutex mu;
  static std::map<std::size_t, std::vector<Permutation>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<Permutation> perms;
  std::vector<std::size_t> image(n);
  std::iota(image.begin(), image.end(), std::size_t{0});
  do {
    perms.emplace_back(image);
  } while (std::next_permutation(image.begin(), image.end()));
  return cache.emplace(n, std::move(perms)).first->second;
}

std::size_t lex_rank(const Permutation& sigma) {
  const std::size_t n = sigma.size();
  std::size_t rank = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t smaller = 0;
    for (std::size_t j = i + 1; j < n; ++j)
      if (sigma(j) < sigma(i)) ++smaller;
    rank += smaller * factorial(n - 1 - i);
  }
  return rank;
}

}  // namespace qms
