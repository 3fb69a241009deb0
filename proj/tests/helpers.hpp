#pragma once

#include <algorithm>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "vpiso/exactmat.hpp"

namespace testing {

using vpiso::Integer;
using vpiso::Matrix;
using vpiso::Scalar;

/// E_{ij} with 1-based indices, as written in the math.
inline Matrix E(std::size_t n, std::size_t i, std::size_t j) { return vpiso::unit_matrix(n, i - 1, j - 1); }
inline Matrix I(std::size_t n) { return Matrix::identity(n); }

inline Matrix scaled(Matrix m, const Scalar& s) { return m.scale(s); }

inline Matrix mat(std::initializer_list<std::initializer_list<const char*>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (const char* x : row) m(i, j++) = vpiso::parse_scalar(x);
    ++i;
  }
  return m;
}

inline Matrix imat(std::initializer_list<std::initializer_list<long>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (long x : row) m(i, j++) = Scalar(x);
    ++i;
  }
  return m;
}

inline long uniform(std::mt19937_64& rng, long lo, long hi) {
  return std::uniform_int_distribution<long>(lo, hi)(rng);
}

/// Random permutation matrix of size n.
inline Matrix random_permutation(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  std::shuffle(p.begin(), p.end(), rng);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, p[i]) = 1;
  return m;
}

/// Random unipotent matrix: upper unitriangular with entries of height <= h,
/// conjugated by a random permutation so it need not be triangular.
inline Matrix random_unipotent(std::mt19937_64& rng, std::size_t n, long h) {
  Matrix u = Matrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) u(i, j) = uniform(rng, -h, h);
  Matrix p = random_permutation(rng, n);
  return vpiso::inverse(p) * u * p;
}

/// Random nilpotent matrix with rational entries (denominators <= 6).
inline Matrix random_nilpotent(std::mt19937_64& rng, std::size_t n, long h) {
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = vpiso::make_scalar(uniform(rng, -h, h), uniform(rng, 1, 6));
  Matrix p = random_permutation(rng, n);
  return vpiso::inverse(p) * a * p;
}

}  // namespace testing
