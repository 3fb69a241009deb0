#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vpiso {

using Integer = mpz_class;
/// Exact rational; gmp keeps results of arithmetic in canonical reduced form.
using Scalar = mpq_class;

Scalar make_scalar(const Integer& num, const Integer& den);
Scalar parse_scalar(const std::string& text);
std::string to_string(const Scalar& q);
std::string to_string(const Integer& z);

inline bool is_zero_value(const Scalar& x) { return sgn(x) == 0; }
inline bool is_zero_value(const Integer& x) { return sgn(x) == 0; }

/// Dense row-major matrix over any ring-like T (Scalar, Integer, polynomials).
template <class T>
class BasicMatrix {
 public:
  BasicMatrix() = default;
  BasicMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, T(0)) {}
  BasicMatrix(std::size_t rows, std::size_t cols, std::vector<T> entries)
      : rows_(rows), cols_(cols), a_(std::move(entries)) {
    if (a_.size() != rows * cols) throw std::invalid_argument("matrix: entry count does not match shape");
  }

  static BasicMatrix identity(std::size_t n) {
    BasicMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }
  static BasicMatrix zero(std::size_t n) { return BasicMatrix(n, n); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  std::size_t dim() const { return rows_; }

  T& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  std::span<const T> entries() const { return a_; }
  std::span<T> entries() { return a_; }

  friend bool operator==(const BasicMatrix& x, const BasicMatrix& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
  }

  BasicMatrix& operator+=(const BasicMatrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
  }
  BasicMatrix& operator-=(const BasicMatrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
  }
  template <class S>
  BasicMatrix& scale(const S& s) {
    for (auto& x : a_) x *= s;
    return *this;
  }

  friend BasicMatrix operator+(BasicMatrix x, const BasicMatrix& y) { return x += y; }
  friend BasicMatrix operator-(BasicMatrix x, const BasicMatrix& y) { return x -= y; }
  friend BasicMatrix operator-(BasicMatrix x) {
    for (auto& e : x.a_) e = -e;
    return x;
  }
  friend BasicMatrix operator*(const BasicMatrix& x, const BasicMatrix& y) {
    if (x.cols_ != y.rows_) throw std::invalid_argument("matrix product: dimension mismatch");
    BasicMatrix r(x.rows_, y.cols_);
    for (std::size_t i = 0; i < x.rows_; ++i)
      for (std::size_t k = 0; k < x.cols_; ++k) {
        const T& xik = x(i, k);
        if (is_zero_value(xik)) continue;
        for (std::size_t j = 0; j < y.cols_; ++j) r(i, j) += xik * y(k, j);
      }
    return r;
  }

  bool is_zero() const {
    for (const auto& e : a_)
      if (!is_zero_value(e)) return false;
    return true;
  }

 private:
  void check_same_shape(const BasicMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix: dimension mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> a_;
};

using Matrix = BasicMatrix<Scalar>;
using IntMatrix = BasicMatrix<Integer>;

/// E_{row,col} in dimension n, 0-based indices.
Matrix unit_matrix(std::size_t n, std::size_t row, std::size_t col);

Matrix inverse(const Matrix& m);
Matrix power(const Matrix& m, long k);
Scalar determinant(const Matrix& m);
Matrix commutator(const Matrix& x, const Matrix& y);  // xy - yx

bool is_integral(const Matrix& m);
bool is_unipotent(const Matrix& m);
bool is_nilpotent(const Matrix& m);
IntMatrix to_integer(const Matrix& m);
Matrix to_rational(const IntMatrix& m);

/// Truncated power series, exact for nilpotent arguments; used with Scalar
/// and with polynomial entries alike.
template <class T>
BasicMatrix<T> exp_series(const BasicMatrix<T>& a) {
  const std::size_t n = a.dim();
  auto result = BasicMatrix<T>::identity(n);
  auto term = BasicMatrix<T>::identity(n);
  for (std::size_t k = 1; k < n; ++k) {
    term = term * a;
    term.scale(make_scalar(1, Integer(static_cast<unsigned long>(k))));
    result += term;
  }
  return result;
}

/// log(I + a) = sum_{k=1}^{n-1} (-1)^{k+1} a^k / k.
template <class T>
BasicMatrix<T> log_series(const BasicMatrix<T>& a) {
  const std::size_t n = a.dim();
  BasicMatrix<T> result(n, n);
  auto pw = BasicMatrix<T>::identity(n);
  for (std::size_t k = 1; k < n; ++k) {
    pw = pw * a;
    auto term = pw;
    term.scale(make_scalar(k % 2 == 1 ? 1 : -1, Integer(static_cast<unsigned long>(k))));
    result += term;
  }
  return result;
}

/// (I + a)^{-1} = sum_{k=0}^{n-1} (-a)^k.
template <class T>
BasicMatrix<T> unipotent_inverse_series(const BasicMatrix<T>& a) {
  const std::size_t n = a.dim();
  auto result = BasicMatrix<T>::identity(n);
  auto pw = BasicMatrix<T>::identity(n);
  auto neg = -a;
  for (std::size_t k = 1; k < n; ++k) {
    pw = pw * neg;
    result += pw;
  }
  return result;
}

/// log : U_n(Q) -> u_n(Q). Throws std::domain_error unless (m - I)^n = 0.
Matrix unipotent_log(const Matrix& m);
/// exp : u_n(Q) -> U_n(Q). Throws std::domain_error unless a^n = 0.
Matrix nilpotent_exp(const Matrix& a);

struct ResidueMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Integer modulus;
  std::vector<Integer> entries;  // row-major, each in [0, modulus)

  const Integer& operator()(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }
  friend bool operator==(const ResidueMatrix&, const ResidueMatrix&) = default;
};

Integer mod_floor(const Integer& a, const Integer& m);
ResidueMatrix reduce_mod(const Matrix& m, const Integer& modulus);

/// Row-style Hermite normal form of the Z-span of `rows`: echelon rows with
/// positive pivots, entries above each pivot in [0, pivot). Zero rows dropped.
IntMatrix hermite_form(std::span<const std::vector<Integer>> rows, std::size_t width);
IntMatrix hermite_form(const IntMatrix& rows);

struct SmithForm {
  std::vector<Integer> diagonal;  // d_1 | d_2 | ..., length min(rows, cols), nonnegative
  IntMatrix left;                 // U, unimodular rows x rows
  IntMatrix right;                // V, unimodular cols x cols; U * M * V = diag
};
SmithForm smith_form(const IntMatrix& m);

struct AbelianInvariants {
  std::vector<Integer> factors;  // invariant factors >= 2, each dividing the next
  std::size_t free_rank = 0;
  friend bool operator==(const AbelianInvariants&, const AbelianInvariants&) = default;
};
AbelianInvariants smith_invariants(const IntMatrix& relations);
std::string to_string(const AbelianInvariants& inv);

/// Rational row echelon helpers for coordinates in a (not necessarily full) basis.
class CoordinateSolver {
 public:
  CoordinateSolver() = default;
  /// `basis` rows must be linearly independent.
  explicit CoordinateSolver(std::vector<std::vector<Scalar>> basis);
  std::size_t rank() const { return basis_.size(); }
  std::size_t width() const { return width_; }
  /// Coordinates c with v = sum c_i basis_i, or empty optional-like flag.
  bool solve(std::span<const Scalar> v, std::vector<Scalar>& coords) const;
  /// Coordinates assuming v lies in the span; the linear map on entries.
  const std::vector<std::size_t>& pivots() const { return pivots_; }
  const Matrix& pivot_inverse() const { return pivot_inverse_; }

 private:
  std::vector<std::vector<Scalar>> basis_;
  std::size_t width_ = 0;
  std::vector<std::size_t> pivots_;
  Matrix pivot_inverse_;  // rank x rank, coords = v[pivots] * pivot_inverse_
};

/// Rank of a list of rational vectors.
std::size_t rational_rank(std::vector<std::vector<Scalar>> rows);

Integer factorial(unsigned n);
Integer lcm_of_denominators(std::span<const Scalar> xs);

}  // namespace vpiso
