#include "vpiso/exactmat.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

namespace vpiso {

Scalar make_scalar(const Integer& num, const Integer& den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  Scalar q(num, den);
  q.canonicalize();
  return q;
}

Scalar parse_scalar(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Scalar(Integer(text));
    return make_scalar(Integer(text.substr(0, slash)), Integer(text.substr(slash + 1)));
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("not a rational number: '" + text + "'");
  }
}

std::string to_string(const Scalar& q) { return q.get_str(); }
std::string to_string(const Integer& z) { return z.get_str(); }

Matrix unit_matrix(std::size_t n, std::size_t row, std::size_t col) {
  Matrix m(n, n);
  m(row, col) = 1;
  return m;
}

Matrix inverse(const Matrix& m) {
  if (!m.is_square()) throw std::invalid_argument("inverse: matrix not square");
  const std::size_t n = m.dim();
  Matrix a = m;
  Matrix inv = Matrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && sgn(a(p, c)) == 0) ++p;
    if (p == n) throw std::domain_error("inverse: singular matrix");
    if (p != c)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(p, j), a(c, j));
        std::swap(inv(p, j), inv(c, j));
      }
    Scalar piv = a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) /= piv;
      inv(c, j) /= piv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || sgn(a(i, c)) == 0) continue;
      Scalar f = a(i, c);
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) -= f * a(c, j);
        inv(i, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

Matrix power(const Matrix& m, long k) {
  if (!m.is_square()) throw std::invalid_argument("power: matrix not square");
  Matrix base = k < 0 ? inverse(m) : m;
  unsigned long e = k < 0 ? static_cast<unsigned long>(-k) : static_cast<unsigned long>(k);
  Matrix result = Matrix::identity(m.dim());
  while (e > 0) {
    if (e & 1UL) result = result * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

Scalar determinant(const Matrix& m) {
  if (!m.is_square()) throw std::invalid_argument("determinant: matrix not square");
  const std::size_t n = m.dim();
  Matrix a = m;
  Scalar det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && sgn(a(p, c)) == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(c, j));
      det = -det;
    }
    det *= a(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (sgn(a(i, c)) == 0) continue;
      Scalar f = a(i, c) / a(c, c);
      for (std::size_t j = c; j < n; ++j) a(i, j) -= f * a(c, j);
    }
  }
  return det;
}

Matrix commutator(const Matrix& x, const Matrix& y) { return x * y - y * x; }

bool is_integral(const Matrix& m) {
  return std::all_of(m.entries().begin(), m.entries().end(),
                     [](const Scalar& q) { return q.get_den() == 1; });
}

bool is_nilpotent(const Matrix& m) {
  if (!m.is_square()) return false;
  return power(m, static_cast<long>(m.dim())).is_zero();
}

bool is_unipotent(const Matrix& m) {
  if (!m.is_square()) return false;
  return is_nilpotent(m - Matrix::identity(m.dim()));
}

IntMatrix to_integer(const Matrix& m) {
  IntMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m(i, j).get_den() != 1) throw std::domain_error("matrix entry is not an integer");
      r(i, j) = m(i, j).get_num();
    }
  return r;
}

Matrix to_rational(const IntMatrix& m) {
  Matrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = Scalar(m(i, j));
  return r;
}

Matrix unipotent_log(const Matrix& m) {
  if (!is_unipotent(m)) throw std::domain_error("unipotent_log: matrix is not unipotent");
  return log_series(Matrix(m - Matrix::identity(m.dim())));
}

Matrix nilpotent_exp(const Matrix& a) {
  if (!is_nilpotent(a)) throw std::domain_error("nilpotent_exp: matrix is not nilpotent");
  return exp_series(a);
}

Integer mod_floor(const Integer& a, const Integer& m) {
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

ResidueMatrix reduce_mod(const Matrix& m, const Integer& modulus) {
  if (modulus < 2) throw std::invalid_argument("reduce_mod: modulus must be at least 2");
  ResidueMatrix r{m.rows(), m.cols(), modulus, {}};
  r.entries.reserve(m.entries().size());
  for (const auto& q : m.entries()) {
    if (q.get_den() != 1) throw std::domain_error("reduce_mod: non-integral entry " + to_string(q));
    r.entries.push_back(mod_floor(q.get_num(), modulus));
  }
  return r;
}

namespace {

Integer floor_div(const Integer& a, const Integer& b) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

void axpy_row(std::vector<Integer>& dst, const Integer& f, const std::vector<Integer>& src) {
  if (f == 0) return;
  for (std::size_t j = 0; j < dst.size(); ++j) dst[j] -= f * src[j];
}

}  // namespace

IntMatrix hermite_form(std::span<const std::vector<Integer>> input, std::size_t width) {
  std::vector<std::vector<Integer>> a;
  a.reserve(input.size());
  for (const auto& row : input) {
    if (row.size() != width) throw std::invalid_argument("hermite_form: vectors of unequal length");
    if (std::any_of(row.begin(), row.end(), [](const Integer& z) { return z != 0; })) a.push_back(row);
  }
  std::size_t r = 0;
  for (std::size_t col = 0; col < width && r < a.size(); ++col) {
    while (true) {
      std::size_t best = a.size();
      for (std::size_t i = r; i < a.size(); ++i) {
        if (a[i][col] == 0) continue;
        if (best == a.size() || abs(a[i][col]) < abs(a[best][col])) best = i;
      }
      if (best == a.size()) break;
      std::swap(a[r], a[best]);
      bool done = true;
      for (std::size_t i = r + 1; i < a.size(); ++i) {
        if (a[i][col] == 0) continue;
        axpy_row(a[i], floor_div(a[i][col], a[r][col]), a[r]);
        if (a[i][col] != 0) done = false;
      }
      if (done) break;
    }
    if (r >= a.size() || a[r][col] == 0) continue;
    if (a[r][col] < 0)
      for (auto& z : a[r]) z = -z;
    for (std::size_t i = 0; i < r; ++i) axpy_row(a[i], floor_div(a[i][col], a[r][col]), a[r]);
    ++r;
  }
  IntMatrix h(r, width);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < width; ++j) h(i, j) = a[i][j];
  return h;
}

IntMatrix hermite_form(const IntMatrix& rows) {
  std::vector<std::vector<Integer>> v(rows.rows(), std::vector<Integer>(rows.cols()));
  for (std::size_t i = 0; i < rows.rows(); ++i)
    for (std::size_t j = 0; j < rows.cols(); ++j) v[i][j] = rows(i, j);
  return hermite_form(v, rows.cols());
}

SmithForm smith_form(const IntMatrix& m) {
  const std::size_t R = m.rows(), C = m.cols();
  IntMatrix a = m;
  IntMatrix U = IntMatrix::identity(R);
  IntMatrix V = IntMatrix::identity(C);

  auto swap_rows = [&](std::size_t i, std::size_t j) {
    for (std::size_t k = 0; k < C; ++k) std::swap(a(i, k), a(j, k));
    for (std::size_t k = 0; k < R; ++k) std::swap(U(i, k), U(j, k));
  };
  auto swap_cols = [&](std::size_t i, std::size_t j) {
    for (std::size_t k = 0; k < R; ++k) std::swap(a(k, i), a(k, j));
    for (std::size_t k = 0; k < C; ++k) std::swap(V(k, i), V(k, j));
  };
  // row_i -= f * row_j
  auto add_row = [&](std::size_t i, std::size_t j, const Integer& f) {
    if (f == 0) return;
    for (std::size_t k = 0; k < C; ++k) a(i, k) -= f * a(j, k);
    for (std::size_t k = 0; k < R; ++k) U(i, k) -= f * U(j, k);
  };
  auto add_col = [&](std::size_t i, std::size_t j, const Integer& f) {
    if (f == 0) return;
    for (std::size_t k = 0; k < R; ++k) a(k, i) -= f * a(k, j);
    for (std::size_t k = 0; k < C; ++k) V(k, i) -= f * V(k, j);
  };

  const std::size_t D = std::min(R, C);
  for (std::size_t t = 0; t < D; ++t) {
    while (true) {
      // smallest nonzero entry of the trailing block becomes the pivot
      std::size_t pi = R, pj = C;
      for (std::size_t i = t; i < R; ++i)
        for (std::size_t j = t; j < C; ++j)
          if (a(i, j) != 0 && (pi == R || abs(a(i, j)) < abs(a(pi, pj)))) {
            pi = i;
            pj = j;
          }
      if (pi == R) break;
      if (pi != t) swap_rows(pi, t);
      if (pj != t) swap_cols(pj, t);
      bool clean = true;
      for (std::size_t i = t + 1; i < R; ++i) {
        add_row(i, t, floor_div(a(i, t), a(t, t)));
        if (a(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < C; ++j) {
        add_col(j, t, floor_div(a(t, j), a(t, t)));
        if (a(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      // pivot must divide the whole trailing block
      bool divides = true;
      for (std::size_t i = t + 1; i < R && divides; ++i)
        for (std::size_t j = t + 1; j < C; ++j)
          if (a(i, j) % a(t, t) != 0) {
            add_row(t, i, Integer(-1));
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (t < R && t < C && a(t, t) < 0) {
      for (std::size_t k = 0; k < C; ++k) a(t, k) = -a(t, k);
      for (std::size_t k = 0; k < R; ++k) U(t, k) = -U(t, k);
    }
  }
  SmithForm s;
  s.diagonal.reserve(D);
  for (std::size_t t = 0; t < D; ++t) s.diagonal.push_back(a(t, t));
  s.left = std::move(U);
  s.right = std::move(V);
  return s;
}

AbelianInvariants smith_invariants(const IntMatrix& relations) {
  auto s = smith_form(relations);
  AbelianInvariants inv;
  std::size_t rank = 0;
  for (const auto& d : s.diagonal) {
    if (d != 0) ++rank;
    if (d > 1) inv.factors.push_back(d);
  }
  inv.free_rank = relations.cols() - rank;
  return inv;
}

std::string to_string(const AbelianInvariants& inv) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < inv.free_rank; ++i) {
    os << (first ? "" : " x ") << "Z";
    first = false;
  }
  for (const auto& d : inv.factors) {
    os << (first ? "" : " x ") << "Z/" << d.get_str();
    first = false;
  }
  if (first) os << "1";
  return os.str();
}

CoordinateSolver::CoordinateSolver(std::vector<std::vector<Scalar>> basis) : basis_(std::move(basis)) {
  width_ = basis_.empty() ? 0 : basis_.front().size();
  const std::size_t R = basis_.size();
  std::vector<std::vector<Scalar>> a = basis_;
  std::size_t r = 0;
  for (std::size_t c = 0; c < width_ && r < R; ++c) {
    std::size_t p = r;
    while (p < R && sgn(a[p][c]) == 0) ++p;
    if (p == R) continue;
    std::swap(a[p], a[r]);
    for (std::size_t i = r + 1; i < R; ++i) {
      if (sgn(a[i][c]) == 0) continue;
      Scalar f = a[i][c] / a[r][c];
      for (std::size_t j = c; j < width_; ++j) a[i][j] -= f * a[r][j];
    }
    pivots_.push_back(c);
    ++r;
  }
  if (r != R) throw std::invalid_argument("CoordinateSolver: basis vectors are linearly dependent");
  Matrix sub(R, R);
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t k = 0; k < R; ++k) sub(i, k) = basis_[i][pivots_[k]];
  pivot_inverse_ = R == 0 ? Matrix() : inverse(sub);
}

bool CoordinateSolver::solve(std::span<const Scalar> v, std::vector<Scalar>& coords) const {
  if (v.size() != width_ && !basis_.empty()) throw std::invalid_argument("CoordinateSolver: width mismatch");
  const std::size_t R = basis_.size();
  coords.assign(R, Scalar(0));
  for (std::size_t k = 0; k < R; ++k) {
    const Scalar& x = v[pivots_[k]];
    if (sgn(x) == 0) continue;
    for (std::size_t i = 0; i < R; ++i) coords[i] += x * pivot_inverse_(k, i);
  }
  for (std::size_t j = 0; j < v.size(); ++j) {
    Scalar acc = 0;
    for (std::size_t i = 0; i < R; ++i)
      if (sgn(coords[i]) != 0) acc += coords[i] * basis_[i][j];
    if (acc != v[j]) return false;
  }
  return true;
}

std::size_t rational_rank(std::vector<std::vector<Scalar>> a) {
  if (a.empty()) return 0;
  const std::size_t W = a.front().size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < W && r < a.size(); ++c) {
    std::size_t p = r;
    while (p < a.size() && sgn(a[p][c]) == 0) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[r]);
    for (std::size_t i = r + 1; i < a.size(); ++i) {
      if (sgn(a[i][c]) == 0) continue;
      Scalar f = a[i][c] / a[r][c];
      for (std::size_t j = c; j < W; ++j) a[i][j] -= f * a[r][j];
    }
    ++r;
  }
  return r;
}

Integer factorial(unsigned n) {
  Integer f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return f;
}

Integer lcm_of_denominators(std::span<const Scalar> xs) {
  Integer l = 1;
  for (const auto& q : xs) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den_mpz_t());
  return l;
}

}  // namespace vpiso
