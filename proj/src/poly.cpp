#include "vpiso/poly.hpp"

#include <sstream>

namespace vpiso {

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial r;
  r.powers.reserve(a.powers.size() + b.powers.size());
  auto i = a.powers.begin();
  auto j = b.powers.begin();
  while (i != a.powers.end() || j != b.powers.end()) {
    if (j == b.powers.end() || (i != a.powers.end() && i->first < j->first)) {
      r.powers.push_back(*i++);
    } else if (i == a.powers.end() || j->first < i->first) {
      r.powers.push_back(*j++);
    } else {
      r.powers.push_back({i->first, i->second + j->second});
      ++i;
      ++j;
    }
  }
  return r;
}

bool monomial_before(const Monomial& a, const Monomial& b) {
  const unsigned da = a.degree(), db = b.degree();
  if (da != db) return da > db;
  const std::size_t n = std::min(a.powers.size(), b.powers.size());
  for (std::size_t k = 0; k < n; ++k) {
    const auto& [va, ea] = a.powers[k];
    const auto& [vb, eb] = b.powers[k];
    if (va != vb) return va < vb;
    if (ea != eb) return ea > eb;
  }
  return false;
}

std::size_t MonomialHash::operator()(const Monomial& m) const noexcept {
  std::size_t h = 1469598103934665603ULL;
  for (const auto& [v, e] : m.powers) {
    h ^= (static_cast<std::size_t>(v) << 8) ^ e;
    h *= 1099511628211ULL;
  }
  return h;
}

PolyMatrix lift(const Matrix& m) {
  PolyMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = QPoly(m(i, j));
  return r;
}

PolyMatrix variable_matrix(std::size_t rows, std::size_t cols, Var first) {
  PolyMatrix r(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) r(i, j) = QPoly::variable(first + static_cast<Var>(i * cols + j));
  return r;
}

namespace {

QPoly det_rec(const PolyMatrix& m, std::vector<std::size_t>& cols, std::size_t row) {
  const std::size_t n = m.rows();
  if (row == n) return QPoly(1);
  QPoly acc;
  int sign = 1;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const std::size_t c = cols[k];
    if (!m(row, c).is_zero()) {
      cols.erase(cols.begin() + static_cast<long>(k));
      QPoly minor = det_rec(m, cols, row + 1);
      cols.insert(cols.begin() + static_cast<long>(k), c);
      QPoly t = m(row, c) * minor;
      if (sign < 0) t = -t;
      acc += t;
    }
    sign = -sign;
  }
  return acc;
}

}  // namespace

QPoly poly_determinant(const PolyMatrix& m) {
  if (!m.is_square()) throw std::invalid_argument("poly_determinant: matrix not square");
  std::vector<std::size_t> cols(m.cols());
  for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = j;
  return det_rec(m, cols, 0);
}

ZPoly clear_denominators(const QPoly& p) {
  Integer l = 1;
  for (const auto& [m, c] : p.terms()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  std::vector<ZPoly::Term> terms;
  terms.reserve(p.size());
  for (const auto& [m, c] : p.terms()) terms.push_back({m, Integer(c.get_num() * (l / c.get_den()))});
  return ZPoly::from_terms(std::move(terms));
}

QPoly to_rational(const ZPoly& p) {
  std::vector<QPoly::Term> terms;
  terms.reserve(p.size());
  for (const auto& [m, c] : p.terms()) terms.push_back({m, Scalar(c)});
  return QPoly::from_terms(std::move(terms));
}

std::string format_polynomial(const ZPoly& p, const std::function<std::string(Var)>& name) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    Integer a = abs(c);
    if (first)
      os << (c < 0 ? "-" : "");
    else
      os << (c < 0 ? " - " : " + ");
    first = false;
    bool need_star = false;
    if (a != 1 || m.is_constant()) {
      os << a.get_str();
      need_star = true;
    }
    for (const auto& [v, e] : m.powers) {
      if (need_star) os << '*';
      os << name(v);
      if (e > 1) os << '^' << e;
      need_star = true;
    }
  }
  return os.str();
}

}  // namespace vpiso
