#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vpiso/exactmat.hpp"

namespace vpiso {

using Var = std::uint32_t;

/// Product of variable powers; `powers` sorted by variable, exponents > 0.
struct Monomial {
  std::vector<std::pair<Var, std::uint32_t>> powers;

  static Monomial variable(Var v, std::uint32_t e = 1) { return Monomial{{{v, e}}}; }
  unsigned degree() const {
    unsigned d = 0;
    for (const auto& [v, e] : powers) d += e;
    return d;
  }
  bool is_constant() const { return powers.empty(); }
  std::uint32_t exponent(Var v) const {
    for (const auto& [w, e] : powers)
      if (w == v) return e;
    return 0;
  }
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

Monomial operator*(const Monomial& a, const Monomial& b);

/// Graded order: higher total degree first, then the monomial with the larger
/// exponent on the lowest-indexed variable first. Constant term last.
bool monomial_before(const Monomial& a, const Monomial& b);

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept;
};

template <class C>
class Polynomial {
 public:
  using Term = std::pair<Monomial, C>;

  Polynomial() = default;
  Polynomial(int c) : Polynomial(C(c)) {}  // NOLINT: implicit constants read naturally in matrix code
  Polynomial(const C& c) {                 // NOLINT
    if (sgn(c) != 0) terms_.push_back({Monomial{}, c});
  }
  static Polynomial variable(Var v) {
    Polynomial p;
    p.terms_.push_back({Monomial::variable(v), C(1)});
    return p;
  }
  static Polynomial from_terms(std::vector<Term> terms) {
    Polynomial p;
    p.terms_ = std::move(terms);
    p.normalize();
    return p;
  }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  unsigned degree() const { return terms_.empty() ? 0 : terms_.front().first.degree(); }

  C constant_term() const {
    if (!terms_.empty() && terms_.back().first.is_constant()) return terms_.back().second;
    return C(0);
  }

  /// Sorted list of variables that occur.
  std::vector<Var> variables() const {
    std::vector<Var> vs;
    for (const auto& [m, c] : terms_)
      for (const auto& [v, e] : m.powers) vs.push_back(v);
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    return vs;
  }

  Polynomial& operator+=(const Polynomial& o) {
    std::vector<Term> out;
    out.reserve(terms_.size() + o.terms_.size());
    auto i = terms_.begin();
    auto j = o.terms_.begin();
    while (i != terms_.end() || j != o.terms_.end()) {
      if (j == o.terms_.end() || (i != terms_.end() && monomial_before(i->first, j->first))) {
        out.push_back(std::move(*i++));
      } else if (i == terms_.end() || monomial_before(j->first, i->first)) {
        out.push_back(*j++);
      } else {
        C c = i->second + j->second;
        if (sgn(c) != 0) out.push_back({std::move(i->first), std::move(c)});
        ++i;
        ++j;
      }
    }
    terms_ = std::move(out);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) { return *this += -o; }
  Polynomial& operator*=(const C& c) {
    if (sgn(c) == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& t : terms_) t.second *= c;
    return *this;
  }
  Polynomial& operator*=(const Polynomial& o) {
    *this = *this * o;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) {
    for (auto& t : a.terms_) t.second = -t.second;
    return a;
  }
  friend Polynomial operator*(Polynomial a, const C& c) { return a *= c; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return Polynomial();
    std::vector<Term> prod;
    prod.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) prod.push_back({ma * mb, ca * cb});
    return from_terms(std::move(prod));
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

  /// Evaluate with `value(var)` supplying each variable's value in ring R.
  template <class R, class F>
  R evaluate(F&& value) const {
    R acc(0);
    for (const auto& [m, c] : terms_) {
      R t(c);
      for (const auto& [v, e] : m.powers) {
        R x = value(v);
        for (std::uint32_t k = 0; k < e; ++k) t *= x;
      }
      acc += t;
    }
    return acc;
  }

  /// Partial derivative with respect to v.
  Polynomial derivative(Var v) const {
    std::vector<Term> out;
    for (const auto& [m, c] : terms_) {
      std::uint32_t e = m.exponent(v);
      if (e == 0) continue;
      Monomial d;
      for (const auto& [w, f] : m.powers) {
        if (w != v)
          d.powers.push_back({w, f});
        else if (f > 1)
          d.powers.push_back({w, f - 1});
      }
      out.push_back({std::move(d), c * C(static_cast<unsigned long>(e))});
    }
    return from_terms(std::move(out));
  }

 private:
  void normalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& x, const Term& y) { return monomial_before(x.first, y.first); });
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (auto& t : terms_) {
      if (!out.empty() && out.back().first == t.first)
        out.back().second += t.second;
      else {
        if (!out.empty() && sgn(out.back().second) == 0) out.pop_back();
        out.push_back(std::move(t));
      }
    }
    if (!out.empty() && sgn(out.back().second) == 0) out.pop_back();
    terms_ = std::move(out);
  }

  std::vector<Term> terms_;
};

using QPoly = Polynomial<Scalar>;
using ZPoly = Polynomial<Integer>;
using PolyMatrix = BasicMatrix<QPoly>;

template <class C>
bool is_zero_value(const Polynomial<C>& p) {
  return p.is_zero();
}

PolyMatrix lift(const Matrix& m);
/// n x m matrix of consecutive variables starting at `first`, row-major.
PolyMatrix variable_matrix(std::size_t rows, std::size_t cols, Var first);
/// Determinant by cofactor expansion along the first row.
QPoly poly_determinant(const PolyMatrix& m);

/// Smallest positive integer multiple with integral coefficients.
ZPoly clear_denominators(const QPoly& p);
QPoly to_rational(const ZPoly& p);

/// Human-readable form, e.g. "x^2 - 2"; `name` maps variables to names.
std::string format_polynomial(const ZPoly& p, const std::function<std::string(Var)>& name);

}  // namespace vpiso
