#include "vpiso/malcev.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace vpiso {

std::vector<std::pair<std::size_t, std::size_t>> lie_positions(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> pos;
  pos.reserve(n * n);
  for (std::size_t d = 1; d < n; ++d)
    for (std::size_t i = 0; i + d < n; ++i) pos.push_back({i, i + d});
  for (std::size_t i = 0; i < n; ++i) pos.push_back({i, i});
  for (std::size_t d = 1; d < n; ++d)
    for (std::size_t j = 0; j + d < n; ++j) pos.push_back({j + d, j});
  return pos;
}

std::vector<Scalar> flatten_lie(const Matrix& x) {
  std::vector<Scalar> v;
  v.reserve(x.rows() * x.cols());
  for (const auto& [i, j] : lie_positions(x.dim())) v.push_back(x(i, j));
  return v;
}

Matrix unflatten_lie(std::span<const Scalar> v, std::size_t n) {
  Matrix m(n, n);
  auto pos = lie_positions(n);
  for (std::size_t k = 0; k < pos.size(); ++k) m(pos[k].first, pos[k].second) = v[k];
  return m;
}

LieLattice LieLattice::span_of(std::size_t n, std::span<const Matrix> elements) {
  LieLattice L;
  L.n_ = n;
  std::vector<std::vector<Scalar>> flat;
  flat.reserve(elements.size());
  for (const auto& x : elements) {
    if (x.dim() != n || !x.is_square()) throw std::invalid_argument("LieLattice: dimension mismatch");
    flat.push_back(flatten_lie(x));
  }
  Integer D = 1;
  for (const auto& v : flat) mpz_lcm(D.get_mpz_t(), D.get_mpz_t(), lcm_of_denominators(v).get_mpz_t());
  std::vector<std::vector<Integer>> rows;
  rows.reserve(flat.size());
  for (const auto& v : flat) {
    std::vector<Integer> r;
    r.reserve(v.size());
    for (const auto& q : v) r.push_back(Integer(q * D));
    rows.push_back(std::move(r));
  }
  IntMatrix h = hermite_form(rows, n * n);
  std::vector<std::vector<Scalar>> basis_flat;
  for (std::size_t i = 0; i < h.rows(); ++i) {
    std::vector<Scalar> v(n * n);
    for (std::size_t j = 0; j < n * n; ++j) v[j] = make_scalar(h(i, j), D);
    L.basis_.push_back(unflatten_lie(v, n));
    basis_flat.push_back(std::move(v));
  }
  L.denominator_ = 1;
  for (const auto& v : basis_flat)
    mpz_lcm(L.denominator_.get_mpz_t(), L.denominator_.get_mpz_t(), lcm_of_denominators(v).get_mpz_t());
  L.solver_ = CoordinateSolver(std::move(basis_flat));
  return L;
}

std::optional<std::vector<Scalar>> LieLattice::rational_coordinates(const Matrix& x) const {
  if (x.dim() != n_) throw std::invalid_argument("LieLattice: dimension mismatch");
  std::vector<Scalar> c;
  if (basis_.empty()) {
    if (!x.is_zero()) return std::nullopt;
    return c;
  }
  auto v = flatten_lie(x);
  if (!solver_.solve(v, c)) return std::nullopt;
  return c;
}

std::optional<std::vector<Integer>> LieLattice::coordinates(const Matrix& x) const {
  auto q = rational_coordinates(x);
  if (!q) return std::nullopt;
  std::vector<Integer> z;
  z.reserve(q->size());
  for (const auto& c : *q) {
    if (c.get_den() != 1) return std::nullopt;
    z.push_back(c.get_num());
  }
  return z;
}

Matrix LieLattice::element(std::span<const Integer> coords) const {
  if (coords.size() != basis_.size()) throw std::invalid_argument("LieLattice::element: wrong coordinate count");
  Matrix x(n_, n_);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (coords[i] == 0) continue;
    Matrix t = basis_[i];
    t.scale(Scalar(coords[i]));
    x += t;
  }
  return x;
}

Matrix bch(const Matrix& x, const Matrix& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("bch: dimension mismatch");
  return unipotent_log(nilpotent_exp(x) * nilpotent_exp(y));
}

namespace {

/// Coordinates, in `frame`, of bch(sum x_i b_i, sum y_i b_i) where b is the
/// first `rho` frame vectors. Variables: x_i = i, y_i = rho + i.
std::vector<QPoly> symbolic_bch_coordinates(std::span<const Matrix> frame, std::size_t rho, std::size_t n) {
  PolyMatrix X(n, n), Y(n, n);
  for (std::size_t k = 0; k < rho; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const Scalar& c = frame[k](i, j);
        if (sgn(c) == 0) continue;
        X(i, j) += QPoly::variable(static_cast<Var>(k)) * c;
        Y(i, j) += QPoly::variable(static_cast<Var>(rho + k)) * c;
      }
  PolyMatrix prod = exp_series(X) * exp_series(Y);
  PolyMatrix z = log_series(PolyMatrix(prod - PolyMatrix::identity(n)));

  std::vector<std::vector<Scalar>> flat;
  for (const auto& f : frame) flat.push_back(flatten_lie(f));
  CoordinateSolver solver(flat);
  auto pos = lie_positions(n);
  std::vector<QPoly> coords(frame.size());
  for (std::size_t k = 0; k < solver.pivots().size(); ++k) {
    const auto [pi, pj] = pos[solver.pivots()[k]];
    const QPoly& entry = z(pi, pj);
    if (entry.is_zero()) continue;
    for (std::size_t i = 0; i < frame.size(); ++i) {
      const Scalar& w = solver.pivot_inverse()(k, i);
      if (sgn(w) != 0) coords[i] += entry * w;
    }
  }
  return coords;
}

Integer stirling2(unsigned n, unsigned k) {
  std::vector<std::vector<Integer>> s(n + 1, std::vector<Integer>(n + 1, 0));
  s[0][0] = 1;
  for (unsigned i = 1; i <= n; ++i)
    for (unsigned j = 1; j <= i; ++j) s[i][j] = Integer(j) * s[i - 1][j] + s[i - 1][j - 1];
  return s[n][k];
}

/// Rewrites p in the basis of products of binomial coefficients C(x_v, j);
/// the returned monomial exponent j stands for C(x_v, j).
QPoly to_binomial_basis(const QPoly& p) {
  std::vector<QPoly::Term> out;
  for (const auto& [m, c] : p.terms()) {
    std::vector<QPoly::Term> acc{{Monomial{}, c}};
    for (const auto& [v, k] : m.powers) {
      std::vector<QPoly::Term> next;
      for (const auto& [mono, coef] : acc)
        for (unsigned j = 1; j <= k; ++j)
          next.push_back({mono * Monomial::variable(v, j), coef * Scalar(stirling2(k, j) * factorial(j))});
      acc = std::move(next);
    }
    for (auto& t : acc) out.push_back(std::move(t));
  }
  return QPoly::from_terms(std::move(out));
}

/// Extends `basis` (independent) by vectors of `span_basis` to a basis of the
/// span of both.
std::vector<Matrix> extend_frame(const std::vector<Matrix>& basis, const std::vector<Matrix>& span_basis) {
  std::vector<Matrix> frame = basis;
  std::vector<std::vector<Scalar>> flat;
  for (const auto& b : frame) flat.push_back(flatten_lie(b));
  for (const auto& g : span_basis) {
    flat.push_back(flatten_lie(g));
    if (rational_rank(flat) == flat.size())
      frame.push_back(g);
    else
      flat.pop_back();
  }
  return frame;
}

/// Basis of the rational Lie algebra generated by `elements`.
std::vector<Matrix> lie_algebra_hull(const std::vector<Matrix>& elements) {
  std::vector<Matrix> basis;
  std::vector<std::vector<Scalar>> flat;
  auto try_add = [&](const Matrix& x) {
    if (x.is_zero()) return false;
    flat.push_back(flatten_lie(x));
    if (rational_rank(flat) == flat.size()) {
      basis.push_back(x);
      return true;
    }
    flat.pop_back();
    return false;
  };
  for (const auto& x : elements) try_add(x);
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = i + 1; j < basis.size(); ++j)
        if (try_add(commutator(basis[i], basis[j]))) grew = true;
  }
  return basis;
}

}  // namespace

ClosureResult lattice_closure(std::span<const Matrix> generators, std::size_t n) {
  std::vector<Matrix> logs;
  for (const auto& g : generators) {
    if (g.dim() != n) throw std::invalid_argument("lattice_closure: dimension mismatch");
    logs.push_back(unipotent_log(g));
  }
  const LieLattice initial = LieLattice::span_of(n, logs);
  const std::vector<Matrix> algebra = lie_algebra_hull(logs);

  std::vector<Matrix> gens = initial.basis();
  LieLattice current = initial;
  while (current.rank() > 0) {
    const std::vector<Matrix>& b = current.basis();
    const std::size_t rho = b.size();
    const std::vector<Matrix> frame = extend_frame(b, algebra);
    const std::vector<QPoly> law = symbolic_bch_coordinates(frame, rho, n);

    // Find the lowest-degree binomial coefficient that breaks closure:
    // non-integral inside the lattice coordinates, nonzero outside the span.
    std::optional<Monomial> witness;
    unsigned best = 0;
    for (std::size_t k = 0; k < law.size(); ++k) {
      const QPoly binomial = to_binomial_basis(law[k]);
      for (const auto& [m, c] : binomial.terms()) {
        const bool bad = k < rho ? c.get_den() != 1 : sgn(c) != 0;
        if (bad && (!witness || m.degree() < best)) {
          witness = m;
          best = m.degree();
        }
      }
    }
    if (!witness) break;
    std::vector<Integer> xs(rho, 0), ys(rho, 0);
    for (const auto& [v, e] : witness->powers) (v < rho ? xs[v] : ys[v - rho]) = e;
    gens.push_back(bch(current.element(xs), current.element(ys)));
    current = LieLattice::span_of(n, gens);
    gens = current.basis();
  }
  return ClosureResult{current, !(current == initial)};
}

std::optional<std::vector<Integer>> lattice_membership(const Matrix& g, const LieLattice& lattice) {
  if (g.dim() != lattice.dim()) throw std::invalid_argument("lattice_membership: dimension mismatch");
  if (!is_unipotent(g)) return std::nullopt;
  return lattice.coordinates(unipotent_log(g));
}

bool normalizes(const Matrix& g, const LieLattice& lattice) {
  const Matrix gi = inverse(g);
  for (const auto& e : lattice.basis()) {
    if (!lattice.contains(gi * e * g)) return false;
    if (!lattice.contains(g * e * gi)) return false;
  }
  return true;
}

StructureConstants structure_constants(std::span<const Matrix> basis) {
  const std::size_t r = basis.size();
  StructureConstants c(r);
  if (r == 0) return c;
  std::vector<std::vector<Scalar>> flat;
  for (const auto& b : basis) flat.push_back(flatten_lie(b));
  CoordinateSolver solver(flat);
  std::vector<Scalar> coords;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      if (i == j) continue;
      auto v = flatten_lie(commutator(basis[i], basis[j]));
      if (!solver.solve(v, coords))
        throw std::domain_error("structure_constants: bracket leaves the span of the basis");
      for (std::size_t k = 0; k < r; ++k) c(i, j, k) = coords[k];
    }
  return c;
}

StructureConstants structure_constants(const LieLattice& lattice) { return structure_constants(lattice.basis()); }

std::vector<QPoly> coordinate_group_law(std::span<const Matrix> basis) {
  if (basis.empty()) return {};
  return symbolic_bch_coordinates(basis, basis.size(), basis.front().dim());
}

Integer law_denominator(std::span<const QPoly> law) {
  Integer l = 1;
  for (const auto& p : law)
    for (const auto& [m, c] : p.terms()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  return l;
}

TGroupRep make_tgroup(std::vector<Matrix> generators, std::size_t n, bool allow_hull) {
  auto closure = lattice_closure(generators, n);
  if (closure.saturated && !allow_hull)
    throw SaturationError(
        "the logs of the N-generators do not span a bch-closed lattice (not a lattice group); "
        "the lattice hull is strictly larger");
  return TGroupRep{n, std::move(generators), std::move(closure.lattice), !closure.saturated};
}

// ---------------------------------------------------------------------------
// Finite quotients

QuotientGroup::QuotientGroup(std::span<const QPoly> law, std::size_t rank, std::uint64_t modulus)
    : m_(modulus), r_(rank), order_(1) {
  if (modulus < 2) throw std::invalid_argument("quotient modulus must be at least 2");
  if (law.size() != rank) throw std::invalid_argument("quotient: law/rank mismatch");
  for (std::size_t i = 0; i < rank; ++i) {
    if (order_ > kMaxOrder / modulus) throw std::invalid_argument("quotient group too large for explicit enumeration");
    order_ *= modulus;
  }
  const Integer M(static_cast<unsigned long>(modulus));
  for (const auto& p : law) {
    std::vector<Term> terms;
    for (const auto& [mono, c] : p.terms()) {
      Integer inv;
      if (mpz_invert(inv.get_mpz_t(), c.get_den_mpz_t(), M.get_mpz_t()) == 0)
        throw std::invalid_argument("modulus " + std::to_string(modulus) +
                                    " is not admissible: group-law denominator not invertible");
      Integer v = mod_floor(c.get_num() * inv, M);
      terms.push_back(Term{v.get_ui(), mono.powers});
    }
    law_.push_back(std::move(terms));
  }
}

std::vector<std::uint64_t> QuotientGroup::coords(Element a) const {
  std::vector<std::uint64_t> c(r_);
  std::uint64_t x = a;
  for (std::size_t i = 0; i < r_; ++i) {
    c[i] = x % m_;
    x /= m_;
  }
  return c;
}

QuotientGroup::Element QuotientGroup::encode(std::span<const std::uint64_t> c) const {
  std::uint64_t x = 0;
  for (std::size_t i = r_; i-- > 0;) x = x * m_ + (c[i] % m_);
  return static_cast<Element>(x);
}

QuotientGroup::Element QuotientGroup::multiply(Element a, Element b) const {
  std::vector<std::uint64_t> vals = coords(a);
  auto cb = coords(b);
  vals.insert(vals.end(), cb.begin(), cb.end());
  std::vector<std::uint64_t> out(r_);
  for (std::size_t k = 0; k < r_; ++k) {
    std::uint64_t acc = 0;
    for (const auto& t : law_[k]) {
      std::uint64_t v = t.coef;
      for (const auto& [var, e] : t.powers)
        for (std::uint32_t i = 0; i < e; ++i) v = v * vals[var] % m_;
      acc = (acc + v) % m_;
    }
    out[k] = acc;
  }
  return encode(out);
}

QuotientGroup::Element QuotientGroup::inverse(Element a) const {
  auto c = coords(a);
  for (auto& x : c) x = (m_ - x) % m_;
  return encode(c);
}

QuotientGroup::Element QuotientGroup::power(Element a, std::uint64_t k) const {
  Element result = identity();
  Element base = a;
  while (k > 0) {
    if (k & 1U) result = multiply(result, base);
    k >>= 1;
    if (k > 0) base = multiply(base, base);
  }
  return result;
}

QuotientGroup::Element QuotientGroup::commutator(Element a, Element b) const {
  return multiply(multiply(inverse(a), inverse(b)), multiply(a, b));
}

bool is_admissible_modulus(const LieLattice& lattice, std::uint64_t m) {
  if (m < 2) return false;
  auto law = coordinate_group_law(lattice.basis());
  Integer g;
  Integer D = law_denominator(law);
  mpz_gcd_ui(g.get_mpz_t(), D.get_mpz_t(), m);
  return g == 1;
}

QuotientGroup lattice_quotient_group(std::span<const Matrix> basis, std::uint64_t m) {
  auto law = coordinate_group_law(basis);
  return QuotientGroup(law, basis.size(), m);
}

QuotientGroup lattice_quotient_group(const LieLattice& lattice, std::uint64_t m) {
  return lattice_quotient_group(lattice.basis(), m);
}

namespace {

using Element = QuotientGroup::Element;

class Subgroup {
 public:
  Subgroup(const QuotientGroup& g, std::vector<Element> gens) : member_(g.order(), false), gens_(std::move(gens)) {
    elements_.push_back(g.identity());
    member_[g.identity()] = true;
    for (std::size_t i = 0; i < elements_.size(); ++i)
      for (Element s : gens_) {
        Element y = g.multiply(elements_[i], s);
        if (!member_[y]) {
          member_[y] = true;
          elements_.push_back(y);
        }
      }
  }
  bool contains(Element x) const { return member_[x]; }
  std::size_t size() const { return elements_.size(); }
  const std::vector<Element>& elements() const { return elements_; }
  const std::vector<Element>& generators() const { return gens_; }

 private:
  std::vector<bool> member_;
  std::vector<Element> elements_;
  std::vector<Element> gens_;
};

std::vector<Element> generating_set(const QuotientGroup& g) {
  std::vector<Element> gens;
  // unit coordinate vectors first, then the rest in index order
  std::vector<Element> candidates;
  for (std::size_t i = 0; i < g.rank(); ++i) {
    std::vector<std::uint64_t> c(g.rank(), 0);
    c[i] = 1;
    candidates.push_back(g.encode(c));
  }
  Subgroup h(g, gens);
  auto consider = [&](Element x) {
    if (h.contains(x)) return;
    gens.push_back(x);
    h = Subgroup(g, gens);
  };
  for (Element x : candidates) consider(x);
  for (std::uint64_t x = 0; x < g.order() && h.size() < g.order(); ++x) consider(static_cast<Element>(x));
  return gens;
}

Subgroup normal_closure(const QuotientGroup& g, std::vector<Element> gens, const std::vector<Element>& group_gens) {
  Subgroup h(g, gens);
  bool grew = true;
  while (grew) {
    grew = false;
    const std::vector<Element> snapshot = gens;
    for (Element t : snapshot)
      for (Element s : group_gens) {
        Element c = g.multiply(g.multiply(g.inverse(s), t), s);
        if (!h.contains(c)) {
          gens.push_back(c);
          h = Subgroup(g, gens);
          grew = true;
        }
      }
  }
  return h;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t x) {
  std::vector<std::uint64_t> ps;
  for (std::uint64_t p = 2; p * p <= x; ++p)
    if (x % p == 0) {
      ps.push_back(p);
      while (x % p == 0) x /= p;
    }
  if (x > 1) ps.push_back(x);
  return ps;
}

std::vector<std::uint64_t> abelianization_invariants(const QuotientGroup& g, const Subgroup& derived) {
  const std::uint64_t q = g.order() / derived.size();
  std::vector<std::vector<unsigned>> primary;  // per prime: exponents, descending
  std::vector<std::uint64_t> primes = prime_factors(q);
  std::size_t longest = 0;
  for (std::uint64_t p : primes) {
    std::uint64_t ppart = 1;
    for (std::uint64_t t = q; t % p == 0; t /= p) ppart *= p;
    // t_j = number of cyclic p-factors of order >= p^j
    std::vector<unsigned> t_counts;
    std::uint64_t prev = 1, pj = 1;
    while (prev < ppart) {
      pj *= p;
      std::uint64_t count = 0;
      for (std::uint64_t x = 0; x < g.order(); ++x)
        if (derived.contains(g.power(static_cast<Element>(x), pj))) ++count;
      count /= derived.size();
      unsigned t = 0;
      for (std::uint64_t ratio = count / prev; ratio > 1; ratio /= p) ++t;
      t_counts.push_back(t);
      prev = count;
    }
    std::vector<unsigned> exps;  // exponent list, descending
    for (std::size_t j = 0; j < t_counts.size(); ++j) {
      unsigned next = j + 1 < t_counts.size() ? t_counts[j + 1] : 0;
      for (unsigned k = next; k < t_counts[j]; ++k) exps.push_back(static_cast<unsigned>(j + 1));
    }
    std::sort(exps.rbegin(), exps.rend());
    longest = std::max(longest, exps.size());
    primary.push_back(std::move(exps));
  }
  std::vector<std::uint64_t> factors(longest, 1);
  for (std::size_t k = 0; k < primes.size(); ++k)
    for (std::size_t i = 0; i < primary[k].size(); ++i)
      for (unsigned e = 0; e < primary[k][i]; ++e) factors[i] *= primes[k];
  std::reverse(factors.begin(), factors.end());
  return factors;
}

}  // namespace

QuotientInvariants quotient_invariants(const QuotientGroup& g) {
  QuotientInvariants inv;
  inv.modulus = g.modulus();
  inv.order = g.order();

  for (std::uint64_t x = 0; x < g.order(); ++x) {
    std::uint64_t ord = 1;
    for (Element y = static_cast<Element>(x); y != g.identity(); y = g.multiply(y, static_cast<Element>(x))) ++ord;
    inv.order_histogram[ord] += 1;
    inv.exponent = std::lcm(inv.exponent, ord);
  }

  const std::vector<Element> gens = generating_set(g);
  std::vector<Element> normal_gens = gens;
  std::optional<Subgroup> derived;
  unsigned cls = 0;
  Subgroup current(g, gens);
  while (current.size() > 1) {
    std::vector<Element> next;
    for (Element a : normal_gens)
      for (Element s : gens) {
        Element c = g.commutator(a, s);
        if (c != g.identity()) next.push_back(c);
      }
    Subgroup lower = normal_closure(g, next, gens);
    if (!derived) derived = lower;
    ++cls;
    if (lower.size() == current.size()) break;  // not nilpotent; cannot happen for exp(L)
    normal_gens = lower.generators();
    current = std::move(lower);
  }
  inv.nilpotency_class = cls;
  if (!derived) derived = Subgroup(g, {});
  inv.abelian_invariants = abelianization_invariants(g, *derived);
  return inv;
}

Fingerprint fingerprint(std::span<const Matrix> basis, std::span<const std::uint64_t> moduli) {
  Fingerprint f;
  auto law = coordinate_group_law(basis);
  for (std::uint64_t m : moduli) f.quotients.push_back(quotient_invariants(QuotientGroup(law, basis.size(), m)));
  return f;
}

Fingerprint fingerprint(const TGroupRep& group, std::span<const std::uint64_t> moduli) {
  return fingerprint(group.lattice.basis(), moduli);
}

namespace {

std::string join(const std::vector<std::uint64_t>& xs) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
  os << ')';
  return os.str();
}

std::string join(const std::map<std::uint64_t, std::uint64_t>& h) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (const auto& [k, v] : h) {
    os << (first ? "" : ",") << k << ':' << v;
    first = false;
  }
  os << '}';
  return os.str();
}

}  // namespace

std::optional<Divergence> fingerprint_compare(const Fingerprint& f, const Fingerprint& g) {
  if (f.quotients.size() != g.quotients.size())
    throw std::invalid_argument("fingerprint_compare: modulus lists differ");
  for (std::size_t i = 0; i < f.quotients.size(); ++i)
    if (f.quotients[i].modulus != g.quotients[i].modulus)
      throw std::invalid_argument("fingerprint_compare: modulus lists differ");

  std::vector<std::size_t> idx(f.quotients.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return f.quotients[a].modulus < f.quotients[b].modulus; });
  for (std::size_t i : idx) {
    const auto& a = f.quotients[i];
    const auto& b = g.quotients[i];
    if (a.order != b.order) return Divergence{a.modulus, "order", std::to_string(a.order), std::to_string(b.order)};
    if (a.nilpotency_class != b.nilpotency_class)
      return Divergence{a.modulus, "class", std::to_string(a.nilpotency_class), std::to_string(b.nilpotency_class)};
    if (a.exponent != b.exponent)
      return Divergence{a.modulus, "exponent", std::to_string(a.exponent), std::to_string(b.exponent)};
    if (a.abelian_invariants != b.abelian_invariants)
      return Divergence{a.modulus, "abelian_invariants", join(a.abelian_invariants), join(b.abelian_invariants)};
    if (a.order_histogram != b.order_histogram)
      return Divergence{a.modulus, "order_histogram", join(a.order_histogram), join(b.order_histogram)};
  }
  return std::nullopt;
}

}  // namespace vpiso
