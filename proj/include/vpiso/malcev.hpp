#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vpiso/exactmat.hpp"
#include "vpiso/poly.hpp"

namespace vpiso {

/// Matrix positions in lattice-coordinate order: first superdiagonal, then the
/// second, ..., then the diagonal and the subdiagonals. For strictly upper
/// triangular input this lists E12, E23, ..., E13, E24, ..., E1n.
std::vector<std::pair<std::size_t, std::size_t>> lie_positions(std::size_t n);
std::vector<Scalar> flatten_lie(const Matrix& x);
Matrix unflatten_lie(std::span<const Scalar> v, std::size_t n);

/// A full Z-lattice of nilpotent n x n matrices, held in canonical Hermite form.
class LieLattice {
 public:
  LieLattice() = default;
  /// Z-span of `elements` (no closure); basis is the Hermite form of the span.
  static LieLattice span_of(std::size_t n, std::span<const Matrix> elements);

  std::size_t dim() const { return n_; }
  std::size_t rank() const { return basis_.size(); }
  const std::vector<Matrix>& basis() const { return basis_; }
  /// Least common denominator of the basis entries.
  const Integer& denominator() const { return denominator_; }

  /// Rational coordinates of x in the basis when x lies in the Q-span.
  std::optional<std::vector<Scalar>> rational_coordinates(const Matrix& x) const;
  /// Integer coordinates of x when x lies in the lattice.
  std::optional<std::vector<Integer>> coordinates(const Matrix& x) const;
  bool contains(const Matrix& x) const { return coordinates(x).has_value(); }
  Matrix element(std::span<const Integer> coords) const;

  friend bool operator==(const LieLattice& a, const LieLattice& b) {
    return a.n_ == b.n_ && a.basis_ == b.basis_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Matrix> basis_;
  Integer denominator_ = 1;
  CoordinateSolver solver_;
};

/// log(exp(x) exp(y)) for nilpotent x, y.
Matrix bch(const Matrix& x, const Matrix& y);

struct ClosureResult {
  LieLattice lattice;
  /// The closure is strictly larger than the Z-span of the generators' logs.
  bool saturated = false;
};

/// Smallest additive lattice containing log(g) for every generator and closed
/// under bch. Generators must be unipotent.
ClosureResult lattice_closure(std::span<const Matrix> generators, std::size_t n);

/// Integer coordinates of log(g) in L, or nullopt when exp(L) does not contain g.
std::optional<std::vector<Integer>> lattice_membership(const Matrix& g, const LieLattice& lattice);

/// Conjugation by g maps L onto itself (checked on basis vectors both ways).
bool normalizes(const Matrix& g, const LieLattice& lattice);

class StructureConstants {
 public:
  StructureConstants() = default;
  explicit StructureConstants(std::size_t rank) : rank_(rank), c_(rank * rank * rank) {}
  std::size_t rank() const { return rank_; }
  /// [e_i, e_j] = sum_k c(i, j, k) e_k, 0-based.
  Scalar& operator()(std::size_t i, std::size_t j, std::size_t k) { return c_[(i * rank_ + j) * rank_ + k]; }
  const Scalar& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return c_[(i * rank_ + j) * rank_ + k];
  }
  friend bool operator==(const StructureConstants&, const StructureConstants&) = default;

 private:
  std::size_t rank_ = 0;
  std::vector<Scalar> c_;
};

/// Throws std::domain_error if some bracket leaves the Q-span of the basis.
StructureConstants structure_constants(std::span<const Matrix> basis);
StructureConstants structure_constants(const LieLattice& lattice);

/// The group law of exp(L) in coordinates: r polynomials in x_1..x_r
/// (variables 0..r-1) and y_1..y_r (variables r..2r-1).
std::vector<QPoly> coordinate_group_law(std::span<const Matrix> basis);
/// Least common multiple of the coefficient denominators of the law.
Integer law_denominator(std::span<const QPoly> law);

struct TGroupRep {
  std::size_t n = 0;
  std::vector<Matrix> generators;
  LieLattice lattice;
  /// True when the logs of the generators already spanned a bch-closed lattice.
  bool lattice_declared = true;
};

class SaturationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Builds the lattice hull of the generators; throws SaturationError when the
/// hull is strictly larger than the span of the logs unless `allow_hull`.
TGroupRep make_tgroup(std::vector<Matrix> generators, std::size_t n, bool allow_hull);

/// N / exp(mL) as coordinate vectors mod m with the reduced group law.
class QuotientGroup {
 public:
  using Element = std::uint32_t;
  static constexpr std::uint64_t kMaxOrder = std::uint64_t{1} << 20;

  QuotientGroup(std::span<const QPoly> law, std::size_t rank, std::uint64_t modulus);

  std::uint64_t modulus() const { return m_; }
  std::size_t rank() const { return r_; }
  std::uint64_t order() const { return order_; }
  Element identity() const { return 0; }
  Element multiply(Element a, Element b) const;
  Element inverse(Element a) const;
  Element power(Element a, std::uint64_t k) const;
  Element commutator(Element a, Element b) const;  // a^-1 b^-1 a b
  std::vector<std::uint64_t> coords(Element a) const;
  Element encode(std::span<const std::uint64_t> coords) const;

 private:
  struct Term {
    std::uint64_t coef;
    std::vector<std::pair<Var, std::uint32_t>> powers;
  };
  std::uint64_t m_;
  std::size_t r_;
  std::uint64_t order_;
  std::vector<std::vector<Term>> law_;
};

/// m is admissible when every coefficient of the coordinate law is invertible mod m.
bool is_admissible_modulus(const LieLattice& lattice, std::uint64_t m);
QuotientGroup lattice_quotient_group(const LieLattice& lattice, std::uint64_t m);
QuotientGroup lattice_quotient_group(std::span<const Matrix> basis, std::uint64_t m);

struct QuotientInvariants {
  std::uint64_t modulus = 0;
  std::uint64_t order = 0;
  unsigned nilpotency_class = 0;
  std::uint64_t exponent = 1;
  std::vector<std::uint64_t> abelian_invariants;         // of G/[G,G], d_1 | d_2 | ...
  std::map<std::uint64_t, std::uint64_t> order_histogram;  // element order -> count
  friend bool operator==(const QuotientInvariants&, const QuotientInvariants&) = default;
};

struct Fingerprint {
  std::vector<QuotientInvariants> quotients;
  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

QuotientInvariants quotient_invariants(const QuotientGroup& group);
Fingerprint fingerprint(std::span<const Matrix> basis, std::span<const std::uint64_t> moduli);
Fingerprint fingerprint(const TGroupRep& group, std::span<const std::uint64_t> moduli);

struct Divergence {
  std::uint64_t modulus = 0;
  std::string invariant;  // "order", "class", "exponent", "abelian_invariants", "order_histogram"
  std::string left;
  std::string right;
};

/// First divergence in (modulus, invariant) order, or nullopt on a match.
/// Throws std::invalid_argument when the modulus lists differ.
std::optional<Divergence> fingerprint_compare(const Fingerprint& f, const Fingerprint& g);

}  // namespace vpiso
