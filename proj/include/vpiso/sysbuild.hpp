#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vpiso/malcev.hpp"
#include "vpiso/poly.hpp"
#include "vpiso/words.hpp"

namespace vpiso {

enum class Tag { Beq, Ceq, e2, e3, e4, Const };

const char* tag_name(Tag t);
std::optional<Tag> parse_tag(const std::string& s);

struct SystemMeta {
  std::size_t n = 0, nprime = 0, r = 0, rprime = 0, d = 0, s = 0;
  bool good = true;
  friend bool operator==(const SystemMeta&, const SystemMeta&) = default;
};

struct DiophantineSystem {
  SystemMeta meta;
  std::vector<std::string> variables;
  std::vector<ZPoly> polynomials;
  std::vector<Tag> tags;

  std::size_t size() const { return polynomials.size(); }
  std::size_t count(Tag t) const;
  void add(Tag t, ZPoly p) {
    tags.push_back(t);
    polynomials.push_back(std::move(p));
  }
  friend bool operator==(const DiophantineSystem&, const DiophantineSystem&) = default;
};

/// Variable numbering in roster order: H, Z, Xi(1..d), lam(1..d), eta0, zeta0.
/// All accessors take 0-based indices.
class Roster {
 public:
  Roster(std::size_t n, std::size_t nprime, std::size_t r, std::size_t rprime, std::size_t d);

  Var H(std::size_t i, std::size_t j) const { return static_cast<Var>(i * np_ + j); }
  Var Z(std::size_t i, std::size_t j) const { return static_cast<Var>(z0_ + i * rp_ + j); }
  Var Xi(std::size_t k, std::size_t i, std::size_t j) const {
    return static_cast<Var>(xi0_ + k * np_ * np_ + i * np_ + j);
  }
  Var lam(std::size_t k, std::size_t j) const { return static_cast<Var>(lam0_ + k * rp_ + j); }
  Var eta0() const { return static_cast<Var>(eta_); }
  Var zeta0() const { return static_cast<Var>(eta_ + 1); }
  std::size_t size() const { return eta_ + 2; }
  std::vector<std::string> names() const;

 private:
  std::size_t n_, np_, r_, rp_, d_;
  std::size_t z0_, xi0_, lam0_, eta_;
};

/// Everything F(theta) depends on once the lifts are fixed.
struct SystemInput {
  LieLattice lattice;      // L, basis e_1..e_r, n x n
  LieLattice lattice_dag;  // L', basis e'_1..e'_r', n' x n'
  std::size_t d = 0;       // number of G-generators (lifts h_1..h_d)
  SpecializedConstants constants;
};

/// How inverse factors in the product equations are expanded. Balanced moves
/// the constant and every leading or trailing inverse factor to the other side
/// (where it appears uninverted); Literal keeps the product as written and
/// expands each inverse with the unipotent series.
enum class InverseEncoding { Balanced, Literal };

DiophantineSystem build_full_system(const SystemInput& input, InverseEncoding enc = InverseEncoding::Balanced);

/// Unknowns Z (r x r') and zeta0; zeta0 * det Z = 1 (tag e2) and bracket
/// transport (tag e3).
DiophantineSystem build_lie_system(const LieLattice& lattice, const LieLattice& lattice_dag);

using Witness = std::vector<Integer>;

struct ResidualReport {
  std::map<Tag, Integer> max_residual;  // |value| over Z, or value in [0, m) mod m
  std::optional<Integer> modulus;
  bool all_zero() const;
};

/// Throws std::invalid_argument when the witness does not assign every variable.
ResidualReport verify_witness(const DiophantineSystem& system, std::span<const Integer> witness,
                              std::optional<Integer> modulus = std::nullopt);

/// Completes a full-system assignment from H and Xi(1..d): Z from conjugating
/// the basis of L by H, lambda from log Xi, eta0 = 1/det H, zeta0 = 1/det Z.
/// Nullopt when any of these is not an integer (or H is singular).
std::optional<Witness> complete_witness(const SystemInput& input, const Matrix& H, std::span<const Matrix> xi);

/// Lie-system assignment (Z, zeta0 = 1/det Z); nullopt unless Z is integral
/// with determinant +-1.
std::optional<Witness> lie_witness(const Matrix& Z);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_, column_;
};

std::string serialize_system(const DiophantineSystem& system);
DiophantineSystem parse_system(const std::string& text);

}  // namespace vpiso
