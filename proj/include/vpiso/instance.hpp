#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vpiso/exactmat.hpp"
#include "vpiso/malcev.hpp"
#include "vpiso/sysbuild.hpp"
#include "vpiso/words.hpp"

namespace vpiso {

/// Z^d modulo the exponent-sum rows of a list of words, in Smith coordinates:
/// free coordinates first, then torsion coordinates reduced into [0, t).
class AbelianQuotient {
 public:
  AbelianQuotient() = default;
  AbelianQuotient(std::span<const Word> relations, std::size_t ngens);

  std::size_t generators() const { return d_; }
  const AbelianInvariants& invariants() const { return inv_; }
  std::size_t free_rank() const { return inv_.free_rank; }
  std::size_t size() const { return inv_.free_rank + inv_.factors.size(); }

  std::vector<Integer> coords(const Word& w) const;
  std::vector<Integer> coords_of_sums(std::span<const Integer> exponent_sums) const;
  /// Reduces torsion coordinates into [0, t).
  std::vector<Integer> normalize(std::vector<Integer> coords) const;
  /// A word g_1^x_1 ... g_d^x_d with the given coordinates.
  Word section(std::span<const Integer> coords) const;

 private:
  std::size_t d_ = 0;
  AbelianInvariants inv_;
  IntMatrix right_, right_inverse_;
  std::vector<std::size_t> columns_;  // Smith column of each coordinate
};

/// G/N from relators plus N-words as extra relators. With no N-words this is
/// the plain abelianization of the presentation.
AbelianQuotient abelianization_coords(std::span<const Word> relators, std::span<const Word> nwords,
                                      std::size_t ngens);

/// One side of an instance: G = <g_1..g_d ; R> with N = <u_1..u_s> normal.
struct IsoInstance {
  std::string label;
  std::size_t n = 0;
  std::vector<std::string> names;
  std::vector<Matrix> gens;
  std::vector<Word> relators;
  std::vector<Word> nwords;
  std::vector<Matrix> nword_values;
  TGroupRep tgroup;
  AbelianQuotient quotient;        // G/N
  AbelianQuotient abelianization;  // G/[G,G] from the presentation

  std::size_t d() const { return gens.size(); }
  const LieLattice& lattice() const { return tgroup.lattice; }
};

/// User-fixed theta data from the [theta] section.
struct ThetaOverride {
  std::optional<IntMatrix> free, torsion, cross;
  std::map<std::size_t, Word> sections;  // 0-based Gdag quotient coordinate -> word
};

struct InstancePair {
  IsoInstance g, gdag;
  std::optional<ThetaOverride> theta;
  std::vector<Word> lifts;  // [lifts]: h_i as Gdag-words; empty when absent
  bool profinite_fitting = false;
  bool lattice_hull = false;
};

class InstanceError : public std::runtime_error {
 public:
  InstanceError(const std::string& what, std::size_t line = 0, std::size_t column = 0);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_, column_;
};

/// Parses and validates a `vpiso v1` instance file.
InstancePair parse_instance(const std::string& text);

/// Builds and validates one side from raw data (throws InstanceError).
IsoInstance make_side(std::string label, std::size_t n, std::vector<std::string> names, std::vector<Matrix> gens,
                      std::vector<Word> relators, std::vector<Word> nwords, bool lattice_hull);

/// theta on quotient coordinates, acting on row vectors (free | torsion) by
/// [[free, cross], [0, torsion]], with lifts h_i of theta(g_i N).
struct ThetaSpec {
  IntMatrix free, cross, torsion;
  std::vector<Word> lifts;
  bool user_lifts = false;

  std::vector<Integer> apply(std::span<const Integer> coords, const AbelianQuotient& target) const;
};

/// Nullopt when the matrices define an isomorphism between the two quotients,
/// otherwise the reason.
std::optional<std::string> theta_defect(const ThetaSpec& theta, const AbelianQuotient& source,
                                        const AbelianQuotient& target);

/// Fills theta.lifts from the quotient map and the section words.
void assemble_lifts(ThetaSpec& theta, const InstancePair& inst);

/// Deterministic stream of quotient isomorphisms with free entries in
/// [-height, height]; the identity comes first when the quotients agree. A
/// [theta] or [lifts] section reduces the stream to that single theta.
class ThetaStream {
 public:
  ThetaStream(const InstancePair& inst, int height);

  std::optional<ThetaSpec> next();
  /// True when every isomorphism of the quotients appears in the stream
  /// (no free part, or a single user theta was not requested).
  bool exhaustive() const { return exhaustive_; }

 private:
  bool advance_free();
  bool advance_cross();

  const InstancePair* inst_;
  int height_;
  bool exhaustive_ = false;
  bool finished_ = false;
  bool started_ = false;
  std::optional<ThetaSpec> single_;
  std::size_t f_ = 0, a_ = 0;
  std::vector<Integer> bounds_;  // torsion factors of the target
  std::vector<IntMatrix> torsion_autos_;
  IntMatrix free_, cross_;
  std::size_t auto_index_ = 0;
  bool identity_pending_ = true;
};

/// The whole stream, capped at max_count.
std::vector<ThetaSpec> enumerate_theta(const InstancePair& inst, int height, std::size_t max_count = 1 << 16);

/// F(theta) input: lifts evaluated in Gdag, constants specialized.
SystemInput system_input(const InstancePair& inst, const ThetaSpec& theta);

/// Integer candidate witness with H = I and Xi_i = g_i h_i^-1, when it exists.
std::optional<Witness> identity_candidate(const InstancePair& inst, const SystemInput& input, const ThetaSpec& theta);

}  // namespace vpiso
