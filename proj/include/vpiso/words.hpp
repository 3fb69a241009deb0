#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vpiso/exactmat.hpp"
#include "vpiso/malcev.hpp"

namespace vpiso {

struct Letter {
  int generator = 1;  // 1-based
  int sign = 1;       // +1 or -1
  friend bool operator==(const Letter&, const Letter&) = default;
};

class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> letters);
  /// Whitespace-separated signed 1-based indices, e.g. "1 -2 1".
  static Word parse(const std::string& text);
  /// g_i^k as |k| letters.
  static Word power(int generator, long exponent);

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  int max_generator() const;

  Word inverse() const;
  Word free_reduced() const;
  Word& operator*=(const Word& o);
  friend Word operator*(Word a, const Word& b) { return a *= b; }
  friend bool operator==(const Word&, const Word&) = default;

  std::string to_string() const;
  /// Exponent sum of each generator 1..d.
  std::vector<Integer> exponent_sums(std::size_t d) const;

 private:
  std::vector<Letter> letters_;
};

/// Product of assignment[g-1]^{sign} left to right; identity for the empty word.
Matrix eval_word(const Word& w, std::span<const Matrix> assignment, std::size_t n);
Matrix eval_word(const Word& w, std::span<const Matrix> assignment);

/// One factor v_target^{conjugator}, raised to `sign`. With x = eval(conjugator)
/// the factor evaluates to x^{-1} v^{sign} x.
struct TwistedFactor {
  int target = 1;
  int sign = 1;
  Word conjugator;  // over the h-alphabet
  friend bool operator==(const TwistedFactor&, const TwistedFactor&) = default;
};

/// w(v_1 h_1, ..., v_d h_d) = (product of factors)(v, h) . w(h_1, ..., h_d).
struct TwistedWord {
  std::vector<TwistedFactor> factors;
  Word source;
};

TwistedWord derived_word(const Word& w);

/// Evaluates the product of twisted factors at v (targets) and h (conjugators).
Matrix eval_twisted(const TwistedWord& tw, std::span<const Matrix> v, std::span<const Matrix> h);

struct FactorConstant {
  Matrix conjugator;  // Y_m(w)
  int sign = 1;
  int target = 1;
};

struct WordConstants {
  std::vector<FactorConstant> factors;
  Matrix tail;  // B(w) for relators, C(i) for N-words
};

struct SpecializedConstants {
  std::vector<WordConstants> relators;
  std::vector<WordConstants> nwords;
  std::vector<Matrix> a;  // A(i) = u_i(g)
};

/// The lifts h violate a membership or normalization requirement for N-dagger.
class InconsistentLift : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

SpecializedConstants specialize_constants(std::span<const Word> relators, std::span<const Word> nwords,
                                          std::span<const Matrix> h, std::span<const Matrix> g,
                                          const LieLattice& lattice, const LieLattice& lattice_dag);

}  // namespace vpiso
