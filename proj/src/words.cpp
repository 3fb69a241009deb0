#include "vpiso/words.hpp"

#include <optional>
#include <sstream>

namespace vpiso {

Word::Word(std::vector<Letter> letters) : letters_(std::move(letters)) {
  for (const auto& l : letters_)
    if (l.generator < 1 || (l.sign != 1 && l.sign != -1)) throw std::invalid_argument("word: malformed letter");
}

Word Word::parse(const std::string& text) {
  std::istringstream is(text);
  std::vector<Letter> letters;
  std::string tok;
  while (is >> tok) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(tok, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("word: expected a signed generator index, got '" + tok + "'");
    }
    if (used != tok.size() || v == 0)
      throw std::invalid_argument("word: expected a nonzero signed generator index, got '" + tok + "'");
    letters.push_back(Letter{static_cast<int>(v < 0 ? -v : v), v < 0 ? -1 : 1});
  }
  return Word(std::move(letters));
}

Word Word::power(int generator, long exponent) {
  std::vector<Letter> letters;
  for (long k = 0; k < (exponent < 0 ? -exponent : exponent); ++k)
    letters.push_back(Letter{generator, exponent < 0 ? -1 : 1});
  return Word(std::move(letters));
}

int Word::max_generator() const {
  int m = 0;
  for (const auto& l : letters_) m = std::max(m, l.generator);
  return m;
}

Word Word::inverse() const {
  std::vector<Letter> inv;
  inv.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) inv.push_back(Letter{it->generator, -it->sign});
  return Word(std::move(inv));
}

Word Word::free_reduced() const {
  std::vector<Letter> out;
  for (const auto& l : letters_) {
    if (!out.empty() && out.back().generator == l.generator && out.back().sign == -l.sign)
      out.pop_back();
    else
      out.push_back(l);
  }
  return Word(std::move(out));
}

Word& Word::operator*=(const Word& o) {
  letters_.insert(letters_.end(), o.letters_.begin(), o.letters_.end());
  return *this;
}

std::string Word::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < letters_.size(); ++i)
    os << (i ? " " : "") << letters_[i].sign * letters_[i].generator;
  return os.str();
}

std::vector<Integer> Word::exponent_sums(std::size_t d) const {
  std::vector<Integer> s(d, 0);
  for (const auto& l : letters_) {
    if (static_cast<std::size_t>(l.generator) > d) throw std::invalid_argument("word: generator index out of range");
    s[static_cast<std::size_t>(l.generator - 1)] += l.sign;
  }
  return s;
}

Matrix eval_word(const Word& w, std::span<const Matrix> assignment, std::size_t n) {
  if (static_cast<std::size_t>(w.max_generator()) > assignment.size())
    throw std::invalid_argument("eval_word: generator index " + std::to_string(w.max_generator()) +
                                " out of range");
  std::vector<std::optional<Matrix>> inverses(assignment.size());
  Matrix result = Matrix::identity(n);
  for (const auto& l : w.letters()) {
    const auto i = static_cast<std::size_t>(l.generator - 1);
    if (l.sign > 0) {
      result = result * assignment[i];
    } else {
      if (!inverses[i]) inverses[i] = inverse(assignment[i]);
      result = result * *inverses[i];
    }
  }
  return result;
}

Matrix eval_word(const Word& w, std::span<const Matrix> assignment) {
  if (assignment.empty()) {
    if (!w.empty()) throw std::invalid_argument("eval_word: empty assignment");
    return Matrix();
  }
  return eval_word(w, assignment, assignment.front().dim());
}

TwistedWord derived_word(const Word& w) {
  TwistedWord tw;
  tw.source = w;
  Word prefix;  // c_j as a word in the h-alphabet
  for (const auto& l : w.letters()) {
    if (l.sign > 0) {
      tw.factors.push_back(TwistedFactor{l.generator, 1, prefix.inverse()});
      prefix *= Word({l});
    } else {
      prefix *= Word({l});
      tw.factors.push_back(TwistedFactor{l.generator, -1, prefix.inverse()});
    }
  }
  return tw;
}

Matrix eval_twisted(const TwistedWord& tw, std::span<const Matrix> v, std::span<const Matrix> h) {
  if (v.empty()) throw std::invalid_argument("eval_twisted: empty assignment");
  const std::size_t n = v.front().dim();
  Matrix result = Matrix::identity(n);
  for (const auto& f : tw.factors) {
    Matrix x = eval_word(f.conjugator, h, n);
    const Matrix& vt = v[static_cast<std::size_t>(f.target - 1)];
    result = result * inverse(x) * (f.sign > 0 ? vt : inverse(vt)) * x;
  }
  return result;
}

namespace {

WordConstants specialize(const Word& w, std::span<const Matrix> h, std::size_t n, const LieLattice& lattice_dag,
                         const char* what, std::size_t index) {
  WordConstants wc;
  for (const auto& f : derived_word(w).factors) {
    Matrix y = eval_word(f.conjugator, h, n);
    if (!normalizes(y, lattice_dag))
      throw InconsistentLift(std::string("conjugator for ") + what + " " + std::to_string(index + 1) +
                             " does not normalize the N-dagger lattice");
    wc.factors.push_back(FactorConstant{std::move(y), f.sign, f.target});
  }
  wc.tail = eval_word(w, h, n);
  if (!lattice_membership(wc.tail, lattice_dag))
    throw InconsistentLift(std::string(what) + " " + std::to_string(index + 1) +
                           " evaluated at the lifts does not lie in N-dagger");
  return wc;
}

}  // namespace

SpecializedConstants specialize_constants(std::span<const Word> relators, std::span<const Word> nwords,
                                          std::span<const Matrix> h, std::span<const Matrix> g,
                                          const LieLattice& lattice, const LieLattice& lattice_dag) {
  const std::size_t n_dag = lattice_dag.dim();
  for (const auto& m : h)
    if (m.dim() != n_dag) throw std::invalid_argument("specialize_constants: lift dimension mismatch");
  SpecializedConstants sc;
  for (std::size_t i = 0; i < relators.size(); ++i)
    sc.relators.push_back(specialize(relators[i], h, n_dag, lattice_dag, "relator", i));
  for (std::size_t i = 0; i < nwords.size(); ++i) {
    sc.nwords.push_back(specialize(nwords[i], h, n_dag, lattice_dag, "N-word", i));
    Matrix a = eval_word(nwords[i], g, lattice.dim());
    if (!lattice_membership(a, lattice))
      throw std::domain_error("N-word " + std::to_string(i + 1) + " does not evaluate into exp(L)");
    sc.a.push_back(std::move(a));
  }
  return sc;
}

}  // namespace vpiso
