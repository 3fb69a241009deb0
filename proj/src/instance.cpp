#include "vpiso/instance.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace vpiso {

InstanceError::InstanceError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(line ? "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what
                              : what),
      line_(line),
      column_(column) {}

// --- abelian quotients ---

AbelianQuotient::AbelianQuotient(std::span<const Word> relations, std::size_t ngens) : d_(ngens) {
  IntMatrix rel(std::max<std::size_t>(relations.size(), 1), ngens);
  for (std::size_t i = 0; i < relations.size(); ++i) {
    const auto sums = relations[i].exponent_sums(ngens);
    for (std::size_t j = 0; j < ngens; ++j) rel(i, j) = sums[j];
  }
  const SmithForm sf = smith_form(rel);
  right_ = sf.right;
  right_inverse_ = to_integer(inverse(to_rational(sf.right)));
  std::vector<std::size_t> torsion;
  for (std::size_t c = 0; c < ngens; ++c) {
    const Integer dc = c < sf.diagonal.size() ? sf.diagonal[c] : Integer(0);
    if (dc == 0) {
      columns_.push_back(c);
      ++inv_.free_rank;
    } else if (dc != 1) {
      torsion.push_back(c);
      inv_.factors.push_back(dc);
    }
  }
  columns_.insert(columns_.end(), torsion.begin(), torsion.end());
}

std::vector<Integer> AbelianQuotient::coords(const Word& w) const { return coords_of_sums(w.exponent_sums(d_)); }

std::vector<Integer> AbelianQuotient::coords_of_sums(std::span<const Integer> x) const {
  if (x.size() != d_) throw std::invalid_argument("quotient coordinates: wrong number of exponent sums");
  std::vector<Integer> out;
  for (std::size_t c : columns_) {
    Integer y = 0;
    for (std::size_t j = 0; j < d_; ++j) y += x[j] * right_(j, c);
    out.push_back(y);
  }
  return normalize(std::move(out));
}

std::vector<Integer> AbelianQuotient::normalize(std::vector<Integer> coords) const {
  if (coords.size() != size()) throw std::invalid_argument("quotient coordinates: wrong length");
  for (std::size_t k = 0; k < inv_.factors.size(); ++k) {
    auto& y = coords[inv_.free_rank + k];
    y = mod_floor(y, inv_.factors[k]);
  }
  return coords;
}

Word AbelianQuotient::section(std::span<const Integer> coords) const {
  if (coords.size() != size()) throw std::invalid_argument("section: wrong number of coordinates");
  std::vector<Integer> y(d_, 0);
  for (std::size_t k = 0; k < coords.size(); ++k) y[columns_[k]] = coords[k];
  Word w;
  for (std::size_t j = 0; j < d_; ++j) {
    Integer x = 0;
    for (std::size_t c = 0; c < d_; ++c) x += y[c] * right_inverse_(c, j);
    if (!x.fits_slong_p()) throw std::overflow_error("section: exponent too large");
    w *= Word::power(static_cast<int>(j + 1), x.get_si());
  }
  return w;
}

AbelianQuotient abelianization_coords(std::span<const Word> relators, std::span<const Word> nwords,
                                      std::size_t ngens) {
  std::vector<Word> rel(relators.begin(), relators.end());
  rel.insert(rel.end(), nwords.begin(), nwords.end());
  return AbelianQuotient(rel, ngens);
}

// --- sides ---

IsoInstance make_side(std::string label, std::size_t n, std::vector<std::string> names, std::vector<Matrix> gens,
                      std::vector<Word> relators, std::vector<Word> nwords, bool lattice_hull) {
  const std::string where = "[" + label + "] ";
  if (n == 0) throw InstanceError(where + "missing or zero n");
  if (gens.empty()) throw InstanceError(where + "no generators");
  if (nwords.empty()) throw InstanceError(where + "no nword lines; N must be given");
  const std::set<std::string> unique(names.begin(), names.end());
  if (unique.size() != names.size()) throw InstanceError(where + "duplicate generator name");
  for (std::size_t i = 0; i < gens.size(); ++i) {
    if (gens[i].rows() != n || gens[i].cols() != n)
      throw InstanceError(where + "generator " + names[i] + " is not " + std::to_string(n) + "x" + std::to_string(n));
    if (sgn(determinant(gens[i])) == 0) throw InstanceError(where + "generator " + names[i] + " is singular");
  }
  const auto check_word = [&](const Word& w, const std::string& what) {
    if (static_cast<std::size_t>(w.max_generator()) > gens.size())
      throw InstanceError(where + what + " uses generator " + std::to_string(w.max_generator()) + " but only " +
                          std::to_string(gens.size()) + " are declared");
  };
  for (std::size_t i = 0; i < relators.size(); ++i) check_word(relators[i], "relator " + std::to_string(i + 1));
  for (std::size_t i = 0; i < nwords.size(); ++i) check_word(nwords[i], "nword " + std::to_string(i + 1));

  IsoInstance side;
  side.label = std::move(label);
  side.n = n;
  for (std::size_t i = 0; i < nwords.size(); ++i) {
    Matrix u = eval_word(nwords[i], gens, n);
    if (!is_unipotent(u)) throw InstanceError(where + "nword " + std::to_string(i + 1) + " is not unipotent");
    side.nword_values.push_back(std::move(u));
  }
  const Matrix id = Matrix::identity(n);
  for (std::size_t i = 0; i < relators.size(); ++i)
    if (eval_word(relators[i], gens, n) != id)
      throw InstanceError(where + "relator " + std::to_string(i + 1) + " does not evaluate to the identity");
  try {
    side.tgroup = make_tgroup(side.nword_values, n, lattice_hull);
  } catch (const SaturationError&) {
    throw InstanceError(where +
                        "the nword logs do not span a bch-closed lattice (closure saturates); "
                        "set lattice_hull = true under [assume] to use the hull");
  } catch (const std::domain_error& e) {
    throw InstanceError(where + "N is not a lattice group: " + e.what());
  }
  const LieLattice& L = side.tgroup.lattice;
  for (std::size_t i = 0; i < gens.size(); ++i)
    if (!normalizes(gens[i], L)) throw InstanceError(where + "generator " + names[i] + " does not normalize N");
  for (std::size_t i = 0; i < gens.size(); ++i)
    for (std::size_t j = i + 1; j < gens.size(); ++j)
      if (!lattice_membership(inverse(gens[i]) * inverse(gens[j]) * gens[i] * gens[j], L))
        throw InstanceError(where + "G/N is not abelian: [" + names[i] + "," + names[j] +
                            "] is not in N (only abelian G/N is supported)");

  side.quotient = abelianization_coords(relators, nwords, gens.size());
  side.abelianization = abelianization_coords(relators, {}, gens.size());
  side.names = std::move(names);
  side.gens = std::move(gens);
  side.relators = std::move(relators);
  side.nwords = std::move(nwords);
  return side;
}

// --- instance file ---

namespace {

class Cursor {
 public:
  Cursor(std::string text, std::size_t line) : s_(std::move(text)), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const { throw InstanceError(what, line_, pos_ + 1); }
  std::size_t line() const { return line_; }
  bool done() {
    skip();
    return pos_ >= s_.size();
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  std::string name() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (start == pos_) fail("expected a name");
    return s_.substr(start, pos_ - start);
  }
  std::string token() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '-' ||
                                s_[pos_] == '+' || s_[pos_] == '/'))
      ++pos_;
    if (start == pos_) fail("expected a number");
    return s_.substr(start, pos_ - start);
  }
  std::size_t integer() {
    const std::size_t col = pos_;
    const std::string t = token();
    if (!std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      pos_ = col;
      fail("expected a nonnegative integer");
    }
    return std::stoul(t);
  }
  Scalar scalar() {
    skip();
    const std::size_t col = pos_;
    const std::string t = token();
    try {
      return parse_scalar(t);
    } catch (const std::exception&) {
      pos_ = col;
      fail("malformed number '" + t + "'");
    }
  }
  std::string rest() {
    skip();
    std::string r = s_.substr(pos_);
    pos_ = s_.size();
    return r;
  }
  void end() {
    if (!done()) fail("unexpected trailing text");
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  std::string s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

Matrix parse_matrix(Cursor& cur) {
  cur.expect('[');
  std::vector<std::vector<Scalar>> rows;
  if (!cur.accept(']')) {
    do {
      cur.expect('[');
      std::vector<Scalar> row;
      if (!cur.accept(']')) {
        do row.push_back(cur.scalar());
        while (cur.accept(','));
        cur.expect(']');
      }
      if (!rows.empty() && row.size() != rows.front().size()) cur.fail("matrix rows have different lengths");
      rows.push_back(std::move(row));
    } while (cur.accept(','));
    cur.expect(']');
  }
  Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

IntMatrix parse_int_matrix(Cursor& cur) {
  Matrix m = parse_matrix(cur);
  if (!is_integral(m)) cur.fail("expected an integer matrix");
  return to_integer(m);
}

Word parse_word(Cursor& cur) {
  try {
    return Word::parse(cur.rest());
  } catch (const std::invalid_argument& e) {
    cur.fail(e.what());
  }
}

bool parse_bool(Cursor& cur) {
  const std::string v = cur.name();
  if (v == "true") return true;
  if (v == "false") return false;
  cur.fail("expected true or false");
}

struct RawSide {
  std::size_t n = 0;
  std::vector<std::string> names;
  std::vector<Matrix> gens;
  std::vector<Word> relators, nwords;
};

void parse_side_line(Cursor& cur, RawSide& side) {
  const std::string key = cur.name();
  if (key == "n") {
    cur.expect('=');
    side.n = cur.integer();
    cur.end();
  } else if (key == "gen") {
    side.names.push_back(cur.name());
    cur.expect('=');
    side.gens.push_back(parse_matrix(cur));
    cur.end();
  } else if (key == "rel" || key == "nword") {
    cur.expect('=');
    (key == "rel" ? side.relators : side.nwords).push_back(parse_word(cur));
  } else {
    cur.fail("unknown key '" + key + "'");
  }
}

std::string strip_comment(std::string line) {
  if (auto p = line.find('#'); p != std::string::npos) line.erase(p);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

InstancePair parse_instance(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::string section;
  std::set<std::string> seen;
  RawSide raw_g, raw_dag;
  ThetaOverride theta;
  bool has_theta = false;
  std::map<std::size_t, Word> lifts;
  InstancePair inst;

  while (std::getline(is, line)) {
    ++lineno;
    Cursor cur(strip_comment(line), lineno);
    if (cur.done()) continue;
    if (!header) {
      if (cur.name() != "vpiso" || cur.name() != "v1") cur.fail("expected the header 'vpiso v1'");
      cur.end();
      header = true;
      continue;
    }
    if (cur.accept('[')) {
      section = cur.name();
      cur.expect(']');
      cur.end();
      if (section != "G" && section != "Gdag" && section != "theta" && section != "lifts" && section != "assume")
        throw InstanceError("unknown section [" + section + "]", lineno, 1);
      if (!seen.insert(section).second) throw InstanceError("duplicate section [" + section + "]", lineno, 1);
      has_theta = has_theta || section == "theta";
      continue;
    }
    if (section.empty()) cur.fail("expected a section header");
    if (section == "G") {
      parse_side_line(cur, raw_g);
    } else if (section == "Gdag") {
      parse_side_line(cur, raw_dag);
    } else if (section == "theta") {
      const std::string key = cur.name();
      if (key == "free" || key == "torsion" || key == "cross") {
        cur.expect('=');
        IntMatrix m = parse_int_matrix(cur);
        cur.end();
        (key == "free" ? theta.free : key == "torsion" ? theta.torsion : theta.cross) = std::move(m);
      } else if (key == "section") {
        const std::size_t k = cur.integer();
        if (k == 0) cur.fail("section indices start at 1");
        cur.expect('=');
        theta.sections[k - 1] = parse_word(cur);
      } else {
        cur.fail("unknown key '" + key + "'");
      }
    } else if (section == "lifts") {
      const std::string key = cur.name();
      if (key.size() < 2 || key[0] != 'h' ||
          !std::all_of(key.begin() + 1, key.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        cur.fail("expected h<i>");
      const std::size_t i = std::stoul(key.substr(1));
      if (i == 0) cur.fail("lift indices start at 1");
      cur.expect('=');
      if (!lifts.emplace(i - 1, parse_word(cur)).second) cur.fail("duplicate lift " + key);
    } else {
      const std::string key = cur.name();
      cur.expect('=');
      if (key == "profinite_fitting")
        inst.profinite_fitting = parse_bool(cur);
      else if (key == "lattice_hull")
        inst.lattice_hull = parse_bool(cur);
      else
        cur.fail("unknown assumption '" + key + "'");
      cur.end();
    }
  }
  if (!header) throw InstanceError("empty file; expected the header 'vpiso v1'");
  if (!seen.count("G") || !seen.count("Gdag")) throw InstanceError("both [G] and [Gdag] sections are required");

  inst.g = make_side("G", raw_g.n, raw_g.names, raw_g.gens, raw_g.relators, raw_g.nwords, inst.lattice_hull);
  inst.gdag = make_side("Gdag", raw_dag.n, raw_dag.names, raw_dag.gens, raw_dag.relators, raw_dag.nwords,
                        inst.lattice_hull);

  for (const auto& [k, w] : theta.sections) {
    if (k >= inst.gdag.quotient.size())
      throw InstanceError("[theta] section " + std::to_string(k + 1) + " exceeds the " +
                          std::to_string(inst.gdag.quotient.size()) + " quotient coordinates of Gdag/N");
    if (static_cast<std::size_t>(w.max_generator()) > inst.gdag.d())
      throw InstanceError("[theta] section " + std::to_string(k + 1) + " uses an undeclared generator");
    std::vector<Integer> unit(inst.gdag.quotient.size(), 0);
    unit[k] = 1;
    if (inst.gdag.quotient.coords(w) != inst.gdag.quotient.normalize(unit))
      throw InstanceError("[theta] section " + std::to_string(k + 1) + " does not map to quotient basis element " +
                          std::to_string(k + 1));
  }
  if (has_theta) inst.theta = std::move(theta);
  if (!lifts.empty()) {
    if (lifts.size() != inst.g.d() || lifts.rbegin()->first + 1 != inst.g.d())
      throw InstanceError("[lifts] must give h1..h" + std::to_string(inst.g.d()));
    for (auto& [i, w] : lifts) {
      if (static_cast<std::size_t>(w.max_generator()) > inst.gdag.d())
        throw InstanceError("[lifts] h" + std::to_string(i + 1) + " uses an undeclared Gdag generator");
      inst.lifts.push_back(std::move(w));
    }
  }
  ThetaStream validate(inst, 1);
  return inst;
}

// --- theta ---

std::vector<Integer> ThetaSpec::apply(std::span<const Integer> c, const AbelianQuotient& target) const {
  const std::size_t f = free.rows(), a = torsion.rows();
  if (c.size() != f + a) throw std::invalid_argument("theta: coordinate length mismatch");
  std::vector<Integer> out(f + a, 0);
  for (std::size_t i = 0; i < f; ++i) {
    for (std::size_t j = 0; j < f; ++j) out[j] += c[i] * free(i, j);
    for (std::size_t j = 0; j < a; ++j) out[f + j] += c[i] * cross(i, j);
  }
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < a; ++j) out[f + j] += c[f + i] * torsion(i, j);
  return target.normalize(std::move(out));
}

namespace {

bool same_invariants(const AbelianQuotient& a, const AbelianQuotient& b) { return a.invariants() == b.invariants(); }

constexpr std::uint64_t kMaxTorsionOrder = 1 << 16;

// Every element of the torsion part as a coordinate vector.
std::vector<std::vector<Integer>> torsion_elements(const std::vector<Integer>& factors) {
  std::uint64_t order = 1;
  for (const auto& t : factors) {
    if (!t.fits_ulong_p() || order * t.get_ui() > kMaxTorsionOrder)
      throw std::invalid_argument("torsion part too large to enumerate");
    order *= t.get_ui();
  }
  std::vector<std::vector<Integer>> out;
  std::vector<Integer> x(factors.size(), 0);
  while (true) {
    out.push_back(x);
    std::size_t i = 0;
    while (i < x.size() && ++x[i] == factors[i]) x[i++] = 0;
    if (i == x.size()) break;
  }
  return out;
}

std::optional<std::string> torsion_defect(const IntMatrix& T, const std::vector<Integer>& factors) {
  const std::size_t a = factors.size();
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < a; ++j)
      if (mod_floor(factors[i] * T(i, j), factors[j]) != 0) return "torsion map is not a homomorphism";
  for (const auto& y : torsion_elements(factors)) {
    if (std::all_of(y.begin(), y.end(), [](const Integer& v) { return v == 0; })) continue;
    bool zero = true;
    for (std::size_t j = 0; j < a && zero; ++j) {
      Integer s = 0;
      for (std::size_t i = 0; i < a; ++i) s += y[i] * T(i, j);
      zero = mod_floor(s, factors[j]) == 0;
    }
    if (zero) return "torsion map is not injective";
  }
  return std::nullopt;
}

bool is_unimodular(const IntMatrix& m) {
  if (m.rows() == 0) return true;
  const Scalar det = determinant(to_rational(m));
  return det == 1 || det == -1;
}

}  // namespace

std::optional<std::string> theta_defect(const ThetaSpec& theta, const AbelianQuotient& source,
                                        const AbelianQuotient& target) {
  if (!same_invariants(source, target))
    return "quotients differ: " + to_string(source.invariants()) + " vs " + to_string(target.invariants());
  const std::size_t f = source.free_rank(), a = source.invariants().factors.size();
  if (theta.free.rows() != f || theta.free.cols() != f) return "free matrix must be " + std::to_string(f) + "x" + std::to_string(f);
  if (theta.torsion.rows() != a || theta.torsion.cols() != a)
    return "torsion matrix must be " + std::to_string(a) + "x" + std::to_string(a);
  if (theta.cross.rows() != f || theta.cross.cols() != a)
    return "cross matrix must be " + std::to_string(f) + "x" + std::to_string(a);
  if (!is_unimodular(theta.free)) return "free matrix is not unimodular";
  return torsion_defect(theta.torsion, source.invariants().factors);
}

void assemble_lifts(ThetaSpec& theta, const InstancePair& inst) {
  if (!inst.lifts.empty()) {
    theta.lifts = inst.lifts;
    theta.user_lifts = true;
    return;
  }
  const auto& src = inst.g.quotient;
  const auto& dst = inst.gdag.quotient;
  const bool custom = inst.theta && !inst.theta->sections.empty();
  theta.lifts.clear();
  for (std::size_t i = 0; i < inst.g.d(); ++i) {
    const auto img = theta.apply(src.coords(Word::power(static_cast<int>(i + 1), 1)), dst);
    if (!custom) {
      theta.lifts.push_back(dst.section(img));
      continue;
    }
    Word h;
    for (std::size_t k = 0; k < img.size(); ++k) {
      if (img[k] == 0) continue;
      auto it = inst.theta->sections.find(k);
      Word base;
      if (it != inst.theta->sections.end()) {
        base = it->second;
      } else {
        std::vector<Integer> unit(img.size(), 0);
        unit[k] = 1;
        base = dst.section(unit);
      }
      if (!img[k].fits_slong_p()) throw std::overflow_error("lift exponent too large");
      for (long e = 0; e < img[k].get_si(); ++e) h *= base;
    }
    theta.lifts.push_back(std::move(h));
  }
}

namespace {

// theta induced on the quotients by user lifts
ThetaSpec theta_from_lifts(const InstancePair& inst) {
  const auto& src = inst.g.quotient;
  const auto& dst = inst.gdag.quotient;
  if (!same_invariants(src, dst))
    throw InstanceError("[lifts] given but the quotients differ: " + to_string(src.invariants()) + " vs " +
                        to_string(dst.invariants()));
  const std::size_t f = src.free_rank(), a = src.invariants().factors.size();
  std::vector<std::vector<Integer>> lift_coords;
  for (const auto& h : inst.lifts) lift_coords.push_back(dst.coords(h));
  ThetaSpec t;
  t.free = IntMatrix(f, f);
  t.cross = IntMatrix(f, a);
  t.torsion = IntMatrix(a, a);
  for (std::size_t k = 0; k < f + a; ++k) {
    std::vector<Integer> unit(f + a, 0);
    unit[k] = 1;
    const auto sums = src.section(unit).exponent_sums(src.generators());
    std::vector<Integer> img(f + a, 0);
    for (std::size_t j = 0; j < sums.size(); ++j)
      for (std::size_t c = 0; c < f + a; ++c) img[c] += sums[j] * lift_coords[j][c];
    img = dst.normalize(std::move(img));
    for (std::size_t c = 0; c < f + a; ++c) {
      if (k < f) {
        if (c < f)
          t.free(k, c) = img[c];
        else
          t.cross(k, c - f) = img[c];
      } else if (c < f) {
        if (img[c] != 0) throw InstanceError("[lifts] send a torsion element to infinite order");
      } else {
        t.torsion(k - f, c - f) = img[c];
      }
    }
  }
  if (auto why = theta_defect(t, src, dst)) throw InstanceError("[lifts] do not induce a quotient isomorphism: " + *why);
  // relators of G must land in N-dagger; checked here so errors surface at parse time
  for (std::size_t i = 0; i < inst.g.relators.size(); ++i) {
    const auto sums = inst.g.relators[i].exponent_sums(inst.g.d());
    std::vector<Integer> img(f + a, 0);
    for (std::size_t j = 0; j < sums.size(); ++j)
      for (std::size_t c = 0; c < f + a; ++c) img[c] += sums[j] * lift_coords[j][c];
    if (dst.normalize(img) != std::vector<Integer>(f + a, 0))
      throw InstanceError("[lifts] relator " + std::to_string(i + 1) + " does not map into N-dagger");
  }
  t.lifts = inst.lifts;
  t.user_lifts = true;
  return t;
}

}  // namespace

ThetaStream::ThetaStream(const InstancePair& inst, int height) : inst_(&inst), height_(height) {
  if (height < 0) throw std::invalid_argument("theta stream: negative height");
  const auto& src = inst.g.quotient;
  const auto& dst = inst.gdag.quotient;
  if (!inst.lifts.empty()) {
    single_ = theta_from_lifts(inst);
    return;
  }
  f_ = src.free_rank();
  a_ = src.invariants().factors.size();
  if (inst.theta && (inst.theta->free || inst.theta->torsion || inst.theta->cross)) {
    if (!same_invariants(src, dst))
      throw InstanceError("[theta] given but the quotients differ: " + to_string(src.invariants()) + " vs " +
                          to_string(dst.invariants()));
    ThetaSpec t;
    t.free = inst.theta->free.value_or(IntMatrix::identity(f_));
    t.cross = inst.theta->cross.value_or(IntMatrix(f_, a_));
    t.torsion = inst.theta->torsion.value_or(IntMatrix::identity(a_));
    if (auto why = theta_defect(t, src, dst)) throw InstanceError("[theta] " + *why);
    assemble_lifts(t, inst);
    single_ = std::move(t);
    return;
  }
  if (!same_invariants(src, dst)) {
    finished_ = exhaustive_ = true;
    return;
  }
  exhaustive_ = f_ == 0;
  bounds_ = src.invariants().factors;

  // torsion automorphisms, identity first
  const IntMatrix id = IntMatrix::identity(a_);
  torsion_autos_.push_back(id);
  std::vector<Integer> digits(a_ * a_, 0);
  while (true) {
    IntMatrix t(a_, a_, digits);
    if (t != id && !torsion_defect(t, bounds_)) torsion_autos_.push_back(std::move(t));
    std::size_t i = 0;
    while (i < digits.size() && ++digits[i] == bounds_[i % a_]) digits[i++] = 0;
    if (i == digits.size()) break;
  }
  cross_ = IntMatrix(f_, a_);
}

bool ThetaStream::advance_cross() {
  auto e = cross_.entries();
  std::size_t i = 0;
  while (i < e.size() && ++e[i] == bounds_[i % a_]) e[i++] = 0;
  return i < e.size();
}

bool ThetaStream::advance_free() {
  if (f_ == 0) return false;
  const IntMatrix id = IntMatrix::identity(f_);
  if (identity_pending_) {
    identity_pending_ = false;
    free_ = IntMatrix(f_, f_);
    for (auto& x : free_.entries()) x = -height_;
    if (free_ != id && is_unimodular(free_)) return true;
  }
  while (true) {
    auto e = free_.entries();
    std::size_t i = 0;
    while (i < e.size() && ++e[i] > height_) e[i++] = -height_;
    if (i == e.size()) return false;
    if (free_ != id && is_unimodular(free_)) return true;
  }
}

std::optional<ThetaSpec> ThetaStream::next() {
  if (single_) {
    if (started_) return std::nullopt;
    started_ = true;
    return single_;
  }
  if (finished_) return std::nullopt;
  if (!started_) {
    started_ = true;
    if (f_ == 0 || height_ >= 1) {
      free_ = IntMatrix::identity(f_);
    } else if (!advance_free()) {
      finished_ = true;
      return std::nullopt;
    }
  } else if (!advance_cross()) {
    cross_ = IntMatrix(f_, a_);
    if (++auto_index_ == torsion_autos_.size()) {
      auto_index_ = 0;
      if (!advance_free()) {
        finished_ = true;
        return std::nullopt;
      }
    }
  }
  ThetaSpec t;
  t.free = free_;
  t.cross = cross_;
  t.torsion = torsion_autos_[auto_index_];
  assemble_lifts(t, *inst_);
  return t;
}

std::vector<ThetaSpec> enumerate_theta(const InstancePair& inst, int height, std::size_t max_count) {
  ThetaStream s(inst, height);
  std::vector<ThetaSpec> out;
  while (out.size() < max_count) {
    auto t = s.next();
    if (!t) break;
    out.push_back(std::move(*t));
  }
  return out;
}

SystemInput system_input(const InstancePair& inst, const ThetaSpec& theta) {
  std::vector<Matrix> h;
  for (const auto& w : theta.lifts) h.push_back(eval_word(w, inst.gdag.gens, inst.gdag.n));
  SystemInput in;
  in.lattice = inst.g.lattice();
  in.lattice_dag = inst.gdag.lattice();
  in.d = inst.g.d();
  in.constants = specialize_constants(inst.g.relators, inst.g.nwords, h, inst.g.gens, in.lattice, in.lattice_dag);
  return in;
}

std::optional<Witness> identity_candidate(const InstancePair& inst, const SystemInput& input, const ThetaSpec& theta) {
  if (inst.g.n != inst.gdag.n) return std::nullopt;
  std::vector<Matrix> xi;
  for (std::size_t i = 0; i < inst.g.d(); ++i) {
    Matrix x = inst.g.gens[i] * inverse(eval_word(theta.lifts[i], inst.gdag.gens, inst.gdag.n));
    if (!is_unipotent(x)) return std::nullopt;
    xi.push_back(std::move(x));
  }
  try {
    return complete_witness(input, Matrix::identity(inst.g.n), xi);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace vpiso
