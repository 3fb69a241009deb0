#include "vpiso/sysbuild.hpp"

#include <cctype>
#include <sstream>
#include <unordered_map>

namespace vpiso {

const char* tag_name(Tag t) {
  switch (t) {
    case Tag::Beq: return "Beq";
    case Tag::Ceq: return "Ceq";
    case Tag::e2: return "e2";
    case Tag::e3: return "e3";
    case Tag::e4: return "e4";
    case Tag::Const: return "const";
  }
  return "?";
}

std::optional<Tag> parse_tag(const std::string& s) {
  for (Tag t : {Tag::Beq, Tag::Ceq, Tag::e2, Tag::e3, Tag::e4, Tag::Const})
    if (s == tag_name(t)) return t;
  return std::nullopt;
}

std::size_t DiophantineSystem::count(Tag t) const {
  std::size_t c = 0;
  for (Tag x : tags) c += x == t;
  return c;
}

Roster::Roster(std::size_t n, std::size_t nprime, std::size_t r, std::size_t rprime, std::size_t d)
    : n_(n), np_(nprime), r_(r), rp_(rprime), d_(d) {
  z0_ = n * nprime;
  xi0_ = z0_ + r * rprime;
  lam0_ = xi0_ + d * nprime * nprime;
  eta_ = lam0_ + d * rprime;
}

std::vector<std::string> Roster::names() const {
  std::vector<std::string> v;
  v.reserve(size());
  auto idx = [](std::size_t i) { return std::to_string(i + 1); };
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < np_; ++j) v.push_back("H_" + idx(i) + "_" + idx(j));
  for (std::size_t i = 0; i < r_; ++i)
    for (std::size_t j = 0; j < rp_; ++j) v.push_back("Z_" + idx(i) + "_" + idx(j));
  for (std::size_t k = 0; k < d_; ++k)
    for (std::size_t i = 0; i < np_; ++i)
      for (std::size_t j = 0; j < np_; ++j) v.push_back("Xi" + idx(k) + "_" + idx(i) + "_" + idx(j));
  for (std::size_t k = 0; k < d_; ++k)
    for (std::size_t j = 0; j < rp_; ++j) v.push_back("lam" + idx(k) + "_" + idx(j));
  v.push_back("eta0");
  v.push_back("zeta0");
  return v;
}

namespace {

void add_entries(DiophantineSystem& sys, Tag tag, const PolyMatrix& m) {
  for (const auto& p : m.entries()) sys.add(tag, clear_denominators(p));
}

PolyMatrix product(const std::vector<PolyMatrix>& factors, std::size_t n) {
  PolyMatrix acc = PolyMatrix::identity(n);
  for (const auto& f : factors) acc = acc * f;
  return acc;
}

class FactorExpander {
 public:
  FactorExpander(const std::vector<PolyMatrix>& xi, std::size_t n) : xi_(xi), n_(n) {
    for (const auto& x : xi) inverse_.push_back(unipotent_inverse_series(PolyMatrix(x - PolyMatrix::identity(n))));
  }
  /// Y^{-1} Xi Y, the factor with its sign dropped.
  PolyMatrix plain(const FactorConstant& f) const { return conjugate(xi_.at(index(f)), f.conjugator); }
  /// Y^{-1} Xi^{sign} Y with the inverse written as a unipotent series.
  PolyMatrix as_written(const FactorConstant& f) const {
    return conjugate(f.sign > 0 ? xi_.at(index(f)) : inverse_.at(index(f)), f.conjugator);
  }

 private:
  static std::size_t index(const FactorConstant& f) { return static_cast<std::size_t>(f.target - 1); }
  PolyMatrix conjugate(const PolyMatrix& x, const Matrix& y) const {
    if (y == Matrix::identity(n_)) return x;
    return lift(inverse(y)) * x * lift(y);
  }
  const std::vector<PolyMatrix>& xi_;
  std::vector<PolyMatrix> inverse_;
  std::size_t n_;
};

struct Split {
  std::size_t lead = 0;   // leading inverse factors
  std::size_t trail = 0;  // trailing inverse factors
};

Split split(const std::vector<FactorConstant>& fs, bool allow_lead) {
  Split s;
  if (allow_lead)
    while (s.lead < fs.size() && fs[s.lead].sign < 0) ++s.lead;
  while (s.lead + s.trail < fs.size() && fs[fs.size() - 1 - s.trail].sign < 0) ++s.trail;
  return s;
}

}  // namespace

DiophantineSystem build_full_system(const SystemInput& input, InverseEncoding enc) {
  const auto& e = input.lattice.basis();
  const auto& ep = input.lattice_dag.basis();
  const std::size_t n = input.lattice.dim(), np = input.lattice_dag.dim();
  const std::size_t r = e.size(), rp = ep.size(), d = input.d;
  const auto& sc = input.constants;
  const Roster roster(n, np, r, rp, d);

  DiophantineSystem sys;
  sys.meta = SystemMeta{n, np, r, rp, d, sc.nwords.size(), n == np && r == rp};
  sys.variables = roster.names();
  if (!sys.meta.good) {
    sys.add(Tag::Const, ZPoly(1));
    return sys;
  }

  std::vector<PolyMatrix> xi;
  for (std::size_t k = 0; k < d; ++k) xi.push_back(variable_matrix(np, np, roster.Xi(k, 0, 0)));
  const PolyMatrix H = variable_matrix(n, np, roster.H(0, 0));
  PolyMatrix Z = variable_matrix(r, rp, roster.Z(0, 0));
  const FactorExpander expand(xi, np);
  const bool balanced = enc == InverseEncoding::Balanced;

  for (const auto& wc : sc.relators) {
    const auto& fs = wc.factors;
    const Split sp = balanced ? split(fs, true) : Split{};
    std::vector<PolyMatrix> lhs, rhs;
    for (std::size_t m = sp.lead; m < fs.size() - sp.trail; ++m) lhs.push_back(expand.as_written(fs[m]));
    if (balanced) {
      for (std::size_t m = sp.lead; m-- > 0;) rhs.push_back(expand.plain(fs[m]));
      rhs.push_back(lift(inverse(wc.tail)));
      for (std::size_t m = fs.size(); m-- > fs.size() - sp.trail;) rhs.push_back(expand.plain(fs[m]));
    } else {
      lhs.push_back(lift(wc.tail));
    }
    add_entries(sys, Tag::Beq, product(lhs, np) - product(rhs, np));
  }

  for (std::size_t i = 0; i < sc.nwords.size(); ++i) {
    const auto& wc = sc.nwords[i];
    const auto& fs = wc.factors;
    const Split sp = balanced ? split(fs, false) : Split{};
    PolyMatrix lhs = H;
    for (std::size_t m = 0; m < fs.size() - sp.trail; ++m) lhs = lhs * expand.as_written(fs[m]);
    PolyMatrix rhs = lift(sc.a[i]) * H;
    if (balanced) {
      rhs = rhs * lift(inverse(wc.tail));
      for (std::size_t m = fs.size(); m-- > fs.size() - sp.trail;) rhs = rhs * expand.plain(fs[m]);
    } else {
      lhs = lhs * lift(wc.tail);
    }
    add_entries(sys, Tag::Ceq, lhs - rhs);
  }

  sys.add(Tag::e2, clear_denominators(QPoly::variable(roster.eta0()) * poly_determinant(H) - QPoly(1)));
  sys.add(Tag::e2, clear_denominators(QPoly::variable(roster.zeta0()) * poly_determinant(Z) - QPoly(1)));

  for (std::size_t i = 0; i < r; ++i) {
    PolyMatrix target(np, np);
    for (std::size_t j = 0; j < rp; ++j) {
      PolyMatrix t = lift(ep[j]);
      for (auto& x : t.entries()) x *= Z(i, j);
      target += t;
    }
    add_entries(sys, Tag::e3, lift(e[i]) * H - H * target);
  }

  for (std::size_t k = 0; k < d; ++k) {
    PolyMatrix rhs(np, np);
    for (std::size_t j = 0; j < rp; ++j) {
      PolyMatrix t = lift(ep[j]);
      const QPoly lam = QPoly::variable(roster.lam(k, j));
      for (auto& x : t.entries()) x *= lam;
      rhs += t;
    }
    add_entries(sys, Tag::e4, log_series(PolyMatrix(xi[k] - PolyMatrix::identity(np))) - rhs);
  }
  return sys;
}

DiophantineSystem build_lie_system(const LieLattice& lattice, const LieLattice& lattice_dag) {
  const std::size_t r = lattice.rank(), rp = lattice_dag.rank();
  DiophantineSystem sys;
  sys.meta = SystemMeta{lattice.dim(), lattice_dag.dim(), r, rp, 0, 0, r == rp};
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < rp; ++j) sys.variables.push_back("Z_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
  sys.variables.push_back("zeta0");
  if (!sys.meta.good) {
    sys.add(Tag::Const, ZPoly(1));
    return sys;
  }
  const StructureConstants c = structure_constants(lattice);
  const StructureConstants cp = structure_constants(lattice_dag);
  const PolyMatrix Z = variable_matrix(r, rp, 0);
  const QPoly zeta = QPoly::variable(static_cast<Var>(r * rp));

  sys.add(Tag::e2, clear_denominators(zeta * poly_determinant(Z) - QPoly(1)));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i + 1; j < r; ++j)
      for (std::size_t m = 0; m < rp; ++m) {
        QPoly f;
        for (std::size_t a = 0; a < rp; ++a)
          for (std::size_t b = 0; b < rp; ++b)
            if (sgn(cp(a, b, m)) != 0) f += Z(i, a) * Z(j, b) * cp(a, b, m);
        for (std::size_t k = 0; k < r; ++k)
          if (sgn(c(i, j, k)) != 0) f -= Z(k, m) * c(i, j, k);
        sys.add(Tag::e3, clear_denominators(f));
      }
  return sys;
}

bool ResidualReport::all_zero() const {
  for (const auto& [t, v] : max_residual)
    if (v != 0) return false;
  return true;
}

ResidualReport verify_witness(const DiophantineSystem& system, std::span<const Integer> witness,
                              std::optional<Integer> modulus) {
  if (witness.size() != system.variables.size())
    throw std::invalid_argument("verify_witness: assignment has " + std::to_string(witness.size()) +
                                " values for " + std::to_string(system.variables.size()) + " variables");
  if (modulus && *modulus < 2) throw std::invalid_argument("verify_witness: modulus must be at least 2");
  ResidualReport rep;
  rep.modulus = modulus;
  for (std::size_t k = 0; k < system.size(); ++k) {
    Integer v = system.polynomials[k].evaluate<Integer>([&](Var x) -> const Integer& { return witness[x]; });
    v = modulus ? mod_floor(v, *modulus) : Integer(abs(v));
    auto [it, inserted] = rep.max_residual.try_emplace(system.tags[k], v);
    if (!inserted && v > it->second) it->second = v;
  }
  return rep;
}

namespace {

std::optional<Integer> integer_of(const Scalar& q) {
  if (q.get_den() != 1) return std::nullopt;
  return q.get_num();
}

}  // namespace

std::optional<Witness> complete_witness(const SystemInput& input, const Matrix& H, std::span<const Matrix> xi) {
  const auto& L = input.lattice;
  const auto& Lp = input.lattice_dag;
  const std::size_t n = L.dim(), np = Lp.dim(), r = L.rank(), rp = Lp.rank();
  if (n != np || r != rp) return std::nullopt;
  if (H.rows() != n || H.cols() != np || xi.size() != input.d) throw std::invalid_argument("complete_witness: shape mismatch");
  if (!is_integral(H)) return std::nullopt;
  const Scalar detH = determinant(H);
  if (sgn(detH) == 0) return std::nullopt;
  const auto eta = integer_of(1 / detH);
  if (!eta) return std::nullopt;

  const Matrix Hi = inverse(H);
  Matrix Z(r, rp);
  for (std::size_t i = 0; i < r; ++i) {
    auto c = Lp.coordinates(Hi * L.basis()[i] * H);
    if (!c) return std::nullopt;
    for (std::size_t j = 0; j < rp; ++j) Z(i, j) = (*c)[j];
  }
  const Scalar detZ = determinant(Z);
  if (sgn(detZ) == 0) return std::nullopt;
  const auto zeta = integer_of(1 / detZ);
  if (!zeta) return std::nullopt;

  const Roster roster(n, np, r, rp, input.d);
  Witness w(roster.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < np; ++j) w[roster.H(i, j)] = H(i, j).get_num();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < rp; ++j) w[roster.Z(i, j)] = Z(i, j).get_num();
  for (std::size_t k = 0; k < input.d; ++k) {
    if (xi[k].dim() != np || !is_integral(xi[k])) return std::nullopt;
    auto lam = lattice_membership(xi[k], Lp);
    if (!lam) return std::nullopt;
    for (std::size_t i = 0; i < np; ++i)
      for (std::size_t j = 0; j < np; ++j) w[roster.Xi(k, i, j)] = xi[k](i, j).get_num();
    for (std::size_t j = 0; j < rp; ++j) w[roster.lam(k, j)] = (*lam)[j];
  }
  w[roster.eta0()] = *eta;
  w[roster.zeta0()] = *zeta;
  return w;
}

std::optional<Witness> lie_witness(const Matrix& Z) {
  if (!Z.is_square() || !is_integral(Z)) return std::nullopt;
  const Scalar det = determinant(Z);
  if (sgn(det) == 0) return std::nullopt;
  auto zeta = integer_of(1 / det);
  if (!zeta) return std::nullopt;
  Witness w;
  for (const auto& x : Z.entries()) w.push_back(x.get_num());
  w.push_back(*zeta);
  return w;
}

// ---------------------------------------------------------------------------
// dio v1 text format

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

std::string serialize_system(const DiophantineSystem& sys) {
  std::ostringstream os;
  const auto& m = sys.meta;
  os << "dio v1\n";
  os << "meta n=" << m.n << " nprime=" << m.nprime << " r=" << m.r << " rprime=" << m.rprime << " d=" << m.d
     << " s=" << m.s << " good=" << (m.good ? 1 : 0) << '\n';
  for (const auto& v : sys.variables) os << "var " << v << '\n';
  auto name = [&](Var v) -> std::string { return sys.variables.at(v); };
  for (std::size_t k = 0; k < sys.size(); ++k)
    os << "poly " << tag_name(sys.tags[k]) << ": " << format_polynomial(sys.polynomials[k], name) << '\n';
  return os.str();
}

namespace {

class LineCursor {
 public:
  LineCursor(const std::string& text, std::size_t line) : s_(text), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_, pos_ + 1); }
  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return done() ? '\0' : s_[pos_]; }
  void skip_spaces() {
    while (!done() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  void expect(const std::string& lit) {
    if (s_.compare(pos_, lit.size(), lit) != 0) fail("expected '" + lit + "'");
    pos_ += lit.size();
  }
  std::string name() {
    const std::size_t start = pos_;
    if (done() || !(std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_')) fail("expected a name");
    while (!done() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
    return s_.substr(start, pos_ - start);
  }
  std::string digits() {
    const std::size_t start = pos_;
    while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (start == pos_) fail("expected digits");
    return s_.substr(start, pos_ - start);
  }
  std::size_t pos() const { return pos_; }
  void set_pos(std::size_t p) { pos_ = p; }

 private:
  const std::string& s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

ZPoly parse_polynomial(LineCursor& cur, const std::unordered_map<std::string, Var>& vars) {
  std::vector<ZPoly::Term> terms;
  cur.skip_spaces();
  int sign = 1;
  if (cur.peek() == '-' || cur.peek() == '+') {
    if (cur.peek() == '-') sign = -1;
    cur.expect(std::string(1, cur.peek()));
    cur.skip_spaces();
  }
  while (true) {
    Integer coef = 1;
    Monomial mono;
    bool need_factor = true;
    if (std::isdigit(static_cast<unsigned char>(cur.peek()))) {
      coef = Integer(cur.digits());
      need_factor = false;
    }
    while (true) {
      cur.skip_spaces();
      if (!need_factor) {
        if (cur.peek() != '*') break;
        cur.expect("*");
        cur.skip_spaces();
      }
      const std::size_t at = cur.pos();
      const std::string nm = cur.name();
      auto it = vars.find(nm);
      if (it == vars.end()) {
        cur.set_pos(at);
        cur.fail("undeclared variable '" + nm + "'");
      }
      std::uint32_t e = 1;
      if (cur.peek() == '^') {
        cur.expect("^");
        const std::size_t eat = cur.pos();
        const std::string ds = cur.digits();
        if (ds.size() > 9 || std::stoul(ds) == 0) {
          cur.set_pos(eat);
          cur.fail("bad exponent");
        }
        e = static_cast<std::uint32_t>(std::stoul(ds));
      }
      mono = mono * Monomial::variable(it->second, e);
      need_factor = false;
    }
    terms.push_back({std::move(mono), sign < 0 ? Integer(-coef) : coef});
    cur.skip_spaces();
    if (cur.done()) break;
    if (cur.peek() == '+') {
      sign = 1;
    } else if (cur.peek() == '-') {
      sign = -1;
    } else {
      cur.fail("expected '+' or '-'");
    }
    cur.set_pos(cur.pos() + 1);
    cur.skip_spaces();
  }
  return ZPoly::from_terms(std::move(terms));
}

std::size_t parse_size(LineCursor& cur) {
  const std::size_t at = cur.pos();
  const std::string ds = cur.digits();
  if (ds.size() > 9) {
    cur.set_pos(at);
    cur.fail("number too large");
  }
  return std::stoul(ds);
}

}  // namespace

DiophantineSystem parse_system(const std::string& text) {
  std::vector<std::string> lines;
  {
    std::istringstream is(text);
    std::string l;
    while (std::getline(is, l)) {
      if (!l.empty() && l.back() == '\r') l.pop_back();
      lines.push_back(l);
    }
  }
  if (lines.empty() || lines[0] != "dio v1") throw ParseError("expected header 'dio v1'", 1, 1);
  DiophantineSystem sys;
  std::unordered_map<std::string, Var> vars;
  bool have_meta = false;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::string& line = lines[li];
    LineCursor cur(line, li + 1);
    if (line.empty()) continue;
    if (line.rfind("meta ", 0) == 0) {
      if (have_meta) cur.fail("duplicate meta line");
      cur.expect("meta");
      const char* keys[] = {"n", "nprime", "r", "rprime", "d", "s", "good"};
      std::size_t vals[7];
      for (int k = 0; k < 7; ++k) {
        cur.skip_spaces();
        cur.expect(std::string(keys[k]) + "=");
        vals[k] = parse_size(cur);
      }
      cur.skip_spaces();
      if (!cur.done()) cur.fail("unexpected text after meta fields");
      if (vals[6] > 1) cur.fail("good must be 0 or 1");
      sys.meta = SystemMeta{vals[0], vals[1], vals[2], vals[3], vals[4], vals[5], vals[6] == 1};
      have_meta = true;
    } else if (line.rfind("var ", 0) == 0) {
      if (!have_meta) cur.fail("var before meta");
      if (!sys.polynomials.empty()) cur.fail("var after the first poly");
      cur.expect("var ");
      const std::size_t at = cur.pos();
      std::string nm = cur.name();
      if (!cur.done()) cur.fail("unexpected text after variable name");
      if (vars.count(nm)) {
        cur.set_pos(at);
        cur.fail("duplicate variable '" + nm + "'");
      }
      vars.emplace(nm, static_cast<Var>(sys.variables.size()));
      sys.variables.push_back(std::move(nm));
    } else if (line.rfind("poly ", 0) == 0) {
      if (!have_meta) cur.fail("poly before meta");
      cur.expect("poly ");
      const std::size_t at = cur.pos();
      std::string tn = cur.name();
      auto tag = parse_tag(tn);
      if (!tag) {
        cur.set_pos(at);
        cur.fail("unknown tag '" + tn + "'");
      }
      cur.expect(":");
      ZPoly p = parse_polynomial(cur, vars);
      sys.add(*tag, std::move(p));
    } else {
      cur.fail("expected 'meta', 'var' or 'poly'");
    }
  }
  if (!have_meta) throw ParseError("missing meta line", lines.size() + 1, 1);
  return sys;
}

}  // namespace vpiso
