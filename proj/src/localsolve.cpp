#include "vpiso/localsolve.hpp"

#include <algorithm>
#include <stdexcept>

namespace vpiso {

bool is_prime(std::uint64_t p) {
  if (p < 2) return false;
  for (std::uint64_t q = 2; q * q <= p; ++q)
    if (p % q == 0) return false;
  return true;
}

std::vector<std::uint64_t> prime_set(std::span<const Integer> extra, std::uint64_t bound) {
  std::vector<std::uint64_t> ps;
  for (std::uint64_t q = 2; q <= bound; ++q)
    if (is_prime(q)) ps.push_back(q);
  for (const auto& x : extra) {
    Integer v = abs(x);
    if (v == 0) continue;
    for (unsigned long q = 2; q < 1'000'000 && v > 1; ++q) {
      if (mpz_divisible_ui_p(v.get_mpz_t(), q) == 0) continue;
      ps.push_back(q);
      while (mpz_divisible_ui_p(v.get_mpz_t(), q) != 0) v /= q;
    }
    if (v > 1 && v.fits_ulong_p() && mpz_probab_prime_p(v.get_mpz_t(), 30) > 0) ps.push_back(v.get_ui());
  }
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
  return ps;
}

namespace {

constexpr std::uint64_t kMaxModulus = std::uint64_t{1} << 62;

std::uint64_t checked_power(std::uint64_t p, unsigned k) {
  std::uint64_t m = 1;
  for (unsigned i = 0; i < k; ++i) {
    if (m > kMaxModulus / p) throw std::invalid_argument("p^k must stay below 2^62");
    m *= p;
  }
  return m;
}

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

struct CompiledPoly {
  struct Term {
    std::uint64_t coef;
    const std::vector<std::pair<Var, std::uint32_t>>* powers;
  };
  std::vector<Term> terms;

  std::uint64_t eval(const std::vector<std::uint64_t>& x, std::uint64_t m) const {
    std::uint64_t acc = 0;
    for (const auto& t : terms) {
      std::uint64_t v = t.coef;
      for (const auto& [var, e] : *t.powers)
        for (std::uint32_t i = 0; i < e && v != 0; ++i) v = mulmod(v, x[var], m);
      acc += v;
      if (acc >= m) acc -= m;
    }
    return acc;
  }
};

CompiledPoly compile(const ZPoly& p, std::uint64_t m) {
  CompiledPoly c;
  const Integer M(static_cast<unsigned long>(m));
  for (const auto& [mono, coef] : p.terms()) {
    const std::uint64_t r = mod_floor(coef, M).get_ui();
    if (r != 0) c.terms.push_back({r, &mono.powers});
  }
  return c;
}

struct LevelResult {
  std::vector<std::vector<std::uint64_t>> points;
  bool truncated = false;         // some solution not recorded
  bool budget_exhausted = false;  // node budget ran out
};

/// Digit-by-digit lifting of solution sets with a node budget shared across
/// levels.
class Lifter {
 public:
  Lifter(const DiophantineSystem& sys, std::uint64_t p, const SearchBudget& budget)
      : sys_(sys), p_(p), budget_(budget), by_last_(sys.variables.size()) {
    for (std::size_t i = 0; i < sys.size(); ++i) {
      const auto vars = sys.polynomials[i].variables();
      if (vars.empty())
        constants_.push_back(i);
      else
        by_last_[vars.back()].push_back(i);
    }
  }

  std::uint64_t nodes() const { return nodes_; }

  LevelResult lift(const std::vector<std::vector<std::uint64_t>>& base, unsigned level) {
    LevelResult res;
    m_ = checked_power(p_, level);
    weight_ = m_ / p_;
    compiled_.clear();
    for (const auto& poly : sys_.polynomials) compiled_.push_back(compile(poly, m_));
    for (std::size_t i : constants_)
      if (!compiled_[i].terms.empty()) return res;
    res_ = &res;
    for (const auto& b : base) {
      base_ = &b;
      x_ = b;
      if (!dfs(0)) break;
    }
    return res;
  }

 private:
  // false aborts the whole level
  bool dfs(std::size_t v) {
    if (v == x_.size()) {
      if (res_->points.size() >= budget_.max_solutions) {
        res_->truncated = true;
        return false;
      }
      res_->points.push_back(x_);
      return true;
    }
    for (std::uint64_t t = 0; t < p_; ++t) {
      if (nodes_ >= budget_.max_nodes) {
        res_->truncated = res_->budget_exhausted = true;
        return false;
      }
      ++nodes_;
      x_[v] = (*base_)[v] + t * weight_;
      bool ok = true;
      for (std::size_t i : by_last_[v])
        if (compiled_[i].eval(x_, m_) != 0) {
          ok = false;
          break;
        }
      if (ok && !dfs(v + 1)) return false;
    }
    return true;
  }

  const DiophantineSystem& sys_;
  std::uint64_t p_;
  SearchBudget budget_;
  std::vector<std::vector<std::size_t>> by_last_;
  std::vector<std::size_t> constants_;
  std::vector<CompiledPoly> compiled_;
  std::uint64_t m_ = 1, weight_ = 1, nodes_ = 0;
  const std::vector<std::uint64_t>* base_ = nullptr;
  std::vector<std::uint64_t> x_;
  LevelResult* res_ = nullptr;
};

void check_prime(std::uint64_t p) {
  if (!is_prime(p)) throw std::invalid_argument(std::to_string(p) + " is not prime");
}

Integer power_of(std::uint64_t p, unsigned k) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), p, k);
  return r;
}

long valuation(const Integer& z, std::uint64_t p) {
  if (z == 0) return -1;
  Integer t = z;
  const Integer P(static_cast<unsigned long>(p));
  return static_cast<long>(mpz_remove(t.get_mpz_t(), t.get_mpz_t(), P.get_mpz_t()));
}

long valuation(const Scalar& q, std::uint64_t p) { return valuation(q.get_num(), p) - valuation(q.get_den(), p); }

Integer eval_exact(const ZPoly& f, std::span<const Integer> x) {
  return f.evaluate<Integer>([&](Var v) -> const Integer& { return x[v]; });
}

Matrix jacobian(const DiophantineSystem& sys, std::span<const Integer> x, const std::vector<std::size_t>& rows,
                const std::vector<std::size_t>& cols) {
  Matrix j(rows.size(), cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a) {
    const ZPoly& f = sys.polynomials[rows[a]];
    const auto vars = f.variables();
    for (std::size_t b = 0; b < cols.size(); ++b)
      if (std::binary_search(vars.begin(), vars.end(), static_cast<Var>(cols[b])))
        j(a, b) = Scalar(eval_exact(f.derivative(static_cast<Var>(cols[b])), x));
  }
  return j;
}

bool is_complete(const DiophantineSystem& sys, const SubsystemSelection& sel) {
  std::vector<bool> chosen(sys.size(), false);
  for (std::size_t i : sel.equations) chosen.at(i) = true;
  for (std::size_t i = 0; i < sys.size(); ++i)
    if (!chosen[i] && !sys.polynomials[i].is_zero()) return false;
  return true;
}

bool vanishes_mod(const DiophantineSystem& sys, std::span<const Integer> x, const Integer& m) {
  for (const auto& f : sys.polynomials)
    if (mod_floor(eval_exact(f, x), m) != 0) return false;
  return true;
}

bool exact_zero(const DiophantineSystem& sys, std::span<const Integer> x) {
  for (const auto& f : sys.polynomials)
    if (eval_exact(f, x) != 0) return false;
  return true;
}

}  // namespace

SolutionSet solutions_mod(const DiophantineSystem& system, std::uint64_t p, unsigned k, const SearchBudget& budget) {
  check_prime(p);
  if (k < 1) throw std::invalid_argument("solutions_mod: level must be at least 1");
  SolutionSet out;
  out.p = p;
  out.level = k;
  out.modulus = checked_power(p, k);
  Lifter lifter(system, p, budget);
  std::vector<std::vector<std::uint64_t>> base{std::vector<std::uint64_t>(system.variables.size(), 0)};
  bool truncated = false;
  unsigned reached = 0;
  for (unsigned j = 1; j <= k; ++j) {
    LevelResult r = lifter.lift(base, j);
    truncated = truncated || r.truncated;
    base = std::move(r.points);
    reached = j;
    if (base.empty() || r.budget_exhausted) break;
  }
  out.nodes = lifter.nodes();
  out.truncated = truncated;
  // an early stop on the budget leaves points of a lower level
  if (reached < k) base.clear();
  out.points = std::move(base);
  return out;
}

std::optional<HenselCertificate> hensel_certificate(const DiophantineSystem& system, std::uint64_t p,
                                                    std::span<const Integer> x0, unsigned e,
                                                    const SubsystemSelection& selection) {
  check_prime(p);
  if (selection.equations.size() != selection.variables.size())
    throw std::invalid_argument("hensel_certificate: selection is not square");
  if (x0.size() != system.variables.size()) throw std::invalid_argument("hensel_certificate: incomplete point");
  for (std::size_t i : selection.equations)
    if (i >= system.size()) throw std::invalid_argument("hensel_certificate: equation index out of range");
  for (std::size_t v : selection.variables)
    if (v >= system.variables.size()) throw std::invalid_argument("hensel_certificate: variable index out of range");
  if (!vanishes_mod(system, x0, power_of(p, 2 * e + 1))) return std::nullopt;
  const Scalar det = determinant(jacobian(system, x0, selection.equations, selection.variables));
  if (sgn(det) == 0) return std::nullopt;
  const long v = valuation(det, p);
  if (v > static_cast<long>(e)) return std::nullopt;
  HenselCertificate c;
  c.p = p;
  c.point.assign(x0.begin(), x0.end());
  c.e = e;
  c.valuation = static_cast<unsigned>(v);
  c.selection = selection;
  c.complete = is_complete(system, selection);
  return c;
}

SubsystemSelection select_subsystem(const DiophantineSystem& system, std::uint64_t p, std::span<const Integer> x0,
                                    unsigned level, unsigned& total) {
  std::vector<std::size_t> rows, cols;
  std::vector<bool> used_var(system.variables.size(), false);
  for (std::size_t i = 0; i < system.size(); ++i) {
    if (system.polynomials[i].is_zero()) continue;
    rows.push_back(i);
    for (Var v : system.polynomials[i].variables()) used_var[v] = true;
  }
  for (std::size_t v = 0; v < used_var.size(); ++v)
    if (used_var[v]) cols.push_back(v);
  Matrix j = jacobian(system, x0, rows, cols);
  std::vector<bool> row_done(rows.size(), false), col_done(cols.size(), false);
  SubsystemSelection sel;
  total = 0;
  while (true) {
    long best = -1;
    std::size_t bi = 0, bj = 0;
    for (std::size_t a = 0; a < rows.size(); ++a) {
      if (row_done[a]) continue;
      for (std::size_t b = 0; b < cols.size(); ++b) {
        if (col_done[b] || sgn(j(a, b)) == 0) continue;
        const long v = valuation(j(a, b), p);
        if (best < 0 || v < best) {
          best = v;
          bi = a;
          bj = b;
        }
      }
    }
    if (best < 0 || 2 * (total + static_cast<unsigned long>(best)) + 1 > level) break;
    total += static_cast<unsigned>(best);
    row_done[bi] = col_done[bj] = true;
    sel.equations.push_back(rows[bi]);
    sel.variables.push_back(cols[bj]);
    for (std::size_t a = 0; a < rows.size(); ++a) {
      if (row_done[a] || sgn(j(a, bj)) == 0) continue;
      const Scalar f = j(a, bj) / j(bi, bj);
      for (std::size_t b = 0; b < cols.size(); ++b) j(a, b) -= f * j(bi, b);
    }
  }
  std::sort(sel.equations.begin(), sel.equations.end());
  std::sort(sel.variables.begin(), sel.variables.end());
  return sel;
}

std::optional<std::vector<Integer>> newton_lift(const DiophantineSystem& system, std::uint64_t p,
                                                std::span<const Integer> x0, const SubsystemSelection& sel,
                                                unsigned level) {
  const Integer M = power_of(p, level);
  std::vector<Integer> x;
  for (const auto& v : x0) x.push_back(mod_floor(v, M));
  for (unsigned iter = 0; iter < 2 * level + 8; ++iter) {
    std::vector<Scalar> f;
    bool done = true;
    for (std::size_t i : sel.equations) {
      Integer v = eval_exact(system.polynomials[i], x);
      if (mod_floor(v, M) != 0) done = false;
      f.emplace_back(v);
    }
    if (done) return x;
    const Matrix j = jacobian(system, x, sel.equations, sel.variables);
    if (sgn(determinant(j)) == 0) return std::nullopt;
    const Matrix ji = inverse(j);
    for (std::size_t b = 0; b < sel.variables.size(); ++b) {
      Scalar delta = 0;
      for (std::size_t a = 0; a < f.size(); ++a) delta += ji(b, a) * f[a];
      if (valuation(delta.get_den(), p) > 0) return std::nullopt;
      Integer inv;
      mpz_invert(inv.get_mpz_t(), delta.get_den_mpz_t(), M.get_mpz_t());
      Integer& xv = x[sel.variables[b]];
      xv = mod_floor(xv - delta.get_num() * inv, M);
    }
  }
  return std::nullopt;
}

bool reverify(const DiophantineSystem& system, const HenselCertificate& cert) {
  const unsigned level = 2 * (cert.e + 1) + 4;
  auto x = newton_lift(system, cert.p, cert.point, cert.selection, level);
  if (!x) return false;
  if (!vanishes_mod(system, *x, power_of(cert.p, level))) return false;
  const Scalar det = determinant(jacobian(system, *x, cert.selection.equations, cert.selection.variables));
  return sgn(det) != 0 && valuation(det, cert.p) == static_cast<long>(cert.valuation);
}

const char* status_name(PrimeStatus s) {
  switch (s) {
    case PrimeStatus::CertifiedSolvable: return "CertifiedSolvable";
    case PrimeStatus::CertifiedUnsolvable: return "CertifiedUnsolvable";
    case PrimeStatus::ProbablySolvable: return "ProbablySolvable";
    case PrimeStatus::Unknown: return "Unknown";
  }
  return "?";
}

const char* overall_name(Overall o) {
  switch (o) {
    case Overall::LocallySolvableOnSet: return "LocallySolvableOnSet";
    case Overall::NotLocallySolvable: return "NotLocallySolvable";
    case Overall::Inconclusive: return "Inconclusive";
  }
  return "?";
}

PrimeVerdict decide_prime(const DiophantineSystem& system, std::uint64_t p, const LocalBudgets& budgets) {
  check_prime(p);
  PrimeVerdict verdict;
  verdict.p = p;
  const std::size_t nvars = system.variables.size();

  for (const auto& w : budgets.candidates)
    if (w.size() == nvars && exact_zero(system, w)) {
      verdict.status = PrimeStatus::CertifiedSolvable;
      verdict.exact_witness = w;
      verdict.note = "integer witness";
      return verdict;
    }

  Lifter lifter(system, p, SearchBudget{budgets.max_nodes, budgets.max_solutions});
  std::vector<std::vector<std::uint64_t>> base{std::vector<std::uint64_t>(nvars, 0)};
  bool exhaustive = true;
  unsigned probable = 0;
  for (unsigned k = 1; k <= budgets.max_level; ++k) {
    std::uint64_t m;
    try {
      m = checked_power(p, k);
    } catch (const std::invalid_argument&) {
      verdict.note = "level limited by 64-bit residues";
      break;
    }
    LevelResult res = lifter.lift(base, k);
    verdict.nodes = lifter.nodes();
    verdict.level = k;
    if (res.points.empty()) {
      if (exhaustive && !res.budget_exhausted) {
        verdict.status = PrimeStatus::CertifiedUnsolvable;
        verdict.note = "no solutions mod " + std::to_string(p) + "^" + std::to_string(k);
        return verdict;
      }
      verdict.note = "node budget exhausted at level " + std::to_string(k);
      break;
    }

    const std::size_t attempts = std::min(res.points.size(), budgets.max_certificate_attempts);
    for (std::size_t a = 0; a < attempts; ++a) {
      const auto& pt = res.points[a];
      std::vector<Integer> x, balanced;
      for (auto v : pt) {
        x.emplace_back(static_cast<unsigned long>(v));
        balanced.push_back(v > m / 2 ? Integer(static_cast<unsigned long>(v)) - Integer(static_cast<unsigned long>(m))
                                     : Integer(static_cast<unsigned long>(v)));
      }
      for (const auto* cand : {&x, &balanced})
        if (exact_zero(system, *cand)) {
          verdict.status = PrimeStatus::CertifiedSolvable;
          verdict.exact_witness = *cand;
          verdict.note = "integer witness from a residue representative";
          return verdict;
        }
      unsigned e = 0;
      const SubsystemSelection sel = select_subsystem(system, p, x, k, e);
      if (is_complete(system, sel)) {
        if (auto cert = hensel_certificate(system, p, x, e, sel)) {
          verdict.status = PrimeStatus::CertifiedSolvable;
          verdict.certificate = std::move(cert);
          verdict.note = "Hensel certificate";
          return verdict;
        }
      } else if (budgets.probe_level > k) {
        if (auto y = newton_lift(system, p, x, sel, budgets.probe_level)) {
          unsigned K = k;
          while (K < budgets.probe_level && vanishes_mod(system, *y, power_of(p, K + 1))) ++K;
          probable = std::max(probable, K);
        }
      }
    }
    probable = std::max(probable, k);
    if (res.truncated) exhaustive = false;
    if (res.budget_exhausted) {
      verdict.note = "node budget exhausted at level " + std::to_string(k);
      break;
    }
    base = std::move(res.points);
  }
  if (probable > 0) {
    verdict.status = PrimeStatus::ProbablySolvable;
    verdict.level = probable;
    if (verdict.note.empty()) verdict.note = "solutions found at every level searched; no certificate";
  } else {
    verdict.status = PrimeStatus::Unknown;
  }
  return verdict;
}

LocalSolvabilityReport decide_local(const DiophantineSystem& system, std::span<const std::uint64_t> primes,
                                    const LocalBudgets& budgets) {
  if (primes.empty()) throw std::invalid_argument("decide_local: empty prime list");
  LocalSolvabilityReport rep;
  rep.primes.assign(primes.begin(), primes.end());
  std::sort(rep.primes.begin(), rep.primes.end());
  rep.primes.erase(std::unique(rep.primes.begin(), rep.primes.end()), rep.primes.end());

  LocalBudgets b = budgets;
  std::optional<Witness> exact;
  for (std::uint64_t p : rep.primes) {
    rep.verdicts.push_back(decide_prime(system, p, b));
    const auto& v = rep.verdicts.back();
    if (!exact && v.exact_witness) {
      exact = v.exact_witness;
      b.candidates.insert(b.candidates.begin(), *exact);
    }
  }
  if (exact)
    for (auto& v : rep.verdicts)
      if (!v.exact_witness) {
        v.status = PrimeStatus::CertifiedSolvable;
        v.exact_witness = exact;
        v.note = "integer witness found at another prime";
      }

  bool all = true;
  for (const auto& v : rep.verdicts) {
    if (v.status == PrimeStatus::CertifiedUnsolvable && !rep.failing_prime) rep.failing_prime = v.p;
    all = all && v.status == PrimeStatus::CertifiedSolvable;
  }
  rep.overall = rep.failing_prime ? Overall::NotLocallySolvable
                                  : (all ? Overall::LocallySolvableOnSet : Overall::Inconclusive);
  std::string list;
  for (std::uint64_t p : rep.primes) list += (list.empty() ? "" : ",") + std::to_string(p);
  rep.scope = "primes outside {" + list + "} were not examined";
  return rep;
}

}  // namespace vpiso
