#include "vpiso/decide.hpp"

namespace vpiso {

const char* verdict_name(VerdictKind k) {
  switch (k) {
    case VerdictKind::ProfinitelyIsomorphic: return "ProfinitelyIsomorphic";
    case VerdictKind::NotProfinitelyIsomorphic: return "NotProfinitelyIsomorphic";
    case VerdictKind::Undetermined: return "Undetermined";
  }
  return "?";
}

namespace {

bool order_fits(std::uint64_t m, std::size_t rank, std::uint64_t cap) {
  std::uint64_t order = 1;
  for (std::size_t i = 0; i < rank; ++i) {
    if (order > cap / m) return false;
    order *= m;
  }
  return true;
}

void add_determinant(std::vector<Integer>& out, const Matrix& m) {
  const Scalar det = determinant(m);
  out.push_back(det.get_num());
  out.push_back(det.get_den());
}

void add_lattice(std::vector<Integer>& out, const LieLattice& L) {
  out.push_back(L.denominator());
  if (!L.basis().empty()) out.push_back(factorial(static_cast<unsigned>(L.basis().front().rows())));
}

}  // namespace

std::vector<std::uint64_t> default_primes(const LieLattice& L, const LieLattice& Lp, std::uint64_t bound) {
  std::vector<Integer> extra;
  add_lattice(extra, L);
  add_lattice(extra, Lp);
  return prime_set(extra, bound);
}

std::vector<std::uint64_t> default_primes(const SystemInput& input, std::uint64_t bound) {
  std::vector<Integer> extra;
  add_lattice(extra, input.lattice);
  add_lattice(extra, input.lattice_dag);
  for (const auto* group : {&input.constants.relators, &input.constants.nwords})
    for (const auto& w : *group) {
      add_determinant(extra, w.tail);
      for (const auto& f : w.factors) add_determinant(extra, f.conjugator);
    }
  for (const auto& a : input.constants.a) add_determinant(extra, a);
  return prime_set(extra, bound);
}

Procedure1::Procedure1(const InstancePair& inst, const DecideConfig& cfg) : inst_(&inst) {
  schedule_.push_back(0);
  if (!inst.profinite_fitting) return;
  schedule_.push_back(1);
  const std::uint64_t cap = std::min<std::uint64_t>(cfg.max_quotient_order, QuotientGroup::kMaxOrder);
  for (std::uint64_t m = 2; m <= cfg.max_modulus; ++m) {
    if (!order_fits(m, inst.g.lattice().rank(), cap) || !order_fits(m, inst.gdag.lattice().rank(), cap)) continue;
    if (!is_admissible_modulus(inst.g.lattice(), m) || !is_admissible_modulus(inst.gdag.lattice(), m)) continue;
    moduli_.push_back(m);
    schedule_.push_back(m);
  }
}

std::optional<NegativeCertificate> Procedure1::step() {
  if (done()) return std::nullopt;
  const std::uint64_t s = schedule_[stage_++];
  const auto& g = inst_->g;
  const auto& h = inst_->gdag;
  if (s <= 1) {
    const auto& a = s == 0 ? g.abelianization.invariants() : g.quotient.invariants();
    const auto& b = s == 0 ? h.abelianization.invariants() : h.quotient.invariants();
    if (a == b) return std::nullopt;
    NegativeCertificate c;
    c.kind = s == 0 ? "abelianization" : "quotient";
    c.invariant = a.free_rank != b.free_rank ? "free_rank" : "invariant_factors";
    c.left = to_string(a);
    c.right = to_string(b);
    return c;
  }
  const std::vector<std::uint64_t> m{s};
  const auto div = fingerprint_compare(fingerprint(g.tgroup, m), fingerprint(h.tgroup, m));
  if (!div) return std::nullopt;
  NegativeCertificate c;
  c.kind = "fingerprint";
  c.modulus = div->modulus;
  c.invariant = div->invariant;
  c.left = div->left;
  c.right = div->right;
  return c;
}

std::optional<NegativeCertificate> procedure1(const InstancePair& inst, const DecideConfig& cfg) {
  Procedure1 p(inst, cfg);
  while (!p.done())
    if (auto c = p.step()) return c;
  return std::nullopt;
}

bool reverify_positive(const PositiveReport& pos) {
  if (pos.report.overall != Overall::LocallySolvableOnSet) return false;
  for (const auto& v : pos.report.verdicts) {
    if (v.status != PrimeStatus::CertifiedSolvable) return false;
    if (v.exact_witness) {
      if (!verify_witness(pos.system, *v.exact_witness).all_zero()) return false;
    } else if (!v.certificate || !v.certificate->complete || !reverify(pos.system, *v.certificate)) {
      return false;
    }
  }
  return true;
}

Procedure2::Procedure2(const InstancePair& inst, const DecideConfig& cfg)
    : inst_(&inst), cfg_(cfg), stream_(inst, cfg.height), lie_pending_(cfg.mode == Mode::LieFirst) {
  if (!inst.profinite_fitting) {
    done_ = true;
    result_.exhausted = true;
  }
}

void Procedure2::finish_stream() {
  done_ = true;
  result_.exhausted = true;
}

bool Procedure2::step() {
  if (done_) return false;
  const auto& L = inst_->g.lattice();
  const auto& Lp = inst_->gdag.lattice();

  if (lie_pending_) {
    lie_pending_ = false;
    const DiophantineSystem lie = build_lie_system(L, Lp);
    LocalBudgets b = cfg_.local;
    if (L.rank() == Lp.rank())
      if (auto w = lie_witness(Matrix::identity(L.rank()))) b.candidates.push_back(*w);
    auto rep = decide_local(lie, cfg_.primes.empty() ? default_primes(L, Lp) : cfg_.primes, b);
    for (const auto& v : rep.verdicts) result_.nodes += v.nodes;
    result_.lie_report = rep;
    if (rep.overall != Overall::NotLocallySolvable) return false;
    NegativeCertificate c;
    c.kind = "lie_subsystem";
    c.prime = rep.failing_prime;
    for (const auto& v : rep.verdicts)
      if (v.p == *rep.failing_prime) c.level = v.level;
    result_.negative = c;
    const std::string note = "Lie subsystem unsolvable at p=" + std::to_string(*rep.failing_prime);
    while (index_ < cfg_.max_theta) {
      auto t = stream_.next();
      if (!t) break;
      result_.outcomes.push_back(ThetaOutcome{index_++, std::move(*t), "killed", std::nullopt, note});
    }
    done_ = true;
    return true;
  }

  if (index_ >= cfg_.max_theta) {
    finish_stream();
    return false;
  }
  auto t = stream_.next();
  if (!t) {
    finish_stream();
    if (index_ > 0 && all_unsolvable_ && stream_.exhaustive()) {
      NegativeCertificate c;
      c.kind = "all_theta";
      c.prime = first_failing_prime_;
      c.invariant = std::to_string(index_) + " theta";
      result_.negative = c;
      return true;
    }
    return false;
  }

  ThetaOutcome out;
  out.index = index_++;
  out.theta = std::move(*t);
  std::optional<SystemInput> input;
  try {
    input = system_input(*inst_, out.theta);
  } catch (const std::exception& e) {
    out.status = "inconsistent";
    out.note = e.what();
    all_unsolvable_ = false;
    result_.outcomes.push_back(std::move(out));
    return false;
  }
  DiophantineSystem sys = build_full_system(*input);
  if (!sys.meta.good) {
    out.status = "inconclusive";
    out.note = "matrix sizes or Hirsch lengths differ; the system is outside the good case";
    all_unsolvable_ = false;
    result_.outcomes.push_back(std::move(out));
    return false;
  }
  LocalBudgets b = cfg_.local;
  if (auto w = identity_candidate(*inst_, *input, out.theta)) b.candidates.push_back(*w);
  auto rep = decide_local(sys, cfg_.primes.empty() ? default_primes(*input) : cfg_.primes, b);
  for (const auto& v : rep.verdicts) result_.nodes += v.nodes;
  out.report = rep;
  bool stop = false;
  if (rep.overall == Overall::LocallySolvableOnSet) {
    PositiveReport pos{out.index, out.theta, std::move(sys), rep};
    if (reverify_positive(pos)) {
      out.status = "positive";
      result_.positive = std::move(pos);
      done_ = stop = true;
    } else {
      out.status = "inconclusive";
      out.note = "certificate re-verification failed";
      all_unsolvable_ = false;
    }
  } else if (rep.overall == Overall::NotLocallySolvable) {
    out.status = "unsolvable";
    if (!first_failing_prime_) first_failing_prime_ = rep.failing_prime;
  } else {
    out.status = "inconclusive";
    all_unsolvable_ = false;
  }
  result_.outcomes.push_back(std::move(out));
  return stop;
}

Procedure2Result procedure2(const InstancePair& inst, const DecideConfig& cfg) {
  Procedure2 p(inst, cfg);
  while (!p.done())
    if (p.step()) break;
  return p.result();
}

Verdict decide(const InstancePair& inst, const DecideConfig& cfg) {
  Verdict v;
  if (!inst.profinite_fitting)
    v.notes.push_back(
        "profinite_fitting is not asserted: only the presentation abelianization is compared and no positive "
        "verdict is possible");
  v.notes.push_back("verdicts are conditional on the profinite_fitting hypothesis");
  Procedure1 p1(inst, cfg);
  Procedure2 p2(inst, cfg);
  for (std::size_t round = 0; round < cfg.slices && !(p1.done() && p2.done()); ++round) {
    v.rounds = round + 1;
    if (!p1.done()) {
      ++v.procedure1_steps;
      if (auto c = p1.step()) {
        v.kind = VerdictKind::NotProfinitelyIsomorphic;
        v.negative = std::move(c);
        v.winner = "procedure1";
        break;
      }
    }
    if (!p2.done()) {
      ++v.procedure2_steps;
      if (p2.step()) {
        const auto& r = p2.result();
        v.winner = "procedure2";
        if (r.positive) {
          v.kind = VerdictKind::ProfinitelyIsomorphic;
          v.positive = r.positive;
        } else {
          v.kind = VerdictKind::NotProfinitelyIsomorphic;
          v.negative = r.negative;
        }
        break;
      }
    }
  }
  v.outcomes = p2.result().outcomes;
  v.nodes = p2.result().nodes;
  if (v.kind == VerdictKind::Undetermined)
    v.notes.push_back(p1.done() && p2.done() ? "both procedures exhausted their budgets"
                                             : "round budget exhausted");
  return v;
}

}  // namespace vpiso
