#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vpiso/instance.hpp"
#include "vpiso/localsolve.hpp"

namespace vpiso {

enum class Mode { Full, LieFirst };

inline LocalBudgets default_decide_budgets() {
  LocalBudgets b;
  b.max_level = 4;
  b.max_nodes = 2'000'000;
  return b;
}

struct DecideConfig {
  int height = 1;                                  // free theta entries in [-height, height]
  std::vector<std::uint64_t> primes;              // empty: default_primes per system
  LocalBudgets local = default_decide_budgets();
  std::uint64_t max_modulus = 16;                  // lattice quotient moduli 2..max_modulus
  std::uint64_t max_quotient_order = 1 << 12;
  std::size_t max_theta = 256;
  std::size_t slices = 64;                         // round-robin rounds
  Mode mode = Mode::LieFirst;
};

struct NegativeCertificate {
  std::string kind;  // abelianization, quotient, fingerprint, lie_subsystem, all_theta
  std::uint64_t modulus = 0;
  std::string invariant;
  std::string left, right;
  std::optional<std::uint64_t> prime;
  unsigned level = 0;
};

/// Primes <= bound plus those dividing n!, n'!, the lattice denominators and
/// the determinants of A(i), B(w), C(i) and every Y_m(w).
std::vector<std::uint64_t> default_primes(const SystemInput& input, std::uint64_t bound = 97);
/// Primes <= bound plus those dividing n!, n'! and the lattice denominators.
std::vector<std::uint64_t> default_primes(const LieLattice& L, const LieLattice& Lp, std::uint64_t bound = 97);

/// Compares canonical invariants in a fixed schedule: presentation
/// abelianization, G/N, then lattice quotient fingerprints over moduli
/// admissible on both sides. One comparison per step.
class Procedure1 {
 public:
  Procedure1(const InstancePair& inst, const DecideConfig& cfg);
  bool done() const { return stage_ >= schedule_.size(); }
  std::optional<NegativeCertificate> step();
  std::size_t steps() const { return stage_; }
  const std::vector<std::uint64_t>& moduli() const { return moduli_; }

 private:
  const InstancePair* inst_;
  std::vector<std::uint64_t> schedule_;  // 0 = abelianization, 1 = quotient, m >= 2 = modulus
  std::vector<std::uint64_t> moduli_;
  std::size_t stage_ = 0;
};

/// Runs procedure 1 to the end of its schedule.
std::optional<NegativeCertificate> procedure1(const InstancePair& inst, const DecideConfig& cfg);

struct ThetaOutcome {
  std::size_t index = 0;
  ThetaSpec theta;
  std::string status;  // positive, unsolvable, inconclusive, inconsistent, killed
  std::optional<LocalSolvabilityReport> report;
  std::string note;
};

struct PositiveReport {
  std::size_t theta_index = 0;
  ThetaSpec theta;
  DiophantineSystem system;
  LocalSolvabilityReport report;
};

struct Procedure2Result {
  std::optional<PositiveReport> positive;
  std::optional<NegativeCertificate> negative;
  std::optional<LocalSolvabilityReport> lie_report;
  std::vector<ThetaOutcome> outcomes;
  bool exhausted = false;
  std::uint64_t nodes = 0;
};

/// Per step: the Lie subsystem (lie-first mode, once), then one theta.
class Procedure2 {
 public:
  Procedure2(const InstancePair& inst, const DecideConfig& cfg);
  bool done() const { return done_; }
  /// True when the procedure stopped with a positive or negative result.
  bool step();
  const Procedure2Result& result() const { return result_; }

 private:
  void finish_stream();

  const InstancePair* inst_;
  DecideConfig cfg_;
  ThetaStream stream_;
  bool lie_pending_;
  bool done_ = false;
  std::size_t index_ = 0;
  bool all_unsolvable_ = true;
  std::optional<std::uint64_t> first_failing_prime_;
  Procedure2Result result_;
};

Procedure2Result procedure2(const InstancePair& inst, const DecideConfig& cfg);

enum class VerdictKind { ProfinitelyIsomorphic, NotProfinitelyIsomorphic, Undetermined };
const char* verdict_name(VerdictKind k);

struct Verdict {
  VerdictKind kind = VerdictKind::Undetermined;
  std::optional<PositiveReport> positive;
  std::optional<NegativeCertificate> negative;
  std::string winner;  // procedure1, procedure2, or empty
  std::size_t rounds = 0, procedure1_steps = 0, procedure2_steps = 0;
  std::uint64_t nodes = 0;
  std::vector<ThetaOutcome> outcomes;
  std::vector<std::string> notes;
};

/// Round-robin: one step of procedure 1, then one of procedure 2, for at
/// most cfg.slices rounds. The first certified stop wins.
Verdict decide(const InstancePair& inst, const DecideConfig& cfg);

/// Re-checks a positive report: exact witnesses by evaluation, Hensel
/// certificates by reverify.
bool reverify_positive(const PositiveReport& pos);

}  // namespace vpiso
