#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vpiso/sysbuild.hpp"

namespace vpiso {

struct SearchBudget {
  std::uint64_t max_nodes = 10'000'000;  // digit assignments across all levels
  std::size_t max_solutions = 1 << 16;   // points kept per level
};

struct SolutionSet {
  std::uint64_t p = 0;
  unsigned level = 0;
  std::uint64_t modulus = 1;                       // p^level
  std::vector<std::vector<std::uint64_t>> points;  // values in [0, modulus), roster order
  bool truncated = false;                          // node or solution cap hit
  std::uint64_t nodes = 0;
};

/// All solutions mod p^k by lifting solutions mod p^j digit by digit. Each
/// polynomial is tested as soon as its last variable is assigned.
/// Throws std::invalid_argument unless p is prime and p^k < 2^62.
SolutionSet solutions_mod(const DiophantineSystem& system, std::uint64_t p, unsigned k,
                          const SearchBudget& budget = {});

struct SubsystemSelection {
  std::vector<std::size_t> equations;
  std::vector<std::size_t> variables;
};

struct HenselCertificate {
  std::uint64_t p = 0;
  std::vector<Integer> point;  // x0, meaningful mod p^(2e+1)
  unsigned e = 0;              // bound used: the system vanishes mod p^(2e+1) at x0
  unsigned valuation = 0;      // p-adic valuation of the selected Jacobian minor, <= e
  SubsystemSelection selection;
  bool complete = false;  // every nonzero polynomial is in the selection
};

/// The multivariate Hensel criterion on the selected square subsystem (other
/// variables frozen at x0). Nullopt when some polynomial does not vanish mod
/// p^(2e+1) at x0 or the minor has valuation > e. Throws on a non-square
/// selection.
std::optional<HenselCertificate> hensel_certificate(const DiophantineSystem& system, std::uint64_t p,
                                                    std::span<const Integer> x0, unsigned e,
                                                    const SubsystemSelection& selection);

/// Greedy p-adic full-pivot elimination on the Jacobian at x0, taking pivots
/// while 2 * (sum of pivot valuations) + 1 <= level. Identically zero
/// polynomials are never selected.
SubsystemSelection select_subsystem(const DiophantineSystem& system, std::uint64_t p, std::span<const Integer> x0,
                                    unsigned level, unsigned& valuation);

/// Newton iteration on the selection from x0 up to precision p^level. Returns
/// the refined point (values in [0, p^level)) or nullopt if the iteration
/// leaves Z_p or stalls.
std::optional<std::vector<Integer>> newton_lift(const DiophantineSystem& system, std::uint64_t p,
                                                std::span<const Integer> x0, const SubsystemSelection& selection,
                                                unsigned level);

/// Runs Newton to level 2(e+1)+4 and checks that every polynomial vanishes
/// there and the minor keeps valuation cert.valuation.
bool reverify(const DiophantineSystem& system, const HenselCertificate& cert);

enum class PrimeStatus { CertifiedSolvable, CertifiedUnsolvable, ProbablySolvable, Unknown };
const char* status_name(PrimeStatus s);

struct PrimeVerdict {
  std::uint64_t p = 0;
  PrimeStatus status = PrimeStatus::Unknown;
  unsigned level = 0;  // k for CertifiedUnsolvable, K for ProbablySolvable, last level searched otherwise
  std::optional<Witness> exact_witness;
  std::optional<HenselCertificate> certificate;
  std::uint64_t nodes = 0;
  std::string note;
};

struct LocalBudgets {
  unsigned max_level = 6;
  std::uint64_t max_nodes = 10'000'000;
  std::size_t max_solutions = 1 << 14;
  std::size_t max_certificate_attempts = 64;  // points tried per level
  unsigned probe_level = 12;                  // Newton probe for ProbablySolvable
  std::vector<Witness> candidates;            // integer assignments tried first
};

PrimeVerdict decide_prime(const DiophantineSystem& system, std::uint64_t p, const LocalBudgets& budgets = {});

enum class Overall { LocallySolvableOnSet, NotLocallySolvable, Inconclusive };
const char* overall_name(Overall o);

struct LocalSolvabilityReport {
  std::vector<std::uint64_t> primes;
  std::vector<PrimeVerdict> verdicts;  // same order as primes
  Overall overall = Overall::Inconclusive;
  std::optional<std::uint64_t> failing_prime;
  std::string scope;  // which primes were not examined
};

/// Primes are deduplicated and sorted. An exact witness found at any prime is
/// reused at every prime.
LocalSolvabilityReport decide_local(const DiophantineSystem& system, std::span<const std::uint64_t> primes,
                                    const LocalBudgets& budgets = {});

bool is_prime(std::uint64_t p);
/// Primes <= bound together with the prime factors of each extra value.
std::vector<std::uint64_t> prime_set(std::span<const Integer> extra, std::uint64_t bound = 97);

}  // namespace vpiso
