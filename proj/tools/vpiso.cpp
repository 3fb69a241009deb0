#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "vpiso/report.hpp"

using namespace vpiso;

namespace {

enum Exit { kPositive = 0, kNegative = 1, kUndetermined = 2, kInputError = 3 };

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Accepts 10000000, 10^7 and 1e7.
std::uint64_t parse_count(const std::string& s) {
  std::size_t used = 0;
  const auto fail = [&] { throw std::invalid_argument("bad count '" + s + "'"); };
  if (auto p = s.find_first_of("^eE"); p != std::string::npos) {
    const std::uint64_t base = s[p] == '^' ? std::stoull(s.substr(0, p), &used) : 10;
    const std::uint64_t mant = s[p] == '^' ? 1 : std::stoull(s.substr(0, p), &used);
    if (used != p) fail();
    const std::uint64_t e = std::stoull(s.substr(p + 1), &used);
    if (used != s.size() - p - 1) fail();
    std::uint64_t r = mant;
    for (std::uint64_t i = 0; i < e; ++i) {
      if (r > UINT64_MAX / base) fail();
      r *= base;
    }
    return r;
  }
  const std::uint64_t r = std::stoull(s, &used);
  if (used != s.size()) fail();
  return r;
}

void print(const Json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Profinite isomorphism toolkit for virtually polycyclic groups"};
  app.require_subcommand(1);

  std::string file, side = "G", out, mode = "full", encoding = "balanced", nodes = "10^7", p2mode = "lie-first";
  std::vector<std::uint64_t> moduli{2, 3, 4, 5, 7, 8}, primes{2, 3, 5, 7}, decide_primes;
  std::size_t theta_index = 0, solutions = 1 << 14, slices = 64, max_theta = 256;
  int height = 1;
  unsigned level = 6, decide_level = default_decide_budgets().max_level;
  std::string decide_nodes = "2e6";
  std::uint64_t max_modulus = 16;

  auto* parse = app.add_subcommand("parse", "Validate an instance file and summarize it");
  parse->add_option("file", file, "instance file")->required();

  auto* fp = app.add_subcommand("fingerprint", "Lattice quotient invariants of one side");
  fp->add_option("file", file, "instance file")->required();
  fp->add_option("--side", side, "G or Gdag")->check(CLI::IsMember({"G", "Gdag"}));
  fp->add_option("--moduli", moduli, "comma-separated moduli")->delimiter(',');

  auto* build = app.add_subcommand("build", "Write F(theta) or the Lie subsystem in dio v1 format");
  build->add_option("file", file, "instance file")->required();
  build->add_option("--theta-index", theta_index, "position in the theta stream");
  build->add_option("--height", height, "free theta entry bound");
  build->add_option("-o,--output", out, "output .dio file (stdout when absent)");
  build->add_option("--mode", mode, "full or lie")->check(CLI::IsMember({"full", "lie"}));
  build->add_option("--encoding", encoding, "balanced or literal")->check(CLI::IsMember({"balanced", "literal"}));

  auto* solve = app.add_subcommand("solve", "Decide local solvability of a dio v1 system on a prime set");
  solve->add_option("file", file, "system file")->required();
  solve->add_option("--primes", primes, "comma-separated primes")->delimiter(',');
  solve->add_option("--level", level, "maximum p-adic level");
  solve->add_option("--nodes", nodes, "node budget per prime, e.g. 10^7");
  solve->add_option("--solutions", solutions, "points kept per level");

  auto* dec = app.add_subcommand("decide", "Run both procedures round-robin");
  dec->add_option("file", file, "instance file")->required();
  dec->add_option("--height", height, "free theta entry bound");
  dec->add_option("--primes", decide_primes, "comma-separated primes (default: primes <= 97 and bad primes)")
      ->delimiter(',');
  dec->add_option("--slices", slices, "round-robin rounds");
  dec->add_option("--level", decide_level, "maximum p-adic level");
  dec->add_option("--nodes", decide_nodes, "node budget per prime and system");
  dec->add_option("--max-theta", max_theta, "theta budget");
  dec->add_option("--max-modulus", max_modulus, "largest lattice quotient modulus");
  dec->add_option("--mode", p2mode, "lie-first or full")->check(CLI::IsMember({"lie-first", "full"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*parse) {
      print(instance_summary(parse_instance(read_file(file))));
      return kPositive;
    }
    if (*fp) {
      const auto inst = parse_instance(read_file(file));
      const auto& s = side == "G" ? inst.g : inst.gdag;
      Json arr = Json::array();
      for (std::uint64_t m : moduli) {
        try {
          const std::vector<std::uint64_t> one{m};
          arr.push_back(to_json(fingerprint(s.tgroup, one)).at(0));
        } catch (const std::invalid_argument& e) {
          arr.push_back(Json{{"modulus", m}, {"skipped", e.what()}});
        }
      }
      print(Json{{"side", side}, {"hirsch_rank", s.lattice().rank()}, {"quotients", arr}});
      return kPositive;
    }
    if (*build) {
      const auto inst = parse_instance(read_file(file));
      DiophantineSystem sys;
      if (mode == "lie") {
        sys = build_lie_system(inst.g.lattice(), inst.gdag.lattice());
      } else {
        ThetaStream stream(inst, height);
        std::optional<ThetaSpec> t;
        for (std::size_t i = 0; i <= theta_index; ++i)
          if (!(t = stream.next())) break;
        if (!t) throw InstanceError("theta index " + std::to_string(theta_index) + " is past the end of the stream");
        sys = build_full_system(system_input(inst, *t),
                                encoding == "literal" ? InverseEncoding::Literal : InverseEncoding::Balanced);
      }
      const std::string text = serialize_system(sys);
      if (out.empty()) {
        std::cout << text;
      } else {
        std::ofstream os(out);
        if (!os) throw std::runtime_error("cannot write " + out);
        os << text;
        std::cerr << "wrote " << sys.variables.size() << " variables, " << sys.size() << " polynomials to " << out
                  << '\n';
      }
      return kPositive;
    }
    if (*solve) {
      const auto sys = parse_system(read_file(file));
      LocalBudgets b;
      b.max_level = level;
      b.max_nodes = parse_count(nodes);
      b.max_solutions = solutions;
      const auto rep = decide_local(sys, primes, b);
      print(to_json(rep, sys));
      return rep.overall == Overall::LocallySolvableOnSet ? kPositive
             : rep.overall == Overall::NotLocallySolvable ? kNegative
                                                          : kUndetermined;
    }
    if (*dec) {
      const auto inst = parse_instance(read_file(file));
      DecideConfig cfg;
      cfg.height = height;
      cfg.primes = decide_primes;
      cfg.slices = slices;
      cfg.max_theta = max_theta;
      cfg.max_modulus = max_modulus;
      cfg.local.max_level = decide_level;
      cfg.local.max_nodes = parse_count(decide_nodes);
      cfg.mode = p2mode == "full" ? Mode::Full : Mode::LieFirst;
      const auto v = decide(inst, cfg);
      print(to_json(v, cfg));
      return v.kind == VerdictKind::ProfinitelyIsomorphic      ? kPositive
             : v.kind == VerdictKind::NotProfinitelyIsomorphic ? kNegative
                                                               : kUndetermined;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
