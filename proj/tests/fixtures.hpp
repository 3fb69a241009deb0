#pragma once

#include "helpers.hpp"
#include "vpiso/sysbuild.hpp"

namespace testing {

using vpiso::LieLattice;
using vpiso::Word;

/// Lattice group data for one side: generators, relators, N-words.
struct GroupData {
  std::size_t n = 0;
  std::vector<Matrix> gens;
  std::vector<Word> relators;
  std::vector<Word> nwords;
  LieLattice lattice;
};

inline std::vector<Word> words(std::initializer_list<const char*> ws) {
  std::vector<Word> out;
  for (const char* w : ws) out.push_back(Word::parse(w));
  return out;
}

/// exp<2E12, 2E23, 2E13> with [g1,g2] = g3^2.
inline GroupData heisenberg2() {
  GroupData g;
  g.n = 3;
  g.gens = {I(3) + scaled(E(3, 1, 2), 2), I(3) + scaled(E(3, 2, 3), 2), I(3) + scaled(E(3, 1, 3), 2)};
  g.relators = words({"-1 -2 1 2 -3 -3", "-1 -3 1 3", "-2 -3 2 3"});
  g.nwords = words({"1", "2", "3"});
  g.lattice = vpiso::lattice_closure(g.gens, 3).lattice;
  return g;
}

/// exp<E12, k E23, E13> with [g1,g2] = g3^k.
inline GroupData heisenberg_k(int k) {
  GroupData g;
  g.n = 3;
  g.gens = {I(3) + E(3, 1, 2), I(3) + scaled(E(3, 2, 3), Scalar(k)), I(3) + E(3, 1, 3)};
  std::string rel = "-1 -2 1 2";
  for (int i = 0; i < k; ++i) rel += " -3";
  g.relators = {Word::parse(rel), Word::parse("-1 -3 1 3"), Word::parse("-2 -3 2 3")};
  g.nwords = words({"1", "2", "3"});
  g.lattice = vpiso::lattice_closure(g.gens, 3).lattice;
  return g;
}

/// F(theta) input for G = G' = N with the given lifts.
inline vpiso::SystemInput self_input(const GroupData& g, const std::vector<Matrix>& h) {
  vpiso::SystemInput in;
  in.lattice = g.lattice;
  in.lattice_dag = g.lattice;
  in.d = g.gens.size();
  in.constants = vpiso::specialize_constants(g.relators, g.nwords, h, g.gens, g.lattice, g.lattice);
  return in;
}

}  // namespace testing
