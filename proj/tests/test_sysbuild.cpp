#include <doctest.h>

#include "fixtures.hpp"
#include "vpiso/sysbuild.hpp"

using namespace vpiso;
using testing::E;
using testing::I;
using testing::scaled;

namespace {

std::vector<Matrix> identities(std::size_t d, std::size_t n) { return std::vector<Matrix>(d, I(n)); }

Witness identity_witness(const SystemInput& in, const std::vector<Matrix>& g, const std::vector<Matrix>& h) {
  std::vector<Matrix> xi;
  for (std::size_t i = 0; i < g.size(); ++i) xi.push_back(g[i] * inverse(h[i]));
  auto w = complete_witness(in, I(in.lattice.dim()), xi);
  REQUIRE(w);
  return *w;
}

}  // namespace

TEST_CASE("roster names and order") {
  Roster r(2, 2, 1, 1, 1);
  CHECK(r.size() == 4 + 1 + 4 + 1 + 2);
  auto names = r.names();
  CHECK(names.front() == "H_1_1");
  CHECK(names[r.Z(0, 0)] == "Z_1_1");
  CHECK(names[r.Xi(0, 1, 0)] == "Xi1_2_1");
  CHECK(names[r.lam(0, 0)] == "lam1_1");
  CHECK(names[r.eta0()] == "eta0");
  CHECK(names.back() == "zeta0");
}

TEST_CASE("full system for the self-instance") {
  const auto g = testing::heisenberg2();
  const auto h = identities(3, 3);
  const auto in = testing::self_input(g, h);
  const auto sys = build_full_system(in);
  CHECK(sys.variables.size() == 56);
  CHECK(sys.count(Tag::Beq) == 27);
  CHECK(sys.count(Tag::Ceq) == 27);
  CHECK(sys.count(Tag::e2) == 2);
  CHECK(sys.count(Tag::e3) == 27);
  CHECK(sys.count(Tag::e4) == 27);
  CHECK(sys.count(Tag::Const) == 0);
  CHECK(sys.meta == SystemMeta{3, 3, 3, 3, 3, 3, true});

  const Witness w = identity_witness(in, g.gens, h);
  Roster roster(3, 3, 3, 3, 3);
  CHECK(w[roster.eta0()] == 1);
  CHECK(w[roster.lam(2, 2)] == 1);
  const auto rep = verify_witness(sys, w);
  CHECK(rep.all_zero());
  CHECK(rep.max_residual.size() == 5);
  CHECK(verify_witness(sys, w, Integer(49)).all_zero());

  SUBCASE("H = 0 breaks e2") {
    Witness z = w;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) z[roster.H(i, j)] = 0;
    CHECK(verify_witness(sys, z).max_residual.at(Tag::e2) == 1);
  }
  SUBCASE("perturbing one Xi entry breaks Beq or e4") {
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
          Witness z = w;
          z[roster.Xi(k, i, j)] += 1;
          auto rep2 = verify_witness(sys, z);
          CHECK((rep2.max_residual.at(Tag::Beq) != 0 || rep2.max_residual.at(Tag::e4) != 0));
        }
  }
  SUBCASE("incomplete assignment") {
    Witness z(w.begin(), w.end() - 1);
    CHECK_THROWS_AS(verify_witness(sys, z), std::invalid_argument);
  }
}

TEST_CASE("lifts equal to the generators give Xi = I") {
  const auto g = testing::heisenberg2();
  const auto in = testing::self_input(g, g.gens);
  const auto sys = build_full_system(in);
  const Witness w = identity_witness(in, g.gens, g.gens);
  CHECK(verify_witness(sys, w).all_zero());
}

TEST_CASE("every coefficient is an integer and every variable is in the roster") {
  const auto g = testing::heisenberg2();
  const auto sys = build_full_system(testing::self_input(g, identities(3, 3)));
  for (const auto& p : sys.polynomials)
    for (Var v : p.variables()) CHECK(v < sys.variables.size());
  // e4 carries the 1/2 of the log series, cleared by 2: lam enters as 2 * 2
  bool saw_four = false;
  for (std::size_t k = 0; k < sys.size(); ++k)
    if (sys.tags[k] == Tag::e4)
      for (const auto& [m, c] : sys.polynomials[k].terms()) saw_four |= abs(c) == 4;
  CHECK(saw_four);
}

TEST_CASE("non-good case emits a single constant equation") {
  SystemInput in;
  in.lattice = LieLattice::span_of(3, std::vector<Matrix>{E(3, 1, 2)});
  in.lattice_dag = LieLattice::span_of(4, std::vector<Matrix>{E(4, 1, 2)});
  auto sys = build_full_system(in);
  CHECK_FALSE(sys.meta.good);
  REQUIRE(sys.size() == 1);
  CHECK(sys.tags[0] == Tag::Const);
  CHECK(sys.polynomials[0] == ZPoly(1));
  CHECK(sys.variables.size() == 12 + 1 + 2);
  CHECK_FALSE(complete_witness(in, Matrix(3, 4), std::vector<Matrix>{}));
}

TEST_CASE("abelian self-instance: Xi = I solves the commutator relator") {
  testing::GroupData g;
  g.n = 3;
  g.gens = {I(3) + E(3, 1, 2), I(3) + E(3, 1, 3)};
  g.relators = testing::words({"-1 -2 1 2"});
  g.nwords = testing::words({"1", "2"});
  g.lattice = lattice_closure(g.gens, 3).lattice;
  const auto in = testing::self_input(g, g.gens);
  const auto sys = build_full_system(in);
  CHECK(sys.variables.size() == 9 + 4 + 18 + 4 + 2);
  auto w = complete_witness(in, I(3), std::vector<Matrix>{I(3), I(3)});
  REQUIRE(w);
  CHECK(verify_witness(sys, *w).all_zero());
}

TEST_CASE("balanced and literal encodings agree with direct matrix evaluation") {
  const auto g = testing::heisenberg2();
  // conjugators from non-trivial lifts exercise the Y matrices
  const std::vector<Matrix> h{I(3) + E(3, 2, 3), I(3), I(3) + E(3, 2, 3)};
  testing::GroupData small = g;
  small.relators = testing::words({"-1 -3 1 3", "1 -2 -1 2"});
  small.nwords = testing::words({"1 -3"});
  const auto in = testing::self_input(small, h);
  const auto bal = build_full_system(in, InverseEncoding::Balanced);
  const auto lit = build_full_system(in, InverseEncoding::Literal);
  CHECK(bal.count(Tag::Beq) == lit.count(Tag::Beq));
  const Roster roster(3, 3, 3, 3, 3);
  std::mt19937_64 rng(21);
  for (int t = 0; t < 12; ++t) {
    std::vector<Matrix> xi;
    for (int k = 0; k < 3; ++k) {
      std::vector<Integer> c{testing::uniform(rng, -2, 2), testing::uniform(rng, -2, 2), testing::uniform(rng, -2, 2)};
      xi.push_back(nilpotent_exp(g.lattice.element(c)));
    }
    Witness w(roster.size(), 0);
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) w[roster.Xi(k, i, j)] = xi[k](i, j).get_num();
    for (std::size_t r = 0; r < in.constants.relators.size(); ++r) {
      const auto& wc = in.constants.relators[r];
      Matrix direct = I(3);
      for (const auto& f : wc.factors) {
        const Matrix& x = xi[static_cast<std::size_t>(f.target - 1)];
        direct = direct * inverse(f.conjugator) * (f.sign > 0 ? x : inverse(x)) * f.conjugator;
      }
      direct = direct * wc.tail;
      const bool direct_zero = direct == I(3);
      bool lit_zero = true, bal_zero = true;
      for (std::size_t e = 0; e < 9; ++e) {
        const std::size_t k = r * 9 + e;
        auto val = [&](const DiophantineSystem& s) {
          return s.polynomials[k].evaluate<Integer>([&](Var v) { return w[v]; });
        };
        CHECK(val(lit) == (direct - I(3)).entries()[e]);
        lit_zero &= val(lit) == 0;
        bal_zero &= val(bal) == 0;
      }
      CHECK(lit_zero == direct_zero);
      CHECK(bal_zero == direct_zero);
    }
  }
}

TEST_CASE("Lie system examples") {
  const auto L = testing::heisenberg2().lattice;
  const auto sys = build_lie_system(L, L);
  CHECK(sys.variables.size() == 10);
  CHECK(sys.count(Tag::e2) == 1);
  CHECK(sys.count(Tag::e3) == 9);
  auto w = lie_witness(I(3));
  REQUIRE(w);
  CHECK(verify_witness(sys, *w).all_zero());
  CHECK_FALSE(lie_witness(scaled(I(3), 2)));

  const auto n2 = testing::heisenberg_k(2).lattice, n4 = testing::heisenberg_k(4).lattice;
  const auto mixed = build_lie_system(n2, n4);
  // 4(z11 z22 - z12 z21) - 2 z33 = 0 forces the third row even
  bool found = false;
  for (std::size_t k = 0; k < mixed.size(); ++k)
    found |= format_polynomial(mixed.polynomials[k], [&](Var v) { return mixed.variables[v]; }) ==
             "4*Z_1_1*Z_2_2 - 4*Z_1_2*Z_2_1 - 2*Z_3_3";
  CHECK(found);

  const auto bad = build_lie_system(L, LieLattice::span_of(3, std::vector<Matrix>{E(3, 1, 2)}));
  CHECK_FALSE(bad.meta.good);
  CHECK(bad.count(Tag::Const) == 1);
}

TEST_CASE("Lie system is solved by the transport of a conjugated lattice (property)") {
  std::mt19937_64 rng(4);
  for (const auto& g : {testing::heisenberg2(), testing::heisenberg_k(2), testing::heisenberg_k(3)}) {
    for (int t = 0; t < 5; ++t) {
      Matrix c = testing::random_permutation(rng, 3);
      c = c * (I(3) + scaled(E(3, 1, 2), Scalar(testing::uniform(rng, -3, 3))));
      c = c * (I(3) + scaled(E(3, 2, 3), Scalar(testing::uniform(rng, -3, 3))));
      std::vector<Matrix> conj;
      for (const auto& e : g.lattice.basis()) conj.push_back(inverse(c) * e * c);
      const auto Lp = LieLattice::span_of(3, conj);
      Matrix Z(3, 3);
      for (std::size_t i = 0; i < 3; ++i) {
        auto co = Lp.coordinates(inverse(c) * g.lattice.basis()[i] * c);
        REQUIRE(co);
        for (std::size_t j = 0; j < 3; ++j) Z(i, j) = (*co)[j];
      }
      auto w = lie_witness(Z);
      REQUIRE(w);
      CHECK(verify_witness(build_lie_system(g.lattice, Lp), *w).all_zero());
    }
  }
}

TEST_CASE("dio v1 serialization") {
  DiophantineSystem empty;
  empty.meta = SystemMeta{0, 0, 0, 0, 0, 0, true};
  CHECK(serialize_system(empty) == "dio v1\nmeta n=0 nprime=0 r=0 rprime=0 d=0 s=0 good=1\n");
  CHECK(parse_system(serialize_system(empty)) == empty);

  DiophantineSystem one;
  one.variables = {"x"};
  one.add(Tag::Beq, ZPoly::from_terms({{Monomial::variable(0, 2), 1}, {Monomial{}, -2}}));
  const std::string text = serialize_system(one);
  CHECK(text.find("var x\npoly Beq: x^2 - 2\n") != std::string::npos);
  CHECK(parse_system(text) == one);

  const auto sys = build_full_system(testing::self_input(testing::heisenberg2(), identities(3, 3)));
  const std::string full = serialize_system(sys);
  CHECK(parse_system(full) == sys);
  CHECK(serialize_system(parse_system(full)) == full);

  auto p = parse_system("dio v1\nmeta n=1 nprime=1 r=0 rprime=0 d=0 s=0 good=0\nvar a\nvar b\n"
                        "poly const: -3*a*b^2 + a*a - 0 + 7\npoly e2: 0\n");
  CHECK(format_polynomial(p.polynomials[0], [&](Var v) { return p.variables[v]; }) == "-3*a*b^2 + a^2 + 7");
  CHECK(p.polynomials[1].is_zero());
}

TEST_CASE("dio v1 parse errors carry line and column") {
  auto err = [](const std::string& text) -> std::pair<std::size_t, std::size_t> {
    try {
      parse_system(text);
    } catch (const ParseError& e) {
      return {e.line(), e.column()};
    }
    return {0, 0};
  };
  const std::string head = "dio v1\nmeta n=0 nprime=0 r=0 rprime=0 d=0 s=0 good=1\n";
  CHECK(err("dio v2\n") == std::pair<std::size_t, std::size_t>{1, 1});
  CHECK(err(head + "var x\npoly Beq: x + y\n") == std::pair<std::size_t, std::size_t>{4, 15});
  CHECK(err(head + "var x\npoly Foo: x\n") == std::pair<std::size_t, std::size_t>{4, 6});
  CHECK(err(head + "var x\npoly Beq: x ? 2\n") == std::pair<std::size_t, std::size_t>{4, 13});
  CHECK(err(head + "var x\nvar x\n") == std::pair<std::size_t, std::size_t>{4, 5});
  CHECK(err(head + "bogus\n") == std::pair<std::size_t, std::size_t>{3, 1});
  CHECK(err("dio v1\nmeta n=0 nprime=0\n").first == 2);
  CHECK(err("dio v1\n").first == 2);
}
