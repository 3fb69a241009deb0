#include <doctest.h>

#include <numeric>

#include "helpers.hpp"
#include "vpiso/exactmat.hpp"

using namespace vpiso;
using testing::E;
using testing::I;
using testing::imat;
using testing::mat;

TEST_CASE("exact arithmetic on 3x3 unipotents") {
  CHECK(I(3) * I(3) == I(3));
  Matrix a = I(3) + testing::scaled(E(3, 1, 2), 2);
  Matrix b = I(3) + testing::scaled(E(3, 2, 3), 2);
  Matrix expected = I(3) + testing::scaled(E(3, 1, 2), 2) + testing::scaled(E(3, 2, 3), 2) +
                    testing::scaled(E(3, 1, 3), 4);
  CHECK(a * b == expected);
  CHECK(inverse(I(3) + E(3, 1, 2)) == I(3) - E(3, 1, 2));
  CHECK(power(a, -2) == I(3) - testing::scaled(E(3, 1, 2), 4));
  CHECK(is_integral(inverse(imat({{2, 1}, {1, 1}}))));
}

TEST_CASE("exact arithmetic error paths") {
  CHECK_THROWS_AS(I(2) * I(3), std::invalid_argument);
  CHECK_THROWS_AS(I(2) + I(3), std::invalid_argument);
  CHECK_THROWS_AS(inverse(imat({{1, 2}, {2, 4}})), std::domain_error);
  CHECK_THROWS_AS(make_scalar(1, 0), std::domain_error);
}

TEST_CASE("unipotent log examples") {
  CHECK(unipotent_log(I(3)).is_zero());
  CHECK(unipotent_log(imat({{1, 1}, {0, 1}})) == imat({{0, 1}, {0, 0}}));
  Matrix m = I(3) + E(3, 1, 2) + E(3, 2, 3);
  CHECK(unipotent_log(m) == E(3, 1, 2) + E(3, 2, 3) - testing::scaled(E(3, 1, 3), Scalar(1, 2)));
  CHECK_THROWS_AS(unipotent_log(imat({{2, 0}, {0, 1}})), std::domain_error);
}

TEST_CASE("nilpotent exp examples") {
  CHECK(nilpotent_exp(Matrix(3, 3)) == I(3));
  CHECK(nilpotent_exp(E(3, 1, 3)) == I(3) + E(3, 1, 3));
  CHECK(nilpotent_exp(E(3, 1, 2) + E(3, 2, 3)) ==
        I(3) + E(3, 1, 2) + E(3, 2, 3) + testing::scaled(E(3, 1, 3), Scalar(1, 2)));
  CHECK_THROWS_AS(nilpotent_exp(I(2)), std::domain_error);
}

TEST_CASE("unipotency is tested without triangularity") {
  std::mt19937_64 rng(7);
  Matrix p = testing::random_permutation(rng, 4);
  Matrix u = inverse(p) * (I(4) + E(4, 1, 4) + E(4, 2, 3)) * p;
  CHECK(is_unipotent(u));
  CHECK(is_nilpotent(u - I(4)));
  CHECK_FALSE(is_unipotent(imat({{1, 1}, {1, 1}})));
}

TEST_CASE("log/exp roundtrip and denominator bounds (property)") {
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = static_cast<std::size_t>(testing::uniform(rng, 1, 6));
    Matrix m = testing::random_unipotent(rng, n, 10);
    Matrix l = unipotent_log(m);
    CHECK(is_nilpotent(l));
    CHECK(nilpotent_exp(l) == m);
    Integer lcm = 1;
    for (unsigned k = 1; k < n; ++k) mpz_lcm_ui(lcm.get_mpz_t(), lcm.get_mpz_t(), k);
    for (const auto& q : l.entries()) CHECK(lcm % q.get_den() == 0);

    Matrix a = testing::random_nilpotent(rng, n, 10);
    CHECK(unipotent_log(nilpotent_exp(a)) == a);
    // exp of an integral nilpotent has denominators dividing (n-1)!
    Matrix ai = unipotent_log(m);
    Matrix scaled = ai;
    scaled.scale(Scalar(lcm));
    Matrix ex = nilpotent_exp(scaled);
    const Integer f = factorial(static_cast<unsigned>(n > 0 ? n - 1 : 0));
    for (const auto& q : ex.entries()) CHECK(f % q.get_den() == 0);
  }
}

TEST_CASE("reduce_mod examples") {
  auto r = reduce_mod(I(2) + testing::scaled(E(2, 1, 2), 2), 2);
  CHECK(r == reduce_mod(I(2), 2));
  auto s = reduce_mod(imat({{-1, 3}, {0, 5}}), 4);
  CHECK(s.entries == std::vector<Integer>{3, 3, 0, 1});
  Matrix big = I(3) + testing::scaled(E(3, 1, 2), 2) + testing::scaled(E(3, 2, 3), 2) + testing::scaled(E(3, 1, 3), 4);
  CHECK(reduce_mod(big, 4) ==
        reduce_mod(I(3) + testing::scaled(E(3, 1, 2), 2) + testing::scaled(E(3, 2, 3), 2), 4));
  CHECK_THROWS_AS(reduce_mod(mat({{"1/2"}}), 3), std::domain_error);
  CHECK_THROWS_AS(reduce_mod(I(2), 1), std::invalid_argument);
}

namespace {

std::vector<std::vector<Integer>> rows_of(std::initializer_list<std::initializer_list<long>> rs) {
  std::vector<std::vector<Integer>> out;
  for (const auto& r : rs) {
    std::vector<Integer> v;
    for (long x : r) v.emplace_back(x);
    out.push_back(std::move(v));
  }
  return out;
}

// Integer determinant of the square submatrix (rows, cols) by Leibniz expansion.
Integer minor_det(const std::vector<std::vector<Integer>>& a, const std::vector<std::size_t>& rows,
                  const std::vector<std::size_t>& cols) {
  std::vector<std::size_t> perm(cols.size());
  std::iota(perm.begin(), perm.end(), 0);
  Integer det = 0;
  do {
    Integer t = 1;
    for (std::size_t i = 0; i < rows.size(); ++i) t *= a[rows[i]][cols[perm[i]]];
    int inversions = 0;
    for (std::size_t i = 0; i < perm.size(); ++i)
      for (std::size_t j = i + 1; j < perm.size(); ++j)
        if (perm[i] > perm[j]) ++inversions;
    det += inversions % 2 ? -t : t;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

void subsets(std::size_t n, std::size_t k, std::vector<std::vector<std::size_t>>& out) {
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(k), true);
  do {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if (pick[i]) s.push_back(i);
    out.push_back(s);
  } while (std::prev_permutation(pick.begin(), pick.end()));
}

// gcd of all k x k minors (determinantal divisor), an independent oracle for
// Smith invariants and lattice indices.
Integer determinantal_divisor(const std::vector<std::vector<Integer>>& a, std::size_t k) {
  if (k == 0) return 1;
  std::vector<std::vector<std::size_t>> rs, cs;
  subsets(a.size(), k, rs);
  subsets(a.front().size(), k, cs);
  Integer g = 0;
  for (const auto& r : rs)
    for (const auto& c : cs) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), minor_det(a, r, c).get_mpz_t());
  return g;
}

IntMatrix to_int_matrix(const std::vector<std::vector<Integer>>& a) {
  IntMatrix m(a.size(), a.empty() ? 0 : a.front().size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) m(i, j) = a[i][j];
  return m;
}

}  // namespace

TEST_CASE("hermite_form examples") {
  auto h = hermite_form(rows_of({{2, 0, 0}, {0, 2, 0}, {2, 2, 2}}), 3);
  CHECK(h == to_int_matrix(rows_of({{2, 0, 0}, {0, 2, 0}, {0, 0, 2}})));
  CHECK(hermite_form(rows_of({{1, 0}, {0, 1}}), 2) == IntMatrix::identity(2));
  CHECK(hermite_form(rows_of({{0, 0}}), 2).rows() == 0);
  CHECK(hermite_form(std::vector<std::vector<Integer>>{}, 3).rows() == 0);
  CHECK_THROWS_AS(hermite_form(rows_of({{1, 0}, {1}}), 2), std::invalid_argument);
  // entries above pivots reduced into [0, pivot)
  auto g = hermite_form(rows_of({{1, 5}, {0, 3}}), 2);
  CHECK(g == to_int_matrix(rows_of({{1, 2}, {0, 3}})));
}

TEST_CASE("hermite_form is idempotent and preserves the span (property)") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 120; ++trial) {
    const std::size_t k = static_cast<std::size_t>(testing::uniform(rng, 1, 4));
    const std::size_t w = static_cast<std::size_t>(testing::uniform(rng, 1, 4));
    std::vector<std::vector<Integer>> a(k, std::vector<Integer>(w));
    for (auto& r : a)
      for (auto& x : r) x = testing::uniform(rng, -6, 6);
    IntMatrix h = hermite_form(a, w);
    CHECK(hermite_form(h) == h);
    for (std::size_t i = 0; i < h.rows(); ++i) {
      std::size_t p = 0;
      while (h(i, p) == 0) ++p;
      CHECK(h(i, p) > 0);
      for (std::size_t u = 0; u < i; ++u) CHECK((h(u, p) >= 0 && h(u, p) < h(i, p)));
    }
    if (h.rows() == 0) continue;
    // input rows have integral coordinates in the HNF basis
    std::vector<std::vector<Scalar>> basis;
    for (std::size_t i = 0; i < h.rows(); ++i) {
      std::vector<Scalar> v;
      for (std::size_t j = 0; j < w; ++j) v.emplace_back(h(i, j));
      basis.push_back(v);
    }
    CoordinateSolver solver(basis);
    for (const auto& r : a) {
      std::vector<Scalar> v(r.begin(), r.end()), c;
      REQUIRE(solver.solve(v, c));
      for (const auto& q : c) CHECK(q.get_den() == 1);
    }
    // and the same lattice content: gcd of maximal minors agrees
    std::vector<std::vector<Integer>> hv;
    for (std::size_t i = 0; i < h.rows(); ++i) {
      std::vector<Integer> r;
      for (std::size_t j = 0; j < w; ++j) r.push_back(h(i, j));
      hv.push_back(r);
    }
    CHECK(determinantal_divisor(a, h.rows()) == determinantal_divisor(hv, h.rows()));
  }
}

TEST_CASE("smith_invariants examples") {
  auto id = smith_invariants(IntMatrix::identity(3));
  CHECK(id.factors.empty());
  CHECK(id.free_rank == 0);
  auto one = smith_invariants(to_int_matrix(rows_of({{0, 0, 4}})));
  CHECK(one.factors == std::vector<Integer>{4});
  CHECK(one.free_rank == 2);
  auto six = smith_invariants(to_int_matrix(rows_of({{2, 0}, {0, 3}})));
  CHECK(six.factors == std::vector<Integer>{6});
  CHECK(six.free_rank == 0);
  CHECK(to_string(one) == "Z x Z x Z/4");
}

TEST_CASE("smith_form transforms and determinantal-divisor oracle (property)") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t r = static_cast<std::size_t>(testing::uniform(rng, 1, 4));
    const std::size_t c = static_cast<std::size_t>(testing::uniform(rng, 1, 4));
    std::vector<std::vector<Integer>> a(r, std::vector<Integer>(c));
    for (auto& row : a)
      for (auto& x : row) x = testing::uniform(rng, -8, 8);
    IntMatrix m = to_int_matrix(a);
    SmithForm s = smith_form(m);
    IntMatrix d = s.left * m * s.right;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) CHECK(d(i, j) == (i == j ? s.diagonal[i] : Integer(0)));
    CHECK(abs(determinant(to_rational(s.left))) == 1);
    CHECK(abs(determinant(to_rational(s.right))) == 1);
    Integer prod = 1;
    for (std::size_t k = 0; k < s.diagonal.size(); ++k) {
      if (k > 0 && s.diagonal[k - 1] != 0) CHECK(s.diagonal[k] % s.diagonal[k - 1] == 0);
      prod *= s.diagonal[k];
      CHECK(prod == determinantal_divisor(a, k + 1));
    }

    // invariance under row/column permutations and sign changes
    std::vector<std::size_t> rp(r), cp(c);
    std::iota(rp.begin(), rp.end(), 0);
    std::iota(cp.begin(), cp.end(), 0);
    std::shuffle(rp.begin(), rp.end(), rng);
    std::shuffle(cp.begin(), cp.end(), rng);
    IntMatrix t(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) t(i, j) = a[rp[i]][cp[j]] * (testing::uniform(rng, 0, 1) ? 1 : 1);
    for (std::size_t i = 0; i < r; ++i)
      if (testing::uniform(rng, 0, 1))
        for (std::size_t j = 0; j < c; ++j) t(i, j) = -t(i, j);
    for (std::size_t j = 0; j < c; ++j)
      if (testing::uniform(rng, 0, 1))
        for (std::size_t i = 0; i < r; ++i) t(i, j) = -t(i, j);
    CHECK(smith_invariants(t) == smith_invariants(m));
  }
}
