#include <catch2/catch_amalgamated.hpp>

#include "sostrat/field.hpp"
#include "test_util.hpp"

using namespace sostrat;
using testutil::Rng;

namespace {

Poly X1 = Poly::variable(1);
Poly X2 = Poly::variable(2);
Poly X3 = Poly::variable(3);

/// Oleinik-Radkevic style triple D1, x1^{p-1} D2, x1^{q-1} D3.
OperatorSpec or_spec(int p, int q) {
  OperatorSpec s;
  s.X1 = FieldSymbol::covariable(1);
  s.X2 = {Poly(), X1.pow(unsigned(p - 1)), Poly()};
  s.X3 = {Poly(), Poly(), X1.pow(unsigned(q - 1))};
  return s;
}

/// Commutator action oracle: [F,G] applied to a scalar via both operator
/// orders, independent of the symbol-level bracket formula.
Poly commutator_action(const FieldSymbol& F, const FieldSymbol& G, const Poly& u) {
  return F.apply(G.apply(u)) - G.apply(F.apply(u));
}

}  // namespace

TEST_CASE("bracket fixed examples") {
  FieldSymbol xi1 = FieldSymbol::covariable(1);
  FieldSymbol x1xi2{Poly(), X1, Poly()};
  CHECK(bracket(xi1, x1xi2) == FieldSymbol::covariable(2));

  FieldSymbol x2xi1{X2, Poly(), Poly()};
  FieldSymbol x1xi2b{Poly(), X1, Poly()};
  // {x2 xi1, x1 xi2} = x2 xi2 - x1 xi1, checked against the action oracle.
  FieldSymbol br = bracket(x2xi1, x1xi2b);
  CHECK(br == FieldSymbol{-X1, X2, Poly()});
  for (const Poly& u : {X1, X2, X3, X1 * X2, X2.pow(2) * X3}) {
    CHECK(br.apply(u) == commutator_action(x2xi1, x1xi2b, u));
  }
}

TEST_CASE("bracket of a field with itself vanishes") {
  Rng rng(42);
  for (int i = 0; i < 50; ++i) {
    FieldSymbol f = testutil::random_field(rng);
    REQUIRE(bracket(f, f).is_zero());
  }
}

TEST_CASE("bracket antisymmetry") {
  Rng rng(1001);
  for (int i = 0; i < 500; ++i) {
    FieldSymbol f = testutil::random_field(rng), g = testutil::random_field(rng);
    REQUIRE(bracket(f, g) == -bracket(g, f));
  }
}

TEST_CASE("Jacobi identity") {
  Rng rng(2002);
  for (int i = 0; i < 200; ++i) {
    FieldSymbol f = testutil::random_field(rng, 3, 3), g = testutil::random_field(rng, 3, 3),
                h = testutil::random_field(rng, 3, 3);
    FieldSymbol sum =
        bracket(f, bracket(g, h)) + bracket(g, bracket(h, f)) + bracket(h, bracket(f, g));
    REQUIRE(sum.is_zero());
  }
}

TEST_CASE("bilinearity with the Leibniz correction") {
  // bracket(aF, G) = a bracket(F,G) - (G a) F with (G a) the derivation action.
  Rng rng(3003);
  for (int i = 0; i < 200; ++i) {
    Poly a = testutil::random_poly(rng, 3, 3);
    FieldSymbol f = testutil::random_field(rng, 3, 3), g = testutil::random_field(rng, 3, 3);
    FieldSymbol lhs = bracket(a * f, g);
    FieldSymbol rhs = a * bracket(f, g) - g.apply(a) * f;
    REQUIRE(lhs == rhs);
  }
}

TEST_CASE("bracket agrees with the operator-order oracle on monomials") {
  Rng rng(4004);
  std::vector<Poly> probes{X1, X2, X3, X1 * X2, X1 * X3, X2 * X3, X1.pow(2), X2.pow(2) * X3};
  for (int i = 0; i < 50; ++i) {
    FieldSymbol f = testutil::random_field(rng, 3, 3), g = testutil::random_field(rng, 3, 3);
    FieldSymbol br = bracket(f, g);
    for (const Poly& u : probes) REQUIRE(br.apply(u) == commutator_action(f, g, u));
  }
}

TEST_CASE("iterated brackets on the model operator") {
  OperatorSpec s23 = or_spec(2, 3);
  CHECK(iterated_bracket(s23, BracketWord{1, 2}) == FieldSymbol::covariable(2));
  // word (1,1,3): two x1-derivatives of x1^2 xi3 give 2 xi3.
  CHECK(iterated_bracket(s23, BracketWord{1, 1, 3}) ==
        FieldSymbol{Poly(), Poly(), Poly(2)});
  CHECK(iterated_bracket(s23, BracketWord{2}) == s23.X2);
}

TEST_CASE("words (1,..,1,j) give x1-derivatives of X_j in standard form") {
  for (auto [p, q] : {std::pair{2, 3}, std::pair{2, 5}, std::pair{3, 4}}) {
    OperatorSpec s = or_spec(p, q);
    for (int j : {2, 3}) {
      FieldSymbol expect = s.field(j);
      for (int k = 1; k <= q; ++k) {
        expect = diff(expect, 1);
        std::vector<int> word(size_t(k), 1);
        word.push_back(j);
        REQUIRE(iterated_bracket(s, BracketWord(word)) == expect);
      }
    }
  }
}

TEST_CASE("hormander_check on model operators") {
  std::array<Rational, 3> origin{Rational(0), Rational(0), Rational(0)};
  auto r = hormander_check(or_spec(2, 3), origin, 3);
  REQUIRE(r.ok());
  CHECK(*r.length == 3);

  OperatorSpec spanning;
  spanning.X1 = FieldSymbol::covariable(1);
  spanning.X2 = FieldSymbol::covariable(2);
  spanning.X3 = FieldSymbol::covariable(3);
  auto r1 = hormander_check(spanning, origin, 2);
  REQUIRE(r1.ok());
  CHECK(*r1.length == 1);

  auto fail = hormander_check(or_spec(2, 5), origin, 3);
  CHECK(!fail.ok());
  CHECK(fail.achieved_dim == 2);
}

TEST_CASE("change of variables commutes with the bracket") {
  Rng rng(5005);
  for (int i = 0; i < 100; ++i) {
    FieldSymbol f = testutil::random_field(rng, 3, 3), g = testutil::random_field(rng, 3, 3);
    // Graph function of x2, x3 only, degree <= 2.
    Poly gr;
    for (int t = 0; t < 3; ++t) {
      unsigned e2 = unsigned(i + t) % 2, e3 = unsigned(i / 2 + t) % 2;
      gr.add_term({0, e2, e3}, testutil::random_rational(rng));
    }
    FieldSymbol lhs = cov_field(bracket(f, g), gr);
    FieldSymbol rhs = bracket(cov_field(f, gr), cov_field(g, gr));
    REQUIRE(lhs == rhs);
  }
}

TEST_CASE("cov with g = 0 is the identity") {
  Rng rng(6006);
  FieldSymbol f = testutil::random_field(rng);
  CHECK(cov_field(f, Poly()) == f);
}

TEST_CASE("translate_to_origin shifts coefficients") {
  OperatorSpec s = or_spec(2, 3);
  s.base_point = {Rational(1), Rational(0), Rational(0)};
  OperatorSpec t = translate_to_origin(s);
  // x1^{p-1} becomes (x1+1)^{p-1}.
  CHECK(t.X2.c2 == X1 + Poly(1));
  CHECK(t.base_point == std::array<Rational, 3>{Rational(0), Rational(0), Rational(0)});
}
