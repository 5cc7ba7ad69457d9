#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "levijet/jet_algebra.hpp"

using namespace levijet;

namespace {

JetPoly var(int n, int cap, int i) { return JetPoly::variable(n, cap, i); }

// so(3) Lie-Poisson bivector: {x1,x2} = x3, {x2,x3} = x1, {x3,x1} = x2.
JetBivector so3_bivector(int cap) {
  JetBivector pi(3, cap);
  pi.upper(0, 1) = var(3, cap, 2);
  pi.upper(1, 2) = var(3, cap, 0);
  pi.upper(0, 2) = -var(3, cap, 1);
  return pi;
}

}  // namespace

TEST_CASE("arithmetic and truncation") {
  const int n = 2, cap = 3;
  JetPoly f = var(n, cap, 0) + var(n, cap, 1);
  JetPoly sq = f * f;
  CHECK(sq.coeff(Mono({2, 0})) == Rational(1));
  CHECK(sq.coeff(Mono({1, 1})) == Rational(2));
  // Products beyond the cap vanish silently.
  CHECK((sq * sq).is_zero());
  CHECK((sq * sq).top_degree() == -1);

  CHECK(f.vanishing_order() == 1);
  CHECK(JetPoly(n, cap).vanishing_order() == kOrderInfinity);
  CHECK(sq.homogeneous_part(2) == sq);
  CHECK(sq.homogeneous_part(1).is_zero());
  CHECK(sq.drop_below(3).is_zero());
  CHECK(sq.drop_above(1).is_zero());

  JetPoly d = sq.derivative(0);
  CHECK(d.coeff(Mono({1, 0})) == Rational(2));
  CHECK(d.coeff(Mono({0, 1})) == Rational(2));
}

TEST_CASE("composition with a diffeomorphism") {
  // x1^2 after x1 -> x1 + x2^2 at D=4: x1^2 + 2 x1 x2^2 + x2^4.
  const int n = 2, cap = 4;
  std::vector<JetPoly> disp(n, JetPoly(n, cap));
  disp[0] = var(n, cap, 1) * var(n, cap, 1);
  const JetDiffeo theta = JetDiffeo::from_displacement(disp);
  const JetPoly g = compose(var(n, cap, 0) * var(n, cap, 0), theta);
  JetPoly expect(n, cap);
  expect.add_term(Mono({2, 0}), Rational(1));
  expect.add_term(Mono({1, 2}), Rational(2));
  expect.add_term(Mono({0, 4}), Rational(1));
  CHECK(g == expect);
}

TEST_CASE("from_displacement rejects low order") {
  std::vector<JetPoly> disp(2, JetPoly(2, 4));
  disp[0] = var(2, 4, 1);
  CHECK_THROWS_AS(JetDiffeo::from_displacement(disp), std::invalid_argument);
}

TEST_CASE("inversion") {
  // Inverse of x -> x + x^2 at D=4 is x - x^2 + 2x^3 - 5x^4.
  const int cap = 4;
  std::vector<JetPoly> disp(1, var(1, cap, 0) * var(1, cap, 0));
  const JetDiffeo theta = JetDiffeo::from_displacement(disp);
  const JetDiffeo inv = invert(theta);
  JetPoly expect(1, cap);
  expect.add_term(Mono({1}), Rational(1));
  expect.add_term(Mono({2}), Rational(-1));
  expect.add_term(Mono({3}), Rational(2));
  expect.add_term(Mono({4}), Rational(-5));
  CHECK(inv.component(0) == expect);

  // Two-sided identity at full depth, including caps where the fixed point
  // needs every sweep.
  for (int big : {5, 8}) {
    std::vector<JetPoly> d2(2, JetPoly(2, big));
    d2[0] = var(2, big, 0) * var(2, big, 1);
    d2[1] = var(2, big, 1) * var(2, big, 1);
    const JetDiffeo t2 = JetDiffeo::from_displacement(d2);
    const JetDiffeo i2 = invert(t2);
    const JetDiffeo left = compose(t2, i2);
    const JetDiffeo right = compose(i2, t2);
    for (int i = 0; i < 2; ++i) {
      CHECK(left.displacement()[i].is_zero());
      CHECK(right.displacement()[i].is_zero());
    }
  }
}

TEST_CASE("vector fields") {
  const int n = 2, cap = 4;
  JetVectorField x_dx{std::vector<JetPoly>{var(n, cap, 0), JetPoly(n, cap)}};
  JetVectorField y_dx{std::vector<JetPoly>{var(n, cap, 1), JetPoly(n, cap)}};
  // [x d/dx, y d/dx] = -y d/dx.
  const JetVectorField br = vf_bracket(x_dx, y_dx);
  CHECK(br.comps[0] == -var(n, cap, 1));
  CHECK(br.comps[1].is_zero());
  CHECK(x_dx.apply(var(n, cap, 0) * var(n, cap, 0)) ==
        Rational(2) * (var(n, cap, 0) * var(n, cap, 0)));
}

TEST_CASE("poisson brackets") {
  const int cap = 4;
  const JetBivector pi = so3_bivector(cap);
  CHECK(poisson_bracket(pi, var(3, cap, 0), var(3, cap, 1)) ==
        var(3, cap, 2));
  CHECK(poisson_bracket(pi, var(3, cap, 1), var(3, cap, 0)) ==
        -var(3, cap, 2));
  CHECK(coordinate_bracket(pi, 0, var(3, cap, 1)) == var(3, cap, 2));
  // The Casimir x1^2 + x2^2 + x3^2 commutes with every coordinate.
  JetPoly casimir(3, cap);
  for (int i = 0; i < 3; ++i) {
    casimir += var(3, cap, i) * var(3, cap, i);
  }
  for (int i = 0; i < 3; ++i) {
    CHECK(coordinate_bracket(pi, i, casimir).is_zero());
  }

  // Quadratic bracket: pi_12 = x1^2 gives {x1, x2} = x1^2.
  JetBivector quad(3, 3);
  quad.upper(0, 1) = var(3, 3, 0) * var(3, 3, 0);
  CHECK(poisson_bracket(quad, var(3, 3, 0), var(3, 3, 1)) ==
        var(3, 3, 0) * var(3, 3, 0));
}

TEST_CASE("jacobiator") {
  CHECK(schouten_jacobiator(so3_bivector(4)).is_zero());
  // Breaking one component breaks Jacobi.
  JetBivector bad = so3_bivector(4);
  bad.upper(0, 1) += var(3, 4, 0) * var(3, 4, 0);
  CHECK(!schouten_jacobiator(bad).is_zero());
}

TEST_CASE("pushforward") {
  const int n = 2, cap = 4;
  // {z1, z2} = z1 pushed through z1' = z1 + z2^2, z2' = z2:
  // {z1', z2'} = {z1, z2} = z1 = z1' - z2'^2.
  JetBivector pi(n, cap);
  pi.upper(0, 1) = var(n, cap, 0);
  std::vector<JetPoly> disp(n, JetPoly(n, cap));
  disp[0] = var(n, cap, 1) * var(n, cap, 1);
  const JetDiffeo theta = JetDiffeo::from_displacement(disp);
  const JetBivector out = pushforward(pi, theta);
  JetPoly expect = var(n, cap, 0) - var(n, cap, 1) * var(n, cap, 1);
  CHECK(out.upper(0, 1) == expect);

  // Functoriality: (theta1 after theta2)_* = theta1_* after theta2_*.
  std::vector<JetPoly> d2(n, JetPoly(n, cap));
  d2[1] = var(n, cap, 0) * var(n, cap, 0);
  const JetDiffeo theta2 = JetDiffeo::from_displacement(d2);
  const JetBivector lhs = pushforward(pi, compose(theta, theta2));
  const JetBivector rhs = pushforward(pushforward(pi, theta2), theta);
  CHECK(lhs == rhs);

  // Pushforward preserves the Poisson property.
  const JetBivector moved = pushforward(so3_bivector(5),
                                        JetDiffeo::from_displacement({
                                            var(3, 5, 1) * var(3, 5, 2),
                                            JetPoly(3, 5),
                                            var(3, 5, 0) * var(3, 5, 0),
                                        }));
  CHECK(schouten_jacobiator(moved).is_zero());
}

TEST_CASE("homothety") {
  const int cap = 3;
  JetBivector pi(2, cap);
  pi.upper(0, 1) = var(2, cap, 0) +
                   var(2, cap, 1) * var(2, cap, 1);  // degrees 1 and 2
  const JetBivector scaled = pi.homothety(Rational(3));
  // Degree-k terms scale by t^{1-k}: linear fixed, quadratic by 1/3.
  CHECK(scaled.upper(0, 1).coeff(Mono({1, 0})) == Rational(1));
  CHECK(scaled.upper(0, 1).coeff(Mono({0, 2})) == Rational(1, 3));
  // A homothety of a Poisson structure is Poisson.
  CHECK(schouten_jacobiator(so3_bivector(4).homothety(Rational(5, 7)))
            .is_zero());
}

TEST_CASE("bivector plumbing") {
  JetBivector pi = so3_bivector(4);
  CHECK(pi.component(1, 0) == -var(3, 4, 2));
  CHECK(pi.component(0, 1) == var(3, 4, 2));
  CHECK(pi.vanishing_order() == 1);
  JetBivector sum = pi;
  sum += pi;
  CHECK(sum.upper(0, 1) == Rational(2) * var(3, 4, 2));
  sum -= pi;
  CHECK(sum == pi);
  CHECK(pi.drop_above(0).vanishing_order() == kOrderInfinity);
}
