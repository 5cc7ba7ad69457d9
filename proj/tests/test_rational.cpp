#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "levijet/rational.hpp"

using namespace levijet;

TEST_CASE("parse accepts canonical spellings") {
  CHECK(*parse_rational("3") == Rational(3));
  CHECK(*parse_rational("-3") == Rational(-3));
  CHECK(*parse_rational("3/4") == Rational(3, 4));
  CHECK(*parse_rational("-3/4") == Rational(-3, 4));
  CHECK(*parse_rational("0") == Rational(0));
  // Non-reduced input is accepted and canonicalized.
  CHECK(*parse_rational("4/6") == Rational(2, 3));
  CHECK(to_string(*parse_rational("4/6")) == "2/3");
}

TEST_CASE("parse rejects everything else") {
  CHECK(!parse_rational("+1"));
  CHECK(!parse_rational("1/0"));
  CHECK(!parse_rational("1/-2"));
  CHECK(!parse_rational(" 1"));
  CHECK(!parse_rational("1 "));
  CHECK(!parse_rational(""));
  CHECK(!parse_rational("0x10"));
  CHECK(!parse_rational("1.5"));
  CHECK(!parse_rational("1/2/3"));
  CHECK(!parse_rational("--1"));
  CHECK(!parse_rational("1/02"));
}

TEST_CASE("to_string round trips") {
  for (const char* s : {"0", "-17", "22/7", "-1/2", "123456789/1000"}) {
    CHECK(to_string(*parse_rational(s)) == s);
  }
  CHECK(to_string(Rational(5, 1)) == "5");
}

TEST_CASE("pow_rational") {
  CHECK(pow_rational(Rational(2, 3), 3) == Rational(8, 27));
  CHECK(pow_rational(Rational(2, 3), 0) == Rational(1));
  CHECK(pow_rational(Rational(2, 3), -2) == Rational(9, 4));
  CHECK(pow_rational(Rational(-2), 3) == Rational(-8));
}

TEST_CASE("to_double_approx") {
  CHECK(to_double_approx(Rational(1, 2)) == doctest::Approx(0.5));
  CHECK(to_double_approx(Rational(-7, 4)) == doctest::Approx(-1.75));
}

TEST_CASE("Eigen over the exact scalar") {
  Mat a(2, 2);
  a << Rational(1, 2), Rational(1, 3), Rational(1, 5), Rational(1, 7);
  Mat b = a * a;
  CHECK(b(0, 0) == Rational(1, 2) * Rational(1, 2) +
                       Rational(1, 3) * Rational(1, 5));
  CHECK(Eigen::NumTraits<Rational>::epsilon() == Rational(0));

  Vec v(2);
  v << Rational(3), Rational(-4);
  CHECK((a * v)(1) == Rational(3, 5) - Rational(4, 7));
}
