#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "levijet/multi_index.hpp"

using namespace levijet;

TEST_CASE("total_degree and constructors") {
  CHECK(total_degree(mono_unit(3)) == 0);
  CHECK(total_degree(mono_variable(3, 1)) == 1);
  CHECK(mono_variable(3, 1) == Mono({0, 1, 0}));
  CHECK(mono_mul(mono_variable(3, 0), mono_variable(3, 0)) ==
        Mono({2, 0, 0}));
}

TEST_CASE("graded lex order") {
  GradedLex less;
  // Degree dominates.
  CHECK(less(Mono({1, 0}), Mono({1, 1})));
  CHECK(less(Mono({2, 0}), Mono({1, 1, 1})));
  // Within a degree the comparison is lexicographic on exponents.
  CHECK(less(Mono({1, 1}), Mono({2, 0})));
  CHECK(less(Mono({0, 2}), Mono({1, 1})));
  // Strict order: irreflexive and antisymmetric.
  CHECK(!less(Mono({1, 1}), Mono({1, 1})));
  CHECK(!less(Mono({2, 0}), Mono({1, 1})));
}

TEST_CASE("monomials_of_degree") {
  const auto degree3 = monomials_of_degree(2, 3);
  REQUIRE(degree3.size() == 4);
  CHECK(degree3.front() == Mono({3, 0}));
  CHECK(degree3.back() == Mono({0, 3}));
  // Deterministic emission: first exponent high to low.
  GradedLex less;
  for (std::size_t i = 1; i < degree3.size(); ++i) {
    CHECK(less(degree3[i], degree3[i - 1]));
  }
  for (const Mono& m : degree3) CHECK(total_degree(m) == 3);

  CHECK(monomials_of_degree(3, 0).size() == 1);
  CHECK(monomials_of_degree(3, 2).size() == 6);
  CHECK(monomials_of_degree(1, 5).size() == 1);
}

TEST_CASE("combinations and ranks") {
  const auto pairs = combinations(4, 2);
  REQUIRE(pairs.size() == 6);
  CHECK(pairs[0] == std::vector<int>({0, 1}));
  CHECK(pairs[5] == std::vector<int>({2, 3}));
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    CHECK(combination_rank(4, pairs[r]) == static_cast<int>(r));
  }
  CHECK(combinations(3, 0).size() == 1);
  CHECK(combinations(3, 3).size() == 1);
  CHECK(combination_rank(3, {0, 1, 2}) == 0);
}

TEST_CASE("insert_sorted signs") {
  // Sign counts the transpositions moving the value into place.
  InsertResult front = insert_sorted(0, {1, 3});
  CHECK(front.sign == 1);
  CHECK(front.tuple == std::vector<int>({0, 1, 3}));

  InsertResult middle = insert_sorted(2, {1, 3});
  CHECK(middle.sign == -1);
  CHECK(middle.tuple == std::vector<int>({1, 2, 3}));

  InsertResult back = insert_sorted(4, {1, 3});
  CHECK(back.sign == 1);
  CHECK(back.tuple == std::vector<int>({1, 3, 4}));

  InsertResult collision = insert_sorted(3, {1, 3});
  CHECK(collision.sign == 0);
  CHECK(collision.tuple.empty());

  InsertResult empty = insert_sorted(2, {});
  CHECK(empty.sign == 1);
  CHECK(empty.tuple == std::vector<int>({2}));
}
