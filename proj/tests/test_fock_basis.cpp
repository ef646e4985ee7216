#include <doctest.h>

#include <set>
#include <vector>

#include "krawpoly/fock_basis.hpp"

using namespace krawpoly;

TEST_SUITE("fock_basis") {

TEST_CASE("dimension counts the level eigenspace") {
  CHECK(dimension(2, 3) == 10);
  CHECK(dimension(2, 0) == 1);
  // exhaustive count of (n1, n2, n3) with sum <= 2
  int count = 0;
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; a + b <= 2; ++b)
      for (int c = 0; a + b + c <= 2; ++c) ++count;
  CHECK(dimension(3, 2) == count);
  CHECK(dimension(3, 2) == 10);
}

TEST_CASE("enumeration order is graded lexicographic") {
  const LevelBasis b1(1, 2);
  REQUIRE(b1.size() == 3);
  CHECK(b1.at(0).n == std::vector<int>{0});
  CHECK(b1.at(1).n == std::vector<int>{1});
  CHECK(b1.at(2).n == std::vector<int>{2});

  const LevelBasis b2(2, 1);
  REQUIRE(b2.size() == 3);
  CHECK(b2.at(0).n == std::vector<int>{0, 0});
  CHECK(b2.at(1).n == std::vector<int>{0, 1});
  CHECK(b2.at(2).n == std::vector<int>{1, 0});
}

TEST_CASE("rank and unrank are mutual inverses") {
  const LevelBasis basis(2, 5);
  for (int r = 0; r < basis.size(); ++r) CHECK(basis.rank(basis.at(r)) == r);
}

TEST_CASE("size matches dimension and ranking is a bijection") {
  for (int d = 1; d <= 4; ++d)
    for (int N = 0; N <= 12; ++N) {
      if (d == 4 && N > 8) continue;  // keep the sweep quick
      const LevelBasis basis(d, N);
      CHECK(basis.size() == dimension(d, N));
      std::set<int> ranks;
      for (const auto& idx : basis) ranks.insert(basis.rank(idx));
      CHECK(static_cast<int>(ranks.size()) == basis.size());
      CHECK(*ranks.begin() == 0);
      CHECK(*ranks.rbegin() == basis.size() - 1);
    }
}

TEST_CASE("the implicit last mode carries the remaining energy") {
  const LevelIndex idx{2, 5, {1, 3}};
  CHECK(idx.valid());
  CHECK(idx.sum() == 4);
  CHECK(idx.last() == 1);
  CHECK(idx.occupations() == std::vector<int>{1, 3, 1});
  CHECK_FALSE(LevelIndex{2, 2, {1, 3}}.valid());
  CHECK_FALSE(LevelIndex{2, 5, {-1, 3}}.valid());
}

TEST_CASE("invalid construction is rejected") {
  CHECK_THROWS_AS(LevelBasis(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(LevelBasis(2, -1), std::invalid_argument);
  const LevelBasis basis(2, 3);
  CHECK_THROWS_AS(basis.rank(std::vector<int>{4, 0}), std::invalid_argument);
}

}  // TEST_SUITE
