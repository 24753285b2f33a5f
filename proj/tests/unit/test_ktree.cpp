#include <set>

#include "doctest.h"

#include "gibq/errors.hpp"
#include "gibq/ktree.hpp"

using namespace gibq;

TEST_CASE("counts are Catalan and Fuss-Catalan") {
  const auto t2 = count_trees(2, 5);
  const int catalan[] = {1, 1, 2, 5, 14, 42};
  for (int j = 0; j <= 5; ++j) CHECK(t2.counts[j] == catalan[j]);
  for (int k : {2, 3, 4, 5}) {
    const auto t = count_trees(k, 12);
    CHECK(t.counts[0] == 1);
    CHECK(t.counts[1] == 1);
    for (int j = 0; j <= 12; ++j) CHECK(t.counts[j] == fuss_catalan(k, j));
  }
  CHECK(count_trees(3, 2).counts[2] == 3);
  // Beyond 64 bits.
  CHECK(count_trees(3, 40).counts[40] == fuss_catalan(3, 40));
  CHECK(fuss_catalan(3, 40) > BigInt(std::numeric_limits<std::uint64_t>::max()));
}

TEST_CASE("enumeration") {
  const auto t0 = enumerate_trees(2, 0);
  REQUIRE(t0.size() == 1);
  CHECK(t0[0].is_terminal());
  const auto t2 = enumerate_trees(2, 2);
  REQUIRE(t2.size() == 2);
  CHECK(t2[0].to_string() != t2[1].to_string());
  CHECK(enumerate_trees(3, 1).size() == 1);
  CHECK(enumerate_trees(3, 1)[0].children().size() == 3);

  for (int k : {2, 3}) {
    for (int j = 0; j <= 6; ++j) {
      const auto trees = enumerate_trees(k, j);
      CHECK(BigInt(trees.size()) == fuss_catalan(k, j));
      std::set<std::string> distinct;
      for (const auto& t : trees) {
        CHECK(t.node_count() == k * j + 1);
        CHECK(t.terminal_count() == (k - 1) * j + 1);
        CHECK(t.generation() == j);
        distinct.insert(t.to_string());
      }
      CHECK(distinct.size() == trees.size());
      CHECK(enumerate_trees(k, j) == trees);
    }
  }
}

TEST_CASE("regrouping by root children reproduces the recursion") {
  for (int k : {2, 3}) {
    for (int j = 1; j <= 6; ++j) {
      const auto trees = enumerate_trees(k, j);
      const auto table = count_trees(k, j);
      for (const auto& comp : compositions(j - 1, k)) {
        BigInt expected = 1;
        for (int part : comp) expected *= table.counts[part];
        std::size_t found = 0;
        for (const auto& t : trees) {
          bool match = true;
          for (int c = 0; c < k; ++c) match = match && t.children()[c].generation() == comp[c];
          found += match;
        }
        CHECK(BigInt(found) == expected);
      }
    }
  }
}

TEST_CASE("compositions") {
  const auto c = compositions(2, 2);
  REQUIRE(c.size() == 3);
  CHECK(c[0] == std::vector<int>{0, 2});
  CHECK(c[2] == std::vector<int>{2, 0});
  CHECK(compositions(4, 3).size() == 15);
}

TEST_CASE("enumeration guard") {
  CHECK_THROWS_AS(enumerate_trees(2, 20), CapacityError);
}

TEST_CASE("generation bound") {
  const auto b = verify_count_bound(2, 10);
  CHECK(b.c0 >= 4.0);
  for (bool h : b.holds) CHECK(h);
  CHECK(b.holds[0]);
  CHECK(b.per_j_root[1] == doctest::Approx(4.0));
  const auto b3 = verify_count_bound(3, 8);
  for (bool h : b3.holds) CHECK(h);
}
