#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "idfield/errors.hpp"
#include "idfield/groups.hpp"
#include "idfield/rng.hpp"

using namespace idfield;

namespace {
GroupElement el(std::initializer_list<std::int64_t> c) {
  return GroupElement(std::vector<std::int64_t>(c));
}
}  // namespace

TEST_CASE("group law on the lattice and cyclic products") {
  const GroupSpec z1 = GroupSpec::lattice(1);
  CHECK(group_op(z1, el({2}), el({3})) == el({5}));
  const GroupSpec c4 = GroupSpec::cyclic({4});
  CHECK(group_op(c4, el({3}), el({2})) == el({1}));
  CHECK(group_op(z1, identity(z1), el({7})) == el({7}));
  CHECK(group_op(c4, identity(c4), el({2})) == el({2}));
}

TEST_CASE("inverses") {
  const GroupSpec z2 = GroupSpec::lattice(2);
  CHECK(inverse(z2, el({1, -3})) == el({-1, 3}));
  const GroupSpec c5 = GroupSpec::cyclic({5});
  CHECK(inverse(c5, el({2})) == el({3}));
  CHECK(inverse(c5, identity(c5)) == identity(c5));
  CHECK(inverse(z2, identity(z2)) == identity(z2));
}

TEST_CASE("arity and range validation") {
  const GroupSpec z2 = GroupSpec::lattice(2);
  CHECK_THROWS_AS(group_op(z2, el({1}), el({1, 2})), InvalidElement);
  CHECK_THROWS_AS(inverse(z2, el({1})), InvalidElement);
  const GroupSpec c4 = GroupSpec::cyclic({4});
  CHECK_THROWS_AS(check_element(c4, el({4})), InvalidElement);
  CHECK_THROWS_AS(check_element(c4, el({-1})), InvalidElement);
}

TEST_CASE("folner windows") {
  const GroupSpec z1 = GroupSpec::lattice(1);
  const FolnerWindow w = folner_window(z1, 2);
  REQUIRE(w.elements.size() == 5);
  for (std::int64_t i = 0; i < 5; ++i) CHECK(w.elements[i] == el({i - 2}));

  const FolnerWindow w2 = folner_window(GroupSpec::lattice(2), 1);
  CHECK(w2.elements.size() == 9);
  CHECK(w2.elements.front() == el({-1, -1}));
  CHECK(w2.elements.back() == el({1, 1}));

  const FolnerWindow wc = folner_window(GroupSpec::cyclic({3}), 7);
  REQUIRE(wc.elements.size() == 3);
  CHECK(wc.elements[0] == el({0}));
  CHECK(wc.elements[2] == el({2}));
}

TEST_CASE("window size and boundary ratio") {
  for (int d = 1; d <= 3; ++d) {
    const GroupSpec g = GroupSpec::lattice(d);
    for (std::int64_t n : {1, 2, 5}) {
      const FolnerWindow w = folner_window(g, n);
      std::int64_t size = 1;
      for (int i = 0; i < d; ++i) size *= 2 * n + 1;
      CHECK(std::int64_t(w.elements.size()) == size);
      std::int64_t boundary = 0;
      for (const auto& e : w.elements)
        if (sup_norm(g, e) == n) ++boundary;
      CHECK(double(boundary) / double(size) <=
            2.0 * d / double(2 * n + 1) + 1e-12);
    }
  }
}

TEST_CASE("group axioms exhaustively on a finite product") {
  const GroupSpec g = GroupSpec::cyclic({3, 4});
  const auto all = folner_window(g, 0).elements;
  REQUIRE(all.size() == 12);
  for (const auto& a : all) {
    CHECK(group_op(g, a, inverse(g, a)) == identity(g));
    for (const auto& b : all) {
      CHECK(group_op(g, a, b) == group_op(g, b, a));
      for (const auto& c : all)
        CHECK(group_op(g, group_op(g, a, b), c) ==
              group_op(g, a, group_op(g, b, c)));
    }
  }
}

TEST_CASE("group axioms randomized on lattices") {
  const GroupSpec g = GroupSpec::lattice(3);
  RngStream rng(7, 0);
  for (int i = 0; i < 200; ++i) {
    auto rnd = [&] {
      std::vector<std::int64_t> c(3);
      for (auto& x : c) x = std::int64_t(rng.next_u32() % 2001) - 1000;
      return GroupElement(c);
    };
    const GroupElement a = rnd(), b = rnd(), c = rnd();
    CHECK(group_op(g, group_op(g, a, b), c) == group_op(g, a, group_op(g, b, c)));
    CHECK(group_op(g, a, inverse(g, a)) == identity(g));
    CHECK(group_op(g, a, identity(g)) == a);
  }
}

TEST_CASE("window positions match enumeration order") {
  for (const GroupSpec& g : {GroupSpec::lattice(2), GroupSpec::cyclic({3, 2})}) {
    const std::int64_t radius = 3;
    const FolnerWindow w = folner_window(g, radius);
    for (std::size_t i = 0; i < w.elements.size(); ++i)
      CHECK(window_position(g, radius, w.elements[i]) == std::int64_t(i));
  }
  CHECK_THROWS_AS(window_position(GroupSpec::lattice(1), 2, el({3})),
                  WindowUnderflow);
}
