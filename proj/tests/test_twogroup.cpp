#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>

#include "daseinkit/twogroup.hpp"
#include "test_support.hpp"

using namespace daseinkit;
using namespace testing;

namespace {

void check_enumeration(const FiniteCategory& c, const AutTwoGroup& aut) {
  for (const auto& f : aut.automorphisms) CHECK(is_automorphism(c, f));
  for (const auto& t : aut.two_cells) CHECK(is_natural_isomorphism(c, t));
  // Every automorphism has its identity 2-cell.
  for (const auto& f : aut.automorphisms) {
    const auto id = identity_cell(c, f);
    const bool found = std::any_of(aut.two_cells.begin(), aut.two_cells.end(), [&](const TwoCell& t) {
      return t.source == id.source && t.target == id.target && t.components == id.components;
    });
    CHECK(found);
  }
}

std::size_t euler_phi(std::size_t n) {
  std::size_t count = 0;
  for (std::size_t k = 1; k <= n; ++k) count += std::gcd(k, n) == 1;
  return count;
}

// Sorted multiset of element orders, from repeated multiplication.
std::vector<std::size_t> order_profile(const FiniteGroup& g) {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < g.order(); ++a) {
    std::size_t k = 1, x = a;
    while (x != g.identity()) {
      x = g.mul(x, a);
      ++k;
    }
    out.push_back(k);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("automorphisms of small posets and discrete categories") {
  const auto chain = FiniteCategory::from_poset({"bot", "top"}, {{true, true}, {false, true}});
  const auto a = aut_2group(chain);
  CHECK(a.automorphisms.size() == 1);
  CHECK(a.two_cells.size() == 1);
  check_enumeration(chain, a);

  const auto disc = FiniteCategory::discrete(2);
  const auto d = aut_2group(disc);
  CHECK(d.automorphisms.size() == 2);
  CHECK(d.two_cells.size() == 2);
  check_enumeration(disc, d);

  const auto d4 = aut_2group(FiniteCategory::discrete(4));
  CHECK(d4.automorphisms.size() == 24);

  const std::vector<HermitianOperator> ops{herm(sigma_z(), "Z"), herm(sigma_x(), "X")};
  const auto qubit = FiniteCategory::from_poset(build_category(ops, {}, kTol));
  const auto q = aut_2group(qubit);
  CHECK(q.automorphisms.size() == 2);
  CHECK(q.two_cells.size() == 2);  // poset: identity cells only
  check_enumeration(qubit, q);
  const auto s = check_interchange_exhaustive(qubit, q);
  CHECK(s.quadruples == 4);
  CHECK(s.failures == 0);
}

TEST_CASE("one-object categories: automorphisms are group automorphisms") {
  for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 6u, 8u}) {
    const auto c = one_object_category(cyclic_product({n}));
    const auto aut = aut_2group(c);
    CHECK(aut.automorphisms.size() == euler_phi(n));
    // Abelian: a 2-cell F => G needs G = F, and every element is a component.
    CHECK(aut.two_cells.size() == euler_phi(n) * n);
    check_enumeration(c, aut);
  }
  const auto s3 = one_object_category(dihedral(3));
  const auto aut = aut_2group(s3);
  CHECK(aut.automorphisms.size() == 6);
  CHECK(aut.two_cells.size() == 36);
  check_enumeration(s3, aut);
  const auto summary = check_interchange_exhaustive(s3, aut);
  CHECK(summary.quadruples == 216 * 216);
  CHECK(summary.failures == 0);
  CHECK(aut_2group(one_object_category(cyclic_product({2, 2}))).automorphisms.size() == 6);
}

TEST_CASE("interchange on user-supplied categories") {
  // Two isomorphic objects (the indiscrete groupoid on {a, b}).
  const std::vector<Morphism> mors{{"id_a", 0, 0}, {"id_b", 1, 1}, {"f", 0, 1}, {"g", 1, 0}};
  const std::vector<std::vector<std::size_t>> comp{
      // g o f for row g, column f
      {0, kNoMorphism, kNoMorphism, 3},
      {kNoMorphism, 1, 2, kNoMorphism},
      {2, kNoMorphism, kNoMorphism, 1},
      {kNoMorphism, 3, 0, kNoMorphism},
  };
  const FiniteCategory iso({"a", "b"}, mors, {0, 1}, comp);
  const auto aut = aut_2group(iso);
  CHECK(aut.automorphisms.size() == 2);
  CHECK(aut.two_cells.size() == 4);  // hom-sets are singletons: one cell per ordered pair
  check_enumeration(iso, aut);
  CHECK(check_interchange_exhaustive(iso, aut).failures == 0);

  // An 8-object poset: two disjoint 2x2 diamonds.
  std::vector<std::vector<bool>> leq(8, std::vector<bool>(8));
  for (std::size_t base : {0u, 4u}) {
    for (std::size_t i = 0; i < 4; ++i) leq[base + i][base + i] = true;
    leq[base][base + 1] = leq[base][base + 2] = leq[base][base + 3] = true;
    leq[base + 1][base + 3] = leq[base + 2][base + 3] = true;
  }
  std::vector<std::string> names;
  for (int i = 0; i < 8; ++i) names.push_back("p" + std::to_string(i));
  const auto diamonds = FiniteCategory::from_poset(names, leq);
  const auto da = aut_2group(diamonds);
  CHECK(da.automorphisms.size() == 8);  // swap diamonds x flip each
  check_enumeration(diamonds, da);
  CHECK(check_interchange_exhaustive(diamonds, da).failures == 0);

  CHECK_THROWS_AS(aut_2group(FiniteCategory::discrete(9)), Error);
}

TEST_CASE("composition of 2-cells") {
  const auto c = one_object_category(dihedral(3));
  const auto aut = aut_2group(c);
  const auto& t = aut.two_cells;
  // Find two cells that cannot compose vertically.
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j) {
      if (t[i].target == t[j].source) {
        const auto v = compose_vertical(c, t[i], t[j]);
        CHECK(is_natural_isomorphism(c, v));
      } else {
        try {
          compose_vertical(c, t[i], t[j]);
          FAIL("expected NotComposable");
        } catch (const Error& e) {
          CHECK(e.kind() == ErrorKind::NotComposable);
        }
      }
      CHECK(is_natural_isomorphism(c, compose_horizontal(c, t[i], t[j])));
    }
  const auto id = identity_cell(c, aut.automorphisms.front());
  CHECK(check_interchange(c, id, id, id, id));
  CHECK_THROWS_AS(check_interchange(c, t[0], t[7], t[0], t[0]), Error);
}

TEST_CASE("FiniteCategory and FiniteGroup validation") {
  const std::vector<Morphism> mors{{"id", 0, 0}, {"f", 0, 0}};
  // f o f = f is fine (idempotent); f o f = id also fine; a wrong identity is not.
  CHECK_NOTHROW(FiniteCategory({"x"}, mors, {0}, {{0, 1}, {1, 1}}));
  CHECK_THROWS_AS(FiniteCategory({"x"}, mors, {0}, {{0, 0}, {1, 1}}), Error);
  CHECK_THROWS_AS(FiniteGroup("bad", {"e", "a"}, {{0, 1}, {1, 1}}), Error);
  CHECK_THROWS_AS(FiniteGroup("bad", {"e", "a"}, {{0, 1}, {1, 2}}), Error);
}

TEST_CASE("catalog of groups of order <= 12") {
  const auto cat = small_group_catalog();
  std::map<std::size_t, std::size_t> per_order;
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> profiles;
  for (const auto& e : cat) {
    ++per_order[e.group.order()];
    profiles.emplace_back(e.abelian, order_profile(e.group));
  }
  const std::map<std::size_t, std::size_t> expected{{1, 1}, {2, 1}, {3, 1}, {4, 2},  {5, 1},  {6, 2},
                                                    {7, 1}, {8, 5}, {9, 2}, {10, 2}, {11, 1}, {12, 5}};
  CHECK(per_order == expected);
  // Pairwise non-isomorphic: (abelian, element-order profile) separates them.
  std::sort(profiles.begin(), profiles.end());
  CHECK(std::adjacent_find(profiles.begin(), profiles.end()) == profiles.end());

  for (const auto& e : cat) {
    const auto r = eckmann_hilton_check(e.group);
    CHECK_MESSAGE(r.consistent == e.abelian, e.group.name());
    if (r.witness) {
      const auto [a, b] = *r.witness;
      CHECK(e.group.mul(a, b) != e.group.mul(b, a));
    }
  }
}

TEST_CASE("Eckmann-Hilton examples") {
  CHECK(eckmann_hilton_check(cyclic_product({4})).consistent);
  CHECK(eckmann_hilton_check(cyclic_product({1})).consistent);
  const auto s3 = dihedral(3);
  const auto r = eckmann_hilton_check(s3);
  CHECK_FALSE(r.consistent);
  REQUIRE(r.witness.has_value());
  const auto [a, b] = *r.witness;
  CHECK(s3.mul(a, b) != s3.mul(b, a));
}
