#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "equinet/perm_group.hpp"
#include "test_util.hpp"

using namespace equinet;
using namespace equinet::testutil;

TEST_CASE("compose applies the right factor first") {
  Permutation p = Permutation::from_cycles(3, "(0 1)");
  Permutation q = Permutation::from_cycles(3, "(1 2)");
  // Oracle: images[i] = p(q(i)) entry by entry.
  std::vector<int> expect(3);
  for (int i = 0; i < 3; ++i)
    expect[i] = p(q(i));
  CHECK(compose(p, q).images() == expect);
  CHECK(compose(p, q).images() == std::vector<int>{1, 2, 0});
  CHECK(compose(q, p).images() == std::vector<int>{2, 0, 1});
}

TEST_CASE("permutation basics") {
  Permutation id(4);
  CHECK(id.is_identity());
  CHECK(id.to_cycles() == "()");

  Permutation t = transposition(4, 1, 3);
  CHECK(t.images() == std::vector<int>{0, 3, 2, 1});
  CHECK(compose(t, t).is_identity());
  CHECK(t.inverse() == t);

  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    Permutation r = random_permutation(6, rng);
    CHECK(compose(r, r.inverse()).is_identity());
    CHECK(compose(r.inverse(), r).is_identity());
    CHECK(Permutation::from_cycles(6, r.to_cycles()) == r);
  }

  CHECK_THROWS_AS(Permutation(std::vector<int>{0, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Permutation(std::vector<int>{0, 3}), std::invalid_argument);
  CHECK_THROWS_AS(Permutation::from_cycles(3, "(0 3)"), std::invalid_argument);
  CHECK_THROWS_AS(Permutation::from_cycles(3, "(0 1"), std::invalid_argument);
}

TEST_CASE("cycle notation applies right to left, tolerates commas") {
  CHECK(Permutation::from_cycles(4, "(0 1)(2 3)").images() ==
        std::vector<int>{1, 0, 3, 2});
  CHECK(Permutation::from_cycles(3, "(0, 1, 2)").images() ==
        std::vector<int>{1, 2, 0});
  // Overlapping cycles: (1 2) acts first, then (0 1).
  Permutation lhs = Permutation::from_cycles(3, "(0 1)(1 2)");
  Permutation rhs = compose(Permutation::from_cycles(3, "(0 1)"),
                            Permutation::from_cycles(3, "(1 2)"));
  CHECK(lhs == rhs);
  CHECK(Permutation::from_cycles(5, "").is_identity());
}

TEST_CASE("generate closes fixture groups to known orders") {
  CHECK(make_s(2).order() == 2);
  CHECK(make_s(3).order() == 6);
  CHECK(make_s(4).order() == 24);
  CHECK(make_s(5).order() == 120);
  CHECK(make_c4().order() == 4);
  CHECK(make_d4().order() == 8);
  CHECK(make_s2_in_s3().order() == 2);
  CHECK(generate(4, {}).order() == 1);

  // Identity sits at index 0 by construction.
  CHECK(make_s(4).element(0).is_identity());
  CHECK(make_s(4).identity_index() == 0);
}

TEST_CASE("lagrange and closure properties") {
  auto factorial = [](int n) {
    long long f = 1;
    for (int i = 2; i <= n; ++i)
      f *= i;
    return f;
  };
  std::mt19937_64 rng(11);
  for (int n = 2; n <= 6; ++n) {
    for (int trial = 0; trial < 6; ++trial) {
      std::vector<Permutation> gens;
      int count = 1 + static_cast<int>(rng() % 2);
      for (int k = 0; k < count; ++k)
        gens.push_back(random_permutation(n, rng));
      PermutationGroup g = generate(n, gens);
      CHECK(factorial(n) % g.order() == 0);

      // Closure under composition and inverse via the index.
      for (int trip = 0; trip < 20; ++trip) {
        int a = static_cast<int>(rng() % g.order());
        int b = static_cast<int>(rng() % g.order());
        int c = static_cast<int>(rng() % g.order());
        CHECK(g.compose_indices(a, b) >= 0);
        CHECK(g.element(g.inverse_index(a)) == g.element(a).inverse());
        // Associativity spot-check.
        int ab_c = g.compose_indices(g.compose_indices(a, b), c);
        int a_bc = g.compose_indices(a, g.compose_indices(b, c));
        CHECK(ab_c == a_bc);
      }
    }
  }
}

TEST_CASE("closure cap raises a clear error") {
  // S8 has order 40320 > 10080.
  std::vector<int> cyc(8);
  for (int i = 0; i < 8; ++i)
    cyc[i] = (i + 1) % 8;
  CHECK_THROWS_AS(generate(8, {transposition(8, 0, 1), Permutation(cyc)}),
                  std::length_error);
  // An explicit cap can lift the default.
  CHECK(generate(7, {transposition(7, 0, 1),
                     Permutation::from_cycles(7, "(0 1 2 3 4 5 6)")})
            .order() == 5040);
}

TEST_CASE("orbits are sorted and partition the points") {
  PermutationGroup s3 = make_s(3);
  CHECK(orbit(s3, 0) == std::vector<int>{0, 1, 2});

  // Two-orbit fixture: swap acts on {0,1}, fixes 2.
  PermutationGroup g = make_s2_in_s3();
  OrbitDecomposition od = orbit_decomposition(g);
  REQUIRE(od.orbits.size() == 2);
  CHECK(od.orbits[0] == std::vector<int>{0, 1});
  CHECK(od.orbits[1] == std::vector<int>{2});
  CHECK(od.base_points == std::vector<int>{0, 2});
  CHECK(od.reorder == std::vector<int>{0, 1, 2});

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 3 + static_cast<int>(rng() % 4);
    PermutationGroup h = generate(n, {random_permutation(n, rng)});
    OrbitDecomposition d = orbit_decomposition(h);
    std::set<int> all;
    for (const auto &o : d.orbits) {
      CHECK(std::is_sorted(o.begin(), o.end()));
      for (int p : o)
        CHECK(all.insert(p).second); // disjoint
    }
    CHECK(static_cast<int>(all.size()) == n);
  }
}

TEST_CASE("orbit-stabilizer product equals the group order") {
  for (const auto &g : {make_s(2), make_s(3), make_s(4), make_c4(), make_d4(),
                        make_s2_in_s3()}) {
    for (int i = 0; i < g.degree(); ++i) {
      auto o = orbit(g, i);
      PermutationGroup st = stabilizer(g, i);
      CHECK(static_cast<int>(o.size()) * st.order() == g.order());
      // Stabilizer is closed.
      for (const auto &a : st.elements())
        for (const auto &b : st.elements())
          CHECK(st.contains(compose(a, b)));
    }
  }
}

TEST_CASE("orbit reorder makes orbits contiguous") {
  // <(0 2)> has the non-contiguous orbit {0,2}.
  PermutationGroup g = generate(3, {Permutation::from_cycles(3, "(0 2)")});
  OrbitDecomposition od = orbit_decomposition(g);
  CHECK(od.orbits[0] == std::vector<int>{0, 2});
  CHECK(od.reorder == std::vector<int>{0, 2, 1});
  CHECK_THROWS_AS(coset_decomposition(g, 0), std::invalid_argument);

  PermutationGroup h = apply_orbit_reorder(g, od);
  CHECK(h.order() == 2);
  OrbitDecomposition od2 = orbit_decomposition(h);
  CHECK(od2.orbits[0] == std::vector<int>{0, 1});
  CHECK_NOTHROW(coset_decomposition(h, 0));
}

TEST_CASE("coset decomposition is canonical and partitions the group") {
  PermutationGroup s3 = make_s(3);
  CosetDecomposition cd = coset_decomposition(s3, 0);
  REQUIRE(cd.representatives.size() == 3);
  CHECK(cd.subgroup.order() == 2);
  // Lexicographically smallest image tables per coset.
  CHECK(cd.representatives[0].images() == std::vector<int>{0, 1, 2});
  CHECK(cd.representatives[1].images() == std::vector<int>{1, 0, 2});
  CHECK(cd.representatives[2].images() == std::vector<int>{1, 2, 0});

  for (const auto &g : {make_s(2), make_s(3), make_s(4), make_c4(), make_d4(),
                        make_s2_in_s3()}) {
    for (int base : orbit_decomposition(g).base_points) {
      if (orbit(g, base).front() != base)
        continue;
      CosetDecomposition d = coset_decomposition(g, base);
      auto l = static_cast<int>(d.representatives.size());
      CHECK(l * d.subgroup.order() == g.order());
      std::vector<int> sizes(l, 0);
      for (int k = 0; k < l; ++k) {
        // Canonical property tau_k^{-1}(base) == base + k.
        CHECK(d.representatives[k].inverse()(base) == base + k);
        CHECK(g.contains(d.representatives[k]));
      }
      for (const auto &e : g.elements()) {
        int k = d.coset_index_of(e);
        ++sizes[k];
        // Membership in Stab(base) . tau_k.
        CHECK(d.subgroup.contains(
            compose(e, d.representatives[k].inverse())));
      }
      for (int k = 0; k < l; ++k)
        CHECK(sizes[k] == d.subgroup.order());
    }
  }
}

TEST_CASE("transposition representatives exist exactly in symmetric orbits") {
  auto reps = transposition_representatives(make_s(3), 0);
  REQUIRE(reps.size() == 3);
  CHECK(reps[0].is_identity());
  CHECK(reps[1] == transposition(3, 0, 1));
  CHECK(reps[2] == transposition(3, 0, 2));
  for (std::size_t k = 0; k < reps.size(); ++k)
    CHECK(reps[k].inverse()(0) == static_cast<int>(k));

  CHECK_NOTHROW(transposition_representatives(make_s2_in_s3(), 0));
  CHECK_THROWS_AS(transposition_representatives(make_c4(), 0),
                  std::invalid_argument);
}

TEST_CASE("membership queries") {
  PermutationGroup c4 = make_c4();
  CHECK(c4.contains(Permutation::from_cycles(4, "(0 2)(1 3)")));
  CHECK(!c4.contains(transposition(4, 0, 1)));
  CHECK(c4.index_of(Permutation(4)) == 0);
  CHECK(c4.index_of(transposition(4, 0, 1)) == -1);
}
