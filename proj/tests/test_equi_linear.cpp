#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <set>

#include "equinet/equi_linear.hpp"
#include "test_util.hpp"

using namespace equinet;
using namespace equinet::testutil;

namespace {

// Independent oracle: stack the linear constraints P_out(g) W = W P_in(g)
// for every generator and measure the solution space by rank. Entirely
// separate route from both pair_orbits and the averaging basis.
int nullspace_dimension(const GroupAction &in_action, const GroupAction &out_action) {
  const int m = in_action.points, n = out_action.points;
  const auto &g = *in_action.group;
  std::vector<int> gens;
  for (const auto &gen : g.generators())
    gens.push_back(g.index_of(gen));
  if (gens.empty())
    gens.push_back(g.identity_index());

  Eigen::MatrixXd c(static_cast<long>(gens.size()) * n * m, n * m);
  c.setZero();
  long row = 0;
  for (int e : gens) {
    const Permutation &t_in = in_action.tables[e];
    const Permutation &t_out_inv = out_action.inverse_tables[e];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) {
        c(row, static_cast<long>(t_out_inv(i)) * m + j) += 1.0;
        c(row, static_cast<long>(i) * m + t_in(j)) -= 1.0;
        ++row;
      }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(c);
  return n * m - static_cast<int>(qr.rank());
}

int brute_count(const GroupAction &in_action, const GroupAction &out_action) {
  return static_cast<int>(
      brute_force_equivariant_basis(in_action, out_action).size());
}

} // namespace

TEST_CASE("natural pair orbits: diagonal plus off-diagonal") {
  PermutationGroup s3 = make_s(3);
  GroupAction nat = natural_action(s3);
  SharingPattern p = pair_orbits(nat, nat);
  CHECK(p.weight_orbit_count == 2);
  CHECK(p.bias_orbit_count == 1);
  CHECK(count_free_params(p) == 2);
  CHECK(p.free_param_count() == 3);
  // Row-major first-encounter ids: (0,0) diagonal first.
  CHECK(p.weight_id(0, 0) == 0);
  CHECK(p.weight_id(0, 1) == 1);
  CHECK(p.weight_id(1, 1) == 0);
  CHECK(p.weight_id(2, 0) == 1);

  CHECK(brute_count(nat, nat) == 2);
  CHECK(nullspace_dimension(nat, nat) == 2);
}

TEST_CASE("pattern dimension agrees with averaging and nullspace oracles") {
  PermutationGroup s3 = make_s(3);
  PermutationGroup s4 = make_s(4);
  PermutationGroup c4 = make_c4();
  PermutationGroup d4 = make_d4();
  PermutationGroup swap3 = make_s2_in_s3();
  PermutationGroup triv = generate(4, {});

  struct Case {
    GroupAction in, out;
    int expect; // -1: no frozen value, oracles only
  };
  std::vector<Case> cases;
  cases.push_back({natural_action(s4), natural_action(s4), 2});
  cases.push_back({natural_action(c4), natural_action(c4), 4});
  cases.push_back({natural_action(d4), natural_action(d4), 3});
  cases.push_back({natural_action(swap3), natural_action(swap3), 5});
  cases.push_back({natural_action(triv), natural_action(triv), 16});
  cases.push_back({tensor_action(s3, 2, 1), natural_action(s3), -1});
  cases.push_back({natural_action(s4), tensor_action(s4, 2, 1), -1});
  cases.push_back({tensor_action(s3, 2, 1), tensor_action(s3, 2, 1), 14});
  cases.push_back({tuple_action(s3, 2), tuple_action(s3, 2), 8});
  cases.push_back({induced_star_action(s3), natural_action(s3), 5});
  cases.push_back({natural_action(s4), induced_star_action(s4), 5});
  cases.push_back({induced_star_action(s3), induced_star_action(s3), -1});

  for (const auto &c : cases) {
    SharingPattern p = pair_orbits(c.in, c.out);
    int avg = brute_count(c.in, c.out);
    CHECK(p.weight_orbit_count == avg);
    CHECK(p.weight_orbit_count == nullspace_dimension(c.in, c.out));
    if (c.expect >= 0)
      CHECK(p.weight_orbit_count == c.expect);
  }
}

TEST_CASE("union-of-permutations layers carry 2MN/n^2 weights") {
  for (int n : {2, 3, 4}) {
    PermutationGroup sn = make_s(n);
    for (int in_copies : {1, 2, 3})
      for (int out_copies : {1, 2}) {
        GroupAction in_action = union_of_permutations(sn, in_copies);
        GroupAction out_action = union_of_permutations(sn, out_copies);
        SharingPattern p = pair_orbits(in_action, out_action);
        int m = in_action.points, nn = out_action.points;
        CHECK(count_free_params(p) == 2 * m * nn / (n * n));
        CHECK(count_free_params(p) == brute_count(in_action, out_action));
        // Bias: one parameter per output copy.
        CHECK(p.bias_orbit_count == out_copies);
      }
  }
  // Same count for the subgroup C4 (its natural action is one permutation
  // copy as well).
  PermutationGroup c4 = make_c4();
  SharingPattern p = pair_orbits(union_of_permutations(c4, 2),
                                 union_of_permutations(c4, 3));
  // C4 pairs split further than S4 pairs: 4 orbits per block, not 2.
  CHECK(p.weight_orbit_count == 4 * 2 * 3);
}

TEST_CASE("realized layers are exactly equivariant and copy parameters") {
  std::mt19937_64 rng(13);
  PermutationGroup s4 = make_s(4);
  GroupAction in_action = union_of_permutations(s4, 2);
  GroupAction out_action = union_of_permutations(s4, 3);
  TiedLinearLayer layer = make_tied_layer(pair_orbits(in_action, out_action));
  for (double &v : layer.params)
    v = uniform(rng, -1.0, 1.0);

  Matrix w = realize_weights(layer);
  CHECK(max_equivariance_residual(w, in_action, out_action) == 0.0);

  // Distinct realized values never exceed the free weight count.
  std::set<double> values(w.a.begin(), w.a.end());
  CHECK(static_cast<int>(values.size()) <= count_free_params(layer.pattern));

  // Mutating one orbit parameter touches exactly its orbit entries.
  Matrix before = w;
  layer.params[2] += 0.75;
  Matrix after = realize_weights(layer);
  for (int i = 0; i < w.rows; ++i)
    for (int j = 0; j < w.cols; ++j) {
      bool in_orbit = layer.pattern.weight_id(i, j) == 2;
      CHECK((after.at(i, j) != before.at(i, j)) == in_orbit);
    }

  std::vector<double> bias = realize_bias(layer);
  for (int i = 0; i < out_action.points; ++i)
    CHECK(bias[i] ==
          layer.params[layer.pattern.weight_orbit_count +
                       layer.pattern.bias_orbit_id[i]]);
}

TEST_CASE("averaging basis is orthogonal, equivariant, and dense-id aligned") {
  PermutationGroup d4 = make_d4();
  GroupAction nat = natural_action(d4);
  auto basis = brute_force_equivariant_basis(nat, nat);
  REQUIRE(basis.size() == 3);
  SharingPattern p = pair_orbits(nat, nat);

  for (std::size_t a = 0; a < basis.size(); ++a) {
    CHECK(max_equivariance_residual(basis[a], nat, nat) == 0.0);
    for (std::size_t b = a + 1; b < basis.size(); ++b) {
      double dot = 0.0;
      for (std::size_t k = 0; k < basis[a].a.size(); ++k)
        dot += basis[a].a[k] * basis[b].a[k];
      CHECK(dot == 0.0); // disjoint supports
    }
    // Support of each basis element is exactly one pattern orbit.
    std::set<int> ids;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (basis[a].at(i, j) != 0.0)
          ids.insert(p.weight_id(i, j));
    CHECK(ids.size() == 1);
  }
}

TEST_CASE("symmetric-group natural basis is the identity + all-ones plane") {
  for (int n : {3, 4, 5}) {
    PermutationGroup sn = make_s(n);
    GroupAction nat = natural_action(sn);
    auto basis = brute_force_equivariant_basis(nat, nat);
    REQUIRE(basis.size() == 2);

    // Re-express each basis element as lambda I + gamma 11^T; reconstruction
    // must be exact to 1e-12.
    for (const auto &b : basis) {
      double diag = b.at(0, 0), off = b.at(0, 1);
      double lambda = diag - off, gamma = off;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double recon = gamma + (i == j ? lambda : 0.0);
          CHECK(std::abs(recon - b.at(i, j)) <= 1e-12);
        }
    }

    // Conversely I and 11^T realize from pattern parameters exactly.
    SharingPattern p = pair_orbits(nat, nat);
    REQUIRE(p.weight_orbit_count == 2);
    std::vector<double> params(p.free_param_count(), 0.0);
    params[p.weight_id(0, 0)] = 1.0; // identity: diagonal orbit only
    Matrix eye = realize_weights(p, params);
    params[p.weight_id(0, 1)] = 1.0; // all-ones: both orbits at 1
    Matrix ones = realize_weights(p, params);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        CHECK(eye.at(i, j) == (i == j ? 1.0 : 0.0));
        CHECK(ones.at(i, j) == 1.0);
      }
  }
}

TEST_CASE("parameter bound tracks the per-layer accounting") {
  ParameterBound r = parameter_bound({9, 9, 9}, 3, 2);
  CHECK(r.max_width == 9);
  CHECK(r.depth == 2);
  CHECK(!r.overflow);
  CHECK(r.usual == doctest::Approx(std::pow(9.0, 4)).epsilon(1e-12));
  CHECK(r.bound == doctest::Approx(std::pow(9.0, 4) * std::pow(2.0 / 9.0, 2))
                       .epsilon(1e-12));
  // Exact per-layer: 2*9*9/9 = 18 each.
  CHECK(r.exact_tied == doctest::Approx(18.0 * 18.0).epsilon(1e-12));
  CHECK(r.exact_tied <= r.bound);

  // Mixed tied/untied, widths multiples of n only where tied.
  ParameterBound mixed = parameter_bound({6, 9, 5}, 3, 1);
  CHECK(mixed.exact_tied == doctest::Approx((2.0 * 6 * 9 / 9) * (9 * 5)));
  CHECK(mixed.bound ==
        doctest::Approx(std::pow(9.0, 4) * (2.0 / 9.0)).epsilon(1e-12));

  CHECK_THROWS_AS(parameter_bound({5, 9, 9}, 3, 2), std::invalid_argument);
  CHECK_THROWS_AS(parameter_bound({9, 9}, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(parameter_bound({9}, 3, 0), std::invalid_argument);

  // Saturation path: astronomically wide profile flags overflow.
  ParameterBound big = parameter_bound(std::vector<int>(60, 1 << 20), 4, 0);
  CHECK(big.overflow);
  CHECK(std::isinf(big.usual));
}

TEST_CASE("input validation") {
  PermutationGroup s3 = make_s(3);
  PermutationGroup c4 = make_c4();
  CHECK_THROWS_AS(pair_orbits(natural_action(s3), natural_action(c4)),
                  std::invalid_argument);
  PermutationGroup s4 = make_s(4);
  GroupAction big = union_of_permutations(s4, 17); // 68 points
  CHECK_THROWS_AS(brute_force_equivariant_basis(big, big),
                  std::invalid_argument);
}
