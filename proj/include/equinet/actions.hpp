#pragma once

#include <memory>
#include <span>
#include <vector>

#include "equinet/perm_group.hpp"

namespace equinet {

/// Cap on flattened index spaces (tensor powers grow fast).
inline constexpr int kMaxActionPoints = 4096;

/// Explicit embedding of a group into S_m: one index permutation per group
/// element, aligned with group->elements() order. Vectors transform by
/// (sigma . x)_i = x_{table(sigma)^{-1}(i)}, which makes the tables a
/// homomorphism: table(g h) == compose(table(g), table(h)).
struct GroupAction {
  std::shared_ptr<const PermutationGroup> group;
  int points = 0;
  std::vector<Permutation> tables;
  std::vector<Permutation> inverse_tables;

  const Permutation &table(int element_index) const {
    return tables[element_index];
  }
  const Permutation &inverse_table(int element_index) const {
    return inverse_tables[element_index];
  }
};

/// Assembles an action from forward tables, filling in the inverses.
GroupAction make_action(const PermutationGroup &group,
                        std::vector<Permutation> tables);

/// Pure index gather: result[i] = x[table(sigma)^{-1}(i)]. No arithmetic
/// touches the values, so equivariance of the shuffle itself is exact.
std::vector<double> apply(const GroupAction &a, int element_index,
                          std::span<const double> x);

/// (sigma . x)[i] = x[sigma^{-1}(i)], the same convention as apply() but for
/// a bare permutation instead of an action table.
std::vector<double> permute_vector(const Permutation &sigma,
                                   std::span<const double> x);

/// phi(sigma) = sigma: the defining action on R^degree.
GroupAction natural_action(const PermutationGroup &group);

/// Order-k tensor index with trivial channels:
/// (i_1, ..., i_k, c) -> (sigma(i_1), ..., sigma(i_k), c), flattened
/// row-major with the channel minor. points = degree^k * channels.
GroupAction tensor_action(const PermutationGroup &group, int k, int channels);

/// block_count blocks of dimension block_dim permuted as units:
/// (i, j) -> (sigma(i), j) on flat index i * block_dim + j. block_count must
/// equal the group degree.
GroupAction tuple_action(const PermutationGroup &group, int block_dim);

/// Disjoint copies of the natural action, copy-major: flat = copy * n + i.
GroupAction union_of_permutations(const PermutationGroup &group, int copies);

/// Appends trivial channels to any action, channel-minor:
/// flat = point * channels + c.
GroupAction extend_with_trivial_channels(const GroupAction &a, int channels);

/// Twist element tau_k sigma tau_{k'}^{-1}, where k = i - base indexes the
/// coset of point i and k' = sigma^{-1}(i) - base. Lands in Stab(base); the
/// defining identity tau_k . sigma == result . tau_{k'} holds exactly.
/// `reps` must satisfy reps[k]^{-1}(base) == base + k (canonical property).
Permutation sigma_tilde(const PermutationGroup &group,
                        const std::vector<Permutation> &reps, int base,
                        const Permutation &sigma, int i);

/// Convenience overload using the canonical coset representatives of the
/// orbit of i.
Permutation sigma_tilde(const PermutationGroup &group, const Permutation &sigma,
                        int i);

/// Induced action on R^{n^2} viewed as n blocks of R^n. Output block c pulls
/// input block sigma^{-1}(c) and twists it by the Stab(base)-element
/// sigma_tilde for c's coset. Non-transitive groups are handled blockwise,
/// each orbit with its own representative system. Orbits must be contiguous
/// index ranges (apply_orbit_reorder first otherwise).
/// Flat layout: flat = block * n + position.
GroupAction induced_star_action(const PermutationGroup &group);

/// Same construction with an explicit representative system for a transitive
/// group (e.g. transposition representatives on a full symmetric orbit).
GroupAction induced_star_action(const PermutationGroup &group,
                                const std::vector<Permutation> &reps);

/// Regular action of the group on its own element list by left
/// multiplication: phi(g)(i) = index of g * elements[i].
GroupAction cayley_embedding(const PermutationGroup &group);

/// Exhaustive check of table(g h) == compose(table(g), table(h)); intended
/// for test-sized groups.
bool verify_homomorphism(const GroupAction &a);

/// True when distinct group elements induce distinct index tables.
bool action_is_faithful(const GroupAction &a);

/// True when no non-identity element fixes any point.
bool action_is_free(const GroupAction &a);

/// Flattening schemes, exposed for bijection tests and external tooling.
struct TensorIndexScheme {
  int degree = 0, order = 0, channels = 1;
  int points() const;
  int encode(std::span<const int> multi, int channel) const;
  void decode(int flat, std::span<int> multi, int &channel) const;
};

struct BlockIndexScheme {
  int blocks = 0, block_dim = 0;
  int points() const { return blocks * block_dim; }
  int encode(int block, int position) const { return block * block_dim + position; }
  int block_of(int flat) const { return flat / block_dim; }
  int position_of(int flat) const { return flat % block_dim; }
};

} // namespace equinet
