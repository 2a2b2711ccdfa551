#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace equinet {

/// Permutation of {0, ..., degree-1} stored as an image table: images()[i]
/// is the image of i. Immutable after construction.
class Permutation {
public:
  explicit Permutation(int degree);              // identity
  explicit Permutation(std::vector<int> images); // must be a bijection

  /// Parses cycle notation such as "(0 1)(2 4 3)". Points may be separated
  /// by spaces or commas; cycles are applied right to left.
  static Permutation from_cycles(int degree, std::string_view text);

  int degree() const { return static_cast<int>(images_.size()); }
  int operator()(int i) const { return images_[i]; }
  const std::vector<int> &images() const { return images_; }

  Permutation inverse() const;
  bool is_identity() const;
  std::string to_cycles() const;

  friend bool operator==(const Permutation &, const Permutation &) = default;

private:
  std::vector<int> images_;
};

/// compose(p, q) applies q first: compose(p, q)(i) == p(q(i)).
Permutation compose(const Permutation &p, const Permutation &q);

/// Transposition swapping a and b; a == b yields the identity.
Permutation transposition(int degree, int a, int b);

struct PermutationHash {
  std::size_t operator()(const Permutation &p) const;
};

inline constexpr std::size_t kDefaultClosureCap = 10080;

/// Finite permutation group materialized as its full element list.
/// elements()[0] is always the identity and the element order (BFS closure
/// order) is the canonical indexing used by group actions. Immutable.
class PermutationGroup {
public:
  /// Wraps an already closed element set. Closure is the caller's contract;
  /// the identity is moved to index 0. Used for stabilizers and the like,
  /// prefer generate() everywhere else.
  static PermutationGroup from_elements(int degree,
                                        std::vector<Permutation> elements,
                                        std::vector<Permutation> generators);

  int degree() const { return degree_; }
  int order() const { return static_cast<int>(elements_.size()); }
  int identity_index() const { return 0; }

  const std::vector<Permutation> &generators() const { return generators_; }
  const std::vector<Permutation> &elements() const { return elements_; }
  const Permutation &element(int idx) const { return elements_[idx]; }

  /// Index in elements(), or -1 if the permutation is not a member.
  int index_of(const Permutation &p) const;
  bool contains(const Permutation &p) const { return index_of(p) >= 0; }

  /// Index of elements()[a] composed with elements()[b] (b applied first).
  int compose_indices(int a, int b) const;
  int inverse_index(int idx) const { return inverse_[idx]; }

private:
  PermutationGroup() = default;
  void build_index();

  int degree_ = 0;
  std::vector<Permutation> generators_;
  std::vector<Permutation> elements_;
  std::vector<int> inverse_; // inverse_[i] = index of elements_[i]^-1
  std::unordered_map<Permutation, int, PermutationHash> index_;

  friend PermutationGroup generate(int, std::vector<Permutation>, std::size_t);
};

/// BFS closure of the generators. Throws std::length_error once the closure
/// exceeds `cap` elements; generating sets for anything larger are out of
/// scope (no stabilizer-chain machinery here).
PermutationGroup generate(int degree, std::vector<Permutation> generators,
                          std::size_t cap = kDefaultClosureCap);

/// Standard fixtures. All go through generate(), so the usual closure cap
/// applies (symmetric_group beyond n = 7 exceeds the default cap).
PermutationGroup symmetric_group(int n);
PermutationGroup cyclic_group(int n);
/// Symmetries of the regular n-gon on vertices 0..n-1, order 2n; n >= 3.
PermutationGroup dihedral_group(int n);
PermutationGroup trivial_group(int degree);

/// Orbit of point i, sorted ascending. The group convention acts by
/// i -> sigma^{-1}(i); as a set the orbit is the same either way.
std::vector<int> orbit(const PermutationGroup &g, int i);

struct OrbitDecomposition {
  std::vector<std::vector<int>> orbits; // each sorted; ordered by base point
  std::vector<int> base_points;         // minimum of each orbit
  std::vector<int> reorder;             // reorder[old] = new contiguous label
};

/// All orbits plus the relabeling that makes every orbit a contiguous index
/// range (concatenation of the sorted orbits).
OrbitDecomposition orbit_decomposition(const PermutationGroup &g);

/// Conjugates the group by the reorder map of `od`, i.e. relabels points so
/// orbits become contiguous. Identity relabeling returns an equal group.
PermutationGroup apply_orbit_reorder(const PermutationGroup &g,
                                     const OrbitDecomposition &od);

/// Subgroup {g : g(i) == i}. Element order follows the parent group's.
PermutationGroup stabilizer(const PermutationGroup &g, int i);

/// Decomposition G = union_k Stab(base) . tau_k with the canonical property
/// tau_k^{-1}(base) == base + k for k = 0..orbit_size-1.
struct CosetDecomposition {
  PermutationGroup subgroup; // Stab(base)
  std::vector<Permutation> representatives;
  int base_point = 0;

  /// k with g in Stab(base) . representatives[k]; equals g^{-1}(base) - base.
  int coset_index_of(const Permutation &g) const;
};

/// Requires the orbit of `base` to be the contiguous range starting at its
/// own minimum, i.e. orbit == {base, ..., base + l - 1}; apply the orbit
/// reorder first otherwise. Representatives are canonical: among the
/// candidates of each coset the lexicographically smallest image table wins.
CosetDecomposition coset_decomposition(const PermutationGroup &g, int base);

/// Representative system tau_k = transposition(base, base + k). Valid only
/// when those transpositions are members of g (e.g. the full symmetric group
/// on the orbit); throws otherwise. Satisfies the same canonical property as
/// coset_decomposition and reproduces the transposition-based identities.
std::vector<Permutation> transposition_representatives(const PermutationGroup &g,
                                                       int base);

} // namespace equinet
