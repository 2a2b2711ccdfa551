#pragma once

#include "equinet/perm_group.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace equinet {

struct CheckResult {
  std::string name;
  bool pass = false;
  double max_residual = 0.0;
  std::string detail; // witness on failure, notes otherwise
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  int random_inputs = 100; // probe vectors per analytic check
  int random_maps = 10;    // random equivariant maps for the first-layer law
  /// Negative-control fixture: plants a single off-pattern weight so the
  /// tied-layer check must fail and name a witness.
  bool corrupt_tying = false;
};

/// Property suite over one group: group axioms, orbit-stabilizer counting,
/// coset partitions, the Cayley embedding, the group law of the induced
/// interleaving action, the first-layer conjugation identity with its
/// no-twist negative control, symmetry of built nets and of symmetrized
/// arbitrary functions, tying patterns against the brute-force fixed space,
/// and exactness of realized tied layers. Deterministic given the options.
std::vector<CheckResult>
run_verify_suite(std::shared_ptr<const PermutationGroup> group,
                 const VerifyOptions &opts);

bool all_pass(const std::vector<CheckResult> &results);

} // namespace equinet
