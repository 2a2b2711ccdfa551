#pragma once

#include "equinet/actions.hpp"
#include "equinet/equi_linear.hpp"
#include "equinet/nets.hpp"
#include "equinet/perm_group.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace equinet {

/// All exports use ordered_json so the key order, and therefore the byte
/// stream, is stable across runs.
using Json = nlohmann::ordered_json;

// Group files: {"degree": n, "generators": [...]}, each generator either an
// image array like [1, 0, 2] or a cycle string like "(0 1)(2 3)".
Json group_to_json(const PermutationGroup &g);
PermutationGroup group_from_json(const Json &j);

// Action export for cross-checking by external tools:
// {"group": ..., "points": m, "tables": [[...], ...]} with one image table
// per group element, in element order.
Json action_to_json(const GroupAction &a);

// Sharing pattern: {"M", "N", "weight_orbit_id" (N rows of M ids),
// "bias_orbit_id", "free_params"}; free_params counts weight orbits.
Json pattern_to_json(const SharingPattern &p);
SharingPattern pattern_from_json(const Json &j);

/// Architecture description sufficient to rebuild a network. `group_ref`
/// optionally names the group file the spec expects; the caller resolves it.
/// `chain` lists tensor-net actions by name: "natural", "tensor<k>",
/// "tuple<d>", "union<c>", "star".
struct NetworkSpec {
  NetKind kind = NetKind::invariant_sum;
  NetMode mode = NetMode::wide;
  int degree = 0;
  std::string group_ref;
  LaneSpec lane;
  std::vector<std::string> chain;
};

Json net_spec_to_json(const NetworkSpec &spec);
NetworkSpec net_spec_from_json(const Json &j);

GroupAction action_from_name(std::shared_ptr<const PermutationGroup> group,
                             const std::string &name);

/// Builds the network the spec describes. Lane kinds take the widths from
/// spec.lane; invariant_sum and stab_invariant use spec.degree (or the
/// group's degree when 0 and a group is given).
Network build_from_spec(const NetworkSpec &spec,
                        std::shared_ptr<const PermutationGroup> group);

/// Compact dump with stable key order; hashing input for checkpoints.
std::string canonical_dump(const Json &j);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_hex(std::uint64_t h);

/// Network spec hash: FNV-1a 64 over the canonical spec dump. The tying
/// pattern is a pure function of the spec and group, so this pins it.
std::string spec_hash(const NetworkSpec &spec);

// Checkpoint: {"pattern_hash": spec_hash, "params": [...]}.
Json checkpoint_to_json(const Network &net, const NetworkSpec &spec);
void load_checkpoint(const Json &j, const NetworkSpec &spec,
                     Network &net);

std::string read_text_file(const std::string &path);
void write_text_file(const std::string &path, std::string_view content);

} // namespace equinet
