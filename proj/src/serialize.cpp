#include "equinet/serialize.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace equinet {

namespace {

int require_int(const Json &j, const char *key, int min_value) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw std::invalid_argument(std::string("expected integer field \"") +
                                key + "\"");
  int v = j[key].get<int>();
  if (v < min_value)
    throw std::invalid_argument(std::string("field \"") + key +
                                "\" out of range");
  return v;
}

std::vector<int> int_array(const Json &j, const char *what) {
  if (!j.is_array())
    throw std::invalid_argument(std::string(what) + " must be an array");
  std::vector<int> out;
  out.reserve(j.size());
  for (const auto &v : j) {
    if (!v.is_number_integer())
      throw std::invalid_argument(std::string(what) +
                                  " must contain integers");
    out.push_back(v.get<int>());
  }
  return out;
}

} // namespace

Json group_to_json(const PermutationGroup &g) {
  Json out;
  out["degree"] = g.degree();
  Json gens = Json::array();
  for (const Permutation &p : g.generators())
    gens.push_back(p.images());
  out["generators"] = gens;
  return out;
}

PermutationGroup group_from_json(const Json &j) {
  if (!j.is_object())
    throw std::invalid_argument("group: expected a JSON object");
  int degree = require_int(j, "degree", 1);
  if (!j.contains("generators") || !j["generators"].is_array())
    throw std::invalid_argument("group: expected a \"generators\" array");
  std::vector<Permutation> gens;
  for (const auto &g : j["generators"]) {
    if (g.is_string())
      gens.push_back(Permutation::from_cycles(degree, g.get<std::string>()));
    else if (g.is_array()) {
      std::vector<int> images = int_array(g, "generator");
      if (static_cast<int>(images.size()) != degree)
        throw std::invalid_argument("group: generator length != degree");
      gens.push_back(Permutation(std::move(images)));
    } else
      throw std::invalid_argument(
          "group: generators must be image arrays or cycle strings");
  }
  return generate(degree, std::move(gens));
}

Json action_to_json(const GroupAction &a) {
  Json out;
  out["group"] = group_to_json(*a.group);
  out["points"] = a.points;
  Json tables = Json::array();
  for (const Permutation &t : a.tables)
    tables.push_back(t.images());
  out["tables"] = tables;
  return out;
}

Json pattern_to_json(const SharingPattern &p) {
  Json out;
  out["M"] = p.in_size;
  out["N"] = p.out_size;
  Json rows = Json::array();
  for (int i = 0; i < p.out_size; ++i) {
    Json row = Json::array();
    for (int j = 0; j < p.in_size; ++j)
      row.push_back(p.weight_id(i, j));
    rows.push_back(row);
  }
  out["weight_orbit_id"] = rows;
  out["bias_orbit_id"] = p.bias_orbit_id;
  out["free_params"] = count_free_params(p);
  return out;
}

SharingPattern pattern_from_json(const Json &j) {
  SharingPattern p;
  p.in_size = require_int(j, "M", 1);
  p.out_size = require_int(j, "N", 1);
  if (!j.contains("weight_orbit_id") || !j["weight_orbit_id"].is_array() ||
      static_cast<int>(j["weight_orbit_id"].size()) != p.out_size)
    throw std::invalid_argument("pattern: need N rows of weight orbit ids");
  p.weight_orbit_id.reserve(static_cast<std::size_t>(p.in_size) * p.out_size);
  int max_wid = -1;
  for (const auto &row : j["weight_orbit_id"]) {
    std::vector<int> ids = int_array(row, "weight orbit row");
    if (static_cast<int>(ids.size()) != p.in_size)
      throw std::invalid_argument("pattern: weight row length != M");
    for (int id : ids) {
      if (id < -1)
        throw std::invalid_argument("pattern: orbit ids must be >= -1");
      max_wid = std::max(max_wid, id);
      p.weight_orbit_id.push_back(id);
    }
  }
  if (!j.contains("bias_orbit_id"))
    throw std::invalid_argument("pattern: missing bias_orbit_id");
  p.bias_orbit_id = int_array(j["bias_orbit_id"], "bias_orbit_id");
  if (static_cast<int>(p.bias_orbit_id.size()) != p.out_size)
    throw std::invalid_argument("pattern: bias_orbit_id length != N");
  int max_bid = -1;
  for (int id : p.bias_orbit_id) {
    if (id < -1)
      throw std::invalid_argument("pattern: orbit ids must be >= -1");
    max_bid = std::max(max_bid, id);
  }
  p.weight_orbit_count = max_wid + 1;
  p.bias_orbit_count = max_bid + 1;
  if (j.contains("free_params") &&
      j["free_params"].get<int>() != count_free_params(p))
    throw std::invalid_argument("pattern: free_params does not match the ids");
  return p;
}

Json net_spec_to_json(const NetworkSpec &spec) {
  Json out;
  out["kind"] = to_string(spec.kind);
  out["mode"] = to_string(spec.mode);
  out["degree"] = spec.degree;
  out["group"] = spec.group_ref;
  Json lane;
  lane["phi_widths"] = spec.lane.phi_widths;
  lane["rho_widths"] = spec.lane.rho_widths;
  lane["exact_phi"] = spec.lane.exact_phi;
  out["lane"] = lane;
  out["chain"] = spec.chain;
  return out;
}

NetworkSpec net_spec_from_json(const Json &j) {
  if (!j.is_object())
    throw std::invalid_argument("net spec: expected a JSON object");
  if (!j.contains("kind") || !j["kind"].is_string())
    throw std::invalid_argument("net spec: missing \"kind\"");
  NetworkSpec spec;
  spec.kind = net_kind_from_string(j["kind"].get<std::string>());
  if (j.contains("mode"))
    spec.mode = net_mode_from_string(j["mode"].get<std::string>());
  if (j.contains("degree"))
    spec.degree = require_int(j, "degree", 0);
  if (j.contains("group")) {
    if (!j["group"].is_string())
      throw std::invalid_argument("net spec: \"group\" must be a file name");
    spec.group_ref = j["group"].get<std::string>();
  }
  if (j.contains("lane")) {
    const Json &lane = j["lane"];
    if (lane.contains("phi_widths"))
      spec.lane.phi_widths = int_array(lane["phi_widths"], "phi_widths");
    if (lane.contains("rho_widths"))
      spec.lane.rho_widths = int_array(lane["rho_widths"], "rho_widths");
    if (lane.contains("exact_phi")) {
      if (!lane["exact_phi"].is_boolean())
        throw std::invalid_argument("net spec: exact_phi must be a bool");
      spec.lane.exact_phi = lane["exact_phi"].get<bool>();
    }
  }
  if (j.contains("chain")) {
    if (!j["chain"].is_array())
      throw std::invalid_argument("net spec: \"chain\" must be an array");
    for (const auto &name : j["chain"]) {
      if (!name.is_string())
        throw std::invalid_argument("net spec: chain entries are names");
      spec.chain.push_back(name.get<std::string>());
    }
  }
  return spec;
}

GroupAction action_from_name(std::shared_ptr<const PermutationGroup> group,
                             const std::string &name) {
  if (!group)
    throw std::invalid_argument("action_from_name: group required");
  auto suffix_of = [&](std::string_view prefix) {
    std::string rest = name.substr(prefix.size());
    if (rest.empty() ||
        rest.find_first_not_of("0123456789") != std::string::npos)
      throw std::invalid_argument("bad action name: " + name);
    return std::stoi(rest);
  };
  if (name == "natural")
    return natural_action(*group);
  if (name == "star")
    return induced_star_action(*group);
  if (name.rfind("tensor", 0) == 0)
    return tensor_action(*group, suffix_of("tensor"), 1);
  if (name.rfind("tuple", 0) == 0)
    return tuple_action(*group, suffix_of("tuple"));
  if (name.rfind("union", 0) == 0)
    return union_of_permutations(*group, suffix_of("union"));
  throw std::invalid_argument("unknown action name: " + name);
}

Network build_from_spec(const NetworkSpec &spec,
                        std::shared_ptr<const PermutationGroup> group) {
  int n = spec.degree;
  if (n == 0 && group)
    n = group->degree();
  switch (spec.kind) {
  case NetKind::invariant_sum:
    return build_invariant_sum_net(n, spec.mode, spec.lane);
  case NetKind::stab_invariant:
    return build_stab_invariant_net(n, spec.mode, spec.lane);
  case NetKind::equivariant:
    if (!group)
      throw std::invalid_argument("build_from_spec: equivariant needs a group");
    return build_equivariant_net(group, spec.mode, spec.lane);
  case NetKind::invariant_tensor: {
    if (!group)
      throw std::invalid_argument("build_from_spec: tensor net needs a group");
    std::vector<GroupAction> chain;
    for (const std::string &name : spec.chain)
      chain.push_back(action_from_name(group, name));
    return build_invariant_tensor_net(group, chain);
  }
  }
  throw std::logic_error("build_from_spec: unreachable");
}

std::string canonical_dump(const Json &j) { return j.dump(); }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string spec_hash(const NetworkSpec &spec) {
  return hash_hex(fnv1a64(canonical_dump(net_spec_to_json(spec))));
}

Json checkpoint_to_json(const Network &net, const NetworkSpec &spec) {
  Json out;
  out["pattern_hash"] = spec_hash(spec);
  out["params"] = net.params;
  return out;
}

void load_checkpoint(const Json &j, const NetworkSpec &spec, Network &net) {
  if (!j.contains("pattern_hash") || !j["pattern_hash"].is_string())
    throw std::invalid_argument("checkpoint: missing pattern_hash");
  if (j["pattern_hash"].get<std::string>() != spec_hash(spec))
    throw std::runtime_error(
        "checkpoint: pattern_hash does not match the network spec");
  if (!j.contains("params") || !j["params"].is_array())
    throw std::invalid_argument("checkpoint: missing params array");
  std::vector<double> params;
  params.reserve(j["params"].size());
  for (const auto &v : j["params"]) {
    if (!v.is_number())
      throw std::invalid_argument("checkpoint: params must be numbers");
    params.push_back(v.get<double>());
  }
  if (params.size() != net.params.size())
    throw std::invalid_argument("checkpoint: parameter count mismatch");
  net.params = std::move(params);
}

std::string read_text_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string &path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cannot write file: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out)
    throw std::runtime_error("short write: " + path);
}

} // namespace equinet
