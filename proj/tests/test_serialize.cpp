#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <string>
#include <vector>

#include "equinet/serialize.hpp"
#include "test_util.hpp"

using namespace equinet;
using equinet::testutil::make_c4;
using equinet::testutil::make_d4;
using equinet::testutil::make_s;

namespace {

std::shared_ptr<const PermutationGroup> shared(PermutationGroup g) {
  return std::make_shared<const PermutationGroup>(std::move(g));
}

} // namespace

TEST_CASE("group json: round trip, cycle strings, rejection") {
  PermutationGroup d4 = make_d4();
  Json j = group_to_json(d4);
  CHECK(j["degree"] == 4);
  CHECK(j["generators"].size() == 2);

  PermutationGroup back = group_from_json(j);
  CHECK(back.order() == d4.order());
  CHECK(back.elements() == d4.elements());

  Json text = Json::parse(R"json({
    "degree": 4,
    "generators": ["(0 1 2 3)", "(1 3)"]
  })json");
  PermutationGroup from_cycles = group_from_json(text);
  CHECK(from_cycles.elements() == d4.elements());

  // Key order is pinned, so the export is byte-stable.
  CHECK(canonical_dump(j) == canonical_dump(group_to_json(d4)));
  CHECK(canonical_dump(j).rfind("{\"degree\":4,\"generators\":[[", 0) == 0);

  CHECK_THROWS_AS(group_from_json(Json::parse("{}")), std::invalid_argument);
  CHECK_THROWS_AS(group_from_json(Json::parse("[]")), std::invalid_argument);
  CHECK_THROWS_AS(group_from_json(Json::parse(R"({"degree":0,"generators":[]})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      group_from_json(Json::parse(R"({"degree":3,"generators":[[0,1]]})")),
      std::invalid_argument);
  CHECK_THROWS_AS(
      group_from_json(Json::parse(R"({"degree":3,"generators":[[0,0,1]]})")),
      std::invalid_argument);
  CHECK_THROWS_AS(
      group_from_json(Json::parse(R"({"degree":3,"generators":[7]})")),
      std::invalid_argument);
}

TEST_CASE("action export lists one table per element") {
  auto c4 = shared(make_c4());
  GroupAction nat = natural_action(*c4);
  Json j = action_to_json(nat);
  CHECK(j["points"] == 4);
  CHECK(j["tables"].size() == 4);
  CHECK(j["tables"][0] == Json::array({0, 1, 2, 3}));
  CHECK(j["tables"][1] == Json::array({1, 2, 3, 0}));
  CHECK(j["group"]["degree"] == 4);
  CHECK(canonical_dump(j) == canonical_dump(action_to_json(nat)));
}

TEST_CASE("pattern json: frozen S3 tying, dense trivial, round trip") {
  auto s3 = shared(make_s(3));
  GroupAction nat = natural_action(*s3);
  SharingPattern p = pair_orbits(nat, nat);
  Json j = pattern_to_json(p);
  CHECK(canonical_dump(j) ==
        "{\"M\":3,\"N\":3,"
        "\"weight_orbit_id\":[[0,1,1],[1,0,1],[1,1,0]],"
        "\"bias_orbit_id\":[0,0,0],\"free_params\":2}");
  CHECK(pattern_from_json(j) == p);
  CHECK(canonical_dump(pattern_to_json(pattern_from_json(j))) ==
        canonical_dump(j));

  auto triv = shared(trivial_group(2));
  SharingPattern dense = pair_orbits(natural_action(*triv),
                                     natural_action(*triv));
  Json dj = pattern_to_json(dense);
  CHECK(dj["free_params"] == 4);
  CHECK(dj["weight_orbit_id"] ==
        Json::array({Json::array({0, 1}), Json::array({2, 3})}));

  Json bad = j;
  bad["free_params"] = 5;
  CHECK_THROWS_AS(pattern_from_json(bad), std::invalid_argument);
  Json short_row = j;
  short_row["weight_orbit_id"][0] = Json::array({0, 1});
  CHECK_THROWS_AS(pattern_from_json(short_row), std::invalid_argument);
}

TEST_CASE("net spec: canonical dump, round trip, build") {
  NetworkSpec spec;
  spec.kind = NetKind::invariant_sum;
  spec.mode = NetMode::wide;
  spec.degree = 3;
  spec.lane.phi_widths = {1, 4, 4};
  spec.lane.rho_widths = {4, 6, 1};
  CHECK(canonical_dump(net_spec_to_json(spec)) ==
        "{\"kind\":\"invariant_sum\",\"mode\":\"wide\",\"degree\":3,"
        "\"group\":\"\",\"lane\":{\"phi_widths\":[1,4,4],"
        "\"rho_widths\":[4,6,1],\"exact_phi\":false},\"chain\":[]}");

  NetworkSpec back = net_spec_from_json(net_spec_to_json(spec));
  CHECK(back.kind == spec.kind);
  CHECK(back.mode == spec.mode);
  CHECK(back.degree == spec.degree);
  CHECK(back.lane.phi_widths == spec.lane.phi_widths);
  CHECK(back.lane.rho_widths == spec.lane.rho_widths);
  Network sum_net = build_from_spec(back, nullptr);
  CHECK(sum_net.input_dim == 3);

  // Defaults fill in for omitted fields.
  NetworkSpec sparse = net_spec_from_json(
      Json::parse(R"({"kind":"invariant_tensor","chain":["natural","natural"]})"));
  CHECK(sparse.mode == NetMode::wide);
  auto s3 = shared(make_s(3));
  Network tens = build_from_spec(sparse, s3);
  CHECK(tens.params.size() == 3);

  NetworkSpec equi;
  equi.kind = NetKind::equivariant;
  equi.lane.phi_widths = {1, 5, 5};
  equi.lane.rho_widths = {6, 7, 1};
  auto c4 = shared(make_c4());
  Network equi_net = build_from_spec(equi, c4);
  CHECK(equi_net.output_dim == 4);
  CHECK_THROWS_AS(build_from_spec(equi, nullptr), std::invalid_argument);

  CHECK_THROWS_AS(net_spec_from_json(Json::parse(R"({"mode":"wide"})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(net_spec_from_json(Json::parse(R"({"kind":"mystery"})")),
                  std::invalid_argument);
}

TEST_CASE("action names resolve to the declared constructions") {
  auto s3 = shared(make_s(3));
  CHECK(action_from_name(s3, "natural").points == 3);
  CHECK(action_from_name(s3, "tensor2").points == 9);
  CHECK(action_from_name(s3, "tuple2").points == 6);
  CHECK(action_from_name(s3, "union2").points == 6);
  CHECK(action_from_name(s3, "star").points == 9);
  CHECK_THROWS_AS(action_from_name(s3, "spin"), std::invalid_argument);
  CHECK_THROWS_AS(action_from_name(s3, "tensor"), std::invalid_argument);
  CHECK_THROWS_AS(action_from_name(s3, "tensorx"), std::invalid_argument);
  CHECK_THROWS_AS(action_from_name(nullptr, "natural"), std::invalid_argument);
}

TEST_CASE("fnv1a64 matches the published test vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
  CHECK(hash_hex(0xcbf29ce484222325ull) == "cbf29ce484222325");
  CHECK(hash_hex(0x5ull) == "0000000000000005");
}

TEST_CASE("checkpoints carry the spec hash and the exact parameters") {
  NetworkSpec spec;
  spec.kind = NetKind::invariant_sum;
  spec.degree = 3;
  spec.lane.phi_widths = {1, 4, 4};
  spec.lane.rho_widths = {4, 6, 1};
  Network net = build_from_spec(spec, nullptr);
  Rng rng(3);
  initialize_params(net, rng);

  Json ckpt = checkpoint_to_json(net, spec);
  CHECK(ckpt["pattern_hash"].get<std::string>() == spec_hash(spec));

  Network fresh = build_from_spec(spec, nullptr);
  load_checkpoint(ckpt, spec, fresh);
  CHECK(fresh.params == net.params);
  // Serialized doubles round-trip bit for bit.
  load_checkpoint(Json::parse(canonical_dump(ckpt)), spec, fresh);
  CHECK(fresh.params == net.params);

  NetworkSpec other = spec;
  other.lane.rho_widths = {4, 8, 1};
  CHECK(spec_hash(other) != spec_hash(spec));
  Network other_net = build_from_spec(other, nullptr);
  CHECK_THROWS_AS(load_checkpoint(ckpt, other, other_net), std::runtime_error);

  Json trimmed = ckpt;
  trimmed["params"].erase(0);
  CHECK_THROWS_AS(load_checkpoint(trimmed, spec, fresh),
                  std::invalid_argument);
  Json noise = ckpt;
  noise["params"][0] = "zero";
  CHECK_THROWS_AS(load_checkpoint(noise, spec, fresh), std::invalid_argument);
}

TEST_CASE("text file helpers round trip and report failures") {
  std::string path = "/tmp/equinet_serialize_test.json";
  write_text_file(path, "{\"degree\":1,\"generators\":[]}\n");
  CHECK(read_text_file(path) == "{\"degree\":1,\"generators\":[]}\n");
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_text_file("/tmp/equinet_no_such_file_xyz"),
                  std::invalid_argument);
}
