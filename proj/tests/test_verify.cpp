#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <memory>
#include <string>

#include "equinet/verify.hpp"
#include "test_util.hpp"

using namespace equinet;
using equinet::testutil::make_c4;
using equinet::testutil::make_d4;
using equinet::testutil::make_s;
using equinet::testutil::make_s2_in_s3;

namespace {

std::shared_ptr<const PermutationGroup> shared(PermutationGroup g) {
  return std::make_shared<const PermutationGroup>(std::move(g));
}

std::map<std::string, CheckResult>
by_name(const std::vector<CheckResult> &results) {
  std::map<std::string, CheckResult> out;
  for (const CheckResult &r : results)
    out[r.name] = r;
  return out;
}

} // namespace

TEST_CASE("suite passes on the fixture groups") {
  VerifyOptions opts;
  opts.random_inputs = 40;
  opts.random_maps = 5;
  for (auto make : {+[] { return make_s(3); }, +[] { return make_s(4); },
                    +[] { return make_c4(); }, +[] { return make_d4(); },
                    +[] { return make_s2_in_s3(); },
                    +[] { return trivial_group(4); }}) {
    auto group = shared(make());
    auto results = run_verify_suite(group, opts);
    CHECK(all_pass(results));
    for (const CheckResult &r : results) {
      INFO(r.name << ": " << r.detail);
      CHECK(r.pass);
    }
  }
}

TEST_CASE("twist check finds a witness where stabilizers are nontrivial") {
  VerifyOptions opts;
  opts.random_inputs = 40;
  opts.random_maps = 5;

  auto s3 = by_name(run_verify_suite(shared(make_s(3)), opts));
  CHECK(s3.at("first_layer_twist_required").pass);
  CHECK(s3.at("first_layer_twist_required").max_residual > 1e-6);
  CHECK(s3.at("first_layer_twist_required").detail.find("sigma=") !=
        std::string::npos);
  CHECK(s3.at("first_layer_conjugation").max_residual <= 1e-9);
  CHECK(s3.count("symmetric_tying_count") == 1);

  auto d4 = by_name(run_verify_suite(shared(make_d4()), opts));
  CHECK(d4.at("first_layer_twist_required").max_residual > 1e-6);
  CHECK(d4.count("symmetric_tying_count") == 0);

  // Free actions: block permutation and interleaving coincide, so the
  // control is vacuous there.
  auto c4 = by_name(run_verify_suite(shared(make_c4()), opts));
  CHECK(c4.at("first_layer_twist_required").pass);
  CHECK(c4.at("first_layer_twist_required").max_residual == 0.0);
  CHECK(c4.at("first_layer_twist_required").detail.find("trivial") !=
        std::string::npos);
  CHECK(c4.at("interleave_group_law").detail.find("free on indices") !=
        std::string::npos);
}

TEST_CASE("corrupted tying fails exactly the tied-layer check with witness") {
  VerifyOptions opts;
  opts.random_inputs = 20;
  opts.random_maps = 3;
  opts.corrupt_tying = true;
  auto results = run_verify_suite(shared(make_s(3)), opts);
  CHECK(!all_pass(results));
  auto named = by_name(results);
  const CheckResult &bad = named.at("tied_layer_exactness");
  CHECK(!bad.pass);
  CHECK(bad.max_residual > 0.0);
  CHECK(bad.detail.find("sigma=") != std::string::npos);
  CHECK(bad.detail.find("x=e_") != std::string::npos);
  for (const CheckResult &r : results)
    if (r.name != "tied_layer_exactness")
      CHECK(r.pass);
}

TEST_CASE("suite is deterministic per seed") {
  VerifyOptions opts;
  opts.random_inputs = 20;
  opts.random_maps = 3;
  opts.seed = 99;
  auto a = run_verify_suite(shared(make_d4()), opts);
  auto b = run_verify_suite(shared(make_d4()), opts);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    CHECK(a[i].pass == b[i].pass);
    CHECK(a[i].max_residual == b[i].max_residual);
    CHECK(a[i].detail == b[i].detail);
  }
}

TEST_CASE("non-contiguous orbits are relabeled, then everything passes") {
  auto scattered = shared(generate(3, {transposition(3, 0, 2)}));
  VerifyOptions opts;
  opts.random_inputs = 20;
  opts.random_maps = 3;
  auto results = run_verify_suite(scattered, opts);
  CHECK(all_pass(results));
  CHECK(results.front().name == "orbit_labels");
  CHECK(results.front().detail.find("relabeled") != std::string::npos);

  CHECK_THROWS_AS(run_verify_suite(nullptr, opts), std::invalid_argument);
}
