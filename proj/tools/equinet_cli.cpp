#include <CLI11.hpp>

#include "equinet/serialize.hpp"
#include "equinet/trainer.hpp"
#include "equinet/verify.hpp"

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <memory>
#include <set>
#include <string>
#include <vector>

using equinet::Json;

namespace {

struct Options {
  std::string group_path;
  std::string net_path;
  std::string train_path;
  std::string out_dir;
  std::vector<std::string> gens;
  int degree = 0;
  std::uint64_t seed = 1;
  bool seed_set = false;
  std::string mode;
  int epochs = -1;
  bool untied_baseline = false;
  bool corrupt_tying = false;
  std::string in_action = "natural";
  std::string out_action = "natural";
};

/// Writes command artifacts. Without --out only the main report goes to
/// stdout; with --out every artifact lands in the directory plus a sidecar
/// meta.json holding the only timestamp anywhere.
class Emitter {
public:
  explicit Emitter(std::string out_dir) : out_dir_(std::move(out_dir)) {}

  void json_doc(const std::string &name, const Json &doc,
                bool stdout_fallback) {
    std::string text = doc.dump(2) + "\n";
    if (out_dir_.empty()) {
      if (stdout_fallback)
        std::cout << text;
      return;
    }
    write(name, text);
  }

  void text_doc(const std::string &name, std::string_view content) {
    if (out_dir_.empty())
      return;
    write(name, std::string(content));
  }

private:
  void write(const std::string &name, const std::string &text) {
    std::filesystem::create_directories(out_dir_);
    equinet::write_text_file(out_dir_ + "/" + name, text);
    if (!meta_written_) {
      char stamp[32];
      std::time_t now = std::time(nullptr);
      std::tm parts{};
      gmtime_r(&now, &parts);
      std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &parts);
      Json meta;
      meta["written_at"] = stamp;
      equinet::write_text_file(out_dir_ + "/meta.json", meta.dump(2) + "\n");
      meta_written_ = true;
    }
  }

  std::string out_dir_;
  bool meta_written_ = false;
};

std::shared_ptr<const equinet::PermutationGroup>
load_group(const Options &o, const std::string &fallback_ref) {
  if (!o.gens.empty() || o.degree > 0) {
    if (o.degree <= 0)
      throw std::invalid_argument("--gen needs --degree");
    std::vector<equinet::Permutation> gens;
    for (const std::string &text : o.gens)
      gens.push_back(equinet::Permutation::from_cycles(o.degree, text));
    return std::make_shared<const equinet::PermutationGroup>(
        equinet::generate(o.degree, std::move(gens)));
  }
  std::string path = !o.group_path.empty() ? o.group_path : fallback_ref;
  if (path.empty())
    return nullptr;
  Json doc = Json::parse(equinet::read_text_file(path));
  return std::make_shared<const equinet::PermutationGroup>(
      equinet::group_from_json(doc));
}

equinet::NetworkSpec load_net_spec(const Options &o) {
  if (o.net_path.empty())
    throw std::invalid_argument("this command needs --net");
  equinet::NetworkSpec spec = equinet::net_spec_from_json(
      Json::parse(equinet::read_text_file(o.net_path)));
  if (!o.mode.empty())
    spec.mode = equinet::net_mode_from_string(o.mode);
  return spec;
}

/// A relative group reference inside a net spec resolves against the net
/// file's own directory, so specs stay portable. The verbatim reference
/// still feeds the config hash.
std::string resolve_ref(const std::string &net_path, const std::string &ref) {
  if (ref.empty())
    return ref;
  std::filesystem::path p(ref);
  if (p.is_absolute())
    return ref;
  return (std::filesystem::path(net_path).parent_path() / p)
      .lexically_normal()
      .string();
}

std::string config_hash_for(const std::string &command, const Json &inputs) {
  Json desc;
  desc["command"] = command;
  desc["inputs"] = inputs;
  return equinet::hash_hex(equinet::fnv1a64(equinet::canonical_dump(desc)));
}

Json bounds_json(const equinet::BoundsReport &b) {
  Json out;
  out["width"] = b.width;
  out["depth"] = b.depth;
  out["width_bound"] = b.width_bound;
  out["depth_bound"] = b.depth_bound;
  out["pass"] = b.pass;
  out["stage_widths"] = b.stage_widths;
  return out;
}

Json parameter_accounting(const equinet::Network &net) {
  Json out;
  out["param_count"] = static_cast<int>(net.params.size());
  if (net.kind == equinet::NetKind::invariant_tensor) {
    Json layers = Json::array();
    int dense = 0, free_weights = 0;
    std::vector<int> widths;
    for (const equinet::GroupAction &a : net.chain)
      widths.push_back(a.points);
    for (const equinet::TiedBlock &blk : net.layers) {
      Json layer;
      layer["in"] = blk.pattern.in_size;
      layer["out"] = blk.pattern.out_size;
      layer["weight_orbits"] = blk.pattern.weight_orbit_count;
      layer["bias_orbits"] = blk.pattern.bias_orbit_count;
      layers.push_back(layer);
      dense += blk.pattern.out_size * (blk.pattern.in_size + 1);
      free_weights += blk.pattern.weight_orbit_count;
    }
    out["layers"] = layers;
    out["count_free_params"] = free_weights;
    out["dense_param_count"] = dense;
    if (net.degree >= 2 && widths.size() >= 2) {
      equinet::ParameterBound pb = equinet::parameter_bound(
          widths, net.degree, static_cast<int>(net.layers.size()));
      Json bound;
      bound["usual"] = pb.usual;
      bound["bound"] = pb.bound;
      bound["exact_tied"] = pb.exact_tied;
      bound["overflow"] = pb.overflow;
      out["parameter_bound"] = bound;
    }
  } else {
    out["count_free_params"] = static_cast<int>(net.params.size());
    equinet::BoundsReport b = equinet::report_bounds(net);
    if (net.degree >= 2 && b.stage_widths.size() >= 2) {
      equinet::ParameterBound pb =
          equinet::parameter_bound(b.stage_widths, net.degree, 0);
      Json bound;
      bound["usual"] = pb.usual;
      bound["overflow"] = pb.overflow;
      out["parameter_bound"] = bound;
    }
  }
  return out;
}

struct TrainFile {
  equinet::TrainConfig config;
  std::string target;
  int samples = 256;
  double sample_lo = 0.0;
  double sample_hi = 1.0;
  equinet::GridSpec grid;
};

TrainFile parse_train_file(const Json &j) {
  if (!j.is_object())
    throw std::invalid_argument("train config: expected a JSON object");
  // Reject unknown keys: a misspelled hyperparameter must not silently
  // fall back to its default.
  static const std::set<std::string> known = {
      "target",     "optimizer", "learning_rate",    "batch_size",
      "max_epochs", "seed",      "target_sup_error", "patience",
      "beta1",      "beta2",     "adam_eps",         "samples",
      "sample_lo",  "sample_hi", "grid_points",      "grid_lo",
      "grid_hi"};
  for (const auto &item : j.items())
    if (!known.count(item.key()))
      throw std::invalid_argument("train config: unknown key \"" +
                                  item.key() + "\"");
  TrainFile tf;
  if (!j.contains("target") || !j["target"].is_string())
    throw std::invalid_argument("train config: missing \"target\"");
  tf.target = j["target"].get<std::string>();
  if (j.contains("optimizer"))
    tf.config.optimizer =
        equinet::optimizer_from_string(j["optimizer"].get<std::string>());
  auto num = [&](const char *key, double fallback) {
    if (!j.contains(key))
      return fallback;
    if (!j[key].is_number())
      throw std::invalid_argument(std::string("train config: \"") + key +
                                  "\" must be a number");
    return j[key].get<double>();
  };
  tf.config.learning_rate = num("learning_rate", tf.config.learning_rate);
  tf.config.batch_size = static_cast<int>(num("batch_size", 32));
  tf.config.max_epochs = static_cast<int>(num("max_epochs", 200));
  tf.config.seed = static_cast<std::uint64_t>(num("seed", 1));
  tf.config.target_sup_error =
      num("target_sup_error", tf.config.target_sup_error);
  tf.config.patience = static_cast<int>(num("patience", 0));
  tf.config.beta1 = num("beta1", tf.config.beta1);
  tf.config.beta2 = num("beta2", tf.config.beta2);
  tf.config.adam_eps = num("adam_eps", tf.config.adam_eps);
  tf.samples = static_cast<int>(num("samples", 256));
  tf.sample_lo = num("sample_lo", 0.0);
  tf.sample_hi = num("sample_hi", 1.0);
  tf.grid.points_per_dim = static_cast<int>(num("grid_points", 11));
  tf.grid.lo = num("grid_lo", 0.0);
  tf.grid.hi = num("grid_hi", 1.0);
  return tf;
}

Json train_config_json(const equinet::TrainConfig &c) {
  Json out;
  out["optimizer"] = equinet::to_string(c.optimizer);
  out["learning_rate"] = c.learning_rate;
  out["batch_size"] = c.batch_size;
  out["max_epochs"] = c.max_epochs;
  out["seed"] = c.seed;
  out["target_sup_error"] = c.target_sup_error;
  out["patience"] = c.patience;
  out["beta1"] = c.beta1;
  out["beta2"] = c.beta2;
  out["adam_eps"] = c.adam_eps;
  return out;
}

Json train_report_json(const equinet::TrainReport &rep) {
  Json out;
  out["epochs_run"] =
      rep.log.empty() ? 0 : rep.log.back().epoch;
  out["final_sup_error"] = rep.final_sup_error;
  out["best_sup_error"] = rep.best_sup_error;
  out["best_epoch"] = rep.best_epoch;
  out["reached_target"] = rep.reached_target;
  out["aborted_nan"] = rep.aborted_nan;
  if (!rep.log.empty()) {
    out["final_train_mse"] = rep.log.back().train_mse;
    out["final_symmetry_residual"] = rep.log.back().symmetry_residual;
  }
  return out;
}

equinet::Network
untied_twin(const equinet::NetworkSpec &spec,
            const std::shared_ptr<const equinet::PermutationGroup> &group) {
  int n = group ? group->degree() : spec.degree;
  auto trivial = std::make_shared<const equinet::PermutationGroup>(
      equinet::trivial_group(n));
  if (spec.kind == equinet::NetKind::equivariant)
    return equinet::build_equivariant_net(trivial, spec.mode, spec.lane);
  if (spec.kind == equinet::NetKind::invariant_tensor) {
    std::vector<equinet::GroupAction> chain;
    for (const std::string &name : spec.chain)
      chain.push_back(equinet::action_from_name(trivial, name));
    return equinet::build_invariant_tensor_net(trivial, chain);
  }
  throw std::invalid_argument(
      "--untied-baseline applies to equivariant and tensor nets");
}

int cmd_build(const Options &o) {
  equinet::NetworkSpec spec = load_net_spec(o);
  auto group = load_group(o, resolve_ref(o.net_path, spec.group_ref));
  equinet::Network net = equinet::build_from_spec(spec, group);
  equinet::Rng rng(o.seed);
  equinet::initialize_params(net, rng);

  Json inputs;
  inputs["net"] = equinet::net_spec_to_json(spec);
  if (group)
    inputs["group"] = equinet::group_to_json(*group);
  inputs["seed"] = o.seed;

  equinet::BoundsReport bounds = equinet::report_bounds(net);
  Json summary;
  summary["config_hash"] = config_hash_for("build", inputs);
  summary["command"] = "build";
  summary["kind"] = equinet::to_string(net.kind);
  summary["mode"] = equinet::to_string(net.mode);
  summary["degree"] = net.degree;
  summary["input_dim"] = net.input_dim;
  summary["output_dim"] = net.output_dim;
  summary["parameters"] = parameter_accounting(net);
  summary["bounds"] = bounds_json(bounds);

  Emitter emit(o.out_dir);
  emit.json_doc("summary.json", summary, true);
  emit.json_doc("checkpoint.json", equinet::checkpoint_to_json(net, spec),
                false);
  return bounds.pass ? 0 : 1;
}

int cmd_verify(const Options &o) {
  auto group = load_group(o, "");
  if (!group)
    throw std::invalid_argument("verify needs --group or --degree/--gen");
  equinet::VerifyOptions vo;
  vo.seed = o.seed;
  vo.corrupt_tying = o.corrupt_tying;
  std::vector<equinet::CheckResult> results =
      equinet::run_verify_suite(group, vo);

  Json inputs;
  inputs["group"] = equinet::group_to_json(*group);
  inputs["seed"] = o.seed;
  inputs["corrupt_tying"] = o.corrupt_tying;

  Json checks = Json::array();
  for (const equinet::CheckResult &r : results) {
    Json c;
    c["name"] = r.name;
    c["pass"] = r.pass;
    c["max_residual"] = r.max_residual;
    c["detail"] = r.detail;
    checks.push_back(c);
  }
  bool ok = equinet::all_pass(results);
  Json report;
  report["config_hash"] = config_hash_for("verify", inputs);
  report["command"] = "verify";
  report["degree"] = group->degree();
  report["order"] = group->order();
  report["all_pass"] = ok;
  report["checks"] = checks;

  Emitter emit(o.out_dir);
  emit.json_doc("report.json", report, true);
  return ok ? 0 : 1;
}

int cmd_train(const Options &o) {
  equinet::NetworkSpec spec = load_net_spec(o);
  auto group = load_group(o, resolve_ref(o.net_path, spec.group_ref));
  if (o.train_path.empty())
    throw std::invalid_argument("train needs --train");
  Json train_doc = Json::parse(equinet::read_text_file(o.train_path));
  TrainFile tf = parse_train_file(train_doc);
  if (o.seed_set)
    tf.config.seed = o.seed;
  if (o.epochs >= 0)
    tf.config.max_epochs = o.epochs;

  equinet::Network net = equinet::build_from_spec(spec, group);
  equinet::TargetFunction target =
      equinet::make_target(tf.target, net.input_dim);
  if (target.output_dim != net.output_dim)
    throw std::invalid_argument("target output does not match the network");

  // The dataset stream is decoupled from the init stream so changing the
  // epoch budget never changes the data.
  equinet::Rng data_rng(tf.config.seed ^ 0x9e3779b97f4a7c15ull);
  equinet::Dataset data = equinet::sample_dataset(
      target, tf.samples, data_rng, tf.sample_lo, tf.sample_hi);
  equinet::TrainReport rep =
      equinet::train(net, data, target, tf.grid, tf.config);

  Json inputs;
  inputs["net"] = equinet::net_spec_to_json(spec);
  if (group)
    inputs["group"] = equinet::group_to_json(*group);
  inputs["train"] = train_config_json(tf.config);
  inputs["target"] = tf.target;
  inputs["samples"] = tf.samples;
  inputs["grid_points"] = tf.grid.points_per_dim;
  inputs["untied_baseline"] = o.untied_baseline;

  Json summary;
  summary["config_hash"] = config_hash_for("train", inputs);
  summary["command"] = "train";
  summary["target"] = tf.target;
  summary["kind"] = equinet::to_string(net.kind);
  summary["mode"] = equinet::to_string(net.mode);
  summary["train_config"] = train_config_json(tf.config);
  summary["parameters"] = parameter_accounting(net);
  summary["bounds"] = bounds_json(equinet::report_bounds(net));
  summary["result"] = train_report_json(rep);

  Emitter emit(o.out_dir);
  emit.text_doc("train_log.csv", equinet::train_log_csv(rep));
  emit.json_doc("checkpoint.json", equinet::checkpoint_to_json(net, spec),
                false);

  if (o.untied_baseline) {
    equinet::Network base = untied_twin(spec, group);
    equinet::TrainReport base_rep =
        equinet::train(base, data, target, tf.grid, tf.config);
    Json cmp;
    cmp["tied_param_count"] = static_cast<int>(net.params.size());
    cmp["untied_param_count"] = static_cast<int>(base.params.size());
    cmp["tied_best_sup_error"] = rep.best_sup_error;
    cmp["untied_best_sup_error"] = base_rep.best_sup_error;
    summary["untied_baseline"] = cmp;
    emit.text_doc("untied_log.csv", equinet::train_log_csv(base_rep));
  }

  emit.json_doc("summary.json", summary, true);
  return rep.aborted_nan ? 3 : 0;
}

int cmd_export_pattern(const Options &o) {
  auto group = load_group(o, "");
  if (!group)
    throw std::invalid_argument(
        "export-pattern needs --group or --degree/--gen");
  equinet::GroupAction in = equinet::action_from_name(group, o.in_action);
  equinet::GroupAction out = equinet::action_from_name(group, o.out_action);
  equinet::SharingPattern pattern = equinet::pair_orbits(in, out);
  Emitter emit(o.out_dir);
  emit.json_doc("pattern.json", equinet::pattern_to_json(pattern), true);
  return 0;
}

int cmd_report_bounds(const Options &o) {
  equinet::NetworkSpec spec = load_net_spec(o);
  auto group = load_group(o, resolve_ref(o.net_path, spec.group_ref));
  equinet::Network net = equinet::build_from_spec(spec, group);
  equinet::BoundsReport bounds = equinet::report_bounds(net);

  Json inputs;
  inputs["net"] = equinet::net_spec_to_json(spec);
  if (group)
    inputs["group"] = equinet::group_to_json(*group);

  Json report;
  report["config_hash"] = config_hash_for("report-bounds", inputs);
  report["command"] = "report-bounds";
  report["kind"] = equinet::to_string(net.kind);
  report["mode"] = equinet::to_string(net.mode);
  report["bounds"] = bounds_json(bounds);

  Emitter emit(o.out_dir);
  emit.json_doc("bounds.json", report, true);
  return bounds.pass ? 0 : 1;
}

int cmd_count_params(const Options &o) {
  equinet::NetworkSpec spec = load_net_spec(o);
  auto group = load_group(o, resolve_ref(o.net_path, spec.group_ref));
  equinet::Network net = equinet::build_from_spec(spec, group);

  Json inputs;
  inputs["net"] = equinet::net_spec_to_json(spec);
  if (group)
    inputs["group"] = equinet::group_to_json(*group);

  Json report;
  report["config_hash"] = config_hash_for("count-params", inputs);
  report["command"] = "count-params";
  report["kind"] = equinet::to_string(net.kind);
  report["parameters"] = parameter_accounting(net);

  Emitter emit(o.out_dir);
  emit.json_doc("counts.json", report, true);
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Finite-group invariant and equivariant ReLU networks"};
  app.require_subcommand(1);
  Options o;

  auto add_group_flags = [&](CLI::App *cmd) {
    cmd->add_option("--group", o.group_path, "group spec JSON file");
    cmd->add_option("--degree", o.degree, "degree for inline --gen groups");
    cmd->add_option("--gen", o.gens,
                    "generator in cycle notation, repeatable");
  };
  auto add_seed_out = [&](CLI::App *cmd) {
    cmd->add_option("--seed", o.seed, "random seed")
        ->each([&](const std::string &) { o.seed_set = true; });
    cmd->add_option("--out", o.out_dir, "output directory for artifacts");
  };
  auto add_net_flags = [&](CLI::App *cmd) {
    cmd->add_option("--net", o.net_path, "network spec JSON file");
    cmd->add_option("--mode", o.mode, "override the net mode")
        ->check(CLI::IsMember({"wide", "deep"}));
  };

  CLI::App *build =
      app.add_subcommand("build", "build a net, write an initial checkpoint");
  add_group_flags(build);
  add_net_flags(build);
  add_seed_out(build);

  CLI::App *verify =
      app.add_subcommand("verify", "run the property suite over a group");
  add_group_flags(verify);
  add_seed_out(verify);
  verify->add_flag("--corrupt-tying", o.corrupt_tying,
                   "negative control: plant a tying violation");

  CLI::App *train = app.add_subcommand("train", "train a net on a target");
  add_group_flags(train);
  add_net_flags(train);
  add_seed_out(train);
  train->add_option("--train", o.train_path, "train config JSON file");
  train->add_option("--epochs", o.epochs, "override the epoch budget");
  train->add_flag("--untied-baseline", o.untied_baseline,
                  "also train the untied twin for comparison");

  CLI::App *pattern = app.add_subcommand(
      "export-pattern", "write the tying pattern of an action pair");
  add_group_flags(pattern);
  add_seed_out(pattern);
  pattern->add_option("--in-action", o.in_action, "input action name");
  pattern->add_option("--out-action", o.out_action, "output action name");

  CLI::App *bounds = app.add_subcommand(
      "report-bounds", "structural width and depth against the bounds");
  add_group_flags(bounds);
  add_net_flags(bounds);
  add_seed_out(bounds);

  CLI::App *count =
      app.add_subcommand("count-params", "parameter accounting for a net");
  add_group_flags(count);
  add_net_flags(count);
  add_seed_out(count);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(build))
      return cmd_build(o);
    if (app.got_subcommand(verify))
      return cmd_verify(o);
    if (app.got_subcommand(train))
      return cmd_train(o);
    if (app.got_subcommand(pattern))
      return cmd_export_pattern(o);
    if (app.got_subcommand(bounds))
      return cmd_report_bounds(o);
    if (app.got_subcommand(count))
      return cmd_count_params(o);
    return 2;
  } catch (const nlohmann::json::parse_error &e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
