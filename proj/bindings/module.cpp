#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "equinet/serialize.hpp"
#include "equinet/trainer.hpp"
#include "equinet/verify.hpp"

#include <memory>
#include <span>
#include <vector>

namespace py = pybind11;
using namespace equinet;

namespace {

std::vector<std::vector<double>> matrix_rows(const Matrix &m) {
  std::vector<std::vector<double>> rows(m.rows);
  for (int i = 0; i < m.rows; ++i) {
    rows[i].resize(m.cols);
    for (int j = 0; j < m.cols; ++j)
      rows[i][j] = m.at(i, j);
  }
  return rows;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Finite-group invariant and equivariant ReLU networks";

  // ---- permutations and groups ----

  py::class_<Permutation>(m, "Permutation")
      .def(py::init<std::vector<int>>(), py::arg("images"))
      .def_static("identity", [](int degree) { return Permutation(degree); },
                  py::arg("degree"))
      .def_static("from_cycles", &Permutation::from_cycles, py::arg("degree"),
                  py::arg("text"))
      .def_property_readonly("degree", &Permutation::degree)
      .def_property_readonly("images",
                             [](const Permutation &p) { return p.images(); })
      .def("__call__", &Permutation::operator(), py::arg("i"))
      .def("inverse", &Permutation::inverse)
      .def("is_identity", &Permutation::is_identity)
      .def("to_cycles", &Permutation::to_cycles)
      .def("__eq__",
           [](const Permutation &a, const Permutation &b) { return a == b; })
      .def("__repr__", [](const Permutation &p) {
        return "Permutation(" + p.to_cycles() + ")";
      });

  m.def("compose", &compose, py::arg("p"), py::arg("q"),
        "compose(p, q) applies q first");
  m.def("transposition", &transposition, py::arg("degree"), py::arg("a"),
        py::arg("b"));

  py::class_<PermutationGroup, std::shared_ptr<PermutationGroup>>(
      m, "PermutationGroup")
      .def_property_readonly("degree", &PermutationGroup::degree)
      .def_property_readonly("order", &PermutationGroup::order)
      .def("element", &PermutationGroup::element, py::arg("index"),
           py::return_value_policy::copy)
      .def("elements",
           [](const PermutationGroup &g) { return g.elements(); })
      .def("generators",
           [](const PermutationGroup &g) { return g.generators(); })
      .def("index_of", &PermutationGroup::index_of, py::arg("p"))
      .def("contains", &PermutationGroup::contains, py::arg("p"))
      .def("compose_indices", &PermutationGroup::compose_indices,
           py::arg("a"), py::arg("b"))
      .def("inverse_index", &PermutationGroup::inverse_index, py::arg("a"))
      .def("__len__", &PermutationGroup::order)
      .def("__repr__", [](const PermutationGroup &g) {
        return "PermutationGroup(degree=" + std::to_string(g.degree()) +
               ", order=" + std::to_string(g.order()) + ")";
      });

  m.def("symmetric_group", &symmetric_group, py::arg("n"));
  m.def("cyclic_group", &cyclic_group, py::arg("n"));
  m.def("dihedral_group", &dihedral_group, py::arg("n"));
  m.def("trivial_group", &trivial_group, py::arg("degree"));
  m.def(
      "generate",
      [](int degree, std::vector<Permutation> gens) {
        return generate(degree, std::move(gens));
      },
      py::arg("degree"), py::arg("generators"));

  m.def("orbit", &orbit, py::arg("group"), py::arg("point"));

  py::class_<OrbitDecomposition>(m, "OrbitDecomposition")
      .def_readonly("orbits", &OrbitDecomposition::orbits)
      .def_readonly("base_points", &OrbitDecomposition::base_points)
      .def_readonly("reorder", &OrbitDecomposition::reorder);
  m.def("orbit_decomposition", &orbit_decomposition, py::arg("group"));
  m.def("apply_orbit_reorder", &apply_orbit_reorder, py::arg("group"),
        py::arg("decomposition"));
  m.def("stabilizer", &stabilizer, py::arg("group"), py::arg("point"));

  py::class_<CosetDecomposition>(m, "CosetDecomposition")
      .def_readonly("subgroup", &CosetDecomposition::subgroup)
      .def_readonly("representatives", &CosetDecomposition::representatives)
      .def_readonly("base_point", &CosetDecomposition::base_point)
      .def("coset_index_of", &CosetDecomposition::coset_index_of,
           py::arg("g"));
  m.def("coset_decomposition", &coset_decomposition, py::arg("group"),
        py::arg("base"));
  m.def("transposition_representatives", &transposition_representatives,
        py::arg("group"), py::arg("base"));

  // ---- actions ----

  py::class_<GroupAction>(m, "GroupAction")
      .def_readonly("points", &GroupAction::points)
      .def("table", &GroupAction::table, py::arg("element_index"),
           py::return_value_policy::copy)
      .def("inverse_table", &GroupAction::inverse_table,
           py::arg("element_index"), py::return_value_policy::copy)
      .def("__repr__", [](const GroupAction &a) {
        return "GroupAction(points=" + std::to_string(a.points) + ")";
      });

  m.def(
      "apply",
      [](const GroupAction &a, int element_index, std::vector<double> x) {
        return apply(a, element_index, x);
      },
      py::arg("action"), py::arg("element_index"), py::arg("x"));
  m.def(
      "permute_vector",
      [](const Permutation &sigma, std::vector<double> x) {
        return permute_vector(sigma, x);
      },
      py::arg("sigma"), py::arg("x"));

  m.def("natural_action", &natural_action, py::arg("group"));
  m.def("tensor_action", &tensor_action, py::arg("group"), py::arg("k"),
        py::arg("channels") = 1);
  m.def("tuple_action", &tuple_action, py::arg("group"),
        py::arg("block_dim"));
  m.def("union_of_permutations", &union_of_permutations, py::arg("group"),
        py::arg("copies"));
  m.def("extend_with_trivial_channels", &extend_with_trivial_channels,
        py::arg("action"), py::arg("channels"));
  m.def("induced_star_action",
        py::overload_cast<const PermutationGroup &>(&induced_star_action),
        py::arg("group"));
  m.def("cayley_embedding", &cayley_embedding, py::arg("group"));
  m.def(
      "sigma_tilde",
      [](const PermutationGroup &group, const Permutation &sigma, int i) {
        return sigma_tilde(group, sigma, i);
      },
      py::arg("group"), py::arg("sigma"), py::arg("i"));
  m.def("action_from_name", &action_from_name, py::arg("group"),
        py::arg("name"));

  // ---- weight tying ----

  py::class_<SharingPattern>(m, "SharingPattern")
      .def_readonly("in_size", &SharingPattern::in_size)
      .def_readonly("out_size", &SharingPattern::out_size)
      .def_readonly("weight_orbit_id", &SharingPattern::weight_orbit_id)
      .def_readonly("bias_orbit_id", &SharingPattern::bias_orbit_id)
      .def_readonly("weight_orbit_count", &SharingPattern::weight_orbit_count)
      .def_readonly("bias_orbit_count", &SharingPattern::bias_orbit_count)
      .def("weight_id", &SharingPattern::weight_id, py::arg("i"),
           py::arg("j"))
      .def("free_param_count", &SharingPattern::free_param_count);

  m.def("pair_orbits", &pair_orbits, py::arg("in_action"),
        py::arg("out_action"));
  m.def("count_free_params", &count_free_params, py::arg("pattern"));

  py::class_<Matrix>(m, "Matrix")
      .def_readonly("rows", &Matrix::rows)
      .def_readonly("cols", &Matrix::cols)
      .def("tolist", &matrix_rows);
  m.def("brute_force_equivariant_basis", &brute_force_equivariant_basis,
        py::arg("in_action"), py::arg("out_action"));
  m.def(
      "max_equivariance_residual",
      [](const std::vector<std::vector<double>> &rows,
         const GroupAction &in_action, const GroupAction &out_action) {
        if (rows.empty())
          throw std::invalid_argument("empty matrix");
        Matrix w(static_cast<int>(rows.size()),
                 static_cast<int>(rows[0].size()));
        for (int i = 0; i < w.rows; ++i) {
          if (static_cast<int>(rows[i].size()) != w.cols)
            throw std::invalid_argument("ragged matrix");
          for (int j = 0; j < w.cols; ++j)
            w.at(i, j) = rows[i][j];
        }
        return max_equivariance_residual(w, in_action, out_action);
      },
      py::arg("matrix_rows"), py::arg("in_action"), py::arg("out_action"));

  py::class_<ParameterBound>(m, "ParameterBound")
      .def_readonly("usual", &ParameterBound::usual)
      .def_readonly("bound", &ParameterBound::bound)
      .def_readonly("exact_tied", &ParameterBound::exact_tied)
      .def_readonly("overflow", &ParameterBound::overflow)
      .def_readonly("max_width", &ParameterBound::max_width)
      .def_readonly("depth", &ParameterBound::depth)
      .def_readonly("tied_layers", &ParameterBound::tied_layers);
  m.def("parameter_bound", &parameter_bound, py::arg("widths"), py::arg("n"),
        py::arg("tied_layers"));

  // ---- networks ----

  py::enum_<NetKind>(m, "NetKind")
      .value("invariant_sum", NetKind::invariant_sum)
      .value("stab_invariant", NetKind::stab_invariant)
      .value("equivariant", NetKind::equivariant)
      .value("invariant_tensor", NetKind::invariant_tensor);
  py::enum_<NetMode>(m, "NetMode")
      .value("wide", NetMode::wide)
      .value("deep", NetMode::deep);

  py::class_<LaneSpec>(m, "LaneSpec")
      .def(py::init<>())
      .def_readwrite("phi_widths", &LaneSpec::phi_widths)
      .def_readwrite("rho_widths", &LaneSpec::rho_widths)
      .def_readwrite("exact_phi", &LaneSpec::exact_phi);

  py::class_<Network>(m, "Network")
      .def_property_readonly("kind",
                             [](const Network &n) { return n.kind; })
      .def_property_readonly("mode",
                             [](const Network &n) { return n.mode; })
      .def_property_readonly("degree",
                             [](const Network &n) { return n.degree; })
      .def_property_readonly("input_dim",
                             [](const Network &n) { return n.input_dim; })
      .def_property_readonly("output_dim",
                             [](const Network &n) { return n.output_dim; })
      .def_property(
          "params", [](const Network &n) { return n.params; },
          [](Network &n, std::vector<double> params) {
            if (params.size() != n.params.size())
              throw std::invalid_argument("parameter count mismatch");
            n.params = std::move(params);
          })
      .def("param_count",
           [](const Network &n) { return n.params.size(); })
      .def("__repr__", [](const Network &n) {
        return "Network(kind=" + to_string(n.kind) +
               ", input_dim=" + std::to_string(n.input_dim) +
               ", output_dim=" + std::to_string(n.output_dim) +
               ", params=" + std::to_string(n.params.size()) + ")";
      });

  m.def("build_invariant_sum_net", &build_invariant_sum_net, py::arg("n"),
        py::arg("mode"), py::arg("lane"));
  m.def("build_stab_invariant_net", &build_stab_invariant_net, py::arg("n"),
        py::arg("mode"), py::arg("lane"));
  m.def("build_equivariant_net", &build_equivariant_net, py::arg("group"),
        py::arg("mode"), py::arg("lane"));
  m.def("build_invariant_tensor_net", &build_invariant_tensor_net,
        py::arg("group"), py::arg("chain"));

  m.def(
      "initialize_params",
      [](Network &net, std::uint64_t seed) {
        Rng rng(seed);
        initialize_params(net, rng);
      },
      py::arg("net"), py::arg("seed") = 1);
  m.def(
      "forward",
      [](const Network &net, std::vector<double> x) {
        return forward(net, x);
      },
      py::arg("net"), py::arg("x"));

  py::class_<SymmetryResidual>(m, "SymmetryResidual")
      .def_readonly("max_abs", &SymmetryResidual::max_abs)
      .def_readonly("element", &SymmetryResidual::element)
      .def_readonly("coordinate", &SymmetryResidual::coordinate);
  m.def(
      "symmetry_residual",
      [](const Network &net, std::vector<double> x) {
        return symmetry_residual(net, x);
      },
      py::arg("net"), py::arg("x"));

  py::class_<BoundsReport>(m, "BoundsReport")
      .def_readonly("width", &BoundsReport::width)
      .def_readonly("depth", &BoundsReport::depth)
      .def_readonly("width_bound", &BoundsReport::width_bound)
      .def_readonly("depth_bound", &BoundsReport::depth_bound)
      .def_readonly("ok", &BoundsReport::pass)
      .def_readonly("stage_widths", &BoundsReport::stage_widths);
  m.def("report_bounds", &report_bounds, py::arg("net"));

  // ---- training ----

  py::enum_<Optimizer>(m, "Optimizer")
      .value("sgd", Optimizer::sgd)
      .value("adam", Optimizer::adam);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("optimizer", &TrainConfig::optimizer)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("max_epochs", &TrainConfig::max_epochs)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("target_sup_error", &TrainConfig::target_sup_error)
      .def_readwrite("patience", &TrainConfig::patience)
      .def_readwrite("beta1", &TrainConfig::beta1)
      .def_readwrite("beta2", &TrainConfig::beta2)
      .def_readwrite("adam_eps", &TrainConfig::adam_eps);

  py::class_<TargetFunction>(m, "TargetFunction")
      .def_readonly("name", &TargetFunction::name)
      .def_readonly("input_dim", &TargetFunction::input_dim)
      .def_readonly("output_dim", &TargetFunction::output_dim)
      .def("__call__", [](const TargetFunction &t, std::vector<double> x) {
        return t.eval(x);
      });
  m.def("make_target", &make_target, py::arg("name"), py::arg("n"));
  m.def(
      "custom_target",
      [](std::string name, int input_dim, int output_dim, py::function fn) {
        TargetFunction t;
        t.name = std::move(name);
        t.input_dim = input_dim;
        t.output_dim = output_dim;
        t.eval = [fn](std::span<const double> x) {
          std::vector<double> copy(x.begin(), x.end());
          return fn(copy).cast<std::vector<double>>();
        };
        return t;
      },
      py::arg("name"), py::arg("input_dim"), py::arg("output_dim"),
      py::arg("fn"),
      "Wraps a Python callable mapping a list of floats to a list of floats");

  py::class_<Dataset>(m, "Dataset")
      .def(py::init<>())
      .def_readwrite("input_dim", &Dataset::input_dim)
      .def_readwrite("output_dim", &Dataset::output_dim)
      .def_readwrite("inputs", &Dataset::inputs)
      .def_readwrite("targets", &Dataset::targets)
      .def_readwrite("generator", &Dataset::generator)
      .def("__len__",
           [](const Dataset &d) { return d.inputs.size(); });
  m.def(
      "sample_dataset",
      [](const TargetFunction &target, int count, std::uint64_t seed,
         double lo, double hi) {
        Rng rng(seed);
        return sample_dataset(target, count, rng, lo, hi);
      },
      py::arg("target"), py::arg("count"), py::arg("seed") = 1,
      py::arg("lo") = 0.0, py::arg("hi") = 1.0);

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<>())
      .def_readwrite("lo", &GridSpec::lo)
      .def_readwrite("hi", &GridSpec::hi)
      .def_readwrite("points_per_dim", &GridSpec::points_per_dim);
  m.def("grid_sup_error", &grid_sup_error, py::arg("net"), py::arg("target"),
        py::arg("grid"));

  py::class_<EpochStats>(m, "EpochStats")
      .def_readonly("epoch", &EpochStats::epoch)
      .def_readonly("train_mse", &EpochStats::train_mse)
      .def_readonly("grid_sup_error", &EpochStats::grid_sup_error)
      .def_readonly("symmetry_residual", &EpochStats::symmetry_residual);
  py::class_<TrainReport>(m, "TrainReport")
      .def_readonly("log", &TrainReport::log)
      .def_readonly("final_sup_error", &TrainReport::final_sup_error)
      .def_readonly("best_sup_error", &TrainReport::best_sup_error)
      .def_readonly("best_epoch", &TrainReport::best_epoch)
      .def_readonly("reached_target", &TrainReport::reached_target)
      .def_readonly("aborted_nan", &TrainReport::aborted_nan)
      .def_readonly("target_name", &TrainReport::target_name);
  m.def("train", &train, py::arg("net"), py::arg("data"), py::arg("target"),
        py::arg("grid"), py::arg("config"));
  m.def("train_log_csv", &train_log_csv, py::arg("report"));

  // ---- verification ----

  py::class_<CheckResult>(m, "CheckResult")
      .def_readonly("name", &CheckResult::name)
      .def_readonly("ok", &CheckResult::pass)
      .def_readonly("max_residual", &CheckResult::max_residual)
      .def_readonly("detail", &CheckResult::detail)
      .def("__repr__", [](const CheckResult &r) {
        return "CheckResult(" + r.name + ", " +
               (r.pass ? "pass" : "FAIL") + ")";
      });
  py::class_<VerifyOptions>(m, "VerifyOptions")
      .def(py::init<>())
      .def_readwrite("seed", &VerifyOptions::seed)
      .def_readwrite("random_inputs", &VerifyOptions::random_inputs)
      .def_readwrite("random_maps", &VerifyOptions::random_maps)
      .def_readwrite("corrupt_tying", &VerifyOptions::corrupt_tying);
  m.def("run_verify_suite", &run_verify_suite, py::arg("group"),
        py::arg("options") = VerifyOptions{});
  m.def("all_pass", &all_pass, py::arg("results"));

  // ---- serialization ----

  py::class_<NetworkSpec>(m, "NetworkSpec")
      .def(py::init<>())
      .def_readwrite("kind", &NetworkSpec::kind)
      .def_readwrite("mode", &NetworkSpec::mode)
      .def_readwrite("degree", &NetworkSpec::degree)
      .def_readwrite("group_ref", &NetworkSpec::group_ref)
      .def_readwrite("lane", &NetworkSpec::lane)
      .def_readwrite("chain", &NetworkSpec::chain);

  m.def("build_from_spec", &build_from_spec, py::arg("spec"),
        py::arg("group") = nullptr);
  m.def("spec_hash", &spec_hash, py::arg("spec"));
  m.def(
      "group_to_json",
      [](const PermutationGroup &g) { return group_to_json(g).dump(2); },
      py::arg("group"));
  m.def(
      "group_from_json",
      [](const std::string &text) {
        return group_from_json(Json::parse(text));
      },
      py::arg("text"));
  m.def(
      "pattern_to_json",
      [](const SharingPattern &p) { return pattern_to_json(p).dump(2); },
      py::arg("pattern"));
  m.def(
      "pattern_from_json",
      [](const std::string &text) {
        return pattern_from_json(Json::parse(text));
      },
      py::arg("text"));
  m.def(
      "net_spec_to_json",
      [](const NetworkSpec &s) { return net_spec_to_json(s).dump(2); },
      py::arg("spec"));
  m.def(
      "net_spec_from_json",
      [](const std::string &text) {
        return net_spec_from_json(Json::parse(text));
      },
      py::arg("text"));
  m.def(
      "checkpoint_to_json",
      [](const Network &net, const NetworkSpec &spec) {
        return checkpoint_to_json(net, spec).dump(2);
      },
      py::arg("net"), py::arg("spec"));
  m.def(
      "load_checkpoint",
      [](const std::string &text, const NetworkSpec &spec, Network &net) {
        load_checkpoint(Json::parse(text), spec, net);
      },
      py::arg("text"), py::arg("spec"), py::arg("net"));
}
