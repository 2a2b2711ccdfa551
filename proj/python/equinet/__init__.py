"""Finite-group invariant and equivariant ReLU networks.

Thin re-export of the C++ core. Groups are built from generators, actions
induce weight-tying patterns, and the net builders produce architectures
whose symmetry holds for any parameter values.
"""

from ._core import (  # noqa: F401
    BoundsReport,
    CheckResult,
    CosetDecomposition,
    Dataset,
    EpochStats,
    GridSpec,
    GroupAction,
    LaneSpec,
    Matrix,
    NetKind,
    NetMode,
    Network,
    NetworkSpec,
    Optimizer,
    OrbitDecomposition,
    ParameterBound,
    Permutation,
    PermutationGroup,
    SharingPattern,
    SymmetryResidual,
    TargetFunction,
    TrainConfig,
    TrainReport,
    VerifyOptions,
    action_from_name,
    all_pass,
    apply,
    apply_orbit_reorder,
    brute_force_equivariant_basis,
    build_equivariant_net,
    build_from_spec,
    build_invariant_sum_net,
    build_invariant_tensor_net,
    build_stab_invariant_net,
    cayley_embedding,
    checkpoint_to_json,
    compose,
    coset_decomposition,
    count_free_params,
    custom_target,
    cyclic_group,
    dihedral_group,
    extend_with_trivial_channels,
    forward,
    generate,
    grid_sup_error,
    group_from_json,
    group_to_json,
    induced_star_action,
    initialize_params,
    load_checkpoint,
    make_target,
    max_equivariance_residual,
    natural_action,
    net_spec_from_json,
    net_spec_to_json,
    orbit,
    orbit_decomposition,
    pair_orbits,
    parameter_bound,
    pattern_from_json,
    pattern_to_json,
    permute_vector,
    report_bounds,
    run_verify_suite,
    sample_dataset,
    sigma_tilde,
    spec_hash,
    stabilizer,
    symmetric_group,
    symmetry_residual,
    train,
    train_log_csv,
    transposition,
    transposition_representatives,
    trivial_group,
    tensor_action,
    tuple_action,
    union_of_permutations,
)

__version__ = "0.1.0"
