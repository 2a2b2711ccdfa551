#pragma once

#include "equinet/actions.hpp"
#include "equinet/equi_linear.hpp"
#include "equinet/perm_group.hpp"
#include "equinet/rng.hpp"

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace equinet {

/// Monomial feature map t -> (1, t, t^2, ..., t^order). Summed over the
/// coordinates of x it yields the power sums, which determine any symmetric
/// polynomial; inputs are expected in [0, 1] to keep the powers conditioned.
std::vector<double> ka_encoder(double t, int order);

enum class NetKind { invariant_sum, stab_invariant, equivariant, invariant_tensor };
enum class NetMode { wide, deep };

std::string to_string(NetKind kind);
std::string to_string(NetMode mode);
NetKind net_kind_from_string(const std::string &s);
NetMode net_mode_from_string(const std::string &s);

/// Fully connected ReLU stack: hidden layers ReLU, last layer affine.
/// Parameters live in the owning network's flat vector starting at
/// param_offset, each layer stored as row-major W then b.
struct MlpBlock {
  std::vector<int> widths;
  int param_offset = 0;

  int affine_depth() const { return static_cast<int>(widths.size()) - 1; }
  int in_dim() const { return widths.front(); }
  int out_dim() const { return widths.back(); }
  int param_count() const;
};

/// One scalar-output lane over fan_in inputs. Shapes:
///   free_mlp:                y = rho(x)
///   identity_lane == false:  y = rho(sum_i phi(x_i))
///   identity_lane == true:   y = rho(x_base, sum_{i != base} phi(x_i))
/// exact_phi replaces the trainable encoder by the fixed monomial map of
/// length exact_phi_order + 1; only rho carries parameters then.
struct LaneNet {
  int fan_in = 0;
  int base = 0;
  bool identity_lane = false;
  bool free_mlp = false;
  bool exact_phi = false;
  int exact_phi_order = 0;
  MlpBlock phi; // unused when free_mlp or exact_phi
  MlpBlock rho;

  int feature_dim() const {
    return exact_phi ? exact_phi_order + 1 : phi.out_dim();
  }
  int param_count() const {
    return (free_mlp || exact_phi ? 0 : phi.param_count()) + rho.param_count();
  }
};

/// Output slots base..base+size-1 all evaluate the one shared lane on a
/// permuted copy of the input: slot base+k reads x[gathers[k][i]] at
/// position i, where gathers[k] is the inverse image table of the coset
/// representative tau_k.
struct OrbitBlock {
  int base = 0;
  int size = 0;
  std::vector<std::vector<int>> gathers;
  LaneNet lane;
};

/// Weight-tied affine layer; parameter block is the weight orbit values
/// followed by the bias orbit values.
struct TiedBlock {
  SharingPattern pattern;
  int param_offset = 0;
};

struct Network {
  NetKind kind = NetKind::invariant_sum;
  NetMode mode = NetMode::wide;
  int degree = 0;
  int input_dim = 0;
  int output_dim = 0;
  /// Null only for invariant_sum beyond the enumeration cap (n > 7); the
  /// symmetry group is implied by the architecture there.
  std::shared_ptr<const PermutationGroup> group;
  std::vector<double> params;

  LaneNet lane;                   // invariant_sum, stab_invariant
  std::vector<OrbitBlock> orbits; // equivariant
  std::vector<TiedBlock> layers;  // invariant_tensor
  std::vector<GroupAction> chain; // invariant_tensor: actions between layers
};

/// Encoder/head widths for lane-style builders. phi_widths must run from 1
/// to the feature count; rho_widths from the head input to 1. When
/// exact_phi is set phi_widths is ignored.
struct LaneSpec {
  std::vector<int> phi_widths;
  std::vector<int> rho_widths;
  bool exact_phi = false;
};

/// f(x) = rho(sum_i phi(x_i)), invariant under any permutation of the n
/// inputs. phi outputs and rho reads exactly n+1 features.
Network build_invariant_sum_net(int n, NetMode mode, const LaneSpec &spec);

/// f(x) = rho(x_0, sum_{i >= 1} phi(x_i)), invariant under every
/// permutation fixing coordinate 0. rho reads 1 + (n+1) = n+2 values; the
/// head arity follows that wiring.
Network build_stab_invariant_net(int n, NetMode mode, const LaneSpec &spec);

/// F(x)_{b_j + k} = lane_j(tau_{j,k} . x) over the canonical coset system of
/// each orbit; slots within an orbit share the lane parameters, which makes
/// F equivariant for any parameter values. Orbits with trivial stabilizer
/// get an unconstrained MLP lane instead of the encoder/head shape; orbits
/// must be contiguous index ranges (apply_orbit_reorder first otherwise).
Network build_equivariant_net(std::shared_ptr<const PermutationGroup> group,
                              NetMode mode, const LaneSpec &lane_template);

/// Tied affine layers along the action chain with ReLU between them and a
/// final coordinate sum, so the scalar output is invariant. A chain of one
/// action has no layers and computes plain sum pooling.
Network build_invariant_tensor_net(std::shared_ptr<const PermutationGroup> group,
                                   const std::vector<GroupAction> &chain);

/// Glorot-uniform weights from the realized fan of each affine layer (tied
/// layers use the dense N x M fan), zero biases. Deterministic for a seed:
/// values are drawn in parameter-vector order, biases skipped.
void initialize_params(Network &net, Rng &rng);

std::vector<double> forward(const Network &net, std::span<const double> x);

struct MlpCache {
  /// acts[0] is the input; acts[l+1] the post-activation of layer l. Hidden
  /// activations are post-ReLU, so act > 0 recovers the ReLU mask.
  std::vector<std::vector<double>> acts;
};

struct LaneCache {
  std::vector<double> input;
  std::vector<MlpCache> phi; // per input coordinate; unused slots stay empty
  MlpCache rho;
};

struct ForwardCache {
  std::vector<LaneCache> lanes; // one entry per output slot for lane kinds
  std::vector<std::vector<double>> tensor_acts;
  std::vector<double> output;
};

const std::vector<double> &forward_cached(const Network &net,
                                          std::span<const double> x,
                                          ForwardCache &cache);

/// Accumulates dLoss/dparams into grad_params given dLoss/doutput for the
/// forward pass recorded in cache. Parameters shared across output slots or
/// weight placements receive the sum of their per-placement gradients.
/// grad_params must already be sized like net.params.
void backward(const Network &net, const ForwardCache &cache,
              std::span<const double> grad_output,
              std::span<double> grad_params);

/// Max over the whole group (and output coordinates) of
/// |F(sigma.x)_i - F(x)_{sigma^{-1}(i)}| at one input; for scalar outputs
/// this is the invariance defect, where stab_invariant nets quantify over
/// the stabilizer of the base coordinate only. Exact zeros are not expected:
/// permuted inputs reorder the floating-point summations.
struct SymmetryResidual {
  double max_abs = 0.0;
  int element = -1;    // witness group element index, -1 if max_abs == 0
  int coordinate = -1; // witness output coordinate
};
SymmetryResidual symmetry_residual(const Network &net,
                                   std::span<const double> x);

struct BoundsReport {
  int width = 0; // max realized parallel width across stages
  int depth = 0; // affine depth after fusing adjacent linear stages
  int width_bound = 0; // 0 when no bound applies
  int depth_bound = 0;
  bool pass = true;
  std::vector<int> stage_widths;
};

/// Width/depth of the realized computation against the structural targets:
/// deep-mode nets keep encoder hidden widths <= n+1 and head hidden widths
/// <= n+2, which caps invariant nets at width n(n+2) and equivariant nets at
/// n^3; wide-mode lanes fuse to affine depth 3. Trivial-symmetry nets and
/// tensor chains have no applicable bound and pass vacuously.
BoundsReport report_bounds(const Network &net);

/// g(x) stacked blockwise: block k = ReLU(W (tau_k . x) + b) for the given
/// representative system. With W, b equivariant under the stabilizer of
/// `base`, g intertwines the natural action with the induced action built
/// from the same representatives.
struct FirstLayerG {
  int n = 0;
  int base = 0;
  Matrix weights;
  std::vector<double> bias;
  std::vector<Permutation> reps;

  std::vector<double> eval(std::span<const double> x) const;
  int out_dim() const { return n * static_cast<int>(reps.size()); }
};

/// Validates the stabilizer equivariance of (weights, bias) against
/// stab_natural (the stabilizer subgroup acting naturally) up to tol, and
/// the representative property reps[k]^{-1}(base) == base + k.
FirstLayerG make_first_layer_g(const GroupAction &stab_natural, Matrix weights,
                               std::vector<double> bias,
                               std::vector<Permutation> reps, int base,
                               double tol = 1e-9);

/// F(x)_{b_j + k} = lane_fns[j](tau_{j,k} . x) over the canonical coset
/// system of each orbit of `group`; lane_fns[j] must be invariant under
/// Stab(b_j) for the result to be equivariant.
std::vector<double> assemble_equivariant(
    const PermutationGroup &group,
    const std::vector<std::function<double(std::span<const double>)>> &lane_fns,
    std::span<const double> x);

} // namespace equinet
