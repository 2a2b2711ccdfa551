#pragma once

#include <vector>

#include "equinet/actions.hpp"

namespace equinet {

/// Dense row-major matrix. Deliberately minimal; realized layers and the
/// averaging oracle only need storage plus indexed access.
struct Matrix {
  int rows = 0, cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c)
      : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double &at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double at(int i, int j) const {
    return a[static_cast<std::size_t>(i) * cols + j];
  }
};

/// Weight-tying pattern of an equivariant affine map R^M -> R^N.
/// weight_orbit_id is row-major N x M with dense ids in first-encounter
/// (row-major scan) order; -1 is reserved for entries constrained to zero,
/// which plain orbit tying never produces. bias_orbit_id ties the bias to
/// the orbits of the output action.
struct SharingPattern {
  int in_size = 0;  // M
  int out_size = 0; // N
  std::vector<int> weight_orbit_id;
  std::vector<int> bias_orbit_id;
  int weight_orbit_count = 0;
  int bias_orbit_count = 0;

  int weight_id(int i, int j) const {
    return weight_orbit_id[static_cast<std::size_t>(i) * in_size + j];
  }
  /// Weight orbits plus bias orbits.
  int free_param_count() const { return weight_orbit_count + bias_orbit_count; }

  friend bool operator==(const SharingPattern &, const SharingPattern &) = default;
};

/// Orbits of the joint pair action (i, j) -> (phi_out(sigma)(i),
/// phi_in(sigma)(j)) closed over the group generators. A matrix W satisfies
/// W P_in(sigma) == P_out(sigma) W for all sigma exactly when W is constant
/// on these orbits. Both actions must belong to the same group.
SharingPattern pair_orbits(const GroupAction &in_action,
                           const GroupAction &out_action);

/// Free weight parameters only; biases are counted separately (the layer
/// count claims below concern weights).
int count_free_params(const SharingPattern &p);

/// Tied layer: one parameter per orbit, weights first, then biases.
/// Realization copies parameters into place; nothing is averaged.
struct TiedLinearLayer {
  SharingPattern pattern;
  std::vector<double> params;
};

TiedLinearLayer make_tied_layer(SharingPattern pattern);
Matrix realize_weights(const SharingPattern &pattern,
                       std::span<const double> params);
std::vector<double> realize_bias(const SharingPattern &pattern,
                                 std::span<const double> params);
inline Matrix realize_weights(const TiedLinearLayer &l) {
  return realize_weights(l.pattern, l.params);
}
inline std::vector<double> realize_bias(const TiedLinearLayer &l) {
  return realize_bias(l.pattern, l.params);
}

/// Max |(P_out(sigma) W)_{ij} - (W P_in(sigma))_{ij}| over all group
/// elements, evaluated by index gathers (no sums), so a correctly tied W
/// scores exactly 0.
double max_equivariance_residual(const Matrix &w, const GroupAction &in_action,
                                 const GroupAction &out_action);

/// Orthogonal basis of the space {W : P_out(sigma) W == W P_in(sigma)},
/// computed by averaging the elementary matrices over the whole group and
/// de-duplicating the supports. Independent route to the same space that
/// pair_orbits ties; dimensions must agree. Requires M * N <= 4096.
std::vector<Matrix> brute_force_equivariant_basis(const GroupAction &in_action,
                                                  const GroupAction &out_action);

/// Layer-count comparison for a width profile d_0..d_D over a degree-n
/// group. `usual` multiplies the per-layer dense counts capped at M^2 (the
/// M^{2D} accounting); `bound` scales each of the first `tied_layers` factors
/// by 2/n^2; `exact_tied` multiplies the exact per-layer counts, using
/// 2 d_l d_{l+1} / n^2 for the tied (union-of-permutations) layers, whose
/// widths must therefore be multiples of n. Doubles with an overflow flag.
struct ParameterBound {
  double usual = 0.0;
  double bound = 0.0;
  double exact_tied = 0.0;
  bool overflow = false;
  int max_width = 0;
  int depth = 0;
  int tied_layers = 0;
};

ParameterBound parameter_bound(const std::vector<int> &widths, int n,
                               int tied_layers);

} // namespace equinet
