#include "equinet/nets.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

namespace equinet {

namespace {

void check_widths(const std::vector<int> &w, const char *what) {
  if (w.size() < 2)
    throw std::invalid_argument(std::string(what) +
                                ": need input and output widths");
  for (int v : w)
    if (v < 1)
      throw std::invalid_argument(std::string(what) +
                                  ": widths must be positive");
}

/// Wide mode fixes one hidden layer per block (lanes then fuse to affine
/// depth 3); deep mode trades depth for a hidden-width cap instead.
void check_mode(NetMode mode, const std::vector<int> &w, int hidden_cap,
                const char *what) {
  int hidden = static_cast<int>(w.size()) - 2;
  if (mode == NetMode::wide) {
    if (hidden != 1)
      throw std::invalid_argument(std::string(what) +
                                  ": wide mode takes exactly one hidden layer");
    return;
  }
  for (std::size_t i = 1; i + 1 < w.size(); ++i)
    if (w[i] > hidden_cap)
      throw std::invalid_argument(std::string(what) +
                                  ": deep mode caps hidden width at " +
                                  std::to_string(hidden_cap));
}

int assign_lane_offsets(LaneNet &lane, int offset) {
  if (!lane.free_mlp && !lane.exact_phi) {
    lane.phi.param_offset = offset;
    offset += lane.phi.param_count();
  }
  lane.rho.param_offset = offset;
  return offset + lane.rho.param_count();
}

void mlp_forward(const MlpBlock &blk, std::span<const double> params,
                 std::span<const double> in, MlpCache &cache) {
  int depth = blk.affine_depth();
  cache.acts.assign(depth + 1, {});
  cache.acts[0].assign(in.begin(), in.end());
  int off = blk.param_offset;
  for (int l = 0; l < depth; ++l) {
    int rows = blk.widths[l + 1], cols = blk.widths[l];
    const double *w = params.data() + off;
    const double *b = w + static_cast<std::size_t>(rows) * cols;
    const auto &a = cache.acts[l];
    auto &out = cache.acts[l + 1];
    out.assign(rows, 0.0);
    bool hidden = l + 1 < depth;
    for (int r = 0; r < rows; ++r) {
      double s = b[r];
      const double *wr = w + static_cast<std::size_t>(r) * cols;
      for (int c = 0; c < cols; ++c)
        s += wr[c] * a[c];
      out[r] = (hidden && s < 0.0) ? 0.0 : s;
    }
    off += rows * (cols + 1);
  }
}

/// Returns the gradient with respect to the block input. The ReLU mask is
/// recovered from the cached post-activations; the derivative at 0 is 0.
std::vector<double> mlp_backward(const MlpBlock &blk,
                                 std::span<const double> params,
                                 const MlpCache &cache,
                                 std::vector<double> delta,
                                 std::span<double> grad) {
  int depth = blk.affine_depth();
  std::vector<int> offs(depth);
  int off = blk.param_offset;
  for (int l = 0; l < depth; ++l) {
    offs[l] = off;
    off += blk.widths[l + 1] * (blk.widths[l] + 1);
  }
  for (int l = depth - 1; l >= 0; --l) {
    int rows = blk.widths[l + 1], cols = blk.widths[l];
    const double *w = params.data() + offs[l];
    double *gw = grad.data() + offs[l];
    double *gb = gw + static_cast<std::size_t>(rows) * cols;
    const auto &a = cache.acts[l];
    std::vector<double> prev(cols, 0.0);
    for (int r = 0; r < rows; ++r) {
      double d = delta[r];
      if (d == 0.0)
        continue;
      gb[r] += d;
      const double *wr = w + static_cast<std::size_t>(r) * cols;
      double *gwr = gw + static_cast<std::size_t>(r) * cols;
      for (int c = 0; c < cols; ++c) {
        gwr[c] += d * a[c];
        prev[c] += wr[c] * d;
      }
    }
    if (l > 0) {
      const auto &post = cache.acts[l];
      for (int c = 0; c < cols; ++c)
        if (post[c] <= 0.0)
          prev[c] = 0.0;
    }
    delta = std::move(prev);
  }
  return delta;
}

double lane_forward(const LaneNet &lane, std::span<const double> params,
                    std::span<const double> x, LaneCache &cache) {
  cache.input.assign(x.begin(), x.end());
  if (lane.free_mlp) {
    cache.phi.clear();
    mlp_forward(lane.rho, params, x, cache.rho);
    return cache.rho.acts.back()[0];
  }
  int f = lane.feature_dim();
  int skip = lane.identity_lane ? 1 : 0;
  std::vector<double> rin(skip + f, 0.0);
  if (lane.identity_lane)
    rin[0] = x[lane.base];
  if (lane.exact_phi) {
    cache.phi.clear();
    for (int i = 0; i < lane.fan_in; ++i) {
      if (lane.identity_lane && i == lane.base)
        continue;
      double p = 1.0;
      for (int k = 0; k < f; ++k) {
        rin[skip + k] += p;
        p *= x[i];
      }
    }
  } else {
    cache.phi.assign(lane.fan_in, MlpCache{});
    for (int i = 0; i < lane.fan_in; ++i) {
      if (lane.identity_lane && i == lane.base)
        continue;
      mlp_forward(lane.phi, params, std::span<const double>(&x[i], 1),
                  cache.phi[i]);
      const auto &feat = cache.phi[i].acts.back();
      for (int k = 0; k < f; ++k)
        rin[skip + k] += feat[k];
    }
  }
  mlp_forward(lane.rho, params, rin, cache.rho);
  return cache.rho.acts.back()[0];
}

void lane_backward(const LaneNet &lane, std::span<const double> params,
                   const LaneCache &cache, double grad_out,
                   std::span<double> grad) {
  std::vector<double> grin =
      mlp_backward(lane.rho, params, cache.rho, {grad_out}, grad);
  if (lane.free_mlp || lane.exact_phi)
    return; // the head consumed every trainable parameter
  int skip = lane.identity_lane ? 1 : 0;
  int f = lane.feature_dim();
  std::vector<double> gpool(grin.begin() + skip, grin.begin() + skip + f);
  for (int i = 0; i < lane.fan_in; ++i) {
    if (lane.identity_lane && i == lane.base)
      continue;
    mlp_backward(lane.phi, params, cache.phi[i], gpool, grad);
  }
}

std::shared_ptr<const PermutationGroup> shared_symmetric(int n) {
  // n! stays under the closure cap through n = 7; larger invariant_sum nets
  // simply carry no materialized group.
  if (n > 7)
    return nullptr;
  return std::make_shared<const PermutationGroup>(symmetric_group(n));
}

std::vector<int> lane_stage_widths(const LaneNet &lane) {
  if (lane.free_mlp)
    return lane.rho.widths;
  std::vector<int> s;
  int copies = lane.identity_lane ? lane.fan_in - 1 : lane.fan_in;
  int carry = lane.identity_lane ? 1 : 0;
  s.push_back(lane.fan_in);
  if (lane.exact_phi)
    s.push_back(carry + copies * lane.feature_dim());
  else
    for (std::size_t l = 1; l < lane.phi.widths.size(); ++l)
      s.push_back(carry + copies * lane.phi.widths[l]);
  // rho.widths.front() is the pooled stage carry + features
  s.insert(s.end(), lane.rho.widths.begin(), lane.rho.widths.end());
  return s;
}

int lane_fused_depth(const LaneNet &lane) {
  if (lane.free_mlp)
    return lane.rho.affine_depth();
  if (lane.exact_phi)
    return 1 + lane.rho.affine_depth();
  // the encoder's output layer and the head's input layer fuse across the sum
  return lane.phi.affine_depth() + lane.rho.affine_depth() - 1;
}

void require_same_group(const PermutationGroup &a, const PermutationGroup &b,
                        const char *what) {
  if (a.degree() != b.degree() || a.order() != b.order() ||
      a.elements() != b.elements())
    throw std::invalid_argument(std::string(what) +
                                ": actions must share the network's group");
}

} // namespace

std::vector<double> ka_encoder(double t, int order) {
  if (order < 0)
    throw std::invalid_argument("ka_encoder: order must be non-negative");
  std::vector<double> out(order + 1);
  double p = 1.0;
  for (int k = 0; k <= order; ++k) {
    out[k] = p;
    p *= t;
  }
  return out;
}

std::string to_string(NetKind kind) {
  switch (kind) {
  case NetKind::invariant_sum:
    return "invariant_sum";
  case NetKind::stab_invariant:
    return "stab_invariant";
  case NetKind::equivariant:
    return "equivariant";
  case NetKind::invariant_tensor:
    return "invariant_tensor";
  }
  return "?";
}

std::string to_string(NetMode mode) {
  return mode == NetMode::wide ? "wide" : "deep";
}

NetKind net_kind_from_string(const std::string &s) {
  if (s == "invariant_sum")
    return NetKind::invariant_sum;
  if (s == "stab_invariant")
    return NetKind::stab_invariant;
  if (s == "equivariant")
    return NetKind::equivariant;
  if (s == "invariant_tensor")
    return NetKind::invariant_tensor;
  throw std::invalid_argument("unknown network kind: " + s);
}

NetMode net_mode_from_string(const std::string &s) {
  if (s == "wide")
    return NetMode::wide;
  if (s == "deep")
    return NetMode::deep;
  throw std::invalid_argument("unknown network mode: " + s);
}

int MlpBlock::param_count() const {
  int total = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l)
    total += widths[l + 1] * (widths[l] + 1);
  return total;
}

Network build_invariant_sum_net(int n, NetMode mode, const LaneSpec &spec) {
  if (n < 1)
    throw std::invalid_argument("build_invariant_sum_net: n must be positive");
  Network net;
  net.kind = NetKind::invariant_sum;
  net.mode = mode;
  net.degree = n;
  net.input_dim = n;
  net.output_dim = 1;
  net.group = shared_symmetric(n);

  LaneNet lane;
  lane.fan_in = n;
  int features = n + 1;
  if (spec.exact_phi) {
    lane.exact_phi = true;
    lane.exact_phi_order = n;
  } else {
    check_widths(spec.phi_widths, "invariant_sum phi");
    if (spec.phi_widths.front() != 1 || spec.phi_widths.back() != features)
      throw std::invalid_argument(
          "invariant_sum phi: must map a scalar to n+1 features");
    check_mode(mode, spec.phi_widths, n + 1, "invariant_sum phi");
    lane.phi.widths = spec.phi_widths;
  }
  check_widths(spec.rho_widths, "invariant_sum rho");
  if (spec.rho_widths.front() != features || spec.rho_widths.back() != 1)
    throw std::invalid_argument(
        "invariant_sum rho: must map n+1 features to a scalar");
  check_mode(mode, spec.rho_widths, n + 2, "invariant_sum rho");
  lane.rho.widths = spec.rho_widths;

  net.params.assign(assign_lane_offsets(lane, 0), 0.0);
  net.lane = std::move(lane);
  return net;
}

Network build_stab_invariant_net(int n, NetMode mode, const LaneSpec &spec) {
  if (n < 2)
    throw std::invalid_argument(
        "build_stab_invariant_net: need n >= 2 (one identity coordinate plus "
        "at least one encoded coordinate)");
  Network net;
  net.kind = NetKind::stab_invariant;
  net.mode = mode;
  net.degree = n;
  net.input_dim = n;
  net.output_dim = 1;
  net.group = shared_symmetric(n);
  if (!net.group)
    throw std::invalid_argument(
        "build_stab_invariant_net: degree exceeds the group enumeration cap");

  LaneNet lane;
  lane.fan_in = n;
  lane.base = 0;
  lane.identity_lane = true;
  int features = n + 1;
  if (spec.exact_phi) {
    lane.exact_phi = true;
    lane.exact_phi_order = n;
  } else {
    check_widths(spec.phi_widths, "stab_invariant phi");
    if (spec.phi_widths.front() != 1 || spec.phi_widths.back() != features)
      throw std::invalid_argument(
          "stab_invariant phi: must map a scalar to n+1 features");
    check_mode(mode, spec.phi_widths, n + 1, "stab_invariant phi");
    lane.phi.widths = spec.phi_widths;
  }
  check_widths(spec.rho_widths, "stab_invariant rho");
  if (spec.rho_widths.front() != features + 1 || spec.rho_widths.back() != 1)
    throw std::invalid_argument("stab_invariant rho: the head reads the "
                                "identity coordinate plus n+1 pooled features");
  check_mode(mode, spec.rho_widths, n + 2, "stab_invariant rho");
  lane.rho.widths = spec.rho_widths;

  net.params.assign(assign_lane_offsets(lane, 0), 0.0);
  net.lane = std::move(lane);
  return net;
}

Network build_equivariant_net(std::shared_ptr<const PermutationGroup> group,
                              NetMode mode, const LaneSpec &tmpl) {
  if (!group)
    throw std::invalid_argument("build_equivariant_net: group required");
  int n = group->degree();
  Network net;
  net.kind = NetKind::equivariant;
  net.mode = mode;
  net.degree = n;
  net.input_dim = n;
  net.output_dim = n;
  net.group = group;

  auto od = orbit_decomposition(*group);
  for (const auto &orb : od.orbits)
    for (std::size_t k = 0; k < orb.size(); ++k)
      if (orb[k] != orb.front() + static_cast<int>(k))
        throw std::invalid_argument(
            "build_equivariant_net: orbits must be contiguous index ranges; "
            "relabel the group with apply_orbit_reorder first");

  int offset = 0;
  int features = n + 1;
  for (std::size_t j = 0; j < od.orbits.size(); ++j) {
    int base = od.base_points[j];
    auto cd = coset_decomposition(*group, base);
    OrbitBlock blk;
    blk.base = base;
    blk.size = static_cast<int>(od.orbits[j].size());
    blk.gathers.reserve(blk.size);
    for (const auto &rep : cd.representatives)
      blk.gathers.push_back(rep.inverse().images());

    LaneNet lane;
    lane.fan_in = n;
    lane.base = base;
    if (cd.subgroup.order() == 1) {
      // Trivial stabilizer: the slot function is unconstrained, so the lane
      // is a plain MLP over all coordinates reusing the head's hidden widths.
      lane.free_mlp = true;
      check_widths(tmpl.rho_widths, "equivariant lane");
      std::vector<int> w;
      w.push_back(n);
      w.insert(w.end(), tmpl.rho_widths.begin() + 1, tmpl.rho_widths.end() - 1);
      w.push_back(1);
      check_mode(mode, w, n + 2, "equivariant free lane");
      lane.rho.widths = std::move(w);
    } else {
      lane.identity_lane = true;
      if (tmpl.exact_phi) {
        lane.exact_phi = true;
        lane.exact_phi_order = n;
      } else {
        check_widths(tmpl.phi_widths, "equivariant phi");
        if (tmpl.phi_widths.front() != 1 || tmpl.phi_widths.back() != features)
          throw std::invalid_argument(
              "equivariant phi: must map a scalar to n+1 features");
        check_mode(mode, tmpl.phi_widths, n + 1, "equivariant phi");
        lane.phi.widths = tmpl.phi_widths;
      }
      check_widths(tmpl.rho_widths, "equivariant rho");
      if (tmpl.rho_widths.front() != features + 1 ||
          tmpl.rho_widths.back() != 1)
        throw std::invalid_argument(
            "equivariant rho: the head reads the identity coordinate plus "
            "n+1 pooled features");
      check_mode(mode, tmpl.rho_widths, n + 2, "equivariant rho");
      lane.rho.widths = tmpl.rho_widths;
    }
    offset = assign_lane_offsets(lane, offset);
    blk.lane = std::move(lane);
    net.orbits.push_back(std::move(blk));
  }
  net.params.assign(offset, 0.0);
  return net;
}

Network build_invariant_tensor_net(
    std::shared_ptr<const PermutationGroup> group,
    const std::vector<GroupAction> &chain) {
  if (!group)
    throw std::invalid_argument("build_invariant_tensor_net: group required");
  if (chain.empty())
    throw std::invalid_argument(
        "build_invariant_tensor_net: need at least one action in the chain");
  require_same_group(*group, *chain.front().group,
                     "build_invariant_tensor_net");

  Network net;
  net.kind = NetKind::invariant_tensor;
  net.mode = NetMode::deep;
  net.degree = group->degree();
  net.group = group;
  net.chain = chain;
  net.input_dim = chain.front().points;
  net.output_dim = 1;

  int offset = 0;
  for (std::size_t l = 0; l + 1 < chain.size(); ++l) {
    TiedBlock blk;
    blk.pattern = pair_orbits(chain[l], chain[l + 1]);
    blk.param_offset = offset;
    offset += blk.pattern.free_param_count();
    net.layers.push_back(std::move(blk));
  }
  net.params.assign(offset, 0.0);
  return net;
}

void initialize_params(Network &net, Rng &rng) {
  std::fill(net.params.begin(), net.params.end(), 0.0);
  auto init_mlp = [&](const MlpBlock &blk) {
    int off = blk.param_offset;
    for (std::size_t l = 0; l + 1 < blk.widths.size(); ++l) {
      int rows = blk.widths[l + 1], cols = blk.widths[l];
      double limit = std::sqrt(6.0 / (rows + cols));
      for (int i = 0; i < rows * cols; ++i)
        net.params[off + i] = rng.uniform(-limit, limit);
      off += rows * (cols + 1);
    }
  };
  auto init_lane = [&](const LaneNet &lane) {
    if (!lane.free_mlp && !lane.exact_phi)
      init_mlp(lane.phi);
    init_mlp(lane.rho);
  };
  switch (net.kind) {
  case NetKind::invariant_sum:
  case NetKind::stab_invariant:
    init_lane(net.lane);
    break;
  case NetKind::equivariant:
    for (const auto &blk : net.orbits)
      init_lane(blk.lane);
    break;
  case NetKind::invariant_tensor:
    for (const auto &blk : net.layers) {
      const auto &p = blk.pattern;
      double limit = std::sqrt(6.0 / (p.in_size + p.out_size));
      for (int i = 0; i < p.weight_orbit_count; ++i)
        net.params[blk.param_offset + i] = rng.uniform(-limit, limit);
    }
    break;
  }
}

const std::vector<double> &forward_cached(const Network &net,
                                          std::span<const double> x,
                                          ForwardCache &cache) {
  if (static_cast<int>(x.size()) != net.input_dim)
    throw std::invalid_argument("forward: input length mismatch");
  switch (net.kind) {
  case NetKind::invariant_sum:
  case NetKind::stab_invariant: {
    cache.lanes.assign(1, LaneCache{});
    double y = lane_forward(net.lane, net.params, x, cache.lanes[0]);
    cache.output.assign(1, y);
    break;
  }
  case NetKind::equivariant: {
    cache.lanes.assign(net.degree, LaneCache{});
    cache.output.assign(net.degree, 0.0);
    std::vector<double> gathered(net.degree);
    for (const auto &blk : net.orbits)
      for (int k = 0; k < blk.size; ++k) {
        for (int i = 0; i < net.degree; ++i)
          gathered[i] = x[blk.gathers[k][i]];
        cache.output[blk.base + k] = lane_forward(
            blk.lane, net.params, gathered, cache.lanes[blk.base + k]);
      }
    break;
  }
  case NetKind::invariant_tensor: {
    int layer_count = static_cast<int>(net.layers.size());
    cache.tensor_acts.assign(layer_count + 1, {});
    cache.tensor_acts[0].assign(x.begin(), x.end());
    for (int l = 0; l < layer_count; ++l) {
      const auto &p = net.layers[l].pattern;
      const double *w = net.params.data() + net.layers[l].param_offset;
      const double *b = w + p.weight_orbit_count;
      const auto &a = cache.tensor_acts[l];
      auto &out = cache.tensor_acts[l + 1];
      out.assign(p.out_size, 0.0);
      bool hidden = l + 1 < layer_count;
      for (int i = 0; i < p.out_size; ++i) {
        int bid = p.bias_orbit_id[i];
        double s = bid >= 0 ? b[bid] : 0.0;
        for (int j = 0; j < p.in_size; ++j) {
          int wid = p.weight_orbit_id[static_cast<std::size_t>(i) * p.in_size + j];
          if (wid >= 0)
            s += w[wid] * a[j];
        }
        out[i] = (hidden && s < 0.0) ? 0.0 : s;
      }
    }
    double total = 0.0;
    for (double v : cache.tensor_acts[layer_count])
      total += v;
    cache.output.assign(1, total);
    break;
  }
  }
  return cache.output;
}

std::vector<double> forward(const Network &net, std::span<const double> x) {
  ForwardCache cache;
  return forward_cached(net, x, cache);
}

void backward(const Network &net, const ForwardCache &cache,
              std::span<const double> grad_output,
              std::span<double> grad_params) {
  if (static_cast<int>(grad_output.size()) != net.output_dim)
    throw std::invalid_argument("backward: output gradient length mismatch");
  if (grad_params.size() != net.params.size())
    throw std::invalid_argument("backward: parameter gradient length mismatch");
  switch (net.kind) {
  case NetKind::invariant_sum:
  case NetKind::stab_invariant:
    lane_backward(net.lane, net.params, cache.lanes[0], grad_output[0],
                  grad_params);
    break;
  case NetKind::equivariant:
    for (const auto &blk : net.orbits)
      for (int k = 0; k < blk.size; ++k)
        lane_backward(blk.lane, net.params, cache.lanes[blk.base + k],
                      grad_output[blk.base + k], grad_params);
    break;
  case NetKind::invariant_tensor: {
    int layer_count = static_cast<int>(net.layers.size());
    if (layer_count == 0)
      break; // pure sum pooling has no parameters
    std::vector<double> delta(cache.tensor_acts[layer_count].size(),
                              grad_output[0]);
    for (int l = layer_count - 1; l >= 0; --l) {
      const auto &p = net.layers[l].pattern;
      const double *w = net.params.data() + net.layers[l].param_offset;
      double *gw = grad_params.data() + net.layers[l].param_offset;
      double *gb = gw + p.weight_orbit_count;
      const auto &a = cache.tensor_acts[l];
      std::vector<double> prev(p.in_size, 0.0);
      for (int i = 0; i < p.out_size; ++i) {
        double d = delta[i];
        if (d == 0.0)
          continue;
        int bid = p.bias_orbit_id[i];
        if (bid >= 0)
          gb[bid] += d;
        for (int j = 0; j < p.in_size; ++j) {
          int wid = p.weight_orbit_id[static_cast<std::size_t>(i) * p.in_size + j];
          if (wid < 0)
            continue;
          gw[wid] += d * a[j];
          prev[j] += w[wid] * d;
        }
      }
      if (l > 0) {
        const auto &post = cache.tensor_acts[l];
        for (int j = 0; j < p.in_size; ++j)
          if (post[j] <= 0.0)
            prev[j] = 0.0;
      }
      delta = std::move(prev);
    }
    break;
  }
  }
}

SymmetryResidual symmetry_residual(const Network &net,
                                   std::span<const double> x) {
  SymmetryResidual res;
  auto consider = [&res](double d, int element, int coordinate) {
    if (d > res.max_abs) {
      res.max_abs = d;
      res.element = element;
      res.coordinate = coordinate;
    }
  };
  switch (net.kind) {
  case NetKind::invariant_sum: {
    if (!net.group)
      throw std::logic_error(
          "symmetry_residual: no materialized group at this degree");
    double y = forward(net, x)[0];
    for (int e = 0; e < net.group->order(); ++e) {
      auto xs = permute_vector(net.group->element(e), x);
      consider(std::abs(forward(net, xs)[0] - y), e, 0);
    }
    break;
  }
  case NetKind::stab_invariant: {
    auto stab = stabilizer(*net.group, net.lane.base);
    double y = forward(net, x)[0];
    for (int e = 0; e < stab.order(); ++e) {
      auto xs = permute_vector(stab.element(e), x);
      consider(std::abs(forward(net, xs)[0] - y), e, 0);
    }
    break;
  }
  case NetKind::equivariant: {
    auto y = forward(net, x);
    for (int e = 0; e < net.group->order(); ++e) {
      const Permutation &s = net.group->element(e);
      auto ys = forward(net, permute_vector(s, x));
      Permutation inv = s.inverse();
      for (int i = 0; i < net.degree; ++i)
        consider(std::abs(ys[i] - y[inv(i)]), e, i);
    }
    break;
  }
  case NetKind::invariant_tensor: {
    double y = forward(net, x)[0];
    const GroupAction &in = net.chain.front();
    for (int e = 0; e < net.group->order(); ++e) {
      auto xs = apply(in, e, x);
      consider(std::abs(forward(net, xs)[0] - y), e, 0);
    }
    break;
  }
  }
  return res;
}

BoundsReport report_bounds(const Network &net) {
  BoundsReport rep;
  switch (net.kind) {
  case NetKind::invariant_sum:
  case NetKind::stab_invariant:
    rep.stage_widths = lane_stage_widths(net.lane);
    rep.depth = lane_fused_depth(net.lane);
    break;
  case NetKind::equivariant: {
    std::vector<std::pair<int, std::vector<int>>> per;
    std::size_t longest = 1;
    for (const auto &blk : net.orbits) {
      per.emplace_back(blk.size, lane_stage_widths(blk.lane));
      longest = std::max(longest, per.back().second.size());
      rep.depth = std::max(rep.depth, lane_fused_depth(blk.lane));
    }
    // slot lanes run in parallel over the one shared input; exhausted lanes
    // hold their scalar output
    rep.stage_widths.push_back(net.degree);
    for (std::size_t d = 1; d < longest; ++d) {
      int w = 0;
      for (const auto &[size, stages] : per)
        w += size * (d < stages.size() ? stages[d] : 1);
      rep.stage_widths.push_back(w);
    }
    break;
  }
  case NetKind::invariant_tensor:
    for (const auto &a : net.chain)
      rep.stage_widths.push_back(a.points);
    rep.depth = std::max(1, static_cast<int>(net.layers.size()));
    break;
  }
  rep.width = *std::max_element(rep.stage_widths.begin(),
                                rep.stage_widths.end());

  int n = net.degree;
  bool trivial_symmetry = net.group && net.group->order() == 1;
  if (trivial_symmetry || net.kind == NetKind::invariant_tensor) {
    // no applicable structural target; report widths only
  } else if (net.mode == NetMode::wide) {
    rep.depth_bound = 3;
  } else if (net.kind == NetKind::equivariant) {
    rep.width_bound = n * n * n;
  } else {
    rep.width_bound = n * (n + 2);
  }
  rep.pass = (rep.width_bound == 0 || rep.width <= rep.width_bound) &&
             (rep.depth_bound == 0 || rep.depth <= rep.depth_bound);
  return rep;
}

std::vector<double> FirstLayerG::eval(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("first_layer_g: input length mismatch");
  std::vector<double> out(out_dim(), 0.0);
  for (std::size_t k = 0; k < reps.size(); ++k) {
    auto xs = permute_vector(reps[k], x);
    for (int i = 0; i < n; ++i) {
      double s = bias[i];
      for (int j = 0; j < n; ++j)
        s += weights.at(i, j) * xs[j];
      out[k * n + i] = s < 0.0 ? 0.0 : s;
    }
  }
  return out;
}

FirstLayerG make_first_layer_g(const GroupAction &stab_natural, Matrix weights,
                               std::vector<double> bias,
                               std::vector<Permutation> reps, int base,
                               double tol) {
  int n = stab_natural.points;
  if (weights.rows != n || weights.cols != n ||
      static_cast<int>(bias.size()) != n)
    throw std::invalid_argument(
        "make_first_layer_g: map must be square over the action's points");
  if (reps.empty())
    throw std::invalid_argument("make_first_layer_g: representatives required");
  for (std::size_t k = 0; k < reps.size(); ++k) {
    if (reps[k].degree() != n)
      throw std::invalid_argument("make_first_layer_g: representative degree");
    if (reps[k].inverse()(base) != base + static_cast<int>(k))
      throw std::invalid_argument(
          "make_first_layer_g: representatives must send base + k to base");
  }
  if (max_equivariance_residual(weights, stab_natural, stab_natural) > tol)
    throw std::invalid_argument(
        "make_first_layer_g: weights are not stabilizer-equivariant");
  for (int e = 0; e < stab_natural.group->order(); ++e) {
    const Permutation &inv = stab_natural.inverse_tables[e];
    for (int i = 0; i < n; ++i)
      if (std::abs(bias[inv(i)] - bias[i]) > tol)
        throw std::invalid_argument(
            "make_first_layer_g: bias is not stabilizer-invariant");
  }
  FirstLayerG g;
  g.n = n;
  g.base = base;
  g.weights = std::move(weights);
  g.bias = std::move(bias);
  g.reps = std::move(reps);
  return g;
}

std::vector<double> assemble_equivariant(
    const PermutationGroup &group,
    const std::vector<std::function<double(std::span<const double>)>> &lane_fns,
    std::span<const double> x) {
  int n = group.degree();
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("assemble_equivariant: input length mismatch");
  auto od = orbit_decomposition(group);
  if (lane_fns.size() != od.orbits.size())
    throw std::invalid_argument(
        "assemble_equivariant: one lane function per orbit required");
  std::vector<double> out(n, 0.0);
  for (std::size_t j = 0; j < od.orbits.size(); ++j) {
    auto cd = coset_decomposition(group, od.base_points[j]);
    for (std::size_t k = 0; k < cd.representatives.size(); ++k) {
      auto xs = permute_vector(cd.representatives[k], x);
      out[od.base_points[j] + static_cast<int>(k)] = lane_fns[j](xs);
    }
  }
  return out;
}

} // namespace equinet
