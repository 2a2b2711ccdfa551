#include "equinet/equi_linear.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace equinet {

namespace {

void check_same_group(const GroupAction &in_action, const GroupAction &out_action) {
  const PermutationGroup &a = *in_action.group;
  const PermutationGroup &b = *out_action.group;
  if (a.order() != b.order() || a.degree() != b.degree() ||
      a.elements() != b.elements())
    throw std::invalid_argument("in/out actions must share one group");
}

std::vector<int> generator_indices(const PermutationGroup &g) {
  std::vector<int> idx;
  for (const auto &gen : g.generators()) {
    int i = g.index_of(gen);
    if (i < 0)
      throw std::runtime_error("generator missing from element list");
    idx.push_back(i);
  }
  if (idx.empty())
    idx.push_back(g.identity_index());
  return idx;
}

} // namespace

SharingPattern pair_orbits(const GroupAction &in_action,
                           const GroupAction &out_action) {
  check_same_group(in_action, out_action);
  const int m = in_action.points;
  const int n_out = out_action.points;

  SharingPattern p;
  p.in_size = m;
  p.out_size = n_out;
  p.weight_orbit_id.assign(static_cast<std::size_t>(m) * n_out, -1);
  p.bias_orbit_id.assign(n_out, -1);

  auto gens = generator_indices(*in_action.group);

  // Weight orbits: BFS closure of (i, j) -> (T_out(i), T_in(j)) over the
  // generators, ids in row-major first-encounter order.
  std::vector<long long> stack;
  for (long long start = 0; start < static_cast<long long>(m) * n_out; ++start) {
    if (p.weight_orbit_id[start] >= 0)
      continue;
    int id = p.weight_orbit_count++;
    p.weight_orbit_id[start] = id;
    stack.assign(1, start);
    while (!stack.empty()) {
      long long cur = stack.back();
      stack.pop_back();
      int i = static_cast<int>(cur / m);
      int j = static_cast<int>(cur % m);
      for (int e : gens) {
        long long next =
            static_cast<long long>(out_action.tables[e](i)) * m +
            in_action.tables[e](j);
        if (p.weight_orbit_id[next] < 0) {
          p.weight_orbit_id[next] = id;
          stack.push_back(next);
        }
      }
    }
  }

  // Bias orbits: closure of i -> T_out(i).
  std::vector<int> bstack;
  for (int start = 0; start < n_out; ++start) {
    if (p.bias_orbit_id[start] >= 0)
      continue;
    int id = p.bias_orbit_count++;
    p.bias_orbit_id[start] = id;
    bstack.assign(1, start);
    while (!bstack.empty()) {
      int cur = bstack.back();
      bstack.pop_back();
      for (int e : gens) {
        int next = out_action.tables[e](cur);
        if (p.bias_orbit_id[next] < 0) {
          p.bias_orbit_id[next] = id;
          bstack.push_back(next);
        }
      }
    }
  }
  return p;
}

int count_free_params(const SharingPattern &p) { return p.weight_orbit_count; }

TiedLinearLayer make_tied_layer(SharingPattern pattern) {
  TiedLinearLayer l;
  l.params.assign(pattern.free_param_count(), 0.0);
  l.pattern = std::move(pattern);
  return l;
}

Matrix realize_weights(const SharingPattern &pattern,
                       std::span<const double> params) {
  Matrix w(pattern.out_size, pattern.in_size);
  for (int i = 0; i < pattern.out_size; ++i)
    for (int j = 0; j < pattern.in_size; ++j) {
      int id = pattern.weight_id(i, j);
      w.at(i, j) = id < 0 ? 0.0 : params[id];
    }
  return w;
}

std::vector<double> realize_bias(const SharingPattern &pattern,
                                 std::span<const double> params) {
  std::vector<double> b(pattern.out_size, 0.0);
  for (int i = 0; i < pattern.out_size; ++i) {
    int id = pattern.bias_orbit_id[i];
    b[i] = id < 0 ? 0.0 : params[pattern.weight_orbit_count + id];
  }
  return b;
}

double max_equivariance_residual(const Matrix &w, const GroupAction &in_action,
                                 const GroupAction &out_action) {
  check_same_group(in_action, out_action);
  if (w.rows != out_action.points || w.cols != in_action.points)
    throw std::invalid_argument("matrix shape must match the action points");
  double worst = 0.0;
  for (std::size_t e = 0; e < in_action.tables.size(); ++e) {
    const Permutation &t_in = in_action.tables[e];
    const Permutation &t_out_inv = out_action.inverse_tables[e];
    for (int i = 0; i < w.rows; ++i)
      for (int j = 0; j < w.cols; ++j) {
        // (P_out W)_{ij} = W_{phi_out^{-1}(i), j}; (W P_in)_{ij} = W_{i, phi_in(j)}.
        double d = std::abs(w.at(t_out_inv(i), j) - w.at(i, t_in(j)));
        if (d > worst)
          worst = d;
      }
  }
  return worst;
}

std::vector<Matrix> brute_force_equivariant_basis(const GroupAction &in_action,
                                                  const GroupAction &out_action) {
  check_same_group(in_action, out_action);
  const int m = in_action.points;
  const int n_out = out_action.points;
  if (static_cast<long long>(m) * n_out > kMaxActionPoints)
    throw std::invalid_argument("averaging oracle capped at 4096 matrix entries");

  const auto &group = *in_action.group;
  std::vector<char> seen(static_cast<std::size_t>(m) * n_out, 0);
  std::vector<Matrix> basis;
  for (int i = 0; i < n_out; ++i)
    for (int j = 0; j < m; ++j) {
      if (seen[static_cast<std::size_t>(i) * m + j])
        continue;
      // Average P_out(e) E_{ij} P_in(e)^{-1} = E_{T_out(e)(i), T_in(e)(j)}
      // over the whole group.
      Matrix avg(n_out, m);
      for (int e = 0; e < group.order(); ++e) {
        int pi = out_action.tables[e](i);
        int pj = in_action.tables[e](j);
        avg.at(pi, pj) += 1.0 / group.order();
      }
      for (int pi = 0; pi < n_out; ++pi)
        for (int pj = 0; pj < m; ++pj)
          if (avg.at(pi, pj) != 0.0)
            seen[static_cast<std::size_t>(pi) * m + pj] = 1;
      basis.push_back(std::move(avg));
    }
  return basis;
}

ParameterBound parameter_bound(const std::vector<int> &widths, int n,
                               int tied_layers) {
  if (widths.size() < 2)
    throw std::invalid_argument("parameter_bound: need at least one layer");
  if (n < 2)
    throw std::invalid_argument("parameter_bound: degenerate degree, need n >= 2");
  const int depth = static_cast<int>(widths.size()) - 1;
  if (tied_layers < 0 || tied_layers > depth)
    throw std::invalid_argument("parameter_bound: tied layer count out of range");

  ParameterBound r;
  r.depth = depth;
  r.tied_layers = tied_layers;
  for (int w : widths) {
    if (w < 1)
      throw std::invalid_argument("parameter_bound: widths must be positive");
    r.max_width = std::max(r.max_width, w);
  }

  const double m = r.max_width;
  const double shrink = 2.0 / (static_cast<double>(n) * n);
  // Track log2 alongside to flag overflow instead of silently reporting inf.
  double log_usual = 0.0, log_bound = 0.0, log_exact = 0.0;
  for (int l = 0; l < depth; ++l) {
    log_usual += 2.0 * std::log2(m);
    log_bound += 2.0 * std::log2(m);
    bool tied = l < tied_layers;
    if (tied) {
      log_bound += std::log2(shrink);
      if (widths[l] % n != 0 || widths[l + 1] % n != 0)
        throw std::invalid_argument(
            "parameter_bound: tied layer widths must be multiples of n "
            "(unions of the natural action)");
      log_exact += std::log2(shrink * widths[l] * widths[l + 1]);
    } else {
      log_exact +=
          std::log2(static_cast<double>(widths[l]) * widths[l + 1]);
    }
  }
  const double max_exp = 1023.0;
  r.overflow = log_usual > max_exp || log_bound > max_exp || log_exact > max_exp;
  auto from_log = [&](double lg) {
    return lg > max_exp ? std::numeric_limits<double>::infinity()
                        : std::exp2(lg);
  };
  r.usual = from_log(log_usual);
  r.bound = from_log(log_bound);
  r.exact_tied = from_log(log_exact);
  return r;
}

} // namespace equinet
