#include "equinet/verify.hpp"

#include "equinet/actions.hpp"
#include "equinet/equi_linear.hpp"
#include "equinet/nets.hpp"
#include "equinet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace equinet {

namespace {

constexpr double kTol = 1e-9;
constexpr double kWitnessFloor = 1e-6;

std::vector<double> random_vector(int n, Rng &rng, double lo = -1.0,
                                  double hi = 1.0) {
  std::vector<double> x(n);
  for (double &v : x)
    v = rng.uniform(lo, hi);
  return x;
}

std::string format_vector(const std::vector<double> &x) {
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < x.size(); ++i)
    out << (i ? ", " : "") << x[i];
  out << "]";
  return out.str();
}

// Small unconstrained ReLU stack used as the "arbitrary function" in the
// symmetrization checks; last layer affine.
struct TinyMlp {
  std::vector<int> widths;
  std::vector<double> params;

  static TinyMlp random(std::vector<int> widths, Rng &rng) {
    TinyMlp m;
    m.widths = std::move(widths);
    int count = 0;
    for (std::size_t l = 0; l + 1 < m.widths.size(); ++l)
      count += m.widths[l + 1] * (m.widths[l] + 1);
    m.params = random_vector(count, rng);
    return m;
  }

  std::vector<double> operator()(std::span<const double> x) const {
    std::vector<double> v(x.begin(), x.end());
    int offset = 0;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
      int rows = widths[l + 1], cols = widths[l];
      std::vector<double> next(rows);
      for (int r = 0; r < rows; ++r) {
        double s = params[offset + rows * cols + r];
        for (int c = 0; c < cols; ++c)
          s += params[offset + r * cols + c] * v[c];
        next[r] = (l + 2 < widths.size() && s < 0.0) ? 0.0 : s;
      }
      v = std::move(next);
      offset += rows * (cols + 1);
    }
    return v;
  }
};

int factorial(int n) {
  int f = 1;
  for (int i = 2; i <= n; ++i)
    f *= i;
  return f;
}

bool is_full_symmetric(const PermutationGroup &g) {
  return g.degree() <= 7 && g.order() == factorial(g.degree());
}

// Per-orbit random stabilizer-equivariant first layers and the assembled
// g(x): block b_j + k holds ReLU(W_j (tau_{j,k} . x) + c_j).
struct FirstLayerFixture {
  std::vector<int> bases;
  std::vector<std::vector<Permutation>> reps;
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;

  std::vector<double> eval(const PermutationGroup &g,
                           std::span<const double> x) const {
    int n = g.degree();
    std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);
    for (std::size_t j = 0; j < bases.size(); ++j) {
      for (std::size_t k = 0; k < reps[j].size(); ++k) {
        std::vector<double> moved = permute_vector(reps[j][k], x);
        int block = bases[j] + static_cast<int>(k);
        for (int i = 0; i < n; ++i) {
          double s = biases[j][i];
          for (int c = 0; c < n; ++c)
            s += weights[j].at(i, c) * moved[c];
          out[static_cast<std::size_t>(block) * n + i] = std::max(0.0, s);
        }
      }
    }
    return out;
  }
};

FirstLayerFixture random_first_layer(const PermutationGroup &g, Rng &rng) {
  FirstLayerFixture fx;
  OrbitDecomposition od = orbit_decomposition(g);
  for (int base : od.base_points) {
    CosetDecomposition cd = coset_decomposition(g, base);
    PermutationGroup stab = stabilizer(g, base);
    GroupAction stab_nat = natural_action(stab);
    SharingPattern pattern = pair_orbits(stab_nat, stab_nat);
    std::vector<double> params =
        random_vector(pattern.free_param_count(), rng);
    fx.bases.push_back(base);
    fx.reps.push_back(cd.representatives);
    fx.weights.push_back(realize_weights(pattern, params));
    fx.biases.push_back(realize_bias(pattern, params));
  }
  return fx;
}

} // namespace

bool all_pass(const std::vector<CheckResult> &results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult &r) { return r.pass; });
}

std::vector<CheckResult>
run_verify_suite(std::shared_ptr<const PermutationGroup> group,
                 const VerifyOptions &opts) {
  if (!group)
    throw std::invalid_argument("run_verify_suite: group required");
  std::vector<CheckResult> results;
  Rng rng(opts.seed);
  const int inputs = std::max(1, opts.random_inputs);
  const int maps = std::max(1, opts.random_maps);

  // Relabel once so every orbit is a contiguous index range; all later
  // checks assume that layout.
  {
    CheckResult r{"orbit_labels", true, 0.0, "orbits contiguous"};
    OrbitDecomposition od = orbit_decomposition(*group);
    bool identity = true;
    for (int i = 0; i < group->degree(); ++i)
      identity = identity && od.reorder[i] == i;
    if (!identity) {
      group = std::make_shared<const PermutationGroup>(
          apply_orbit_reorder(*group, od));
      r.detail = "points relabeled to make the orbits contiguous";
    }
    results.push_back(r);
  }
  const PermutationGroup &g = *group;
  const int n = g.degree();
  const int order = g.order();
  OrbitDecomposition od = orbit_decomposition(g);

  {
    CheckResult r{"group_axioms", true, 0.0, ""};
    if (!g.element(0).is_identity()) {
      r.pass = false;
      r.detail = "element 0 is not the identity";
    }
    for (int a = 0; a < order && r.pass; ++a) {
      for (int b = 0; b < order && r.pass; ++b) {
        Permutation prod = compose(g.element(a), g.element(b));
        if (g.index_of(prod) < 0) {
          r.pass = false;
          r.detail = "closure fails at elements " + std::to_string(a) + ", " +
                     std::to_string(b);
        }
      }
      if (r.pass && g.compose_indices(a, g.inverse_index(a)) != 0) {
        r.pass = false;
        r.detail = "inverse fails at element " + std::to_string(a);
      }
    }
    results.push_back(r);
  }

  {
    CheckResult r{"orbit_stabilizer", true, 0.0, ""};
    for (int i = 0; i < n && r.pass; ++i) {
      std::size_t lhs = orbit(g, i).size() * stabilizer(g, i).order();
      if (lhs != static_cast<std::size_t>(order)) {
        r.pass = false;
        r.detail = "|orbit| * |stab| != |G| at point " + std::to_string(i);
      }
    }
    results.push_back(r);
  }

  {
    CheckResult r{"coset_partition", true, 0.0, ""};
    for (std::size_t oi = 0; oi < od.base_points.size() && r.pass; ++oi) {
      int base = od.base_points[oi];
      CosetDecomposition cd = coset_decomposition(g, base);
      int l = static_cast<int>(od.orbits[oi].size());
      if (static_cast<int>(cd.representatives.size()) != l) {
        r.pass = false;
        r.detail = "wrong representative count at base " +
                   std::to_string(base);
        break;
      }
      std::vector<int> seen(order, 0);
      for (int k = 0; k < l && r.pass; ++k) {
        const Permutation &tau = cd.representatives[k];
        if (tau.inverse()(base) != base + k) {
          r.pass = false;
          r.detail = "representative " + std::to_string(k) + " at base " +
                     std::to_string(base) + " misses its slot";
          break;
        }
        for (const Permutation &s : cd.subgroup.elements()) {
          Permutation member = compose(s, tau);
          if (cd.coset_index_of(member) != k) {
            r.pass = false;
            r.detail = "coset index disagrees at base " + std::to_string(base);
            break;
          }
          ++seen[g.index_of(member)];
        }
      }
      for (int e = 0; e < order && r.pass; ++e)
        if (seen[e] != 1) {
          r.pass = false;
          r.detail = "cosets do not partition the group at base " +
                     std::to_string(base);
        }
    }
    results.push_back(r);
  }

  {
    CheckResult r{"cayley_embedding", true, 0.0, ""};
    GroupAction cayley = cayley_embedding(g);
    if (cayley.points != order || !verify_homomorphism(cayley))
      r = {r.name, false, 0.0, "not a homomorphism onto |G| points"};
    else if (!action_is_faithful(cayley) || !action_is_free(cayley))
      r = {r.name, false, 0.0, "embedding is not free and faithful"};
    results.push_back(r);
  }

  GroupAction nat = natural_action(g);
  GroupAction star = induced_star_action(g);
  {
    CheckResult r{"interleave_group_law", true, 0.0, ""};
    if (!verify_homomorphism(star))
      r = {r.name, false, 0.0, "table(gh) != table(g) table(h)"};
    else
      r.detail = std::string("free on indices: ") +
                 (action_is_free(star) ? "yes" : "no");
    results.push_back(r);
  }

  {
    CheckResult r{"first_layer_conjugation", true, 0.0, ""};
    int per_map = std::max(1, inputs / maps);
    for (int t = 0; t < maps && r.pass; ++t) {
      FirstLayerFixture fx = random_first_layer(g, rng);
      for (int s = 0; s < per_map; ++s) {
        std::vector<double> x = random_vector(n, rng);
        std::vector<double> gx = fx.eval(g, x);
        for (int e = 0; e < order; ++e) {
          std::vector<double> lhs =
              fx.eval(g, apply(nat, e, x));
          std::vector<double> rhs = apply(star, e, gx);
          for (std::size_t i = 0; i < lhs.size(); ++i)
            r.max_residual =
                std::max(r.max_residual, std::abs(lhs[i] - rhs[i]));
        }
      }
    }
    r.pass = r.max_residual <= kTol;
    if (!r.pass)
      r.detail = "conjugation identity broken";
    results.push_back(r);
  }

  {
    CheckResult r{"first_layer_twist_required", true, 0.0, ""};
    bool any_stab = false;
    for (int base : od.base_points)
      any_stab = any_stab || stabilizer(g, base).order() > 1;
    if (!any_stab) {
      r.detail = "stabilizers trivial: the interleaving needs no twist";
    } else {
      GroupAction tuple = tuple_action(g, n);
      std::string witness;
      for (int t = 0; t < maps && r.max_residual <= kWitnessFloor; ++t) {
        FirstLayerFixture fx = random_first_layer(g, rng);
        for (int s = 0; s < std::max(1, inputs / maps); ++s) {
          std::vector<double> x = random_vector(n, rng);
          std::vector<double> gx = fx.eval(g, x);
          for (int e = 0; e < order; ++e) {
            std::vector<double> lhs =
                fx.eval(g, apply(nat, e, x));
            std::vector<double> rhs = apply(tuple, e, gx);
            for (std::size_t i = 0; i < lhs.size(); ++i) {
              double d = std::abs(lhs[i] - rhs[i]);
              if (d > r.max_residual) {
                r.max_residual = d;
                witness = "sigma=" + g.element(e).to_cycles() +
                          ", x=" + format_vector(x);
              }
            }
          }
        }
      }
      r.pass = r.max_residual > kWitnessFloor;
      r.detail = r.pass ? "violation witness: " + witness
                        : "no violation found, the twist looks unnecessary";
    }
    results.push_back(r);
  }

  {
    CheckResult r{"invariant_net_symmetry", true, 0.0, ""};
    Network net;
    if (is_full_symmetric(g) && n >= 2) {
      LaneSpec spec;
      spec.phi_widths = {1, 4, n + 1};
      spec.rho_widths = {n + 1, 6, 1};
      net = build_invariant_sum_net(n, NetMode::wide, spec);
      r.detail = "pooled-encoder net";
    } else {
      std::vector<GroupAction> chain{natural_action(g), natural_action(g)};
      net = build_invariant_tensor_net(group, chain);
      r.detail = "tied tensor net";
    }
    for (double &p : net.params)
      p = rng.uniform(-0.8, 0.8);
    for (int s = 0; s < inputs; ++s) {
      SymmetryResidual sr = symmetry_residual(net, random_vector(n, rng));
      r.max_residual = std::max(r.max_residual, sr.max_abs);
    }
    r.pass = r.max_residual <= kTol;
    results.push_back(r);
  }

  {
    CheckResult r{"equivariant_net_symmetry", true, 0.0, ""};
    LaneSpec spec;
    spec.phi_widths = {1, 4, n + 1};
    spec.rho_widths = {n + 2, 6, 1};
    Network net = build_equivariant_net(group, NetMode::wide, spec);
    for (double &p : net.params)
      p = rng.uniform(-0.8, 0.8);
    for (int s = 0; s < inputs; ++s) {
      SymmetryResidual sr = symmetry_residual(net, random_vector(n, rng));
      r.max_residual = std::max(r.max_residual, sr.max_abs);
    }
    r.pass = r.max_residual <= kTol;
    results.push_back(r);
  }

  {
    CheckResult r{"invariant_symmetrization", true, 0.0, ""};
    TinyMlp f0 = TinyMlp::random({n, 5, 1}, rng);
    auto f_sym = [&](std::span<const double> x) {
      double total = 0.0;
      for (int e = 0; e < order; ++e)
        total += f0(apply(nat, e, x))[0];
      return total / order;
    };
    for (int s = 0; s < inputs; ++s) {
      std::vector<double> x = random_vector(n, rng);
      double want = f_sym(x);
      for (int e = 0; e < order; ++e)
        r.max_residual = std::max(
            r.max_residual, std::abs(f_sym(apply(nat, e, x)) - want));
    }
    r.pass = r.max_residual <= kTol;
    results.push_back(r);
  }

  {
    CheckResult r{"equivariant_symmetrization", true, 0.0, ""};
    TinyMlp f0 = TinyMlp::random({n, 6, n}, rng);
    auto f_sym = [&](std::span<const double> x) {
      std::vector<double> total(n, 0.0);
      for (int e = 0; e < order; ++e) {
        std::vector<double> moved =
            apply(nat, g.inverse_index(e), f0(apply(nat, e, x)));
        for (int i = 0; i < n; ++i)
          total[i] += moved[i];
      }
      for (double &v : total)
        v /= order;
      return total;
    };
    for (int s = 0; s < inputs; ++s) {
      std::vector<double> x = random_vector(n, rng);
      std::vector<double> base = f_sym(x);
      for (int e = 0; e < order; ++e) {
        std::vector<double> lhs = f_sym(apply(nat, e, x));
        std::vector<double> rhs = apply(nat, e, base);
        for (int i = 0; i < n; ++i)
          r.max_residual =
              std::max(r.max_residual, std::abs(lhs[i] - rhs[i]));
      }
    }
    r.pass = r.max_residual <= kTol;
    results.push_back(r);
  }

  {
    CheckResult r{"tying_matches_fixed_space", true, 0.0, ""};
    GroupAction t2 = tensor_action(g, 2, 1);
    std::vector<std::pair<const GroupAction *, const GroupAction *>> pairs = {
        {&nat, &nat}, {&nat, &t2}, {&t2, &nat}};
    double t2_cost = static_cast<double>(t2.points) * t2.points;
    if (t2_cost * t2_cost * order <= 5e7 && t2.points * t2.points <= 4096)
      pairs.push_back({&t2, &t2});
    for (auto [in, out] : pairs) {
      SharingPattern p = pair_orbits(*in, *out);
      std::size_t rank = brute_force_equivariant_basis(*in, *out).size();
      if (static_cast<std::size_t>(count_free_params(p)) != rank) {
        r.pass = false;
        r.detail = "orbit count != fixed-space dimension for " +
                   std::to_string(in->points) + "x" +
                   std::to_string(out->points);
        break;
      }
    }
    results.push_back(r);
  }

  if (is_full_symmetric(g)) {
    CheckResult r{"symmetric_tying_count", true, 0.0, ""};
    if (count_free_params(pair_orbits(nat, nat)) != 2) {
      r.pass = false;
      r.detail = "natural/natural weight orbits != 2";
    } else {
      GroupAction u2 = union_of_permutations(g, 2);
      GroupAction u3 = union_of_permutations(g, 3);
      if (count_free_params(pair_orbits(u2, u3)) != 2 * 2 * 3) {
        r.pass = false;
        r.detail = "union tying count != 2MN";
      }
    }
    results.push_back(r);
  }

  {
    CheckResult r{"tied_layer_exactness", true, 0.0, ""};
    SharingPattern p = pair_orbits(nat, nat);
    std::vector<double> params = random_vector(p.free_param_count(), rng);
    Matrix w = realize_weights(p, params);
    if (opts.corrupt_tying)
      w.at(0, p.in_size - 1) += 0.125;
    std::string witness;
    for (int e = 0; e < order; ++e) {
      for (int j = 0; j < p.in_size; ++j) {
        std::vector<double> basis(p.in_size, 0.0);
        basis[j] = 1.0;
        std::vector<double> wx(p.out_size, 0.0);
        for (int i = 0; i < p.out_size; ++i)
          wx[i] = w.at(i, j);
        std::vector<double> lhs = apply(nat, e, wx);
        std::vector<double> moved = apply(nat, e, basis);
        for (int i = 0; i < p.out_size; ++i) {
          double rhs = 0.0;
          for (int c = 0; c < p.in_size; ++c)
            rhs += w.at(i, c) * moved[c];
          double d = std::abs(lhs[i] - rhs);
          if (d > r.max_residual) {
            r.max_residual = d;
            witness = "sigma=" + g.element(e).to_cycles() + ", x=e_" +
                      std::to_string(j) + ", coord=" + std::to_string(i);
          }
        }
      }
    }
    r.pass = r.max_residual == 0.0;
    if (!r.pass)
      r.detail = "equivariance broken, witness: " + witness;
    results.push_back(r);
  }

  return results;
}

} // namespace equinet
