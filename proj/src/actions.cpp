#include "equinet/actions.hpp"

#include <stdexcept>
#include <string>

namespace equinet {

namespace {

std::shared_ptr<const PermutationGroup> shared_copy(const PermutationGroup &g) {
  return std::make_shared<const PermutationGroup>(g);
}

void check_points(long long points) {
  if (points <= 0 || points > kMaxActionPoints)
    throw std::invalid_argument("action index space of " + std::to_string(points) +
                                " points exceeds the cap of " +
                                std::to_string(kMaxActionPoints));
}

} // namespace

GroupAction make_action(const PermutationGroup &group,
                        std::vector<Permutation> tables) {
  if (tables.size() != static_cast<std::size_t>(group.order()))
    throw std::invalid_argument("one table per group element required");
  GroupAction a;
  a.group = shared_copy(group);
  a.points = tables.empty() ? 0 : tables[0].degree();
  for (const auto &t : tables)
    if (t.degree() != a.points)
      throw std::invalid_argument("action tables disagree on point count");
  a.inverse_tables.reserve(tables.size());
  for (const auto &t : tables)
    a.inverse_tables.push_back(t.inverse());
  a.tables = std::move(tables);
  return a;
}

std::vector<double> apply(const GroupAction &a, int element_index,
                          std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(a.points))
    throw std::invalid_argument("apply: vector length must match action points");
  const Permutation &inv = a.inverse_tables[element_index];
  std::vector<double> y(x.size());
  for (int i = 0; i < a.points; ++i)
    y[i] = x[inv(i)];
  return y;
}

std::vector<double> permute_vector(const Permutation &sigma,
                                   std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(sigma.degree()))
    throw std::invalid_argument(
        "permute_vector: vector length must match degree");
  Permutation inv = sigma.inverse();
  std::vector<double> y(x.size());
  for (int i = 0; i < sigma.degree(); ++i)
    y[i] = x[inv(i)];
  return y;
}

GroupAction natural_action(const PermutationGroup &group) {
  std::vector<Permutation> tables(group.elements().begin(),
                                  group.elements().end());
  return make_action(group, std::move(tables));
}

int TensorIndexScheme::points() const {
  long long p = channels;
  for (int i = 0; i < order; ++i)
    p *= degree;
  return static_cast<int>(p);
}

int TensorIndexScheme::encode(std::span<const int> multi, int channel) const {
  int flat = 0;
  for (int a = 0; a < order; ++a)
    flat = flat * degree + multi[a];
  return flat * channels + channel;
}

void TensorIndexScheme::decode(int flat, std::span<int> multi, int &channel) const {
  channel = flat % channels;
  flat /= channels;
  for (int a = order - 1; a >= 0; --a) {
    multi[a] = flat % degree;
    flat /= degree;
  }
}

GroupAction tensor_action(const PermutationGroup &group, int k, int channels) {
  if (k < 1 || channels < 1)
    throw std::invalid_argument("tensor_action: order and channels must be >= 1");
  long long points = channels;
  for (int i = 0; i < k; ++i) {
    points *= group.degree();
    check_points(points);
  }
  TensorIndexScheme scheme{group.degree(), k, channels};

  std::vector<Permutation> tables;
  tables.reserve(group.order());
  std::vector<int> multi(k), mapped(k);
  for (const auto &sigma : group.elements()) {
    std::vector<int> images(scheme.points());
    for (int p = 0; p < scheme.points(); ++p) {
      int channel = 0;
      scheme.decode(p, multi, channel);
      for (int a = 0; a < k; ++a)
        mapped[a] = sigma(multi[a]);
      images[p] = scheme.encode(mapped, channel);
    }
    tables.emplace_back(std::move(images));
  }
  return make_action(group, std::move(tables));
}

GroupAction tuple_action(const PermutationGroup &group, int block_dim) {
  if (block_dim < 1)
    throw std::invalid_argument("tuple_action: block_dim must be >= 1");
  long long points = static_cast<long long>(group.degree()) * block_dim;
  check_points(points);
  BlockIndexScheme scheme{group.degree(), block_dim};

  std::vector<Permutation> tables;
  tables.reserve(group.order());
  for (const auto &sigma : group.elements()) {
    std::vector<int> images(scheme.points());
    for (int p = 0; p < scheme.points(); ++p)
      images[p] = scheme.encode(sigma(scheme.block_of(p)), scheme.position_of(p));
    tables.emplace_back(std::move(images));
  }
  return make_action(group, std::move(tables));
}

GroupAction union_of_permutations(const PermutationGroup &group, int copies) {
  if (copies < 1)
    throw std::invalid_argument("union_of_permutations: copies must be >= 1");
  long long points = static_cast<long long>(group.degree()) * copies;
  check_points(points);
  BlockIndexScheme scheme{copies, group.degree()};

  std::vector<Permutation> tables;
  tables.reserve(group.order());
  for (const auto &sigma : group.elements()) {
    std::vector<int> images(scheme.points());
    for (int copy = 0; copy < copies; ++copy)
      for (int i = 0; i < group.degree(); ++i)
        images[scheme.encode(copy, i)] = scheme.encode(copy, sigma(i));
    tables.emplace_back(std::move(images));
  }
  return make_action(group, std::move(tables));
}

GroupAction extend_with_trivial_channels(const GroupAction &a, int channels) {
  if (channels < 1)
    throw std::invalid_argument("extend_with_trivial_channels: channels must be >= 1");
  long long points = static_cast<long long>(a.points) * channels;
  check_points(points);

  std::vector<Permutation> tables;
  tables.reserve(a.tables.size());
  for (const auto &t : a.tables) {
    std::vector<int> images(static_cast<std::size_t>(points));
    for (int p = 0; p < a.points; ++p)
      for (int c = 0; c < channels; ++c)
        images[p * channels + c] = t(p) * channels + c;
    tables.emplace_back(std::move(images));
  }
  return make_action(*a.group, std::move(tables));
}

Permutation sigma_tilde(const PermutationGroup &group,
                        const std::vector<Permutation> &reps, int base,
                        const Permutation &sigma, int i) {
  if (!group.contains(sigma))
    throw std::invalid_argument("sigma_tilde: sigma is not a group member");
  int k = i - base;
  if (k < 0 || k >= static_cast<int>(reps.size()))
    throw std::invalid_argument("sigma_tilde: point outside the orbit range");
  int k_prime = sigma.inverse()(i) - base;
  if (k_prime < 0 || k_prime >= static_cast<int>(reps.size()))
    throw std::invalid_argument("sigma_tilde: orbit not closed under sigma");
  Permutation result =
      compose(compose(reps[k], sigma), reps[k_prime].inverse());
  if (result(base) != base)
    throw std::runtime_error("sigma_tilde: twist does not stabilize the base");
  return result;
}

Permutation sigma_tilde(const PermutationGroup &group, const Permutation &sigma,
                        int i) {
  int base = orbit(group, i).front();
  CosetDecomposition cd = coset_decomposition(group, base);
  return sigma_tilde(group, cd.representatives, base, sigma, i);
}

namespace {

GroupAction star_action_impl(const PermutationGroup &group,
                             const std::vector<std::vector<Permutation>> &reps,
                             const std::vector<int> &bases,
                             const std::vector<int> &orbit_of) {
  const int n = group.degree();
  check_points(static_cast<long long>(n) * n);
  BlockIndexScheme scheme{n, n};

  std::vector<Permutation> tables;
  tables.reserve(group.order());
  for (const auto &sigma : group.elements()) {
    Permutation sigma_inv = sigma.inverse();
    // Build phi(sigma)^{-1} from the definition: output block c holds the
    // twisted copy of input block sigma^{-1}(c), then invert once.
    std::vector<int> inv_images(scheme.points());
    for (int c = 0; c < n; ++c) {
      int j = orbit_of[c];
      Permutation twist =
          sigma_tilde(group, reps[j], bases[j], sigma, c);
      Permutation twist_inv = twist.inverse();
      int source_block = sigma_inv(c);
      for (int i = 0; i < n; ++i)
        inv_images[scheme.encode(c, i)] = scheme.encode(source_block, twist_inv(i));
    }
    tables.push_back(Permutation(std::move(inv_images)).inverse());
  }
  return make_action(group, std::move(tables));
}

} // namespace

GroupAction induced_star_action(const PermutationGroup &group) {
  OrbitDecomposition od = orbit_decomposition(group);
  std::vector<std::vector<Permutation>> reps;
  std::vector<int> bases, orbit_of(group.degree());
  for (std::size_t j = 0; j < od.orbits.size(); ++j) {
    CosetDecomposition cd = coset_decomposition(group, od.base_points[j]);
    reps.push_back(cd.representatives);
    bases.push_back(cd.base_point);
    for (int p : od.orbits[j])
      orbit_of[p] = static_cast<int>(j);
  }
  return star_action_impl(group, reps, bases, orbit_of);
}

GroupAction induced_star_action(const PermutationGroup &group,
                                const std::vector<Permutation> &reps) {
  if (static_cast<int>(reps.size()) != group.degree())
    throw std::invalid_argument(
        "induced_star_action with explicit reps requires a transitive group");
  for (std::size_t k = 0; k < reps.size(); ++k)
    if (reps[k].inverse()(0) != static_cast<int>(k) || !group.contains(reps[k]))
      throw std::invalid_argument(
          "induced_star_action: representative system lacks the canonical property");
  std::vector<int> orbit_of(group.degree(), 0);
  return star_action_impl(group, {reps}, {0}, orbit_of);
}

GroupAction cayley_embedding(const PermutationGroup &group) {
  std::vector<Permutation> tables;
  tables.reserve(group.order());
  for (int g = 0; g < group.order(); ++g) {
    std::vector<int> images(group.order());
    for (int i = 0; i < group.order(); ++i)
      images[i] = group.compose_indices(g, i);
    tables.emplace_back(std::move(images));
  }
  return make_action(group, std::move(tables));
}

bool verify_homomorphism(const GroupAction &a) {
  const PermutationGroup &g = *a.group;
  for (int i = 0; i < g.order(); ++i)
    for (int j = 0; j < g.order(); ++j)
      if (a.tables[g.compose_indices(i, j)] != compose(a.tables[i], a.tables[j]))
        return false;
  return true;
}

bool action_is_faithful(const GroupAction &a) {
  for (std::size_t i = 0; i < a.tables.size(); ++i)
    for (std::size_t j = i + 1; j < a.tables.size(); ++j)
      if (a.tables[i] == a.tables[j])
        return false;
  return true;
}

bool action_is_free(const GroupAction &a) {
  for (int e = 0; e < a.group->order(); ++e) {
    if (e == a.group->identity_index())
      continue;
    const Permutation &t = a.tables[e];
    for (int p = 0; p < a.points; ++p)
      if (t(p) == p)
        return false;
  }
  return true;
}

} // namespace equinet
