#include "equinet/perm_group.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace equinet {

Permutation::Permutation(int degree) {
  if (degree <= 0)
    throw std::invalid_argument("permutation degree must be positive");
  images_.resize(degree);
  std::iota(images_.begin(), images_.end(), 0);
}

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  if (images_.empty())
    throw std::invalid_argument("empty image table");
  std::vector<char> seen(images_.size(), 0);
  for (int v : images_) {
    if (v < 0 || v >= static_cast<int>(images_.size()) || seen[v])
      throw std::invalid_argument("image table is not a bijection");
    seen[v] = 1;
  }
}

Permutation Permutation::from_cycles(int degree, std::string_view text) {
  std::vector<std::vector<int>> cycles;
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() &&
           (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == ','))
      ++pos;
  };
  skip_ws();
  while (pos < text.size()) {
    if (text[pos] != '(')
      throw std::invalid_argument("cycle notation: expected '('");
    ++pos;
    std::vector<int> cycle;
    skip_ws();
    while (pos < text.size() && text[pos] != ')') {
      if (!std::isdigit(static_cast<unsigned char>(text[pos])))
        throw std::invalid_argument("cycle notation: expected point index");
      int v = 0;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        v = v * 10 + (text[pos] - '0');
        ++pos;
      }
      if (v >= degree)
        throw std::invalid_argument("cycle notation: point exceeds degree");
      if (std::find(cycle.begin(), cycle.end(), v) != cycle.end())
        throw std::invalid_argument("cycle notation: repeated point in cycle");
      cycle.push_back(v);
      skip_ws();
    }
    if (pos >= text.size())
      throw std::invalid_argument("cycle notation: unterminated cycle");
    ++pos; // ')'
    if (!cycle.empty())
      cycles.push_back(std::move(cycle));
    skip_ws();
  }
  // Left-folding compose() applies the rightmost cycle first.
  Permutation result(degree);
  for (const auto &c : cycles) {
    std::vector<int> images(degree);
    std::iota(images.begin(), images.end(), 0);
    for (std::size_t k = 0; k < c.size(); ++k)
      images[c[k]] = c[(k + 1) % c.size()];
    result = compose(result, Permutation(std::move(images)));
  }
  return result;
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i)
    inv[images_[i]] = static_cast<int>(i);
  return Permutation(std::move(inv));
}

bool Permutation::is_identity() const {
  for (std::size_t i = 0; i < images_.size(); ++i)
    if (images_[i] != static_cast<int>(i))
      return false;
  return true;
}

std::string Permutation::to_cycles() const {
  std::ostringstream out;
  std::vector<char> seen(images_.size(), 0);
  bool any = false;
  for (std::size_t start = 0; start < images_.size(); ++start) {
    if (seen[start] || images_[start] == static_cast<int>(start))
      continue;
    any = true;
    out << '(';
    int cur = static_cast<int>(start);
    bool first = true;
    while (!seen[cur]) {
      seen[cur] = 1;
      if (!first)
        out << ' ';
      out << cur;
      first = false;
      cur = images_[cur];
    }
    out << ')';
  }
  if (!any)
    return "()";
  return out.str();
}

Permutation compose(const Permutation &p, const Permutation &q) {
  if (p.degree() != q.degree())
    throw std::invalid_argument("compose: degree mismatch");
  std::vector<int> images(p.degree());
  for (int i = 0; i < q.degree(); ++i)
    images[i] = p(q(i));
  return Permutation(std::move(images));
}

Permutation transposition(int degree, int a, int b) {
  if (a < 0 || b < 0 || a >= degree || b >= degree)
    throw std::invalid_argument("transposition: point exceeds degree");
  Permutation result(degree);
  std::vector<int> images = result.images();
  std::swap(images[a], images[b]);
  return Permutation(std::move(images));
}

std::size_t PermutationHash::operator()(const Permutation &p) const {
  // FNV-1a over the image table.
  std::size_t h = 1469598103934665603ull;
  for (int v : p.images()) {
    h ^= static_cast<std::size_t>(v);
    h *= 1099511628211ull;
  }
  return h;
}

PermutationGroup PermutationGroup::from_elements(int degree,
                                                 std::vector<Permutation> elements,
                                                 std::vector<Permutation> generators) {
  PermutationGroup g;
  g.degree_ = degree;
  g.elements_ = std::move(elements);
  if (g.elements_.empty())
    throw std::invalid_argument("group needs at least the identity");
  for (const auto &e : g.elements_)
    if (e.degree() != degree)
      throw std::invalid_argument("element degree mismatch");
  auto id = std::find_if(g.elements_.begin(), g.elements_.end(),
                         [](const Permutation &p) { return p.is_identity(); });
  if (id == g.elements_.end())
    throw std::invalid_argument("element set lacks the identity");
  std::rotate(g.elements_.begin(), id, id + 1);
  g.generators_ = generators.empty() ? g.elements_ : std::move(generators);
  g.build_index();
  return g;
}

void PermutationGroup::build_index() {
  index_.clear();
  index_.reserve(elements_.size() * 2);
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (!index_.emplace(elements_[i], static_cast<int>(i)).second)
      throw std::invalid_argument("duplicate group element");
  }
  inverse_.resize(elements_.size());
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    auto it = index_.find(elements_[i].inverse());
    if (it == index_.end())
      throw std::invalid_argument("element set is not closed under inverse");
    inverse_[i] = it->second;
  }
}

int PermutationGroup::index_of(const Permutation &p) const {
  auto it = index_.find(p);
  return it == index_.end() ? -1 : it->second;
}

int PermutationGroup::compose_indices(int a, int b) const {
  int idx = index_of(compose(elements_[a], elements_[b]));
  if (idx < 0)
    throw std::runtime_error("group not closed under composition");
  return idx;
}

PermutationGroup generate(int degree, std::vector<Permutation> generators,
                          std::size_t cap) {
  for (const auto &g : generators)
    if (g.degree() != degree)
      throw std::invalid_argument("generator degree mismatch");

  PermutationGroup result;
  result.degree_ = degree;

  std::unordered_map<Permutation, int, PermutationHash> index;
  std::vector<Permutation> elements;
  std::deque<int> queue;

  elements.emplace_back(degree); // identity first
  index.emplace(elements[0], 0);
  queue.push_back(0);

  while (!queue.empty()) {
    int cur = queue.front();
    queue.pop_front();
    for (const auto &gen : generators) {
      Permutation next = compose(elements[cur], gen);
      if (index.contains(next))
        continue;
      if (elements.size() >= cap)
        throw std::length_error(
            "group closure exceeds the element cap (" + std::to_string(cap) +
            "); this library materializes full element lists only");
      int idx = static_cast<int>(elements.size());
      elements.push_back(std::move(next));
      index.emplace(elements.back(), idx);
      queue.push_back(idx);
    }
  }

  result.generators_ = std::move(generators);
  result.elements_ = std::move(elements);
  result.build_index();
  return result;
}

PermutationGroup symmetric_group(int n) {
  if (n < 1)
    throw std::invalid_argument("symmetric_group: n must be positive");
  if (n == 1)
    return trivial_group(1);
  std::vector<Permutation> gens{transposition(n, 0, 1)};
  if (n > 2) {
    std::vector<int> cycle(n);
    for (int i = 0; i < n; ++i)
      cycle[i] = (i + 1) % n;
    gens.emplace_back(std::move(cycle));
  }
  return generate(n, std::move(gens));
}

PermutationGroup cyclic_group(int n) {
  if (n < 1)
    throw std::invalid_argument("cyclic_group: n must be positive");
  if (n == 1)
    return trivial_group(1);
  std::vector<int> cycle(n);
  for (int i = 0; i < n; ++i)
    cycle[i] = (i + 1) % n;
  return generate(n, {Permutation(std::move(cycle))});
}

PermutationGroup dihedral_group(int n) {
  if (n < 3)
    throw std::invalid_argument("dihedral_group: need n >= 3 vertices");
  std::vector<int> rotation(n), reflection(n);
  for (int i = 0; i < n; ++i) {
    rotation[i] = (i + 1) % n;
    reflection[i] = (n - i) % n;
  }
  return generate(n, {Permutation(std::move(rotation)),
                      Permutation(std::move(reflection))});
}

PermutationGroup trivial_group(int degree) {
  if (degree < 1)
    throw std::invalid_argument("trivial_group: degree must be positive");
  return generate(degree, {});
}

std::vector<int> orbit(const PermutationGroup &g, int i) {
  if (i < 0 || i >= g.degree())
    throw std::invalid_argument("orbit: point exceeds degree");
  // Traverse generator images and preimages; both stay inside the orbit.
  std::vector<Permutation> steps;
  for (const auto &gen : g.generators()) {
    steps.push_back(gen);
    steps.push_back(gen.inverse());
  }
  std::vector<char> seen(g.degree(), 0);
  std::vector<int> stack{i}, out;
  seen[i] = 1;
  while (!stack.empty()) {
    int p = stack.back();
    stack.pop_back();
    out.push_back(p);
    for (const auto &s : steps) {
      int q = s(p);
      if (!seen[q]) {
        seen[q] = 1;
        stack.push_back(q);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

OrbitDecomposition orbit_decomposition(const PermutationGroup &g) {
  OrbitDecomposition od;
  std::vector<char> seen(g.degree(), 0);
  for (int i = 0; i < g.degree(); ++i) {
    if (seen[i])
      continue;
    auto o = orbit(g, i);
    for (int p : o)
      seen[p] = 1;
    od.base_points.push_back(o.front());
    od.orbits.push_back(std::move(o));
  }
  od.reorder.assign(g.degree(), -1);
  int next = 0;
  for (const auto &o : od.orbits)
    for (int p : o)
      od.reorder[p] = next++;
  return od;
}

PermutationGroup apply_orbit_reorder(const PermutationGroup &g,
                                     const OrbitDecomposition &od) {
  Permutation r{std::vector<int>(od.reorder)};
  Permutation r_inv = r.inverse();
  auto relabel = [&](const Permutation &p) {
    return compose(r, compose(p, r_inv));
  };
  std::vector<Permutation> gens, elems;
  gens.reserve(g.generators().size());
  elems.reserve(g.elements().size());
  for (const auto &p : g.generators())
    gens.push_back(relabel(p));
  for (const auto &p : g.elements())
    elems.push_back(relabel(p));
  return PermutationGroup::from_elements(g.degree(), std::move(elems),
                                         std::move(gens));
}

PermutationGroup stabilizer(const PermutationGroup &g, int i) {
  if (i < 0 || i >= g.degree())
    throw std::invalid_argument("stabilizer: point exceeds degree");
  std::vector<Permutation> elems;
  for (const auto &e : g.elements())
    if (e(i) == i)
      elems.push_back(e);
  return PermutationGroup::from_elements(g.degree(), elems, elems);
}

int CosetDecomposition::coset_index_of(const Permutation &g) const {
  // g in Stab(base) . tau_k  <=>  g^{-1}(base) == base + k.
  for (int j = 0; j < g.degree(); ++j) {
    if (g(j) == base_point) {
      int k = j - base_point;
      if (k < 0 || k >= static_cast<int>(representatives.size()))
        throw std::invalid_argument("element moves the base outside the orbit range");
      return k;
    }
  }
  throw std::invalid_argument("degree mismatch in coset_index_of");
}

CosetDecomposition coset_decomposition(const PermutationGroup &g, int base) {
  auto o = orbit(g, base);
  if (o.front() != base)
    throw std::invalid_argument("coset_decomposition: base must be the orbit minimum");
  for (std::size_t k = 0; k < o.size(); ++k)
    if (o[k] != base + static_cast<int>(k))
      throw std::invalid_argument(
          "coset_decomposition: orbit is not contiguous; apply_orbit_reorder first");

  CosetDecomposition cd{stabilizer(g, base), {}, base};
  cd.representatives.reserve(o.size());
  for (std::size_t k = 0; k < o.size(); ++k) {
    const Permutation *best = nullptr;
    for (const auto &e : g.elements()) {
      if (e(base + static_cast<int>(k)) != base) // tau^{-1}(base) == base + k
        continue;
      if (!best || e.images() < best->images())
        best = &e;
    }
    if (!best)
      throw std::runtime_error("coset without representative; orbit inconsistent");
    cd.representatives.push_back(*best);
  }

  // Partition sanity: |Stab| * orbit == |G|.
  if (cd.subgroup.order() * static_cast<int>(o.size()) != g.order())
    throw std::runtime_error("orbit-stabilizer mismatch in coset decomposition");
  return cd;
}

std::vector<Permutation> transposition_representatives(const PermutationGroup &g,
                                                       int base) {
  auto o = orbit(g, base);
  if (o.front() != base)
    throw std::invalid_argument("transposition_representatives: base must be the orbit minimum");
  std::vector<Permutation> reps;
  reps.reserve(o.size());
  for (std::size_t k = 0; k < o.size(); ++k) {
    if (o[k] != base + static_cast<int>(k))
      throw std::invalid_argument("transposition_representatives: orbit not contiguous");
    Permutation t = transposition(g.degree(), base, base + static_cast<int>(k));
    if (!g.contains(t))
      throw std::invalid_argument(
          "transposition_representatives: transposition not a group member");
    reps.push_back(std::move(t));
  }
  return reps;
}

} // namespace equinet
