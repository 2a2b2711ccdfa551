#pragma once

#include <random>
#include <vector>

#include "equinet/perm_group.hpp"

namespace equinet::testutil {

inline std::vector<int> random_images(int degree, std::mt19937_64 &rng) {
  std::vector<int> v(degree);
  for (int i = 0; i < degree; ++i)
    v[i] = i;
  for (int i = degree - 1; i > 0; --i) {
    auto j = static_cast<int>(rng() % static_cast<unsigned long long>(i + 1));
    std::swap(v[i], v[j]);
  }
  return v;
}

inline Permutation random_permutation(int degree, std::mt19937_64 &rng) {
  return Permutation(random_images(degree, rng));
}

inline double uniform(std::mt19937_64 &rng, double lo, double hi) {
  double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

// Common fixture groups.
inline PermutationGroup make_s(int n) {
  std::vector<Permutation> gens;
  if (n >= 2) {
    gens.push_back(transposition(n, 0, 1));
    if (n >= 3) {
      std::vector<int> cyc(n);
      for (int i = 0; i < n; ++i)
        cyc[i] = (i + 1) % n;
      gens.push_back(Permutation(cyc));
    }
  }
  return generate(n, gens);
}

inline PermutationGroup make_c4() {
  return generate(4, {Permutation::from_cycles(4, "(0 1 2 3)")});
}

inline PermutationGroup make_d4() {
  return generate(4, {Permutation::from_cycles(4, "(0 1 2 3)"),
                      Permutation::from_cycles(4, "(1 3)")});
}

inline PermutationGroup make_s2_in_s3() {
  return generate(3, {Permutation::from_cycles(3, "(0 1)")});
}

} // namespace equinet::testutil
