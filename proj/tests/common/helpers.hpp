#pragma once

// Shared test utilities: seeded random generators and independent oracles
// that the library code must agree with.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "vpclust/geometry.hpp"
#include "vpclust/graph.hpp"
#include "vpclust/util.hpp"

namespace test_helpers {

/// Shoemake's subgroup method: exactly uniform random rotations from three
/// uniforms, no rejection.
inline vpc::Orientation uniform_orientation(vpc::Rng& rng) {
  const double u1 = rng.uniform01();
  const double u2 = rng.uniform01();
  const double u3 = rng.uniform01();
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  const double t2 = 2.0 * std::numbers::pi * u2, t3 = 2.0 * std::numbers::pi * u3;
  return vpc::Orientation(b * std::cos(t3), a * std::sin(t2), a * std::cos(t2), b * std::sin(t3));
}

inline vpc::UnitVec uniform_unitvec(vpc::Rng& rng) {
  const double z = 2.0 * rng.uniform01() - 1.0;
  const double phi = 2.0 * std::numbers::pi * rng.uniform01();
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return vpc::UnitVec(r * std::cos(phi), r * std::sin(phi), z);
}

inline vpc::AdjacencyMatrix random_graph(int n, double p, vpc::Rng& rng) {
  vpc::AdjacencyMatrix adj(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform01() < p) adj.set(i, j, true);
  return adj;
}

/// Maximal cliques by exhaustive subset enumeration (n <= ~20).
inline std::vector<std::vector<int>> brute_maximal_cliques(const vpc::AdjacencyMatrix& adj) {
  const int n = adj.n();
  const auto is_clique = [&](unsigned mask) {
    for (int i = 0; i < n; ++i) {
      if (!(mask >> i & 1u)) continue;
      for (int j = i + 1; j < n; ++j)
        if ((mask >> j & 1u) && !adj.at(i, j)) return false;
    }
    return true;
  };
  std::vector<std::vector<int>> out;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    if (!is_clique(mask)) continue;
    bool maximal = true;
    for (int v = 0; v < n && maximal; ++v) {
      if (mask >> v & 1u) continue;
      if (is_clique(mask | (1u << v))) maximal = false;
    }
    if (!maximal) continue;
    std::vector<int> clique;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1u) clique.push_back(i);
    out.push_back(std::move(clique));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Maximum-clique size by exhaustive subset enumeration (n <= ~20).
inline int brute_max_clique_size(const vpc::AdjacencyMatrix& adj) {
  const int n = adj.n();
  int best = 0;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    int size = 0;
    bool clique = true;
    for (int i = 0; i < n && clique; ++i) {
      if (!(mask >> i & 1u)) continue;
      ++size;
      for (int j = i + 1; j < n && clique; ++j)
        if ((mask >> j & 1u) && !adj.at(i, j)) clique = false;
    }
    if (clique) best = std::max(best, size);
  }
  return best;
}

/// Independent viewport membership: textbook quaternion-to-matrix expansion
/// and a division-form gnomonic bound check, bypassing ViewportFrame.
inline bool oracle_in_viewport(const vpc::Vec3& p, const vpc::Orientation& o,
                               const vpc::ViewportSpec& spec) {
  const double w = o.w(), x = o.x(), y = o.y(), z = o.z();
  // Rotation matrix columns = rotated basis vectors.
  const double r11 = 1 - 2 * (y * y + z * z), r12 = 2 * (x * y - w * z), r13 = 2 * (x * z + w * y);
  const double r21 = 2 * (x * y + w * z), r22 = 1 - 2 * (x * x + z * z), r23 = 2 * (y * z - w * x);
  const double r31 = 2 * (x * z - w * y), r32 = 2 * (y * z + w * x), r33 = 1 - 2 * (x * x + y * y);
  // Local coordinates: transpose times p.
  const double lx = r11 * p.x + r21 * p.y + r31 * p.z;
  const double ly = r12 * p.x + r22 * p.y + r32 * p.z;
  const double lz = r13 * p.x + r23 * p.y + r33 * p.z;
  if (lx <= 0.0) return false;
  return std::abs(ly / lx) <= std::tan(spec.h_fov / 2) &&
         std::abs(lz / lx) <= std::tan(spec.v_fov / 2);
}

struct McOverlap {
  double overlap = 0.0;
  long in_a = 0, in_b = 0, in_both = 0;
};

/// Monte-Carlo pairwise overlap over `samples` uniform sphere points, using
/// the oracle membership test; denominator is the mean per-viewport count.
inline McOverlap mc_pairwise_overlap(const vpc::Orientation& a, const vpc::Orientation& b,
                                     const vpc::ViewportSpec& spec, long samples, vpc::Rng& rng) {
  McOverlap res;
  for (long s = 0; s < samples; ++s) {
    const vpc::Vec3 p = uniform_unitvec(rng).vec();
    const bool ia = oracle_in_viewport(p, a, spec);
    const bool ib = oracle_in_viewport(p, b, spec);
    res.in_a += ia;
    res.in_b += ib;
    res.in_both += ia && ib;
  }
  res.overlap = 2.0 * static_cast<double>(res.in_both) /
                static_cast<double>(res.in_a + res.in_b);
  return res;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace test_helpers
