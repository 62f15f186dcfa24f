#pragma once

#include <cstdint>
#include <span>

#include "vpclust/clustering.hpp"
#include "vpclust/geometry.hpp"

namespace vpc {

/// Two-phase modularity optimization on the binary graph. Node visit order
/// is shuffled from rng_seed once per level; a node moves only on a strict
/// modularity gain, ties broken toward the smallest community id, so output
/// is deterministic given (adjacency, seed). An empty graph yields all
/// singletons. When level_modularity is non-null it receives the modularity
/// of the flattened partition after each aggregation level (non-decreasing).
Clustering louvain(const AdjacencyMatrix& adjacency, std::uint64_t rng_seed,
                   std::vector<double>* level_modularity = nullptr);

/// Newman modularity of a partition (labels[i] = community of node i) on the
/// binary graph. Zero-edge graphs score 0.
double modularity(const AdjacencyMatrix& adjacency, std::span<const int> labels);

struct KMeansConfig {
  int k = 1;
  int max_iters = 100;
  std::uint64_t rng_seed = 0;
};

/// Per-iteration diagnostics for the monotonicity property.
struct KMeansTrace {
  std::vector<double> objective;  // sum of geodesic distances after each assignment
  int reseed_events = 0;
};

/// Lloyd iterations on the sphere: geodesic-distance assignment (ties to the
/// lowest centroid index), normalized-mean centroid update, k-means++-style
/// seeding with squared geodesic weights. A centroid left empty or with a
/// degenerate mean is re-seeded from the point farthest from its assigned
/// centroid. Stops at an assignment fixed point or max_iters. Clusters that
/// end empty are dropped, so the result may have fewer than k clusters on
/// heavily duplicated inputs.
Clustering spherical_kmeans(std::span<const UnitVec> directions, const KMeansConfig& config,
                            KMeansTrace* trace = nullptr);

}  // namespace vpc
