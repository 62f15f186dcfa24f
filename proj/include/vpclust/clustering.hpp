#pragma once

#include <string>
#include <vector>

#include "vpclust/graph.hpp"

namespace vpc {

namespace algo {
inline constexpr const char* kClique = "clique";
inline constexpr const char* kLouvain = "louvain";
inline constexpr const char* kKMeans1 = "kmeans1";
inline constexpr const char* kKMeans2 = "kmeans2";
}  // namespace algo

/// Disjoint, exhaustive assignment of user indices to clusters, tagged with
/// the producing algorithm and the window it was computed on.
struct Clustering {
  std::vector<std::vector<int>> clusters;  // each sorted ascending
  std::string algorithm;
  int window_start = 0;
  int window_length = 1;  // frames
  int tau = 1;            // frames

  int k() const { return static_cast<int>(clusters.size()); }
};

/// Checks clusters are non-empty, sorted, pairwise disjoint, and cover
/// exactly 0..n_users-1; throws std::logic_error otherwise.
void validate_clustering(const Clustering& clustering, int n_users);

/// All maximal cliques (pivoting Bron-Kerbosch). Each clique is a sorted
/// member list; the list of cliques is lexicographically ordered. Isolated
/// vertices appear as singleton cliques. Symmetry and a zero diagonal are
/// guaranteed by AdjacencyMatrix construction (its from_rows factory rejects
/// violations).
std::vector<std::vector<int>> bron_kerbosch(const AdjacencyMatrix& adjacency);

/// Iterative extraction: enumerate maximal cliques of the residual graph,
/// keep the most populated one (ties: lexicographically smallest sorted
/// member list), remove its vertices, repeat until none remain. Every output
/// cluster is a clique of the original matrix; clusters are disjoint and
/// exhaustive.
Clustering clique_clustering(const AffinityMatrix& affinity);

}  // namespace vpc
