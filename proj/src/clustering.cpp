#include "vpclust/clustering.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>

namespace vpc {

namespace {

/// Fixed-width bitset over vertices, sized at runtime to the graph.
class Bits {
public:
  explicit Bits(int words) : w_(static_cast<std::size_t>(words), 0) {}

  static Bits none(int n_vertices) { return Bits((n_vertices + 63) / 64); }
  static Bits all(int n_vertices) {
    Bits b = none(n_vertices);
    for (int i = 0; i < n_vertices; ++i) b.set(i);
    return b;
  }

  void set(int i) { w_[static_cast<std::size_t>(i) >> 6] |= 1ULL << (i & 63); }
  void reset(int i) { w_[static_cast<std::size_t>(i) >> 6] &= ~(1ULL << (i & 63)); }
  bool test(int i) const {
    return (w_[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1ULL;
  }

  bool any() const {
    for (std::uint64_t w : w_)
      if (w) return true;
    return false;
  }

  int count() const {
    int c = 0;
    for (std::uint64_t w : w_) c += std::popcount(w);
    return c;
  }

  Bits operator&(const Bits& o) const {
    Bits r(static_cast<int>(w_.size()));
    for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] & o.w_[i];
    return r;
  }

  Bits and_not(const Bits& o) const {
    Bits r(static_cast<int>(w_.size()));
    for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] = w_[i] & ~o.w_[i];
    return r;
  }

  int count_and(const Bits& o) const {
    int c = 0;
    for (std::size_t i = 0; i < w_.size(); ++i) c += std::popcount(w_[i] & o.w_[i]);
    return c;
  }

  /// Visit set bit indices in ascending order.
  template <typename F>
  void for_each(F f) const {
    for (std::size_t wi = 0; wi < w_.size(); ++wi) {
      std::uint64_t w = w_[wi];
      while (w) {
        const int bit = std::countr_zero(w);
        f(static_cast<int>(wi * 64) + bit);
        w &= w - 1;
      }
    }
  }

private:
  std::vector<std::uint64_t> w_;
};

std::vector<Bits> neighbor_sets(const AdjacencyMatrix& adj) {
  const int n = adj.n();
  std::vector<Bits> nbr(static_cast<std::size_t>(n), Bits::none(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (adj.at(i, j)) nbr[i].set(j);
  return nbr;
}

void expand(const std::vector<Bits>& nbr, std::vector<int>& r, Bits p, Bits x,
            std::vector<std::vector<int>>& out) {
  if (!p.any() && !x.any()) {
    out.push_back(r);
    return;
  }
  // Pivot: vertex of P∪X with the most neighbors inside P; candidates that
  // are its neighbors get enumerated in deeper branches instead.
  int pivot = -1, best = -1;
  const auto consider = [&](int u) {
    const int c = nbr[u].count_and(p);
    if (c > best) {
      best = c;
      pivot = u;
    }
  };
  p.for_each(consider);
  x.for_each(consider);

  std::vector<int> candidates;
  p.and_not(nbr[pivot]).for_each([&](int v) { candidates.push_back(v); });
  for (int v : candidates) {
    r.push_back(v);
    expand(nbr, r, p & nbr[v], x & nbr[v], out);
    r.pop_back();
    p.reset(v);
    x.set(v);
  }
}

std::vector<std::vector<int>> maximal_cliques_within(const AdjacencyMatrix& adj,
                                                     const Bits& vertices) {
  if (!vertices.any()) return {};
  const std::vector<Bits> nbr = neighbor_sets(adj);
  std::vector<std::vector<int>> out;
  std::vector<int> r;
  expand(nbr, r, vertices, Bits::none(adj.n()), out);
  for (auto& clique : out) std::sort(clique.begin(), clique.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<std::vector<int>> bron_kerbosch(const AdjacencyMatrix& adjacency) {
  return maximal_cliques_within(adjacency, Bits::all(adjacency.n()));
}

void validate_clustering(const Clustering& clustering, int n_users) {
  std::vector<char> seen(static_cast<std::size_t>(n_users), 0);
  int covered = 0;
  for (const auto& cluster : clustering.clusters) {
    if (cluster.empty()) throw std::logic_error("clustering contains an empty cluster");
    if (!std::is_sorted(cluster.begin(), cluster.end()))
      throw std::logic_error("cluster members are not sorted");
    for (int u : cluster) {
      if (u < 0 || u >= n_users) throw std::logic_error("cluster member out of range");
      if (seen[static_cast<std::size_t>(u)]) throw std::logic_error("clusters are not disjoint");
      seen[static_cast<std::size_t>(u)] = 1;
      ++covered;
    }
  }
  if (covered != n_users) throw std::logic_error("clustering does not cover every user");
}

Clustering clique_clustering(const AffinityMatrix& affinity) {
  const int n = affinity.adj.n();
  Clustering result;
  result.algorithm = algo::kClique;
  result.window_start = affinity.start_frame;
  result.window_length = affinity.t_frames;
  result.tau = affinity.tau;

  Bits alive = Bits::all(n);
  while (alive.any()) {
    const std::vector<std::vector<int>> cliques = maximal_cliques_within(affinity.adj, alive);
    // Lexicographically sorted list: the first clique of maximum size is the
    // lexicographically smallest one of that size.
    const std::vector<int>* best = nullptr;
    for (const auto& c : cliques)
      if (!best || c.size() > best->size()) best = &c;
    result.clusters.push_back(*best);
    for (int v : *best) alive.reset(v);
  }
  return result;
}

}  // namespace vpc
