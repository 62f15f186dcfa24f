#include "vpclust/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "vpclust/util.hpp"

namespace vpc {

double modularity(const AdjacencyMatrix& adjacency, std::span<const int> labels) {
  const int n = adjacency.n();
  if (static_cast<int>(labels.size()) != n)
    throw std::invalid_argument("modularity: label count does not match node count");
  const double m2 = 2.0 * static_cast<double>(adjacency.edge_count());
  if (m2 == 0.0) return 0.0;

  std::map<int, double> internal;  // sum of A_ij over ordered pairs inside c
  std::map<int, double> total;     // sum of degrees inside c
  for (int i = 0; i < n; ++i) {
    double k_i = 0.0;
    for (int j = 0; j < n; ++j) {
      if (!adjacency.at(i, j)) continue;
      k_i += 1.0;
      if (labels[i] == labels[j]) internal[labels[i]] += 1.0;
    }
    total[labels[i]] += k_i;
  }
  double q = 0.0;
  for (const auto& [c, tot] : total) {
    const double in_c = internal.count(c) ? internal.at(c) : 0.0;
    q += in_c / m2 - (tot / m2) * (tot / m2);
  }
  return q;
}

namespace {

/// Aggregated weighted graph for the coarsening phase. self_weight holds the
/// diagonal matrix entry (twice the collapsed internal edge weight), so a
/// node's degree is self_weight plus its incident off-diagonal weights.
struct LevelGraph {
  int n = 0;
  std::vector<std::vector<std::pair<int, double>>> nbrs;  // directed pairs, both ways
  std::vector<double> self_weight;
  std::vector<double> degree;
  double m2 = 0.0;
};

LevelGraph from_adjacency(const AdjacencyMatrix& adj) {
  LevelGraph g;
  g.n = adj.n();
  g.nbrs.resize(static_cast<std::size_t>(g.n));
  g.self_weight.assign(static_cast<std::size_t>(g.n), 0.0);
  g.degree.assign(static_cast<std::size_t>(g.n), 0.0);
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      if (adj.at(i, j)) {
        g.nbrs[i].push_back({j, 1.0});
        g.degree[i] += 1.0;
      }
    }
    g.m2 += g.degree[i];
  }
  return g;
}

/// One sweep-until-stable local-move phase. Returns node -> community
/// (compacted to 0..C-1 in order of smallest member) and whether any node
/// moved at all.
struct PhaseResult {
  std::vector<int> community;
  int n_communities = 0;
  bool moved = false;
};

PhaseResult local_moves(const LevelGraph& g, Rng& rng) {
  PhaseResult res;
  res.community.resize(static_cast<std::size_t>(g.n));
  std::iota(res.community.begin(), res.community.end(), 0);
  std::vector<double> comm_total = g.degree;

  std::vector<int> order(static_cast<std::size_t>(g.n));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  std::vector<double> link_w(static_cast<std::size_t>(g.n), 0.0);
  bool swept_change = true;
  while (swept_change) {
    swept_change = false;
    for (int i : order) {
      const int c_old = res.community[static_cast<std::size_t>(i)];
      // Weight from i to each touched community, i's own excluded.
      std::vector<int> touched;
      for (const auto& [j, w] : g.nbrs[static_cast<std::size_t>(i)]) {
        const int c = res.community[static_cast<std::size_t>(j)];
        if (link_w[static_cast<std::size_t>(c)] == 0.0) touched.push_back(c);
        link_w[static_cast<std::size_t>(c)] += w;
      }
      comm_total[static_cast<std::size_t>(c_old)] -= g.degree[static_cast<std::size_t>(i)];
      if (std::find(touched.begin(), touched.end(), c_old) == touched.end())
        touched.push_back(c_old);
      std::sort(touched.begin(), touched.end());

      const auto gain = [&](int c) {
        return link_w[static_cast<std::size_t>(c)] -
               comm_total[static_cast<std::size_t>(c)] * g.degree[static_cast<std::size_t>(i)] /
                   g.m2;
      };
      const double stay_gain = gain(c_old);
      double best_gain = stay_gain;
      int best_c = c_old;
      for (int c : touched) {
        const double gc = gain(c);
        // Strictly-better-than-current rule; ascending scan makes ties land
        // on the smallest community id.
        if (gc > best_gain + 1e-12) {
          best_gain = gc;
          best_c = c;
        } else if (gc > best_gain - 1e-12 && c < best_c && gc >= stay_gain + 1e-12) {
          best_c = c;
        }
      }
      comm_total[static_cast<std::size_t>(best_c)] += g.degree[static_cast<std::size_t>(i)];
      if (best_c != c_old) {
        res.community[static_cast<std::size_t>(i)] = best_c;
        res.moved = true;
        swept_change = true;
      }
      for (int c : touched) link_w[static_cast<std::size_t>(c)] = 0.0;
    }
  }

  // Compact community ids to 0..C-1 preserving smallest-member order.
  std::vector<int> remap(static_cast<std::size_t>(g.n), -1);
  int next = 0;
  for (int i = 0; i < g.n; ++i) {
    int& slot = remap[static_cast<std::size_t>(res.community[static_cast<std::size_t>(i)])];
    if (slot < 0) slot = next++;
    res.community[static_cast<std::size_t>(i)] = slot;
  }
  res.n_communities = next;
  return res;
}

LevelGraph aggregate(const LevelGraph& g, const std::vector<int>& community, int n_comms) {
  LevelGraph agg;
  agg.n = n_comms;
  agg.nbrs.resize(static_cast<std::size_t>(n_comms));
  agg.self_weight.assign(static_cast<std::size_t>(n_comms), 0.0);
  agg.degree.assign(static_cast<std::size_t>(n_comms), 0.0);
  agg.m2 = g.m2;

  std::map<std::pair<int, int>, double> cross;
  for (int i = 0; i < g.n; ++i) {
    const int ci = community[static_cast<std::size_t>(i)];
    agg.self_weight[static_cast<std::size_t>(ci)] += g.self_weight[static_cast<std::size_t>(i)];
    for (const auto& [j, w] : g.nbrs[static_cast<std::size_t>(i)]) {
      const int cj = community[static_cast<std::size_t>(j)];
      if (ci == cj)
        agg.self_weight[static_cast<std::size_t>(ci)] += w;  // both directions accumulate the x2
      else
        cross[{ci, cj}] += w;
    }
  }
  for (const auto& [key, w] : cross) agg.nbrs[static_cast<std::size_t>(key.first)].push_back({key.second, w});
  for (int c = 0; c < n_comms; ++c) {
    agg.degree[static_cast<std::size_t>(c)] = agg.self_weight[static_cast<std::size_t>(c)];
    for (const auto& [j, w] : agg.nbrs[static_cast<std::size_t>(c)])
      agg.degree[static_cast<std::size_t>(c)] += w;
  }
  return agg;
}

Clustering partition_to_clustering(const std::vector<int>& labels, const char* tag) {
  std::map<int, std::vector<int>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i)
    groups[labels[i]].push_back(static_cast<int>(i));
  Clustering c;
  c.algorithm = tag;
  for (auto& [label, members] : groups) c.clusters.push_back(std::move(members));
  std::sort(c.clusters.begin(), c.clusters.end());
  return c;
}

}  // namespace

Clustering louvain(const AdjacencyMatrix& adjacency, std::uint64_t rng_seed,
                   std::vector<double>* level_modularity) {
  const int n = adjacency.n();
  std::vector<int> node_label(static_cast<std::size_t>(n));
  std::iota(node_label.begin(), node_label.end(), 0);
  if (adjacency.edge_count() == 0) return partition_to_clustering(node_label, algo::kLouvain);

  Rng rng(rng_seed);
  LevelGraph g = from_adjacency(adjacency);
  while (true) {
    const PhaseResult phase = local_moves(g, rng);
    if (!phase.moved) break;
    for (int i = 0; i < n; ++i)
      node_label[static_cast<std::size_t>(i)] =
          phase.community[static_cast<std::size_t>(node_label[static_cast<std::size_t>(i)])];
    if (level_modularity) level_modularity->push_back(modularity(adjacency, node_label));
    if (phase.n_communities == g.n) break;  // no shrink: next phase cannot improve
    g = aggregate(g, phase.community, phase.n_communities);
  }
  return partition_to_clustering(node_label, algo::kLouvain);
}

namespace {

double geo(const Vec3& a, const Vec3& b) {
  return std::acos(std::clamp(dot(a, b), -1.0, 1.0));
}

}  // namespace

Clustering spherical_kmeans(std::span<const UnitVec> directions, const KMeansConfig& config,
                            KMeansTrace* trace) {
  const int n = static_cast<int>(directions.size());
  if (n < 1) throw std::invalid_argument("spherical_kmeans: no points");
  if (config.k < 1 || config.k > n)
    throw std::invalid_argument("spherical_kmeans: k must lie in [1, n]");
  if (config.max_iters < 1) throw std::invalid_argument("spherical_kmeans: max_iters must be >= 1");

  Rng rng(config.rng_seed);
  std::vector<Vec3> pts;
  pts.reserve(directions.size());
  for (const UnitVec& d : directions) pts.push_back(d.vec());

  // Seeding: squared-geodesic-weighted farthest-biased picks.
  std::vector<Vec3> centroids;
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);
  {
    const int first = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    centroids.push_back(pts[static_cast<std::size_t>(first)]);
    chosen[static_cast<std::size_t>(first)] = 1;
  }
  while (static_cast<int>(centroids.size()) < config.k) {
    std::vector<double> weight(static_cast<std::size_t>(n), 0.0);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double d = geo(pts[static_cast<std::size_t>(i)], centroids[0]);
      for (std::size_t c = 1; c < centroids.size(); ++c)
        d = std::min(d, geo(pts[static_cast<std::size_t>(i)], centroids[c]));
      weight[static_cast<std::size_t>(i)] = d * d;
      total += d * d;
    }
    int pick;
    if (total > 0.0) {
      pick = static_cast<int>(rng.weighted_pick(weight));
    } else {
      // All points coincide with chosen centroids; take the smallest
      // unchosen index.
      pick = 0;
      while (chosen[static_cast<std::size_t>(pick)]) ++pick;
    }
    centroids.push_back(pts[static_cast<std::size_t>(pick)]);
    chosen[static_cast<std::size_t>(pick)] = 1;
  }

  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  int reseeds = 0;
  for (int iter = 0; iter < config.max_iters; ++iter) {
    std::vector<int> next(static_cast<std::size_t>(n));
    std::vector<double> dist(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      int best_c = 0;
      double best_d = geo(pts[static_cast<std::size_t>(i)], centroids[0]);
      for (int c = 1; c < static_cast<int>(centroids.size()); ++c) {
        const double d = geo(pts[static_cast<std::size_t>(i)], centroids[static_cast<std::size_t>(c)]);
        if (d < best_d) {  // ties keep the lower centroid index
          best_d = d;
          best_c = c;
        }
      }
      next[static_cast<std::size_t>(i)] = best_c;
      dist[static_cast<std::size_t>(i)] = best_d;
    }
    if (trace)
      trace->objective.push_back(std::accumulate(dist.begin(), dist.end(), 0.0));
    if (next == assign) break;
    assign = next;

    // Centroid update: normalized member mean; degenerate or empty clusters
    // re-seed from the point farthest from its assigned centroid.
    std::vector<Vec3> sums(centroids.size(), Vec3{});
    std::vector<int> counts(centroids.size(), 0);
    for (int i = 0; i < n; ++i) {
      sums[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])] =
          sums[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])] +
          pts[static_cast<std::size_t>(i)];
      counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])] += 1;
    }
    std::vector<char> reseeded(static_cast<std::size_t>(n), 0);
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      const double len = norm(sums[c]);
      if (counts[c] > 0 && len >= 1e-9) {
        centroids[c] = (1.0 / len) * sums[c];
      } else {
        int far_i = -1;
        for (int i = 0; i < n; ++i) {
          if (reseeded[static_cast<std::size_t>(i)]) continue;
          if (far_i < 0 || dist[static_cast<std::size_t>(i)] > dist[static_cast<std::size_t>(far_i)])
            far_i = i;  // strict >: ties keep the lowest index
        }
        centroids[c] = pts[static_cast<std::size_t>(far_i)];
        reseeded[static_cast<std::size_t>(far_i)] = 1;
        ++reseeds;
      }
    }
  }
  if (trace) trace->reseed_events = reseeds;

  std::vector<std::vector<int>> groups(centroids.size());
  for (int i = 0; i < n; ++i)
    groups[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])].push_back(i);
  Clustering result;
  result.algorithm = algo::kKMeans1;  // caller re-tags per variant
  for (auto& g : groups)
    if (!g.empty()) result.clusters.push_back(std::move(g));
  std::sort(result.clusters.begin(), result.clusters.end());
  return result;
}

}  // namespace vpc
