#include "vpclust/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "vpclust/graph.hpp"
#include "vpclust/util.hpp"

namespace vpc {

namespace {

std::vector<Orientation> cluster_orientations(const std::vector<int>& members,
                                              std::span<const Orientation> orientations) {
  std::vector<Orientation> out;
  out.reserve(members.size());
  for (int u : members) out.push_back(orientations[static_cast<std::size_t>(u)]);
  return out;
}

/// Index of the most populated cluster, ties to the lexicographically
/// smallest member list.
std::size_t main_cluster_index(const std::vector<std::vector<int>>& clusters) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < clusters.size(); ++i) {
    if (clusters[i].size() > clusters[best].size() ||
        (clusters[i].size() == clusters[best].size() && clusters[i] < clusters[best]))
      best = i;
  }
  return best;
}

FrameMetrics aggregate_metrics(const Clustering& clustering,
                               const std::vector<double>& cluster_overlap, int n_users) {
  FrameMetrics m;
  m.k = clustering.k();
  double sum_ge3 = 0.0;
  int clusters_ge3 = 0;
  int users_ge3 = 0;
  for (std::size_t i = 0; i < clustering.clusters.size(); ++i) {
    if (clustering.clusters[i].size() >= 3) {
      sum_ge3 += cluster_overlap[i];
      ++clusters_ge3;
      users_ge3 += static_cast<int>(clustering.clusters[i].size());
    }
  }
  if (clusters_ge3 > 0) m.mean_overlap_ge3 = sum_ge3 / clusters_ge3;
  m.covered_ge3 = static_cast<double>(users_ge3) / n_users;
  const std::size_t main = main_cluster_index(clustering.clusters);
  m.main_overlap = cluster_overlap[main];
  m.main_population =
      static_cast<double>(clustering.clusters[main].size()) / static_cast<double>(n_users);
  return m;
}

}  // namespace

FrameMetrics frame_metrics(const Clustering& clustering, std::span<const Orientation> orientations,
                           const ViewportSpec& spec, const SphereGrid& grid) {
  const int n = static_cast<int>(orientations.size());
  validate_clustering(clustering, n);  // member ids index into `orientations`
  std::vector<double> overlap;
  overlap.reserve(clustering.clusters.size());
  for (const auto& members : clustering.clusters) {
    const std::vector<Orientation> os = cluster_orientations(members, orientations);
    overlap.push_back(joint_overlap(os, spec, grid));
  }
  return aggregate_metrics(clustering, overlap, n);
}

FrameMetrics window_metrics(const Clustering& clustering, const TraceDataset& dataset,
                            const ViewportSpec& spec, const SphereGrid& grid) {
  validate_clustering(clustering, dataset.n_users());  // member ids index into frames
  const int start = clustering.window_start;
  const int len = clustering.window_length;
  if (start < 0 || len < 1 || start + len > dataset.n_frames())
    throw DataError("clustering window [" + std::to_string(start) + ", " +
                    std::to_string(start + len) + ") exceeds the dataset's " +
                    std::to_string(dataset.n_frames()) + " frames");

  std::vector<double> overlap(clustering.clusters.size(), 0.0);
  for (int f = start; f < start + len; ++f) {
    const std::vector<Orientation> frame = dataset.frame_orientations(f);
    for (std::size_t i = 0; i < clustering.clusters.size(); ++i) {
      const std::vector<Orientation> os = cluster_orientations(clustering.clusters[i], frame);
      overlap[i] += joint_overlap(os, spec, grid);
    }
  }
  for (double& o : overlap) o /= len;
  return aggregate_metrics(clustering, overlap, dataset.n_users());
}

void validate_algorithms(const std::vector<std::string>& algorithms) {
  if (algorithms.empty()) throw ConfigError("no clustering algorithm requested");
  const std::set<std::string> known{algo::kClique, algo::kLouvain, algo::kKMeans1, algo::kKMeans2};
  std::set<std::string> seen;
  for (const std::string& a : algorithms) {
    if (!known.count(a))
      throw ConfigError("unknown algorithm '" + a +
                        "' (expected clique, louvain, kmeans1, or kmeans2)");
    if (!seen.insert(a).second) throw ConfigError("algorithm '" + a + "' requested twice");
  }
}

namespace {

/// Per-user representative direction over a window: normalized mean view
/// direction, or the middle frame's direction when the mean degenerates.
std::vector<UnitVec> window_mean_directions(const TraceDataset& dataset, int start_frame,
                                            int t_frames) {
  std::vector<UnitVec> dirs;
  dirs.reserve(static_cast<std::size_t>(dataset.n_users()));
  const int mid = start_frame + t_frames / 2;
  for (int u = 0; u < dataset.n_users(); ++u) {
    Vec3 sum{};
    for (int f = start_frame; f < start_frame + t_frames; ++f)
      sum = sum + view_direction(dataset.at(u, f)).vec();
    if (norm(sum) >= 1e-9)
      dirs.push_back(UnitVec(sum));
    else
      dirs.push_back(view_direction(dataset.at(u, mid)));
  }
  return dirs;
}

}  // namespace

std::vector<Clustering> cluster_window(const TraceDataset& dataset, int start_frame, int t_frames,
                                       int tau_frames, double g_th,
                                       const std::vector<std::string>& algorithms,
                                       std::uint64_t seed, int kmeans_max_iters) {
  validate_algorithms(algorithms);
  if (start_frame < 0 || t_frames < 1 || start_frame + t_frames > dataset.n_frames())
    throw ConfigError("window [" + std::to_string(start_frame) + ", " +
                      std::to_string(start_frame + t_frames) + ") exceeds the dataset's " +
                      std::to_string(dataset.n_frames()) + " frames");

  std::vector<FrameGraph> graphs;
  graphs.reserve(static_cast<std::size_t>(t_frames));
  for (int f = start_frame; f < start_frame + t_frames; ++f) {
    const std::vector<Orientation> frame = dataset.frame_orientations(f);
    graphs.push_back(build_frame_graph(frame, g_th));
  }
  const AffinityMatrix affinity = build_affinity(graphs, tau_frames, start_frame);

  const auto requested = [&](const char* tag) {
    return std::find(algorithms.begin(), algorithms.end(), tag) != algorithms.end();
  };
  const auto stamp = [&](Clustering c, const std::string& tag) {
    c.algorithm = tag;
    c.window_start = start_frame;
    c.window_length = t_frames;
    c.tau = tau_frames;
    return c;
  };

  std::map<std::string, Clustering> results;
  std::optional<Clustering> clique_result, louvain_result;
  if (requested(algo::kClique) || requested(algo::kKMeans2))
    clique_result = stamp(clique_clustering(affinity), algo::kClique);
  if (requested(algo::kLouvain) || requested(algo::kKMeans1))
    louvain_result = stamp(louvain(affinity.adj, seed), algo::kLouvain);

  if (requested(algo::kKMeans1) || requested(algo::kKMeans2)) {
    const std::vector<UnitVec> dirs = window_mean_directions(dataset, start_frame, t_frames);
    const auto run_kmeans = [&](int k, const char* tag) {
      KMeansConfig cfg;
      cfg.k = std::min(k, dataset.n_users());
      cfg.max_iters = kmeans_max_iters;
      cfg.rng_seed = seed;
      return stamp(spherical_kmeans(dirs, cfg), tag);
    };
    if (requested(algo::kKMeans1)) results[algo::kKMeans1] = run_kmeans(louvain_result->k(), algo::kKMeans1);
    if (requested(algo::kKMeans2)) results[algo::kKMeans2] = run_kmeans(clique_result->k(), algo::kKMeans2);
  }
  if (clique_result) results[algo::kClique] = std::move(*clique_result);
  if (louvain_result) results[algo::kLouvain] = std::move(*louvain_result);

  std::vector<Clustering> out;
  out.reserve(algorithms.size());
  for (const std::string& a : algorithms) out.push_back(std::move(results.at(a)));
  return out;
}

std::vector<Clustering> cluster_frame(const TraceDataset& dataset, int frame, double g_th,
                                      const std::vector<std::string>& algorithms,
                                      std::uint64_t seed, int kmeans_max_iters) {
  return cluster_window(dataset, frame, 1, 1, g_th, algorithms, seed, kmeans_max_iters);
}

WindowSeries series_for_clusterings(const std::vector<Clustering>& clusterings,
                                    const TraceDataset& dataset, const ViewportSpec& spec,
                                    const SphereGrid& grid) {
  WindowSeries series;
  series.clusterings = clusterings;
  double gt3_sum = 0.0;
  long gt3_count = 0;
  for (const Clustering& clustering : clusterings) {
    const int start = clustering.window_start;
    const int len = clustering.window_length;
    if (start < 0 || len < 1 || start + len > dataset.n_frames())
      throw DataError("clustering window exceeds the dataset");
    for (int f = start; f < start + len; ++f) {
      const std::vector<Orientation> frame = dataset.frame_orientations(f);
      SeriesPoint point;
      point.frame = f;
      std::vector<double> overlaps;  // clusters of size >= 2
      for (const auto& members : clustering.clusters) {
        if (members.size() < 2) continue;
        const double o = joint_overlap(cluster_orientations(members, frame), spec, grid);
        overlaps.push_back(o);
        if (members.size() > 3) {
          gt3_sum += o;
          ++gt3_count;
        }
      }
      if (!overlaps.empty()) {
        const double mean =
            std::accumulate(overlaps.begin(), overlaps.end(), 0.0) / overlaps.size();
        double var = 0.0;
        for (double o : overlaps) var += (o - mean) * (o - mean);
        var /= overlaps.size();
        point.mean_overlap = mean;
        point.var_overlap = var;
      }
      series.points.push_back(point);
    }
  }
  if (gt3_count > 0) series.summary_mean_gt3 = gt3_sum / gt3_count;
  return series;
}

WindowSeries window_series(const TraceDataset& dataset, const std::string& algorithm, double t_s,
                          double tau_s, double g_th, const ViewportSpec& spec,
                          const SphereGrid& grid, std::uint64_t seed, int kmeans_max_iters) {
  const int t_frames = seconds_to_frames(t_s, dataset.frame_rate());
  const int tau_frames = seconds_to_frames(tau_s, dataset.frame_rate());
  if (t_frames < 1 || t_frames > dataset.n_frames())
    throw ConfigError("window length T must lie within the video duration");
  if (tau_frames < 1 || tau_frames > t_frames)
    throw ConfigError("tau must lie in (0, T] after frame conversion");

  std::vector<Clustering> clusterings;
  for (int start : window_starts(dataset.n_frames(), t_frames)) {
    std::vector<Clustering> got =
        cluster_window(dataset, start, t_frames, tau_frames, g_th, {algorithm}, seed,
                       kmeans_max_iters);
    clusterings.push_back(std::move(got.front()));
  }
  return series_for_clusterings(clusterings, dataset, spec, grid);
}

std::vector<ComparisonRow> compare(const std::vector<std::pair<std::string, Clustering>>& entries,
                                   const TraceDataset& dataset, const ViewportSpec& spec,
                                   const SphereGrid& grid) {
  std::vector<ComparisonRow> rows;
  rows.reserve(entries.size());
  for (const auto& [name, clustering] : entries) {
    try {
      validate_clustering(clustering, dataset.n_users());
    } catch (const std::logic_error& e) {
      throw DataError("clustering '" + name + "' does not cover the dataset's users: " + e.what());
    }
    rows.push_back(
        ComparisonRow{name, clustering, window_metrics(clustering, dataset, spec, grid)});
  }
  return rows;
}

std::vector<int> labels_from_clustering(const Clustering& clustering, int n_users) {
  validate_clustering(clustering, n_users);
  std::vector<int> labels(static_cast<std::size_t>(n_users), -1);
  for (std::size_t c = 0; c < clustering.clusters.size(); ++c)
    for (int u : clustering.clusters[c]) labels[static_cast<std::size_t>(u)] = static_cast<int>(c);
  return labels;
}

namespace {

double comb2(double x) { return x * (x - 1.0) / 2.0; }

/// Canonical relabeling by first appearance, for the degenerate-ARI equality
/// check.
std::vector<int> canonical_labels(std::span<const int> labels) {
  std::map<int, int> remap;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) {
    auto [it, inserted] = remap.try_emplace(l, static_cast<int>(remap.size()));
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("adjusted_rand_index: label vectors differ in length");
  const std::size_t n = a.size();
  if (n < 2) return 1.0;

  std::map<std::pair<int, int>, long> cells;
  std::map<int, long> row, col;
  for (std::size_t i = 0; i < n; ++i) {
    cells[{a[i], b[i]}] += 1;
    row[a[i]] += 1;
    col[b[i]] += 1;
  }
  double sum_cells = 0.0, sum_row = 0.0, sum_col = 0.0;
  for (const auto& [key, c] : cells) sum_cells += comb2(static_cast<double>(c));
  for (const auto& [key, c] : row) sum_row += comb2(static_cast<double>(c));
  for (const auto& [key, c] : col) sum_col += comb2(static_cast<double>(c));
  const double total = comb2(static_cast<double>(n));
  const double expected = sum_row * sum_col / total;
  const double max_index = (sum_row + sum_col) / 2.0;
  const double denom = max_index - expected;
  if (std::abs(denom) < 1e-12) return canonical_labels(a) == canonical_labels(b) ? 1.0 : 0.0;
  return (sum_cells - expected) / denom;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
  if (x.size() < 2) return 0.0;
  const std::vector<double> rx = average_ranks(x);
  const std::vector<double> ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mx;
    const double dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace vpc
