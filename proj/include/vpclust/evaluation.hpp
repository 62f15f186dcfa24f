#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vpclust/baselines.hpp"
#include "vpclust/clustering.hpp"
#include "vpclust/geometry.hpp"
#include "vpclust/ingestion.hpp"

namespace vpc {

/// Report-table metrics for one clustering against one set of orientations.
/// mean_overlap_ge3 is absent (not 0) when no cluster has >= 3 users. The
/// main cluster is the most populated one, ties broken toward the
/// lexicographically smallest member list.
struct FrameMetrics {
  int k = 0;
  std::optional<double> mean_overlap_ge3;  // mean joint overlap, clusters with >= 3 users
  double covered_ge3 = 0.0;                // fraction of users in those clusters
  double main_overlap = 0.0;               // joint overlap of the main cluster
  double main_population = 0.0;            // fraction of users in the main cluster
};

FrameMetrics frame_metrics(const Clustering& clustering, std::span<const Orientation> orientations,
                           const ViewportSpec& spec, const SphereGrid& grid);

/// Same aggregation, but each cluster's overlap is its joint overlap averaged
/// over every frame of the clustering's window.
FrameMetrics window_metrics(const Clustering& clustering, const TraceDataset& dataset,
                            const ViewportSpec& spec, const SphereGrid& grid);

/// One frame of the overlap time series: mean and population variance of the
/// joint overlap across that frame's clusters of size >= 2 (absent when the
/// clustering has no such cluster).
struct SeriesPoint {
  int frame = 0;
  std::optional<double> mean_overlap;
  std::optional<double> var_overlap;
};

/// Valid algorithm tags for clustering requests: clique, louvain, kmeans1,
/// kmeans2. Throws ConfigError on anything else or on duplicates.
void validate_algorithms(const std::vector<std::string>& algorithms);

/// Cluster one window [start_frame, start_frame + t_frames) with each
/// requested algorithm, in request order. kmeans1 takes its K from louvain,
/// kmeans2 from clique clustering (those run internally when needed, with
/// the same seed). K-means represents each user by its normalized mean view
/// direction over the window.
std::vector<Clustering> cluster_window(const TraceDataset& dataset, int start_frame, int t_frames,
                                       int tau_frames, double g_th,
                                       const std::vector<std::string>& algorithms,
                                       std::uint64_t seed, int kmeans_max_iters = 100);

/// Single-frame convenience: a window of length 1 with tau 1.
std::vector<Clustering> cluster_frame(const TraceDataset& dataset, int frame, double g_th,
                                      const std::vector<std::string>& algorithms,
                                      std::uint64_t seed, int kmeans_max_iters = 100);

/// Full windowed run of one algorithm: T_s and tau_s in seconds, converted
/// with the dataset frame rate; windows tile the video with stride T.
struct WindowSeries {
  std::vector<Clustering> clusterings;  // one per window
  std::vector<SeriesPoint> points;      // one per covered frame
  /// Video-wide mean joint overlap pooled over every (frame, cluster) pair
  /// where the cluster has more than 3 users; absent when none exists.
  std::optional<double> summary_mean_gt3;
};

WindowSeries window_series(const TraceDataset& dataset, const std::string& algorithm, double t_s,
                          double tau_s, double g_th, const ViewportSpec& spec,
                          const SphereGrid& grid, std::uint64_t seed, int kmeans_max_iters = 100);

/// Series points + the pooled >3-user summary for an already computed list
/// of per-window clusterings (windows must tile consecutive frames).
WindowSeries series_for_clusterings(const std::vector<Clustering>& clusterings,
                                    const TraceDataset& dataset, const ViewportSpec& spec,
                                    const SphereGrid& grid);

/// Side-by-side window_metrics rows for clusterings over the same users;
/// a clustering not covering exactly the dataset's users is a DataError.
struct ComparisonRow {
  std::string name;
  Clustering clustering;
  FrameMetrics metrics;
};

std::vector<ComparisonRow> compare(const std::vector<std::pair<std::string, Clustering>>& entries,
                                   const TraceDataset& dataset, const ViewportSpec& spec,
                                   const SphereGrid& grid);

/// labels[i] = index of the cluster containing user i.
std::vector<int> labels_from_clustering(const Clustering& clustering, int n_users);

/// Adjusted Rand Index between two label vectors of equal length. The
/// degenerate case (both partitions all-singletons or all-one-cluster) is 1
/// when the partitions are equal and 0 otherwise.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace vpc
