#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vpclust/calibration.hpp"
#include "vpclust/clustering.hpp"
#include "vpclust/evaluation.hpp"
#include "vpclust/graph.hpp"
#include "vpclust/ingestion.hpp"

namespace vpc {

/// Shortest-round-trip float formatting used by every CSV/JSON writer, so a
/// rerun with identical inputs is byte-identical.
std::string format_double(double v);

/// Trace CSV in quaternion format; components printed with enough digits to
/// reload bit-for-bit.
void write_trace_csv(const std::string& path, const TraceDataset& dataset);

void write_ground_truth_csv(const std::string& path, const std::vector<std::string>& user_ids,
                            const std::vector<int>& labels);
/// user_id -> cluster id. Malformed rows raise DataError with the line.
std::map<std::string, int> read_ground_truth_csv(const std::string& path);

void write_roc_csv(const std::string& path, const std::vector<RocPoint>& curve);

void write_calibration_json(const std::string& path, const CalibrationResult& result);

/// {"window":{"start","T","tau"},"algorithm","clusters":[[user ids],...]}
void write_clustering_json(const std::string& path, const Clustering& clustering,
                           const std::vector<std::string>& user_ids);

/// Inverse of write_clustering_json; user ids are mapped to indices via
/// user_ids (unknown id -> DataError). Returns the algorithm tag as stored.
Clustering read_clustering_json(const std::string& path, const std::vector<std::string>& user_ids);

/// Edge list of an adjacency matrix: header "i,j", one row per unordered
/// edge with i < j.
void write_edge_list_csv(const std::string& path, const AdjacencyMatrix& adjacency);

/// report.csv: one row per evaluated (clustering, window/frame);
/// ari column included only when any row carries a value.
struct ReportRow {
  std::string algorithm;
  int start_frame = 0;
  int frames = 1;
  int tau_frames = 1;
  FrameMetrics metrics;
  std::optional<double> ari;
};
void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows);

/// series CSV: frame,mean_overlap,var_overlap with empty cells for frames
/// without any size->=2 cluster.
void write_series_csv(const std::string& path, const std::vector<SeriesPoint>& points);

/// summary.csv: algorithm,mean_overlap_gt3 (empty cell when absent).
struct SummaryRow {
  std::string algorithm;
  std::optional<double> mean_overlap_gt3;
};
void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);

}  // namespace vpc
