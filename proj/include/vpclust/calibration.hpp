#pragma once

#include <vector>

#include "vpclust/geometry.hpp"
#include "vpclust/ingestion.hpp"

namespace vpc {

/// One user pair at one frame: center distance, viewport overlap, and the
/// ground label "overlap >= o_th".
struct PairSample {
  double distance = 0.0;  // radians
  double overlap = 0.0;   // fraction
  bool positive = false;
};

struct RocPoint {
  double threshold = 0.0;  // radians
  double tpr = 0.0;
  double fpr = 0.0;
};

struct CalibrationResult {
  double g_th = 0.0;            // selected distance threshold, radians
  double o_th = 0.0;            // overlap fraction defining a positive
  bool tpr_one_reached = true;  // false when the Youden fallback fired
  std::vector<RocPoint> curve;
};

/// Every frame_stride-th frame, every unordered user pair: emit distance
/// between view directions, pairwise overlap, and the o_th label.
std::vector<PairSample> collect_pairs(const TraceDataset& dataset, const ViewportSpec& spec,
                                      const SphereGrid& grid, double o_th, int frame_stride);

/// 64 evenly spaced thresholds in (0, pi]: pi/64, 2*pi/64, ..., pi.
std::vector<double> default_threshold_grid(int count = 64);

/// For each threshold t: predicted positive = (distance <= t);
/// TPR = TP/(TP+FN), FPR = FP/(FP+TN). Thresholds must be ascending.
/// Throws DataError when the samples are all-positive or all-negative
/// (either rate would be undefined).
std::vector<RocPoint> roc_curve(const std::vector<PairSample>& samples,
                                const std::vector<double>& thresholds);

struct ThresholdSelection {
  double g_th = 0.0;
  bool tpr_one_reached = true;
};

/// Smallest threshold reaching TPR = 1; if the curve never reaches 1, the
/// threshold maximizing Youden's J = TPR - FPR (smallest such on ties), with
/// tpr_one_reached = false.
ThresholdSelection select_threshold(const std::vector<RocPoint>& curve);

/// collect_pairs + roc_curve + select_threshold in one call.
CalibrationResult calibrate(const TraceDataset& dataset, const ViewportSpec& spec,
                            const SphereGrid& grid, double o_th, int frame_stride,
                            const std::vector<double>& thresholds);

}  // namespace vpc
