#include "vpclust/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vpclust/util.hpp"

namespace vpc {

std::vector<PairSample> collect_pairs(const TraceDataset& dataset, const ViewportSpec& spec,
                                      const SphereGrid& grid, double o_th, int frame_stride) {
  if (!(o_th > 0.0 && o_th < 1.0)) throw ConfigError("o_th must lie strictly inside (0, 1)");
  if (frame_stride < 1) throw ConfigError("frame stride must be >= 1");

  const int n = dataset.n_users();
  std::vector<PairSample> out;
  for (int f = 0; f < dataset.n_frames(); f += frame_stride) {
    std::vector<UnitVec> dirs;
    dirs.reserve(static_cast<std::size_t>(n));
    const std::vector<Orientation> frame = dataset.frame_orientations(f);
    for (const Orientation& o : frame) dirs.push_back(view_direction(o));
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        PairSample s;
        s.distance = geodesic_distance(dirs[i], dirs[j]);
        s.overlap = pairwise_overlap(frame[i], frame[j], spec, grid);
        s.positive = s.overlap >= o_th;
        out.push_back(s);
      }
    }
  }
  return out;
}

std::vector<double> default_threshold_grid(int count) {
  if (count < 1) throw ConfigError("threshold grid needs at least one value");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count));
  for (int i = 1; i <= count; ++i) grid.push_back(std::numbers::pi * i / count);
  return grid;
}

std::vector<RocPoint> roc_curve(const std::vector<PairSample>& samples,
                                const std::vector<double>& thresholds) {
  if (thresholds.empty()) throw ConfigError("empty threshold grid");
  if (!std::is_sorted(thresholds.begin(), thresholds.end()))
    throw ConfigError("threshold grid must be ascending");

  std::vector<double> pos, neg;
  for (const PairSample& s : samples) (s.positive ? pos : neg).push_back(s.distance);
  if (pos.empty() || neg.empty())
    throw DataError("ROC needs both positive and negative samples (got " +
                    std::to_string(pos.size()) + " positive, " + std::to_string(neg.size()) +
                    " negative)");
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());

  std::vector<RocPoint> curve;
  curve.reserve(thresholds.size());
  for (double th : thresholds) {
    // Predicted positive: distance <= threshold.
    const auto tp = std::upper_bound(pos.begin(), pos.end(), th) - pos.begin();
    const auto fp = std::upper_bound(neg.begin(), neg.end(), th) - neg.begin();
    curve.push_back(RocPoint{th, static_cast<double>(tp) / static_cast<double>(pos.size()),
                             static_cast<double>(fp) / static_cast<double>(neg.size())});
  }
  return curve;
}

ThresholdSelection select_threshold(const std::vector<RocPoint>& curve) {
  if (curve.empty()) throw ConfigError("empty ROC curve");
  for (const RocPoint& p : curve)
    if (p.tpr >= 1.0) return ThresholdSelection{p.threshold, true};
  // Fallback: maximize Youden's J, keeping the smallest threshold on ties.
  const RocPoint* best = &curve.front();
  for (const RocPoint& p : curve)
    if (p.tpr - p.fpr > best->tpr - best->fpr) best = &p;
  return ThresholdSelection{best->threshold, false};
}

CalibrationResult calibrate(const TraceDataset& dataset, const ViewportSpec& spec,
                            const SphereGrid& grid, double o_th, int frame_stride,
                            const std::vector<double>& thresholds) {
  const std::vector<PairSample> samples = collect_pairs(dataset, spec, grid, o_th, frame_stride);
  CalibrationResult result;
  result.o_th = o_th;
  result.curve = roc_curve(samples, thresholds);
  const ThresholdSelection sel = select_threshold(result.curve);
  result.g_th = sel.g_th;
  result.tpr_one_reached = sel.tpr_one_reached;
  return result;
}

}  // namespace vpc
