#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vpclust/geometry.hpp"

namespace vpc {

/// One head-pose reading as it appears in a trace file.
struct RawSample {
  std::string user_id;
  double timestamp_s = 0.0;
  Orientation orientation;
};

enum class TraceFormat {
  Auto,        // detect from the header row
  Quaternion,  // user_id,timestamp_s,qw,qx,qy,qz
  Euler,       // user_id,timestamp_s,yaw_rad,pitch_rad,roll_rad
};

/// Parse a trace CSV. Rows are validated (finite values, non-degenerate
/// quaternions); a bad row raises DataError naming the line. An empty file
/// (header only, or fully empty) yields an empty list.
std::vector<RawSample> load_traces(const std::string& path, TraceFormat format = TraceFormat::Auto);
std::vector<RawSample> parse_traces(std::istream& in, TraceFormat format,
                                    const std::string& source_name);

/// Dense synchronized dataset: one Orientation per (user, frame).
/// User order is the lexicographically sorted id list fixed at construction.
class TraceDataset {
public:
  /// frames_by_user[u] must have the same length for every u; that length is
  /// the frame count.
  TraceDataset(std::vector<std::string> user_ids, double frame_rate,
               std::vector<std::vector<Orientation>> frames_by_user);

  int n_users() const { return static_cast<int>(user_ids_.size()); }
  int n_frames() const { return n_frames_; }
  double frame_rate() const { return frame_rate_; }
  double duration_s() const { return n_frames_ / frame_rate_; }
  const std::vector<std::string>& user_ids() const { return user_ids_; }

  const Orientation& at(int user, int frame) const { return frames_[user][frame]; }
  /// All users' orientations at one frame, in user order.
  std::vector<Orientation> frame_orientations(int frame) const;

private:
  std::vector<std::string> user_ids_;
  double frame_rate_;
  int n_frames_;
  std::vector<std::vector<Orientation>> frames_;  // [user][frame]
};

/// Resample raw traces onto the uniform frame grid t_k = k / frame_rate,
/// k = 0 .. round(duration_s * frame_rate) - 1. Between samples: shortest-arc
/// slerp; outside a user's sample range: hold the nearest sample. Users are
/// the sorted distinct ids present in `samples`; a frame grid that exactly
/// hits a sample timestamp reproduces that sample bit-for-bit.
TraceDataset synchronize(const std::vector<RawSample>& samples, double frame_rate,
                         double duration_s);

/// Same, but over an explicit user set: a listed user with no samples is a
/// DataError naming that user.
TraceDataset synchronize(const std::vector<RawSample>& samples, double frame_rate,
                         double duration_s, const std::vector<std::string>& user_ids);

/// Synthetic-dataset parameters: n_clusters attractor points move rigidly on
/// the sphere at attractor_speed; each user draws per-frame view directions
/// from a von Mises-Fisher distribution of the given concentration centered
/// on its attractor.
struct SynthConfig {
  int n_users = 59;
  int n_clusters = 3;
  double duration_s = 10.0;
  double frame_rate = 30.0;
  double attractor_speed = 0.1;  // radians per second
  double concentration = 1e6;    // von Mises-Fisher kappa
  std::uint64_t rng_seed = 0;

  /// Throws ConfigError on any violated bound.
  void validate() const;
};

struct SynthResult {
  TraceDataset dataset;
  std::vector<int> ground_truth;  // cluster label per user index
};

/// Deterministic in rng_seed. Attractor base points sit on a Fibonacci
/// lattice (pairwise well separated) and rotate about a random fixed axis;
/// users are assigned to attractors round-robin. Orientations are roll-free
/// (view direction fully determines the pose).
SynthResult synth_traces(const SynthConfig& config);

}  // namespace vpc
