#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vpclust/geometry.hpp"

namespace vpc {

/// Dense symmetric binary adjacency with a zero diagonal. set() writes both
/// triangles; the diagonal stays zero.
class AdjacencyMatrix {
public:
  explicit AdjacencyMatrix(int n);

  /// Build from a dense 0/1 row list, validating squareness, symmetry, and a
  /// zero diagonal; throws std::invalid_argument on any violation. This is
  /// the only way non-symmetric data could enter, so consumers can rely on
  /// the invariant.
  static AdjacencyMatrix from_rows(const std::vector<std::vector<std::uint8_t>>& rows);

  int n() const { return n_; }
  bool at(int i, int j) const { return bits_[static_cast<std::size_t>(i) * n_ + j] != 0; }
  void set(int i, int j, bool value);
  /// Number of edges (unordered pairs with at() true).
  long edge_count() const;

private:
  int n_;
  std::vector<std::uint8_t> bits_;
};

/// Per-frame neighborhood graph: edge iff the two users' view directions are
/// within g_th radians (closed threshold).
struct FrameGraph {
  AdjacencyMatrix adj;
};

FrameGraph build_frame_graph(std::span<const Orientation> orientations, double g_th);

/// Windowed affinity: edge iff the pair was frame-graph neighbors in at
/// least tau of the window's frames.
struct AffinityMatrix {
  AdjacencyMatrix adj;
  int start_frame = 0;
  int t_frames = 1;  // window length, frames
  int tau = 1;       // required neighbor count, frames
};

/// graphs = the window's frame graphs in order; 1 <= tau <= graphs.size().
/// Mismatched user counts across frames raise std::invalid_argument.
AffinityMatrix build_affinity(std::span<const FrameGraph> graphs, int tau, int start_frame = 0);

/// Seconds to frame count, rounded half-up against the frame rate.
int seconds_to_frames(double seconds, double frame_rate);

/// Start frames of consecutive non-overlapping windows of t_frames covering
/// the video; a trailing partial window is dropped.
std::vector<int> window_starts(int total_frames, int t_frames);

}  // namespace vpc
