#include "vpclust/graph.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "vpclust/util.hpp"

namespace vpc {

AdjacencyMatrix::AdjacencyMatrix(int n) : n_(n) {
  if (n < 0) throw std::invalid_argument("AdjacencyMatrix: negative size");
  bits_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
}

AdjacencyMatrix AdjacencyMatrix::from_rows(const std::vector<std::vector<std::uint8_t>>& rows) {
  const int n = static_cast<int>(rows.size());
  AdjacencyMatrix m(n);
  for (int i = 0; i < n; ++i)
    if (static_cast<int>(rows[i].size()) != n)
      throw std::invalid_argument("AdjacencyMatrix: matrix is not square");
  for (int i = 0; i < n; ++i) {
    if (rows[i][i] != 0) throw std::invalid_argument("AdjacencyMatrix: nonzero diagonal");
    for (int j = i + 1; j < n; ++j) {
      if (rows[i][j] != rows[j][i])
        throw std::invalid_argument("AdjacencyMatrix: matrix is not symmetric");
      m.set(i, j, rows[i][j] != 0);
    }
  }
  return m;
}

void AdjacencyMatrix::set(int i, int j, bool value) {
  if (i < 0 || j < 0 || i >= n_ || j >= n_)
    throw std::out_of_range("AdjacencyMatrix::set: index out of range");
  if (i == j) return;  // diagonal stays zero
  bits_[static_cast<std::size_t>(i) * n_ + j] = value ? 1 : 0;
  bits_[static_cast<std::size_t>(j) * n_ + i] = value ? 1 : 0;
}

long AdjacencyMatrix::edge_count() const {
  long edges = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) edges += at(i, j);
  return edges;
}

FrameGraph build_frame_graph(std::span<const Orientation> orientations, double g_th) {
  if (orientations.empty()) throw std::invalid_argument("build_frame_graph: no users");
  if (!(g_th > 0.0 && g_th <= std::numbers::pi))
    throw std::invalid_argument("build_frame_graph: g_th must lie in (0, pi]");
  const int n = static_cast<int>(orientations.size());
  std::vector<UnitVec> dirs;
  dirs.reserve(orientations.size());
  for (const Orientation& o : orientations) dirs.push_back(view_direction(o));

  FrameGraph g{AdjacencyMatrix(n)};
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (geodesic_distance(dirs[i], dirs[j]) <= g_th) g.adj.set(i, j, true);
  return g;
}

AffinityMatrix build_affinity(std::span<const FrameGraph> graphs, int tau, int start_frame) {
  if (graphs.empty()) throw std::invalid_argument("build_affinity: empty window");
  const int t = static_cast<int>(graphs.size());
  const int n = graphs.front().adj.n();
  for (const FrameGraph& g : graphs)
    if (g.adj.n() != n)
      throw std::invalid_argument("build_affinity: frame graphs disagree on user count");
  if (tau < 1 || tau > t)
    throw std::invalid_argument("build_affinity: tau must lie in [1, window length]");

  AffinityMatrix a{AdjacencyMatrix(n), start_frame, t, tau};
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      int count = 0;
      for (const FrameGraph& g : graphs) count += g.adj.at(i, j);
      if (count >= tau) a.adj.set(i, j, true);
    }
  }
  return a;
}

int seconds_to_frames(double seconds, double frame_rate) {
  if (!(seconds >= 0.0) || !std::isfinite(seconds))
    throw ConfigError("time span must be non-negative");
  if (!(frame_rate > 0.0) || !std::isfinite(frame_rate))
    throw ConfigError("frame rate must be positive");
  return static_cast<int>(std::floor(seconds * frame_rate + 0.5));
}

std::vector<int> window_starts(int total_frames, int t_frames) {
  if (t_frames < 1) throw ConfigError("window length must be >= 1 frame");
  std::vector<int> starts;
  for (int s = 0; s + t_frames <= total_frames; s += t_frames) starts.push_back(s);
  return starts;
}

}  // namespace vpc
