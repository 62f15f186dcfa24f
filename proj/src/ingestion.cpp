#include "vpclust/ingestion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "vpclust/util.hpp"

namespace vpc {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_number(const std::string& s, const std::string& source, long line_no,
                    const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    if (!std::isfinite(v))
      throw DataError(source + ":" + std::to_string(line_no) + ": non-finite " + what);
    return v;
  } catch (const DataError&) {
    throw;
  } catch (const std::exception&) {
    throw DataError(source + ":" + std::to_string(line_no) + ": cannot parse " + what + " '" + s +
                    "'");
  }
}

}  // namespace

std::vector<RawSample> parse_traces(std::istream& in, TraceFormat format,
                                    const std::string& source_name) {
  std::string line;
  long line_no = 0;
  // Header row decides the column layout.
  if (!std::getline(in, line)) return {};
  ++line_no;
  const std::vector<std::string> header = split_csv(line);
  TraceFormat detected;
  if (header.size() == 6 && header[2] == "qw")
    detected = TraceFormat::Quaternion;
  else if (header.size() == 5 && header[2] == "yaw_rad")
    detected = TraceFormat::Euler;
  else
    throw DataError(source_name + ":1: unrecognized trace header '" + trim(line) + "'");
  if (format != TraceFormat::Auto && format != detected)
    throw DataError(source_name + ":1: header does not match the requested format");

  const std::size_t n_cols = detected == TraceFormat::Quaternion ? 6 : 5;
  std::vector<RawSample> samples;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != n_cols)
      throw DataError(source_name + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(n_cols) + " fields, got " + std::to_string(fields.size()));
    RawSample s;
    s.user_id = fields[0];
    if (s.user_id.empty())
      throw DataError(source_name + ":" + std::to_string(line_no) + ": empty user_id");
    s.timestamp_s = parse_number(fields[1], source_name, line_no, "timestamp_s");
    if (s.timestamp_s < 0.0)
      throw DataError(source_name + ":" + std::to_string(line_no) + ": negative timestamp");
    try {
      if (detected == TraceFormat::Quaternion) {
        s.orientation = Orientation(parse_number(fields[2], source_name, line_no, "qw"),
                                    parse_number(fields[3], source_name, line_no, "qx"),
                                    parse_number(fields[4], source_name, line_no, "qy"),
                                    parse_number(fields[5], source_name, line_no, "qz"));
      } else {
        s.orientation =
            Orientation::from_euler(parse_number(fields[2], source_name, line_no, "yaw_rad"),
                                    parse_number(fields[3], source_name, line_no, "pitch_rad"),
                                    parse_number(fields[4], source_name, line_no, "roll_rad"));
      }
    } catch (const std::invalid_argument& e) {
      throw DataError(source_name + ":" + std::to_string(line_no) + ": " + e.what());
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<RawSample> load_traces(const std::string& path, TraceFormat format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open trace file '" + path + "'");
  return parse_traces(in, format, path);
}

TraceDataset::TraceDataset(std::vector<std::string> user_ids, double frame_rate,
                           std::vector<std::vector<Orientation>> frames_by_user)
    : user_ids_(std::move(user_ids)), frame_rate_(frame_rate), frames_(std::move(frames_by_user)) {
  if (!(frame_rate_ > 0.0) || !std::isfinite(frame_rate_))
    throw ConfigError("frame rate must be positive");
  if (user_ids_.empty()) throw DataError("dataset has no users");
  if (frames_.size() != user_ids_.size())
    throw DataError("orientation table does not match the user list");
  n_frames_ = static_cast<int>(frames_.front().size());
  if (n_frames_ < 1) throw DataError("dataset has no frames");
  for (const auto& row : frames_)
    if (static_cast<int>(row.size()) != n_frames_)
      throw DataError("orientation table is not dense: ragged frame counts");
}

std::vector<Orientation> TraceDataset::frame_orientations(int frame) const {
  std::vector<Orientation> out;
  out.reserve(frames_.size());
  for (const auto& row : frames_) out.push_back(row[frame]);
  return out;
}

namespace {

Orientation sample_at(const std::vector<const RawSample*>& sorted, double t) {
  if (t <= sorted.front()->timestamp_s) return sorted.front()->orientation;
  // First sample strictly after t.
  auto it = std::upper_bound(sorted.begin(), sorted.end(), t,
                             [](double v, const RawSample* s) { return v < s->timestamp_s; });
  if (it == sorted.end()) return sorted.back()->orientation;
  const RawSample* hi = *it;
  const RawSample* lo = *(it - 1);
  const double dt = hi->timestamp_s - lo->timestamp_s;
  if (dt < 1e-12) return hi->orientation;
  if (t == lo->timestamp_s) return lo->orientation;  // exact knot: no slerp rounding
  return slerp(lo->orientation, hi->orientation, (t - lo->timestamp_s) / dt);
}

}  // namespace

TraceDataset synchronize(const std::vector<RawSample>& samples, double frame_rate,
                         double duration_s, const std::vector<std::string>& user_ids) {
  if (!(frame_rate > 0.0) || !std::isfinite(frame_rate))
    throw ConfigError("frame rate must be positive");
  if (!(duration_s > 0.0) || !std::isfinite(duration_s))
    throw ConfigError("duration must be positive");
  const long frames = std::llround(duration_s * frame_rate);
  if (frames < 1) throw ConfigError("duration and frame rate yield zero frames");

  std::map<std::string, std::vector<const RawSample*>> by_user;
  for (const auto& id : user_ids) by_user[id];  // listed users exist even when empty
  for (const RawSample& s : samples) {
    auto it = by_user.find(s.user_id);
    if (it != by_user.end()) it->second.push_back(&s);
  }

  std::vector<std::vector<Orientation>> table;
  table.reserve(user_ids.size());
  for (const auto& id : user_ids) {
    auto& user_samples = by_user[id];
    if (user_samples.empty()) throw DataError("user '" + id + "' has no samples");
    std::stable_sort(user_samples.begin(), user_samples.end(),
                     [](const RawSample* a, const RawSample* b) {
                       return a->timestamp_s < b->timestamp_s;
                     });
    std::vector<Orientation> row;
    row.reserve(static_cast<std::size_t>(frames));
    for (long k = 0; k < frames; ++k) row.push_back(sample_at(user_samples, k / frame_rate));
    table.push_back(std::move(row));
  }
  return TraceDataset(user_ids, frame_rate, std::move(table));
}

TraceDataset synchronize(const std::vector<RawSample>& samples, double frame_rate,
                         double duration_s) {
  std::set<std::string> ids;
  for (const RawSample& s : samples) ids.insert(s.user_id);
  return synchronize(samples, frame_rate, duration_s,
                     std::vector<std::string>(ids.begin(), ids.end()));
}

void SynthConfig::validate() const {
  if (n_users < 1) throw ConfigError("synth: n_users must be >= 1");
  if (n_clusters < 1 || n_clusters > n_users)
    throw ConfigError("synth: n_clusters must be in [1, n_users]");
  if (!(duration_s > 0.0) || !std::isfinite(duration_s))
    throw ConfigError("synth: duration must be positive");
  if (!(frame_rate > 0.0) || !std::isfinite(frame_rate))
    throw ConfigError("synth: frame rate must be positive");
  if (std::llround(duration_s * frame_rate) < 1)
    throw ConfigError("synth: duration and frame rate yield zero frames");
  if (!(attractor_speed >= 0.0) || !std::isfinite(attractor_speed))
    throw ConfigError("synth: attractor speed must be >= 0");
  if (!(concentration > 0.0) || !std::isfinite(concentration))
    throw ConfigError("synth: concentration must be positive");
}

namespace {

/// von Mises-Fisher draw around mu. Two uniform variates per call.
UnitVec vmf_sample(const Vec3& mu, double kappa, Rng& rng) {
  // Cosine against the mean via inverse-CDF; the uniform is floored at the
  // engine's 2^-53 grid so log() stays finite.
  const double e2k = std::exp(-2.0 * kappa);
  const double u = std::max(rng.uniform01(), 0x1.0p-53);
  double w = 1.0 + std::log(e2k + u * (1.0 - e2k)) / kappa;
  w = std::clamp(w, -1.0, 1.0);
  const double phi = 2.0 * std::numbers::pi * rng.uniform01();

  const Vec3 helper = std::abs(mu.z) < 0.9 ? Vec3{0.0, 0.0, 1.0} : Vec3{1.0, 0.0, 0.0};
  Vec3 e1 = cross(mu, helper);
  const double n1 = norm(e1);
  e1 = (1.0 / n1) * e1;
  const Vec3 e2 = cross(mu, e1);

  const double s = std::sqrt(std::max(0.0, 1.0 - w * w));
  const Vec3 v = w * mu + (s * std::cos(phi)) * e1 + (s * std::sin(phi)) * e2;
  return UnitVec(v);
}

Orientation orientation_facing(const UnitVec& dir) {
  const double yaw = std::atan2(dir.y(), dir.x());
  const double pitch = std::asin(std::clamp(dir.z(), -1.0, 1.0));
  return Orientation::from_euler(yaw, pitch, 0.0);
}

}  // namespace

SynthResult synth_traces(const SynthConfig& config) {
  config.validate();
  const long frames = std::llround(config.duration_s * config.frame_rate);
  Rng rng(config.rng_seed);

  // Attractor base points: Fibonacci lattice, pairwise well separated for
  // any small cluster count.
  const SphereGrid bases = SphereGrid::fibonacci(config.n_clusters);

  // Shared drift: a rigid rotation about one random axis, which preserves
  // all pairwise attractor separations over time.
  const double az = 2.0 * rng.uniform01() - 1.0;
  const double aphi = 2.0 * std::numbers::pi * rng.uniform01();
  const double ar = std::sqrt(std::max(0.0, 1.0 - az * az));
  const Vec3 axis{ar * std::cos(aphi), ar * std::sin(aphi), az};

  const int width = std::max<int>(2, std::to_string(config.n_users - 1).size());
  std::vector<std::string> user_ids;
  user_ids.reserve(static_cast<std::size_t>(config.n_users));
  for (int u = 0; u < config.n_users; ++u) {
    std::string digits = std::to_string(u);
    user_ids.push_back("u" + std::string(width - digits.size(), '0') + digits);
  }

  std::vector<std::vector<Orientation>> table(
      static_cast<std::size_t>(config.n_users),
      std::vector<Orientation>(static_cast<std::size_t>(frames)));
  for (long k = 0; k < frames; ++k) {
    const double t = k / config.frame_rate;
    const double half = config.attractor_speed * t / 2.0;
    const Orientation drift(std::cos(half), std::sin(half) * axis.x, std::sin(half) * axis.y,
                            std::sin(half) * axis.z);
    std::vector<Vec3> attractors;
    attractors.reserve(static_cast<std::size_t>(config.n_clusters));
    for (const Vec3& base : bases.points()) attractors.push_back(drift.rotate(base));
    for (int u = 0; u < config.n_users; ++u) {
      const Vec3& mu = attractors[static_cast<std::size_t>(u % config.n_clusters)];
      table[u][k] = orientation_facing(vmf_sample(mu, config.concentration, rng));
    }
  }

  std::vector<int> truth(static_cast<std::size_t>(config.n_users));
  for (int u = 0; u < config.n_users; ++u) truth[u] = u % config.n_clusters;
  return SynthResult{TraceDataset(std::move(user_ids), config.frame_rate, std::move(table)),
                     std::move(truth)};
}

}  // namespace vpc
