#include <cmath>
#include <numbers>
#include <sstream>

#include <doctest.h>

#include "helpers.hpp"
#include "vpclust/ingestion.hpp"
#include "vpclust/util.hpp"

using namespace vpc;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<RawSample> parse(const std::string& text, TraceFormat fmt = TraceFormat::Auto) {
  std::istringstream in(text);
  return parse_traces(in, fmt, "mem");
}
}  // namespace

TEST_CASE("quaternion traces parse in file order with exact values") {
  const std::string text =
      "user_id,timestamp_s,qw,qx,qy,qz\n"
      "alice,0.0,1,0,0,0\n"
      "bob,0.25,0.7071067811865476,0,0,0.7071067811865476\n"
      "alice,0.5,0,0,0,1\n";
  const auto rows = parse(text);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].user_id == "alice");
  CHECK(rows[0].timestamp_s == 0.0);
  CHECK(rows[0].orientation.w() == 1.0);
  CHECK(rows[1].user_id == "bob");
  CHECK(rows[1].timestamp_s == 0.25);
  CHECK(rows[1].orientation.w() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(rows[2].user_id == "alice");
  // (0,0,0,1) has w == 0 and canonicalizes with z positive.
  CHECK(rows[2].orientation.w() == 0.0);
  CHECK(rows[2].orientation.z() == 1.0);
}

TEST_CASE("euler traces parse and match the quaternion convention") {
  const std::string text =
      "user_id,timestamp_s,yaw_rad,pitch_rad,roll_rad\n"
      "u,0.0,0,0,0\n"
      "u,1.0,1.5707963267948966,0,0\n";
  const auto rows = parse(text);
  REQUIRE(rows.size() == 2);
  const UnitVec d = view_direction(rows[1].orientation);
  CHECK(d.x() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.y() == doctest::Approx(1.0));
}

TEST_CASE("malformed rows raise errors naming source and line") {
  const std::string header = "user_id,timestamp_s,qw,qx,qy,qz\n";
  // Wrong column count.
  CHECK_THROWS_WITH_AS(parse(header + "u,0.0,1,0,0\n"), doctest::Contains("mem:2"), DataError);
  // Non-numeric field.
  CHECK_THROWS_WITH_AS(parse(header + "u,0.0,1,0,0,0\nu,zed,1,0,0,0\n"),
                       doctest::Contains("mem:3"), DataError);
  // Zero-norm quaternion.
  CHECK_THROWS_AS(parse(header + "u,0.0,0,0,0,0\n"), DataError);
  // Non-finite value.
  CHECK_THROWS_AS(parse(header + "u,0.0,inf,0,0,0\n"), DataError);
  // Unrecognized header in auto mode.
  CHECK_THROWS_AS(parse("a,b,c\n"), DataError);
}

TEST_CASE("empty input yields an empty sample list") {
  CHECK(parse("").empty());
  CHECK(parse("user_id,timestamp_s,qw,qx,qy,qz\n").empty());
}

TEST_CASE("explicit format is honored and mismatches are rejected") {
  const std::string text =
      "user_id,timestamp_s,yaw_rad,pitch_rad,roll_rad\n"
      "u,0.0,0.5,0.25,0\n";
  const auto rows = parse(text, TraceFormat::Euler);
  REQUIRE(rows.size() == 1);
  const EulerAngles e = rows[0].orientation.to_euler();
  CHECK(e.yaw == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(e.pitch == doctest::Approx(0.25).epsilon(1e-12));
  // Asking for quaternion rows but handing over an Euler file is an error.
  CHECK_THROWS_AS(parse(text, TraceFormat::Quaternion), DataError);
}

TEST_CASE("synchronize reproduces exact knots and holds the edges") {
  // Samples at 0.0 and 0.5 s; grid at 4 fps hits 0.0, 0.25, 0.5, 0.75.
  std::vector<RawSample> samples{
      {"u", 0.0, Orientation::from_euler(0, 0, 0)},
      {"u", 0.5, Orientation::from_euler(kPi / 2, 0, 0)},
  };
  const TraceDataset ds = synchronize(samples, 4.0, 1.0);
  REQUIRE(ds.n_users() == 1);
  REQUIRE(ds.n_frames() == 4);
  CHECK(ds.frame_rate() == 4.0);

  // Frame 0 and frame 2 are exact sample reproductions.
  CHECK(ds.at(0, 0).w() == samples[0].orientation.w());
  CHECK(ds.at(0, 2).w() == samples[1].orientation.w());
  CHECK(ds.at(0, 2).z() == samples[1].orientation.z());

  // Frame 1 is the slerp midpoint: a quarter-turn halved is yaw pi/4.
  const EulerAngles mid = ds.at(0, 1).to_euler();
  CHECK(mid.yaw == doctest::Approx(kPi / 4).epsilon(1e-12));

  // Frame 3 (0.75 s) is past the last sample: hold it.
  CHECK(ds.at(0, 3).w() == samples[1].orientation.w());
  CHECK(ds.at(0, 3).z() == samples[1].orientation.z());
}

TEST_CASE("synchronize holds before the first sample") {
  std::vector<RawSample> samples{
      {"u", 0.5, Orientation::from_euler(1.0, 0, 0)},
      {"u", 0.75, Orientation::from_euler(2.0, 0, 0)},
  };
  const TraceDataset ds = synchronize(samples, 4.0, 1.0);
  CHECK(ds.at(0, 0).w() == samples[0].orientation.w());
  CHECK(ds.at(0, 1).w() == samples[0].orientation.w());
}

TEST_CASE("synchronize sorts distinct user ids") {
  std::vector<RawSample> samples{
      {"zoe", 0.0, Orientation()},
      {"amy", 0.0, Orientation()},
      {"mia", 0.0, Orientation()},
      {"amy", 0.5, Orientation()},
  };
  const TraceDataset ds = synchronize(samples, 2.0, 1.0);
  REQUIRE(ds.n_users() == 3);
  CHECK(ds.user_ids() == std::vector<std::string>{"amy", "mia", "zoe"});
  CHECK(ds.n_frames() == 2);
}

TEST_CASE("synchronize with an explicit roster rejects an absent user") {
  std::vector<RawSample> samples{{"amy", 0.0, Orientation()}};
  CHECK_THROWS_WITH_AS(synchronize(samples, 2.0, 1.0, {"amy", "ghost"}),
                       doctest::Contains("ghost"), DataError);
  // Roster order is preserved as given.
  std::vector<RawSample> both{{"amy", 0.0, Orientation()}, {"zoe", 0.0, Orientation()}};
  const TraceDataset ds = synchronize(both, 2.0, 1.0, {"zoe", "amy"});
  CHECK(ds.user_ids() == std::vector<std::string>{"zoe", "amy"});
}

TEST_CASE("synchronize rejects empty input and bad grid parameters") {
  std::vector<RawSample> samples{{"u", 0.0, Orientation()}};
  CHECK_THROWS_AS(synchronize({}, 2.0, 1.0), DataError);
  CHECK_THROWS_AS(synchronize(samples, 0.0, 1.0), ConfigError);
  CHECK_THROWS_AS(synchronize(samples, 2.0, 0.0), ConfigError);
}

TEST_CASE("dataset construction validates shape") {
  std::vector<std::vector<Orientation>> ragged{{Orientation(), Orientation()}, {Orientation()}};
  CHECK_THROWS_AS(TraceDataset({"a", "b"}, 1.0, ragged), DataError);
  std::vector<std::vector<Orientation>> ok{{Orientation()}, {Orientation()}};
  CHECK_THROWS_AS(TraceDataset({"a"}, 1.0, ok), DataError);  // id/row mismatch
  const TraceDataset ds({"a", "b"}, 2.0, ok);
  CHECK(ds.duration_s() == 0.5);
  CHECK(ds.frame_orientations(0).size() == 2);
}

TEST_CASE("synthetic traces: shape, labels, determinism") {
  SynthConfig cfg;
  cfg.n_users = 7;
  cfg.n_clusters = 3;
  cfg.duration_s = 1.0;
  cfg.frame_rate = 10.0;
  cfg.rng_seed = 42;
  const SynthResult a = synth_traces(cfg);
  CHECK(a.dataset.n_users() == 7);
  CHECK(a.dataset.n_frames() == 10);
  REQUIRE(a.ground_truth.size() == 7);
  // Users are assigned to attractors round-robin over sorted ids u00..u06.
  for (int u = 0; u < 7; ++u) CHECK(a.ground_truth[u] == u % 3);
  CHECK(a.dataset.user_ids()[0] == "u00");
  CHECK(a.dataset.user_ids()[6] == "u06");

  const SynthResult b = synth_traces(cfg);
  for (int u = 0; u < 7; ++u)
    for (int f = 0; f < 10; ++f) {
      CHECK(a.dataset.at(u, f).w() == b.dataset.at(u, f).w());
      CHECK(a.dataset.at(u, f).x() == b.dataset.at(u, f).x());
      CHECK(a.dataset.at(u, f).y() == b.dataset.at(u, f).y());
      CHECK(a.dataset.at(u, f).z() == b.dataset.at(u, f).z());
    }

  SynthConfig other = cfg;
  other.rng_seed = 43;
  const SynthResult c = synth_traces(other);
  bool any_diff = false;
  for (int u = 0; u < 7 && !any_diff; ++u)
    for (int f = 0; f < 10 && !any_diff; ++f)
      if (a.dataset.at(u, f).w() != c.dataset.at(u, f).w()) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("high concentration pins users to their moving attractor") {
  SynthConfig cfg;
  cfg.n_users = 6;
  cfg.n_clusters = 2;
  cfg.duration_s = 2.0;
  cfg.frame_rate = 5.0;
  cfg.concentration = 1e6;
  cfg.attractor_speed = 0.2;
  cfg.rng_seed = 9;
  const SynthResult r = synth_traces(cfg);
  // Same-cluster users stay within a whisker of each other; rival clusters
  // stay far apart (lattice base separation is order 2 radians for k=2).
  for (int f = 0; f < r.dataset.n_frames(); ++f) {
    for (int u = 0; u < cfg.n_users; ++u)
      for (int v = u + 1; v < cfg.n_users; ++v) {
        const double d = geodesic_distance(view_direction(r.dataset.at(u, f)),
                                           view_direction(r.dataset.at(v, f)));
        if (r.ground_truth[u] == r.ground_truth[v])
          CHECK(d < kPi / 100);
        else
          CHECK(d > 1.0);
      }
  }
}

TEST_CASE("synthetic config validation") {
  SynthConfig cfg;
  cfg.n_users = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SynthConfig{};
  cfg.n_clusters = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SynthConfig{};
  cfg.n_clusters = 5;
  cfg.n_users = 4;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SynthConfig{};
  cfg.concentration = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SynthConfig{};
  cfg.frame_rate = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SynthConfig{};
  cfg.duration_s = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SynthConfig{};
  cfg.attractor_speed = -0.1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SynthConfig{};
  CHECK_NOTHROW(cfg.validate());
}
