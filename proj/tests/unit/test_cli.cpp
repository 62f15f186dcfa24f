#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "helpers.hpp"
#include "vpclust/cli.hpp"

namespace fs = std::filesystem;
using test_helpers::slurp;

namespace {

int cli(std::vector<std::string> args) { return vpc::run_cli(args); }

/// Fresh per-test scratch directory under the system temp root.
fs::path fresh_dir(const std::string& name) {
  static int counter = 0;
  const fs::path p =
      fs::temp_directory_path() / ("vpclust_cli_" + name + "_" + std::to_string(counter++));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

/// Small separable synthetic dataset shared by the pipeline tests.
fs::path make_traces(const std::string& name) {
  const fs::path dir = fresh_dir(name);
  REQUIRE(cli({"synth", "--users", "6", "--clusters", "2", "--duration", "2", "--fps", "5",
               "--kappa", "1e6", "--seed", "7", "--out", dir.string()}) == 0);
  REQUIRE(fs::exists(dir / "traces.csv"));
  REQUIRE(fs::exists(dir / "ground_truth.csv"));
  return dir;
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(cli({"--help"}) == 0);
  CHECK(cli({"synth", "--help"}) == 0);
  CHECK(cli({}) == 2);                      // a subcommand is required
  CHECK(cli({"frobnicate"}) == 2);          // unknown subcommand
  CHECK(cli({"synth", "--no-such"}) == 2);  // unknown flag
}

TEST_CASE("synth writes byte-identical files on reruns") {
  const fs::path a = fresh_dir("synth_a");
  const fs::path b = fresh_dir("synth_b");
  const std::vector<std::string> args{"synth", "--users", "5",    "--clusters", "2",
                                      "--duration", "1",  "--fps", "4",         "--seed", "3"};
  auto with_out = [&](const fs::path& dir) {
    std::vector<std::string> v = args;
    v.push_back("--out");
    v.push_back(dir.string());
    return v;
  };
  REQUIRE(cli(with_out(a)) == 0);
  REQUIRE(cli(with_out(b)) == 0);
  CHECK(slurp((a / "traces.csv").string()) == slurp((b / "traces.csv").string()));
  CHECK(slurp((a / "ground_truth.csv").string()) == slurp((b / "ground_truth.csv").string()));
  // The trace file round-trips: header plus 5 users x 4 frames.
  const std::string traces = slurp((a / "traces.csv").string());
  CHECK(traces.rfind("user_id,timestamp_s,qw,qx,qy,qz\n", 0) == 0);
  CHECK(std::count(traces.begin(), traces.end(), '\n') == 1 + 5 * 4);
}

TEST_CASE("synth rejects invalid parameters with exit 2") {
  const fs::path dir = fresh_dir("synth_bad");
  CHECK(cli({"synth", "--clusters", "0", "--out", dir.string()}) == 2);
  CHECK(cli({"synth", "--users", "2", "--clusters", "5", "--out", dir.string()}) == 2);
  CHECK(cli({"synth", "--duration", "-1", "--out", dir.string()}) == 2);
}

TEST_CASE("cluster in frame mode writes one JSON per algorithm") {
  const fs::path data = make_traces("cluster_frame");
  const fs::path out = fresh_dir("cluster_frame_out");
  REQUIRE(cli({"cluster", "--input", (data / "traces.csv").string(), "--fps", "5", "--frame",
               "0", "--algo", "clique,louvain", "--out", out.string()}) == 0);
  const fs::path clique = out / "clusters_clique_frame0.json";
  const fs::path louv = out / "clusters_louvain_frame0.json";
  REQUIRE(fs::exists(clique));
  REQUIRE(fs::exists(louv));

  const nlohmann::json j = nlohmann::json::parse(slurp(clique.string()));
  CHECK(j.at("algorithm") == "clique");
  CHECK(j.at("window").at("start") == 0);
  CHECK(j.at("window").at("T") == 1);
  CHECK(j.at("window").at("tau") == 1);
  // Two planted groups of three users, named by id.
  REQUIRE(j.at("clusters").size() == 2);
  std::vector<std::string> first = j.at("clusters")[0];
  CHECK(first == std::vector<std::string>{"u00", "u02", "u04"});
}

TEST_CASE("cluster in window mode tiles the video and can dump the graph") {
  const fs::path data = make_traces("cluster_win");
  const fs::path out = fresh_dir("cluster_win_out");
  // Explicit duration (the last trace timestamp is 1.8 s, so inference
  // would keep 9 frames): 10 frames at 5 fps; T = 1 s -> 5 frames -> 2
  // windows.
  REQUIRE(cli({"cluster", "--input", (data / "traces.csv").string(), "--fps", "5", "--duration",
               "2", "--T", "1", "--tau", "0.6", "--algo", "clique", "--dump-affinity", "--out",
               out.string()}) == 0);
  REQUIRE(fs::exists(out / "clusters_clique_win0000.json"));
  REQUIRE(fs::exists(out / "clusters_clique_win0001.json"));
  CHECK_FALSE(fs::exists(out / "clusters_clique_win0002.json"));
  REQUIRE(fs::exists(out / "affinity_win0000.csv"));
  const std::string edges = slurp((out / "affinity_win0000.csv").string());
  CHECK(edges.rfind("i,j\n", 0) == 0);
  // The planted pairs stay adjacent all window: at least the two triangles.
  CHECK(std::count(edges.begin(), edges.end(), '\n') >= 1 + 6);

  // Byte-identical rerun.
  const fs::path out2 = fresh_dir("cluster_win_out2");
  REQUIRE(cli({"cluster", "--input", (data / "traces.csv").string(), "--fps", "5", "--duration",
               "2", "--T", "1", "--tau", "0.6", "--algo", "clique", "--dump-affinity", "--out",
               out2.string()}) == 0);
  CHECK(slurp((out / "clusters_clique_win0000.json").string()) ==
        slurp((out2 / "clusters_clique_win0000.json").string()));
  CHECK(slurp((out / "affinity_win0000.csv").string()) ==
        slurp((out2 / "affinity_win0000.csv").string()));
}

TEST_CASE("cluster input and flag failures map to documented exit codes") {
  const fs::path out = fresh_dir("cluster_bad");
  // Missing input file: data error.
  CHECK(cli({"cluster", "--input", (out / "nope.csv").string(), "--out", out.string()}) == 3);
  const fs::path data = make_traces("cluster_bad_data");
  const std::string traces = (data / "traces.csv").string();
  // Unknown algorithm: config error.
  CHECK(cli({"cluster", "--input", traces, "--fps", "5", "--algo", "dbscan", "--out",
             out.string()}) == 2);
  // g_th outside (0, pi]: config error.
  CHECK(cli({"cluster", "--input", traces, "--fps", "5", "--g-th", "4.0", "--out",
             out.string()}) == 2);
  CHECK(cli({"cluster", "--input", traces, "--fps", "5", "--g-th", "banana", "--out",
             out.string()}) == 2);
  // Frame outside the video: config error.
  CHECK(cli({"cluster", "--input", traces, "--fps", "5", "--frame", "99", "--out",
             out.string()}) == 2);
  // T longer than the video: config error.
  CHECK(cli({"cluster", "--input", traces, "--fps", "5", "--T", "60", "--out",
             out.string()}) == 2);
  // Malformed trace content: data error.
  const fs::path broken = out / "broken.csv";
  write_file(broken, "user_id,timestamp_s,qw,qx,qy,qz\nu,0.0,not_a_number,0,0,0\n");
  CHECK(cli({"cluster", "--input", broken.string(), "--fps", "5", "--out", out.string()}) == 3);
}

TEST_CASE("calibrate writes the curve and fails cleanly on one-class data") {
  const fs::path data = make_traces("calib");
  const fs::path out = fresh_dir("calib_out");
  REQUIRE(cli({"calibrate", "--input", (data / "traces.csv").string(), "--fps", "5", "--stride",
               "2", "--grid", "2000", "--out", out.string()}) == 0);
  REQUIRE(fs::exists(out / "roc.csv"));
  REQUIRE(fs::exists(out / "calibration.json"));
  const std::string roc = slurp((out / "roc.csv").string());
  CHECK(roc.rfind("threshold_rad,tpr,fpr\n", 0) == 0);
  CHECK(std::count(roc.begin(), roc.end(), '\n') == 1 + 64);
  const nlohmann::json j = nlohmann::json::parse(slurp((out / "calibration.json").string()));
  CHECK(j.at("tpr_one_reached") == true);
  CHECK(j.at("o_th") == 0.8);
  CHECK(j.at("g_th").get<double>() > 0.0);

  // Identical viewers everywhere: every pair is a positive, the ROC is
  // undefined, and the run exits with the data-error code.
  const fs::path flat = out / "flat.csv";
  write_file(flat,
             "user_id,timestamp_s,qw,qx,qy,qz\n"
             "a,0.0,1,0,0,0\na,1.0,1,0,0,0\n"
             "b,0.0,1,0,0,0\nb,1.0,1,0,0,0\n");
  CHECK(cli({"calibrate", "--input", flat.string(), "--fps", "2", "--out", out.string()}) == 3);
}

TEST_CASE("evaluate produces the report, series, and summary with ARI") {
  const fs::path data = make_traces("eval");
  const fs::path out = fresh_dir("eval_out");
  REQUIRE(cli({"evaluate", "--input", (data / "traces.csv").string(), "--fps", "5", "--duration",
               "2", "--T", "1", "--tau", "0.6", "--algo", "clique,louvain", "--grid", "2000",
               "--ground-truth", (data / "ground_truth.csv").string(), "--out",
               out.string()}) == 0);
  REQUIRE(fs::exists(out / "report.csv"));
  REQUIRE(fs::exists(out / "summary.csv"));
  REQUIRE(fs::exists(out / "series_clique.csv"));
  REQUIRE(fs::exists(out / "series_louvain.csv"));

  const std::string report = slurp((out / "report.csv").string());
  CHECK(report.rfind("algorithm,start_frame,frames,tau_frames,k,mean_overlap_ge3,covered_ge3,"
                     "main_overlap,main_population,ari\n",
                     0) == 0);
  // 2 algorithms x 2 windows of data rows; the planted split is exact, so
  // every row carries k=3 clusters... the planted data has 2 groups:
  // expect k=2 and ARI=1 on each row.
  CHECK(std::count(report.begin(), report.end(), '\n') == 1 + 4);
  CHECK(report.find(",1\n") != std::string::npos);  // a perfect-ARI row exists
  CHECK(report.find("clique,0,5,3,2,") != std::string::npos);

  const std::string series = slurp((out / "series_clique.csv").string());
  CHECK(series.rfind("frame,mean_overlap,var_overlap\n", 0) == 0);
  CHECK(std::count(series.begin(), series.end(), '\n') == 1 + 10);

  const std::string summary = slurp((out / "summary.csv").string());
  CHECK(summary.rfind("algorithm,mean_overlap_gt3\n", 0) == 0);

  // Byte-identical rerun into a second directory.
  const fs::path out2 = fresh_dir("eval_out2");
  REQUIRE(cli({"evaluate", "--input", (data / "traces.csv").string(), "--fps", "5", "--duration",
               "2", "--T", "1", "--tau", "0.6", "--algo", "clique,louvain", "--grid", "2000",
               "--ground-truth", (data / "ground_truth.csv").string(), "--out",
               out2.string()}) == 0);
  CHECK(report == slurp((out2 / "report.csv").string()));
  CHECK(series == slurp((out2 / "series_clique.csv").string()));
}

TEST_CASE("evaluate accepts external clustering files and algo none") {
  const fs::path data = make_traces("eval_ext");
  const fs::path cluster_out = fresh_dir("eval_ext_cluster");
  REQUIRE(cli({"cluster", "--input", (data / "traces.csv").string(), "--fps", "5", "--frame",
               "1", "--algo", "clique", "--out", cluster_out.string()}) == 0);
  const fs::path external = cluster_out / "clusters_clique_frame1.json";
  REQUIRE(fs::exists(external));

  const fs::path out = fresh_dir("eval_ext_out");
  REQUIRE(cli({"evaluate", "--input", (data / "traces.csv").string(), "--fps", "5", "--algo",
               "none", "--clustering", external.string(), "--grid", "1000", "--ground-truth",
               (data / "ground_truth.csv").string(), "--out", out.string()}) == 0);
  const std::string report = slurp((out / "report.csv").string());
  // Header plus exactly the one external row, which scores a perfect ARI.
  CHECK(std::count(report.begin(), report.end(), '\n') == 2);
  CHECK(report.find("clique,1,1,1,2,") != std::string::npos);
  CHECK(report.find(",1\n") != std::string::npos);
  CHECK_FALSE(fs::exists(out / "summary.csv"));  // no windowed algorithms ran

  // A clustering file over different users is a data error.
  const fs::path foreign = out / "foreign.json";
  write_file(foreign,
             R"({"algorithm":"clique","clusters":[["x1"],["x2"]],)"
             R"("window":{"start":0,"T":1,"tau":1}})");
  CHECK(cli({"evaluate", "--input", (data / "traces.csv").string(), "--fps", "5", "--algo",
             "none", "--clustering", foreign.string(), "--out", out.string()}) == 3);
  // No algorithms and no files: config error.
  CHECK(cli({"evaluate", "--input", (data / "traces.csv").string(), "--fps", "5", "--algo",
             "none", "--out", out.string()}) == 2);
}

TEST_CASE("config file supplies defaults and flags win") {
  const fs::path dir = fresh_dir("config");
  const fs::path cfg = dir / "cfg.json";
  write_file(cfg, R"({"users": 6, "clusters": 2, "seed": 9, "duration": 1, "fps": 4})");

  const fs::path out_a = fresh_dir("config_a");
  REQUIRE(cli({"synth", "--config", cfg.string(), "--out", out_a.string()}) == 0);
  const std::string traces_a = slurp((out_a / "traces.csv").string());
  CHECK(traces_a.find("u05,") != std::string::npos);
  CHECK(traces_a.find("u06,") == std::string::npos);
  CHECK(std::count(traces_a.begin(), traces_a.end(), '\n') == 1 + 6 * 4);

  // An explicit flag beats the config value.
  const fs::path out_b = fresh_dir("config_b");
  REQUIRE(cli({"synth", "--config", cfg.string(), "--users", "4", "--out", out_b.string()}) == 0);
  const std::string traces_b = slurp((out_b / "traces.csv").string());
  CHECK(traces_b.find("u03,") != std::string::npos);
  CHECK(traces_b.find("u04,") == std::string::npos);

  // Unknown keys and unreadable files are config errors.
  const fs::path bad = dir / "bad.json";
  write_file(bad, R"({"bogus": 1})");
  CHECK(cli({"synth", "--config", bad.string(), "--out", out_a.string()}) == 2);
  const fs::path mangled = dir / "mangled.json";
  write_file(mangled, "{not json");
  CHECK(cli({"synth", "--config", mangled.string(), "--out", out_a.string()}) == 2);
  CHECK(cli({"synth", "--config", (dir / "missing.json").string(), "--out", out_a.string()}) ==
        2);
}

TEST_CASE("output directory falls back to the environment variable") {
  const fs::path dir = fresh_dir("envdir");
  REQUIRE(setenv("VPCLUST_OUT_DIR", dir.string().c_str(), 1) == 0);
  const int rc = cli({"synth", "--users", "3", "--clusters", "2", "--duration", "1", "--fps",
                      "2", "--seed", "1"});
  REQUIRE(unsetenv("VPCLUST_OUT_DIR") == 0);
  REQUIRE(rc == 0);
  CHECK(fs::exists(dir / "traces.csv"));
  CHECK(fs::exists(dir / "ground_truth.csv"));
}
