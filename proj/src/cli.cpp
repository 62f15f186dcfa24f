#include "vpclust/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "vpclust/calibration.hpp"
#include "vpclust/evaluation.hpp"
#include "vpclust/io.hpp"
#include "vpclust/util.hpp"

namespace fs = std::filesystem;

namespace vpc {

namespace {

constexpr double kDefaultGth = std::numbers::pi / 10.0;  // calibrated default threshold

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

/// Wires one subcommand's options so values can also arrive from a JSON
/// config file (command-line flags win) and, for the output directory, from
/// the VPCLUST_OUT_DIR environment variable.
class ConfigurableCommand {
public:
  explicit ConfigurableCommand(CLI::App* cmd) : cmd_(cmd) {
    cmd_->add_option("--config", config_path_,
                     "JSON config file; keys are long option names, explicit flags win");
  }

  template <typename T>
  CLI::Option* bind(const std::string& flag, T& target, const std::string& desc) {
    CLI::Option* opt = cmd_->add_option(flag, target, desc);
    setters_[key_of(flag)] = {opt, [&target](const nlohmann::json& v) { target = v.get<T>(); }};
    return opt;
  }

  CLI::Option* bind_flag(const std::string& flag, bool& target, const std::string& desc) {
    CLI::Option* opt = cmd_->add_flag(flag, target, desc);
    setters_[key_of(flag)] = {opt, [&target](const nlohmann::json& v) { target = v.get<bool>(); }};
    return opt;
  }

  /// The bound output-directory option gets the env-var / "." fallback.
  void bind_outdir(std::string& target) {
    bind("--out,-o", target, "output directory (default: $VPCLUST_OUT_DIR, else current dir)");
    outdir_ = &target;
  }

  /// Call at the top of the command body, after CLI11 parsing.
  void apply_config_and_env() const {
    if (!config_path_.empty()) {
      std::ifstream in(config_path_);
      if (!in) throw ConfigError("cannot open config file '" + config_path_ + "'");
      nlohmann::json obj;
      try {
        obj = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed config file '" + config_path_ + "': " + e.what());
      }
      if (!obj.is_object())
        throw ConfigError("config file '" + config_path_ + "' must hold a JSON object");
      for (const auto& [key, value] : obj.items()) {
        const auto it = setters_.find(key);
        if (it == setters_.end())
          throw ConfigError("config file: unknown key '" + key + "'");
        if (it->second.option->count() == 0) {
          try {
            it->second.assign(value);
          } catch (const nlohmann::json::exception&) {
            throw ConfigError("config file: bad value for '" + key + "'");
          }
        }
      }
    }
    if (outdir_ && outdir_->empty()) {
      const char* env = std::getenv("VPCLUST_OUT_DIR");
      *outdir_ = (env && *env) ? env : ".";
    }
  }

private:
  static std::string key_of(const std::string& flag) {
    std::string first = flag.substr(0, flag.find(','));
    return first.substr(first.find_first_not_of('-'));
  }

  struct Setter {
    CLI::Option* option;
    std::function<void(const nlohmann::json&)> assign;
  };
  CLI::App* cmd_;
  std::map<std::string, Setter> setters_;
  std::string config_path_;
  std::string* outdir_ = nullptr;
};

ViewportSpec spec_from_degrees(double fov_h_deg, double fov_v_deg) {
  if (!(fov_h_deg > 0.0 && fov_h_deg < 180.0) || !(fov_v_deg > 0.0 && fov_v_deg < 180.0))
    throw ConfigError("field of view must lie strictly between 0 and 180 degrees");
  return ViewportSpec(deg2rad(fov_h_deg), deg2rad(fov_v_deg));
}

fs::path ensure_outdir(const std::string& out) {
  try {
    fs::create_directories(out);
  } catch (const fs::filesystem_error& e) {
    throw ConfigError("cannot create output directory '" + out + "': " + e.what());
  }
  return fs::path(out);
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t comma = csv.find(',', pos);
    std::string token = csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const std::size_t b = token.find_first_not_of(" \t");
    const std::size_t e = token.find_last_not_of(" \t");
    token = b == std::string::npos ? "" : token.substr(b, e - b + 1);
    if (token.empty()) throw ConfigError("empty entry in list '" + csv + "'");
    out.push_back(std::move(token));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

TraceDataset load_dataset(const std::string& input, double fps, double duration) {
  if (input.empty()) throw ConfigError("--input is required");
  if (!(fps > 0.0) || !std::isfinite(fps)) throw ConfigError("--fps must be positive");
  const std::vector<RawSample> samples = load_traces(input);
  double dur = duration;
  if (!(dur > 0.0)) {
    // Infer from the data: span up to the last timestamp, at least one frame.
    double max_t = 0.0;
    for (const RawSample& s : samples) max_t = std::max(max_t, s.timestamp_s);
    dur = std::max(max_t, 1.0 / fps);
  }
  return synchronize(samples, fps, dur);
}

/// Shared knobs for the cluster/evaluate pipelines.
struct PipelineOpts {
  std::string input;
  double fps = 30.0;
  double duration = 0.0;  // 0: infer from the last timestamp
  std::string g_th;       // "": default pi/10; "auto": calibrate; else radians
  double o_th = 0.8;
  int stride = 5;
  int thresholds = 64;
  double fov_h = 100.0;
  double fov_v = 100.0;
  int grid = 10000;
  int frame = -1;  // >= 0: single-frame mode
  double t_s = 3.0;
  double tau_s = 1.8;
  std::string algo = "clique";
  std::uint64_t seed = 0;
  int kmeans_iters = 100;
  std::string out;

  void bind_common(ConfigurableCommand& cc) {
    cc.bind("--input,-i", input, "trace CSV (quaternion or yaw/pitch/roll header)");
    cc.bind("--fps", fps, "frame rate used to resample the traces [30]");
    cc.bind("--duration", duration, "video length in seconds; 0 infers it from the traces [0]");
    cc.bind("--o-th", o_th, "overlap fraction counted as 'same content' [0.8]");
    cc.bind("--stride", stride, "calibration samples every Nth frame [5]");
    cc.bind("--thresholds", thresholds, "calibration threshold-grid size [64]");
    cc.bind("--fov-h", fov_h, "horizontal field of view, degrees [100]");
    cc.bind("--fov-v", fov_v, "vertical field of view, degrees [100]");
    cc.bind("--grid", grid, "sphere-grid size for overlap estimates [10000]");
    cc.bind("--seed", seed, "RNG seed for louvain/k-means [0]");
    cc.bind("--kmeans-iters", kmeans_iters, "k-means iteration cap [100]");
    cc.bind_outdir(out);
  }

  void bind_clustering(ConfigurableCommand& cc) {
    cc.bind("--g-th", g_th,
            "distance threshold in radians, or 'auto' to calibrate [pi/10 = 0.3141592...]");
    cc.bind("--frame", frame, "cluster a single frame index instead of windows");
    cc.bind("--T", t_s, "window length, seconds [3]");
    cc.bind("--tau", tau_s, "required neighbor time within a window, seconds [1.8]");
    cc.bind("--algo", algo, "comma list of clique,louvain,kmeans1,kmeans2 [clique]");
  }
};

double resolve_g_th(const PipelineOpts& o, const TraceDataset& dataset, const ViewportSpec& spec,
                    const SphereGrid& grid) {
  if (o.g_th.empty()) return kDefaultGth;
  if (o.g_th == "auto") {
    const CalibrationResult cal =
        calibrate(dataset, spec, grid, o.o_th, o.stride, default_threshold_grid(o.thresholds));
    std::cout << "calibrated g_th = " << format_double(cal.g_th)
              << (cal.tpr_one_reached ? "" : " (fallback: TPR never reached 1)") << "\n";
    return cal.g_th;
  }
  double v = 0.0;
  try {
    std::size_t pos = 0;
    v = std::stod(o.g_th, &pos);
    if (pos != o.g_th.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw ConfigError("--g-th expects radians or 'auto', got '" + o.g_th + "'");
  }
  if (!(v > 0.0 && v <= std::numbers::pi))
    throw ConfigError("--g-th must lie in (0, pi] radians");
  return v;
}

std::string window_tag(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "win%04d", index);
  return buf;
}

// ---------------------------------------------------------------- synth ----

struct SynthOpts {
  SynthConfig cfg;
  std::string out;
};

void run_synth(const SynthOpts& o) {
  const SynthResult res = synth_traces(o.cfg);  // validates the config first
  const fs::path dir = ensure_outdir(o.out);
  const fs::path traces = dir / "traces.csv";
  const fs::path truth = dir / "ground_truth.csv";
  write_trace_csv(traces.string(), res.dataset);
  write_ground_truth_csv(truth.string(), res.dataset.user_ids(), res.ground_truth);
  std::cout << "wrote " << traces.string() << "\n" << "wrote " << truth.string() << "\n";
}

// ------------------------------------------------------------ calibrate ----

void run_calibrate(const PipelineOpts& o) {
  const ViewportSpec spec = spec_from_degrees(o.fov_h, o.fov_v);
  if (o.grid < 1) throw ConfigError("--grid must be >= 1");
  if (o.stride < 1) throw ConfigError("--stride must be >= 1");
  if (!(o.o_th > 0.0 && o.o_th < 1.0)) throw ConfigError("--o-th must lie strictly inside (0, 1)");
  if (o.thresholds < 1) throw ConfigError("--thresholds must be >= 1");

  const TraceDataset dataset = load_dataset(o.input, o.fps, o.duration);
  const SphereGrid grid = SphereGrid::fibonacci(o.grid);
  const CalibrationResult result =
      calibrate(dataset, spec, grid, o.o_th, o.stride, default_threshold_grid(o.thresholds));

  const fs::path dir = ensure_outdir(o.out);
  const fs::path roc = dir / "roc.csv";
  const fs::path summary = dir / "calibration.json";
  write_roc_csv(roc.string(), result.curve);
  write_calibration_json(summary.string(), result);
  std::cout << "g_th = " << format_double(result.g_th)
            << (result.tpr_one_reached ? "" : " (fallback: TPR never reached 1)") << "\n"
            << "wrote " << roc.string() << "\n"
            << "wrote " << summary.string() << "\n";
}

// -------------------------------------------------------------- cluster ----

struct ClusterOpts : PipelineOpts {
  bool dump_affinity = false;
};

AffinityMatrix window_affinity(const TraceDataset& dataset, int start, int t_frames,
                               int tau_frames, double g_th) {
  std::vector<FrameGraph> graphs;
  graphs.reserve(static_cast<std::size_t>(t_frames));
  for (int f = start; f < start + t_frames; ++f)
    graphs.push_back(build_frame_graph(dataset.frame_orientations(f), g_th));
  return build_affinity(graphs, tau_frames, start);
}

void run_cluster(const ClusterOpts& o) {
  const ViewportSpec spec = spec_from_degrees(o.fov_h, o.fov_v);
  if (o.grid < 1) throw ConfigError("--grid must be >= 1");
  const std::vector<std::string> algos = split_list(o.algo);
  validate_algorithms(algos);
  if (o.kmeans_iters < 1) throw ConfigError("--kmeans-iters must be >= 1");

  const TraceDataset dataset = load_dataset(o.input, o.fps, o.duration);
  const SphereGrid grid = SphereGrid::fibonacci(o.grid);  // used only by --g-th auto
  const double g_th = resolve_g_th(o, dataset, spec, grid);

  int t_frames = 1, tau_frames = 1;
  std::vector<int> starts;
  if (o.frame >= 0) {
    if (o.frame >= dataset.n_frames())
      throw ConfigError("--frame " + std::to_string(o.frame) + " is outside the " +
                        std::to_string(dataset.n_frames()) + "-frame video");
    starts = {o.frame};
  } else {
    t_frames = seconds_to_frames(o.t_s, dataset.frame_rate());
    tau_frames = seconds_to_frames(o.tau_s, dataset.frame_rate());
    if (t_frames < 1 || t_frames > dataset.n_frames())
      throw ConfigError("--T must lie within the video duration");
    if (tau_frames < 1 || tau_frames > t_frames)
      throw ConfigError("--tau must lie in (0, T] after frame conversion");
    starts = window_starts(dataset.n_frames(), t_frames);
  }

  const fs::path dir = ensure_outdir(o.out);
  int written = 0;
  for (std::size_t idx = 0; idx < starts.size(); ++idx) {
    const int start = starts[idx];
    const std::string tag =
        o.frame >= 0 ? "frame" + std::to_string(o.frame) : window_tag(static_cast<int>(idx));
    const std::vector<Clustering> results =
        cluster_window(dataset, start, t_frames, tau_frames, g_th, algos, o.seed, o.kmeans_iters);
    for (const Clustering& c : results) {
      const fs::path file = dir / ("clusters_" + c.algorithm + "_" + tag + ".json");
      write_clustering_json(file.string(), c, dataset.user_ids());
      ++written;
    }
    if (o.dump_affinity) {
      const AffinityMatrix a = window_affinity(dataset, start, t_frames, tau_frames, g_th);
      write_edge_list_csv((dir / ("affinity_" + tag + ".csv")).string(), a.adj);
    }
  }
  std::cout << "wrote " << written << " clustering file(s) for " << starts.size()
            << " window(s) into " << dir.string() << "\n";
}

// ------------------------------------------------------------- evaluate ----

struct EvaluateOpts : PipelineOpts {
  std::vector<std::string> clustering_files;
  std::string ground_truth;
};

std::vector<int> truth_labels(const std::string& path, const std::vector<std::string>& user_ids) {
  const std::map<std::string, int> by_id = read_ground_truth_csv(path);
  std::vector<int> labels;
  labels.reserve(user_ids.size());
  for (const std::string& id : user_ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end())
      throw DataError(path + ": no ground-truth label for user '" + id + "'");
    labels.push_back(it->second);
  }
  return labels;
}

void run_evaluate(const EvaluateOpts& o) {
  const ViewportSpec spec = spec_from_degrees(o.fov_h, o.fov_v);
  if (o.grid < 1) throw ConfigError("--grid must be >= 1");
  if (o.kmeans_iters < 1) throw ConfigError("--kmeans-iters must be >= 1");
  std::vector<std::string> algos = split_list(o.algo);
  if (algos.size() == 1 && algos[0] == "none")
    algos.clear();  // evaluate only externally supplied clustering files
  else
    validate_algorithms(algos);
  if (algos.empty() && o.clustering_files.empty())
    throw ConfigError("nothing to evaluate: no algorithms and no --clustering files");

  const TraceDataset dataset = load_dataset(o.input, o.fps, o.duration);
  const SphereGrid grid = SphereGrid::fibonacci(o.grid);
  const double g_th = algos.empty() ? kDefaultGth : resolve_g_th(o, dataset, spec, grid);

  std::optional<std::vector<int>> truth;
  if (!o.ground_truth.empty()) truth = truth_labels(o.ground_truth, dataset.user_ids());
  const auto ari_of = [&](const Clustering& c) -> std::optional<double> {
    if (!truth) return std::nullopt;
    const std::vector<int> labels = labels_from_clustering(c, dataset.n_users());
    return adjusted_rand_index(labels, *truth);
  };

  // External clustering files are validated before anything is written.
  std::vector<Clustering> external;
  for (const std::string& path : o.clustering_files) {
    Clustering c = read_clustering_json(path, dataset.user_ids());
    try {
      validate_clustering(c, dataset.n_users());
    } catch (const std::logic_error& e) {
      throw DataError(path + ": invalid clustering: " + e.what());
    }
    external.push_back(std::move(c));
  }

  const fs::path dir = ensure_outdir(o.out);
  std::vector<ReportRow> rows;
  std::vector<SummaryRow> summaries;
  std::vector<fs::path> series_files;

  if (o.frame >= 0) {
    if (o.frame >= dataset.n_frames())
      throw ConfigError("--frame " + std::to_string(o.frame) + " is outside the " +
                        std::to_string(dataset.n_frames()) + "-frame video");
    if (!algos.empty()) {
      const std::vector<Orientation> frame = dataset.frame_orientations(o.frame);
      for (const Clustering& c :
           cluster_frame(dataset, o.frame, g_th, algos, o.seed, o.kmeans_iters))
        rows.push_back(ReportRow{c.algorithm, o.frame, 1, 1,
                                 frame_metrics(c, frame, spec, grid), ari_of(c)});
    }
  } else if (!algos.empty()) {
    for (const std::string& algo_name : algos) {
      const WindowSeries ws = window_series(dataset, algo_name, o.t_s, o.tau_s, g_th, spec, grid,
                                            o.seed, o.kmeans_iters);
      for (const Clustering& c : ws.clusterings)
        rows.push_back(ReportRow{c.algorithm, c.window_start, c.window_length, c.tau,
                                 window_metrics(c, dataset, spec, grid), ari_of(c)});
      const fs::path series = dir / ("series_" + algo_name + ".csv");
      write_series_csv(series.string(), ws.points);
      series_files.push_back(series);
      summaries.push_back(SummaryRow{algo_name, ws.summary_mean_gt3});
    }
  }

  for (const Clustering& c : external)
    rows.push_back(ReportRow{c.algorithm, c.window_start, c.window_length, c.tau,
                             window_metrics(c, dataset, spec, grid), ari_of(c)});

  const fs::path report = dir / "report.csv";
  write_report_csv(report.string(), rows);
  std::cout << "wrote " << report.string() << "\n";
  if (!summaries.empty()) {
    const fs::path summary = dir / "summary.csv";
    write_summary_csv(summary.string(), summaries);
    std::cout << "wrote " << summary.string() << "\n";
  }
  for (const fs::path& p : series_files) std::cout << "wrote " << p.string() << "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"viewport-overlap clustering for 360-degree video head traces"};
  app.name("vpclust");
  app.require_subcommand(1);

  auto synth_opts = std::make_shared<SynthOpts>();
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic trace dataset");
  auto synth_cc = std::make_shared<ConfigurableCommand>(synth);
  synth_cc->bind("--users", synth_opts->cfg.n_users, "number of users [59]");
  synth_cc->bind("--clusters", synth_opts->cfg.n_clusters, "number of attractors [3]");
  synth_cc->bind("--duration", synth_opts->cfg.duration_s, "video length, seconds [10]");
  synth_cc->bind("--fps", synth_opts->cfg.frame_rate, "frame rate [30]");
  synth_cc->bind("--attractor-speed", synth_opts->cfg.attractor_speed,
                 "attractor drift, radians per second [0.1]");
  synth_cc->bind("--kappa", synth_opts->cfg.concentration,
                 "view-direction concentration around the attractor [1e6]");
  synth_cc->bind("--seed", synth_opts->cfg.rng_seed, "RNG seed [0]");
  synth_cc->bind_outdir(synth_opts->out);
  synth->callback([synth_opts, synth_cc]() {
    synth_cc->apply_config_and_env();
    run_synth(*synth_opts);
  });

  auto cal_opts = std::make_shared<PipelineOpts>();
  CLI::App* cal = app.add_subcommand("calibrate", "fit the distance threshold from overlap data");
  auto cal_cc = std::make_shared<ConfigurableCommand>(cal);
  cal_opts->bind_common(*cal_cc);
  cal->callback([cal_opts, cal_cc]() {
    cal_cc->apply_config_and_env();
    run_calibrate(*cal_opts);
  });

  auto clu_opts = std::make_shared<ClusterOpts>();
  CLI::App* clu = app.add_subcommand("cluster", "cluster users per frame or per window");
  auto clu_cc = std::make_shared<ConfigurableCommand>(clu);
  clu_opts->bind_common(*clu_cc);
  clu_opts->bind_clustering(*clu_cc);
  clu_cc->bind_flag("--dump-affinity", clu_opts->dump_affinity,
                    "also write each window's affinity edge list");
  clu->callback([clu_opts, clu_cc]() {
    clu_cc->apply_config_and_env();
    run_cluster(*clu_opts);
  });

  auto eva_opts = std::make_shared<EvaluateOpts>();
  CLI::App* eva = app.add_subcommand("evaluate", "report overlap metrics and time series");
  auto eva_cc = std::make_shared<ConfigurableCommand>(eva);
  eva_opts->bind_common(*eva_cc);
  eva_opts->bind_clustering(*eva_cc);
  eva_cc->bind("--clustering", eva_opts->clustering_files,
               "externally produced clustering JSON to include (repeatable)");
  eva_cc->bind("--ground-truth", eva_opts->ground_truth,
               "user_id,cluster_id CSV; adds an ARI column");
  eva->callback([eva_opts, eva_cc]() {
    eva_cc->apply_config_and_env();
    run_evaluate(*eva_opts);
  });

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the parse message
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}

}  // namespace vpc
