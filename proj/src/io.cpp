#include "vpclust/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "vpclust/util.hpp"

namespace vpc {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: identical bytes on any platform
  if (!out) throw DataError("cannot write file '" + path + "'");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw DataError("failed while writing file '" + path + "'");
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed JSON in '" + path + "': " + e.what());
  }
}

}  // namespace

void write_trace_csv(const std::string& path, const TraceDataset& dataset) {
  std::ofstream out = open_out(path);
  out << "user_id,timestamp_s,qw,qx,qy,qz\n";
  for (int u = 0; u < dataset.n_users(); ++u) {
    for (int f = 0; f < dataset.n_frames(); ++f) {
      const Orientation& o = dataset.at(u, f);
      out << dataset.user_ids()[static_cast<std::size_t>(u)] << ','
          << format_double(f / dataset.frame_rate()) << ',' << format_double(o.w()) << ','
          << format_double(o.x()) << ',' << format_double(o.y()) << ',' << format_double(o.z())
          << '\n';
    }
  }
  finish(out, path);
}

void write_ground_truth_csv(const std::string& path, const std::vector<std::string>& user_ids,
                            const std::vector<int>& labels) {
  if (user_ids.size() != labels.size())
    throw std::invalid_argument("ground truth: user and label counts differ");
  std::ofstream out = open_out(path);
  out << "user_id,cluster_id\n";
  for (std::size_t u = 0; u < user_ids.size(); ++u)
    out << user_ids[u] << ',' << labels[u] << '\n';
  finish(out, path);
}

std::map<std::string, int> read_ground_truth_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty ground-truth file");
  std::map<std::string, int> out;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos || comma == 0)
      throw DataError(path + ":" + std::to_string(line_no) + ": expected user_id,cluster_id");
    const std::string id = line.substr(0, comma);
    const std::string label = line.substr(comma + 1);
    int value = 0;
    const auto res = std::from_chars(label.data(), label.data() + label.size(), value);
    if (res.ec != std::errc{} || res.ptr != label.data() + label.size())
      throw DataError(path + ":" + std::to_string(line_no) + ": bad cluster id '" + label + "'");
    if (!out.emplace(id, value).second)
      throw DataError(path + ":" + std::to_string(line_no) + ": duplicate user '" + id + "'");
  }
  return out;
}

void write_roc_csv(const std::string& path, const std::vector<RocPoint>& curve) {
  std::ofstream out = open_out(path);
  out << "threshold_rad,tpr,fpr\n";
  for (const RocPoint& p : curve)
    out << format_double(p.threshold) << ',' << format_double(p.tpr) << ','
        << format_double(p.fpr) << '\n';
  finish(out, path);
}

void write_calibration_json(const std::string& path, const CalibrationResult& result) {
  nlohmann::json j;
  j["g_th"] = result.g_th;
  j["o_th"] = result.o_th;
  j["tpr_one_reached"] = result.tpr_one_reached;
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

void write_clustering_json(const std::string& path, const Clustering& clustering,
                           const std::vector<std::string>& user_ids) {
  nlohmann::json j;
  j["window"] = {{"start", clustering.window_start},
                 {"T", clustering.window_length},
                 {"tau", clustering.tau}};
  j["algorithm"] = clustering.algorithm;
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& members : clustering.clusters) {
    nlohmann::json ids = nlohmann::json::array();
    for (int u : members) {
      if (u < 0 || u >= static_cast<int>(user_ids.size()))
        throw std::invalid_argument("clustering refers to an unknown user index");
      ids.push_back(user_ids[static_cast<std::size_t>(u)]);
    }
    clusters.push_back(std::move(ids));
  }
  j["clusters"] = std::move(clusters);
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

Clustering read_clustering_json(const std::string& path,
                                const std::vector<std::string>& user_ids) {
  const nlohmann::json j = load_json(path);
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < user_ids.size(); ++i)
    index[user_ids[i]] = static_cast<int>(i);

  Clustering c;
  try {
    c.algorithm = j.at("algorithm").get<std::string>();
    const nlohmann::json& w = j.at("window");
    c.window_start = w.at("start").get<int>();
    c.window_length = w.at("T").get<int>();
    c.tau = w.at("tau").get<int>();
    for (const nlohmann::json& members : j.at("clusters")) {
      std::vector<int> cluster;
      for (const nlohmann::json& id : members) {
        const std::string name = id.get<std::string>();
        const auto it = index.find(name);
        if (it == index.end())
          throw DataError(path + ": clustering names unknown user '" + name + "'");
        cluster.push_back(it->second);
      }
      std::sort(cluster.begin(), cluster.end());
      c.clusters.push_back(std::move(cluster));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": clustering JSON missing or mistyped field: " + e.what());
  }
  return c;
}

void write_edge_list_csv(const std::string& path, const AdjacencyMatrix& adjacency) {
  std::ofstream out = open_out(path);
  out << "i,j\n";
  for (int i = 0; i < adjacency.n(); ++i)
    for (int j = i + 1; j < adjacency.n(); ++j)
      if (adjacency.at(i, j)) out << i << ',' << j << '\n';
  finish(out, path);
}

void write_report_csv(const std::string& path, const std::vector<ReportRow>& rows) {
  bool any_ari = false;
  for (const ReportRow& r : rows) any_ari = any_ari || r.ari.has_value();
  std::ofstream out = open_out(path);
  out << "algorithm,start_frame,frames,tau_frames,k,mean_overlap_ge3,covered_ge3,main_overlap,"
         "main_population";
  if (any_ari) out << ",ari";
  out << '\n';
  for (const ReportRow& r : rows) {
    out << r.algorithm << ',' << r.start_frame << ',' << r.frames << ',' << r.tau_frames << ','
        << r.metrics.k << ',';
    if (r.metrics.mean_overlap_ge3) out << format_double(*r.metrics.mean_overlap_ge3);
    out << ',' << format_double(r.metrics.covered_ge3) << ','
        << format_double(r.metrics.main_overlap) << ',' << format_double(r.metrics.main_population);
    if (any_ari) {
      out << ',';
      if (r.ari) out << format_double(*r.ari);
    }
    out << '\n';
  }
  finish(out, path);
}

void write_series_csv(const std::string& path, const std::vector<SeriesPoint>& points) {
  std::ofstream out = open_out(path);
  out << "frame,mean_overlap,var_overlap\n";
  for (const SeriesPoint& p : points) {
    out << p.frame << ',';
    if (p.mean_overlap) out << format_double(*p.mean_overlap);
    out << ',';
    if (p.var_overlap) out << format_double(*p.var_overlap);
    out << '\n';
  }
  finish(out, path);
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
  std::ofstream out = open_out(path);
  out << "algorithm,mean_overlap_gt3\n";
  for (const SummaryRow& r : rows) {
    out << r.algorithm << ',';
    if (r.mean_overlap_gt3) out << format_double(*r.mean_overlap_gt3);
    out << '\n';
  }
  finish(out, path);
}

}  // namespace vpc
