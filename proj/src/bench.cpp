#include "gdp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "gdp/error.hpp"
#include "gdp/gibbs.hpp"
#include "gdp/kmeans.hpp"
#include "gdp/scenario.hpp"
#include "gdp/svg.hpp"

namespace gdp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kMethods[] = {"gdp", "hdp-fork", "kmeans"};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(Errc::IoFailure, "cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) fail(Errc::IoFailure, "write to " + path + " failed");
}

void write_json(const std::string& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoFailure, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(Errc::SchemaMismatch, path + ": " + e.what());
  }
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string chains_path(const RunConfig& c) {
  return (fs::path(c.out_dir) / "chains.ndjson").string();
}

// Node count inferred as the largest id an edge mentions.
LayeredDag dag_from_edges(const std::vector<std::pair<int, int>>& edges) {
  int n = 0;
  for (auto [a, b] : edges) n = std::max({n, a, b});
  return layered_from_edges(n, edges);
}

}  // namespace

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  try {
    if (j.contains("mode")) c.mode = j.at("mode").get<std::string>();
    if (j.contains("scenario")) c.scenario = j.at("scenario").get<std::string>();
    if (j.contains("dataset")) c.dataset_dir = j.at("dataset").get<std::string>();
    if (j.contains("partition"))
      c.partition_path = j.at("partition").get<std::string>();
    if (j.contains("out")) c.out_dir = j.at("out").get<std::string>();
    if (j.contains("edges")) {
      for (const auto& e : j.at("edges"))
        c.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    }
    if (j.contains("fit")) c.fit_overrides = j.at("fit");
    if (j.contains("replicates")) c.replicates = j.at("replicates").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("paper_scale")) c.paper_scale = j.at("paper_scale").get<bool>();
  } catch (const json::exception& e) {
    fail(Errc::SchemaMismatch, std::string("config: ") + e.what());
  }
  if (c.mode != "gdp" && c.mode != "hdp-fork" && c.mode != "kmeans")
    fail(Errc::SchemaMismatch, "mode must be gdp, hdp-fork, or kmeans");
  if (c.replicates < 1)
    fail(Errc::SchemaMismatch, "replicates must be at least 1");
  return c;
}

RunConfig load_run_config(const std::string& path) {
  return run_config_from_json(read_json(path));
}

json run_config_to_json(const RunConfig& c) {
  json edges = json::array();
  for (auto [a, b] : c.edges) edges.push_back(json::array({a, b}));
  return json{{"mode", c.mode},
              {"scenario", c.scenario},
              {"dataset", c.dataset_dir},
              {"partition", c.partition_path},
              {"out", c.out_dir},
              {"edges", edges},
              {"fit", c.fit_overrides.is_null() ? json::object() : c.fit_overrides},
              {"replicates", c.replicates},
              {"seed", c.seed},
              {"paper_scale", c.paper_scale}};
}

std::string config_hash(const RunConfig& c) {
  // FNV-1a over the canonical echo; stable across runs and platforms.
  std::string s = run_config_to_json(c).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

GdpConfig resolve_fit_config(const RunConfig& c, int data_dim) {
  GdpConfig cfg;
  if (!c.scenario.empty() && is_known_scenario(c.scenario)) {
    cfg = scenario_fit_config(c.scenario, c.paper_scale);
  } else {
    cfg.niw = default_niw(2);
    cfg.mcmc.iterations = c.paper_scale ? 15000 : 3000;
    cfg.mcmc.burnin = c.paper_scale ? 5000 : 1000;
    cfg.mcmc.thinning = 1;
  }
  bool niw_pinned = false;
  const json& o = c.fit_overrides;
  if (o.is_object()) {
    try {
      if (o.contains("L")) cfg.L = o.at("L").get<int>();
      if (o.contains("alpha0")) cfg.alpha0 = o.at("alpha0").get<double>();
      if (o.contains("iterations"))
        cfg.mcmc.iterations = o.at("iterations").get<int>();
      if (o.contains("burnin")) cfg.mcmc.burnin = o.at("burnin").get<int>();
      if (o.contains("thinning")) cfg.mcmc.thinning = o.at("thinning").get<int>();
      if (o.contains("chains")) cfg.mcmc.chains = o.at("chains").get<int>();
      if (o.contains("niw")) {
        const json& nj = o.at("niw");
        auto mean = nj.at("mean").get<std::vector<double>>();
        cfg.niw.mean = Eigen::Map<Eigen::VectorXd>(mean.data(),
                                                   static_cast<long>(mean.size()));
        cfg.niw.kappa = nj.at("kappa").get<double>();
        auto scale = nj.at("scale").get<std::vector<std::vector<double>>>();
        cfg.niw.scale.resize(static_cast<long>(scale.size()),
                             static_cast<long>(scale.size()));
        for (std::size_t r = 0; r < scale.size(); ++r) {
          if (scale[r].size() != scale.size())
            fail(Errc::SchemaMismatch, "niw scale must be square");
          for (std::size_t col = 0; col < scale[r].size(); ++col)
            cfg.niw.scale(static_cast<long>(r), static_cast<long>(col)) =
                scale[r][col];
        }
        cfg.niw.dof = nj.at("dof").get<double>();
        niw_pinned = true;
      }
      if (o.contains("proposal")) {
        const json& pj = o.at("proposal");
        if (pj.contains("init_simplex_scale"))
          cfg.proposal.init_simplex_scale =
              pj.at("init_simplex_scale").get<double>();
        if (pj.contains("target_accept"))
          cfg.proposal.target_accept = pj.at("target_accept").get<double>();
        if (pj.contains("alpha_rw_scale"))
          cfg.proposal.alpha_rw_scale = pj.at("alpha_rw_scale").get<double>();
        if (pj.contains("adapt_window"))
          cfg.proposal.adapt_window = pj.at("adapt_window").get<int>();
      }
    } catch (const json::exception& e) {
      fail(Errc::SchemaMismatch, std::string("fit config: ") + e.what());
    }
  }
  if (data_dim > 0) {
    if (niw_pinned) {
      if (static_cast<int>(cfg.niw.mean.size()) != data_dim)
        fail(Errc::SchemaMismatch,
             "configured prior dimension does not match the dataset");
    } else if (static_cast<int>(cfg.niw.mean.size()) != data_dim) {
      cfg.niw = default_niw(data_dim);
    }
  }
  cfg.mcmc.seed = c.seed;
  validate_config(cfg);
  return cfg;
}

LayeredDag run_dag(const RunConfig& c, GroupedDataset& data) {
  if (c.mode == "hdp-fork") {
    // One hidden root over the groups; group g becomes node g+1 so the fork
    // is dense regardless of the original node ids.
    int g_count = data.group_count();
    for (int g = 0; g < g_count; ++g)
      data.group_node[static_cast<std::size_t>(g)] = g + 1;
    Dag flat = build_dag(g_count, {});
    AugmentedDag aug = augment_unique_root(flat);
    return layer_assignment(aug.dag, aug.hidden_root_added);
  }
  std::vector<std::pair<int, int>> edges =
      c.edges.empty() ? eight_group_edges() : c.edges;
  return dag_from_edges(edges);
}

void write_dataset(const std::string& dir, const GroupedDataset& data) {
  validate_dataset(data);
  fs::create_directories(dir);
  std::ostringstream index;
  index << "file,node\n";
  for (int g = 0; g < data.group_count(); ++g) {
    int node = data.group_node[static_cast<std::size_t>(g)];
    std::string fname = "group_" + std::to_string(node) + ".csv";
    index << fname << ',' << node << '\n';
    write_matrix_csv((fs::path(dir) / fname).string(),
                     data.groups[static_cast<std::size_t>(g)]);
    if (data.has_truth()) {
      std::vector<int> shifted;
      for (int z : data.true_labels[static_cast<std::size_t>(g)])
        shifted.push_back(z + 1);
      write_labels_csv(
          (fs::path(dir) / ("labels_" + std::to_string(node) + ".csv")).string(),
          shifted);
    }
  }
  write_text((fs::path(dir) / "groups.csv").string(), index.str());
}

GroupedDataset read_dataset(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "groups.csv");
  if (!in) fail(Errc::IoFailure, "cannot open " + dir + "/groups.csv");
  std::string line;
  if (!std::getline(in, line) || line != "file,node")
    fail(Errc::SchemaMismatch, dir + "/groups.csv must start with 'file,node'");

  GroupedDataset data;
  std::vector<std::string> label_files;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto comma = line.rfind(',');
    if (comma == std::string::npos)
      fail(Errc::SchemaMismatch, "bad groups.csv row: " + line);
    std::string fname = line.substr(0, comma);
    int node = 0;
    try {
      node = std::stoi(line.substr(comma + 1));
    } catch (const std::exception&) {
      fail(Errc::SchemaMismatch, "bad node id in groups.csv row: " + line);
    }
    data.groups.push_back(read_matrix_csv((fs::path(dir) / fname).string()));
    data.group_node.push_back(node);
    label_files.push_back(
        (fs::path(dir) / ("labels_" + std::to_string(node) + ".csv")).string());
  }
  if (data.groups.empty())
    fail(Errc::SchemaMismatch, dir + "/groups.csv lists no groups");
  data.dim = static_cast<int>(data.groups.front().cols());

  std::size_t with_labels = 0;
  for (const auto& lf : label_files)
    if (fs::exists(lf)) ++with_labels;
  if (with_labels == label_files.size()) {
    for (std::size_t g = 0; g < label_files.size(); ++g)
      data.true_labels.push_back(read_labels_csv(label_files[g]));
  } else if (with_labels != 0) {
    fail(Errc::SchemaMismatch,
         dir + " has truth labels for only some groups");
  }
  validate_dataset(data);
  return data;
}

void cmd_simulate(const RunConfig& c) {
  if (!is_known_scenario(c.scenario))
    fail(Errc::UnknownScenario, "scenario '" + c.scenario + "' is not built in");
  std::vector<std::pair<int, int>> edges =
      c.edges.empty() ? eight_group_edges() : c.edges;
  LayeredDag ldag = dag_from_edges(edges);
  Rng rng(c.seed);
  SyntheticData synth = generate_synthetic(ldag, scenario_spec(c.scenario), rng);

  fs::create_directories(c.out_dir);
  write_dataset(c.out_dir, synth.data);

  GdpConfig defaults = scenario_fit_config(c.scenario, c.paper_scale);
  json manifest;
  manifest["record"] = "dataset-manifest";
  manifest["library_version"] = kLibraryVersion;
  manifest["scenario"] = c.scenario;
  manifest["seed"] = c.seed;
  manifest["config_hash"] = config_hash(c);
  json jedges = json::array();
  for (auto [a, b] : edges) jedges.push_back(json::array({a, b}));
  manifest["edges"] = jedges;
  manifest["group_nodes"] = synth.data.group_node;
  json sizes = json::array();
  for (const auto& g : synth.data.groups) sizes.push_back(g.rows());
  manifest["sizes"] = sizes;
  manifest["fit_defaults"] = json{{"L", defaults.L},
                                  {"alpha0", defaults.alpha0},
                                  {"iterations", defaults.mcmc.iterations},
                                  {"burnin", defaults.mcmc.burnin},
                                  {"thinning", defaults.mcmc.thinning}};
  manifest["true_weights"] = synth.weights;
  write_json((fs::path(c.out_dir) / "manifest.json").string(), manifest);
  write_json((fs::path(c.out_dir) / "config.json").string(),
             run_config_to_json(c));
}

namespace {

json fit_echo(const RunConfig& c, const GdpConfig& cfg, const LayeredDag& ldag) {
  json jedges = json::array();
  for (auto [a, b] : ldag.dag.edges) jedges.push_back(json::array({a, b}));
  std::vector<double> mean(cfg.niw.mean.data(),
                           cfg.niw.mean.data() + cfg.niw.mean.size());
  return json{{"record", "fit-config"},
              {"library_version", kLibraryVersion},
              {"config_hash", config_hash(c)},
              {"mode", c.mode},
              {"L", cfg.L},
              {"alpha0", cfg.alpha0},
              {"iterations", cfg.mcmc.iterations},
              {"burnin", cfg.mcmc.burnin},
              {"thinning", cfg.mcmc.thinning},
              {"chains", cfg.mcmc.chains},
              {"seed", cfg.mcmc.seed},
              {"niw_mean", mean},
              {"niw_kappa", cfg.niw.kappa},
              {"niw_dof", cfg.niw.dof},
              {"dag_edges", jedges},
              {"root", ldag.root},
              {"hidden_root", ldag.hidden_root_added}};
}

}  // namespace

void cmd_fit(const RunConfig& c) {
  if (c.mode == "kmeans")
    fail(Errc::ConfigMismatch,
         "kmeans produces no chains; use the compare or metrics command");
  std::string src = c.dataset_dir.empty() ? c.out_dir : c.dataset_dir;
  GroupedDataset data = read_dataset(src);
  GdpConfig cfg = resolve_fit_config(c, data.dim);
  LayeredDag ldag = run_dag(c, data);

  GibbsEngine engine(ldag, cfg, data);
  std::vector<ChainSamples> chains = engine.run_chains();

  fs::create_directories(c.out_dir);
  write_chain_file(chains_path(c), chain_meta(engine), chains);
  write_json((fs::path(c.out_dir) / "fit_config.json").string(),
             fit_echo(c, cfg, ldag));
}

namespace {

// Pooled 0-based labels split back into per-group vectors by dataset sizes.
std::vector<std::vector<int>> split_by_group(const GroupedDataset& data,
                                             const std::vector<int>& pooled) {
  std::vector<std::vector<int>> out;
  std::size_t at = 0;
  for (const auto& g : data.groups) {
    auto n = static_cast<std::size_t>(g.rows());
    out.emplace_back(pooled.begin() + static_cast<long>(at),
                     pooled.begin() + static_cast<long>(at + n));
    at += n;
  }
  if (at != pooled.size())
    fail(Errc::LengthMismatch, "partition length does not match the dataset");
  return out;
}

std::string format_ari(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

void write_partition_csv(const std::string& path, const GroupedDataset& data,
                         const std::vector<std::vector<int>>& labels) {
  std::ostringstream out;
  out << "group,node,row,label\n";
  for (std::size_t g = 0; g < labels.size(); ++g)
    for (std::size_t i = 0; i < labels[g].size(); ++i)
      out << g << ',' << data.group_node[g] << ',' << i << ','
          << labels[g][i] + 1 << '\n';
  write_text(path, out.str());
}

MetricReport evaluate_partition(const std::string& method,
                                const GroupedDataset& data,
                                const std::vector<int>& pooled_labels,
                                double seconds) {
  MetricReport report;
  report.method = method;
  report.seconds = seconds;
  if (data.has_truth()) {
    std::vector<std::vector<int>> per_group = split_by_group(data, pooled_labels);
    for (std::size_t g = 0; g < per_group.size(); ++g)
      report.per_group_ari.push_back(
          adjusted_rand_index(data.true_labels[g], per_group[g]));
    report.pooled_ari =
        adjusted_rand_index(flatten_labels(data.true_labels), pooled_labels);
  } else {
    report.pooled_ari = std::numeric_limits<double>::quiet_NaN();
  }
  Eigen::MatrixXd pooled = pooled_matrix(data);
  // A collapsed partition has no internal indices; report them as missing
  // rather than aborting the whole comparison.
  try {
    report.chi = calinski_harabasz(pooled, pooled_labels);
    report.dbi = davies_bouldin(pooled, pooled_labels);
    report.si = silhouette(pooled, pooled_labels);
  } catch (const Error& e) {
    if (e.code() != Errc::DegenerateClustering) throw;
    report.chi = std::numeric_limits<double>::quiet_NaN();
    report.dbi = std::numeric_limits<double>::quiet_NaN();
    report.si = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

json metric_report_to_json(const MetricReport& r) {
  return json{{"method", r.method},       {"per_group_ari", r.per_group_ari},
              {"pooled_ari", r.pooled_ari}, {"chi", r.chi},
              {"dbi", r.dbi},             {"si", r.si},
              {"seconds", r.seconds}};
}

}  // namespace

void cmd_summarize(const RunConfig& c) {
  ChainFile file = read_chain_file(chains_path(c));
  if (file.chains.empty())
    fail(Errc::EmptyChains, chains_path(c) + " holds no chains");
  std::vector<std::vector<int>> draws = pooled_label_draws(file.chains);
  if (draws.empty())
    fail(Errc::EmptyChains, chains_path(c) + " holds no retained samples");

  std::string src = c.dataset_dir.empty() ? c.out_dir : c.dataset_dir;
  GroupedDataset data = read_dataset(src);
  for (std::size_t g = 0; g < file.meta.group_sizes.size(); ++g)
    if (g >= data.groups.size() ||
        data.groups[g].rows() != file.meta.group_sizes[g])
      fail(Errc::SchemaMismatch, "chain file does not match the dataset");

  Eigen::MatrixXd freq = coclustering(draws);
  DahlResult dahl = dahl_point_estimate(draws, freq);
  std::vector<std::vector<int>> labels = split_by_group(data, dahl.labels);

  fs::create_directories(c.out_dir);
  write_partition_csv((fs::path(c.out_dir) / "partition.csv").string(), data,
                      labels);
  write_matrix_csv((fs::path(c.out_dir) / "cocluster.csv").string(), freq);

  std::vector<std::vector<double>> traces;
  for (const auto& ch : file.chains) traces.push_back(ch.loglik_trace);
  write_text((fs::path(c.out_dir) / "trace.svg").string(), trace_svg(traces));

  std::vector<ScatterPanel> panels;
  json per_group_ari = json::array();
  for (std::size_t g = 0; g < labels.size(); ++g) {
    ScatterPanel panel;
    panel.title = "node " + std::to_string(data.group_node[g]);
    if (data.has_truth()) {
      double ari = adjusted_rand_index(data.true_labels[g], labels[g]);
      panel.title += " ARI=" + format_ari(ari);
      per_group_ari.push_back(ari);
    }
    panel.points = data.groups[g].leftCols(2);
    panel.labels = labels[g];
    panels.push_back(std::move(panel));
  }
  write_text((fs::path(c.out_dir) / "scatter.svg").string(), scatter_svg(panels));

  json summary;
  summary["record"] = "fit-summary";
  summary["library_version"] = kLibraryVersion;
  summary["chains"] = file.chains.size();
  summary["samples"] = draws.size();
  summary["dahl_sample_index"] = dahl.sample_index;
  summary["dahl_loss"] = dahl.loss;
  if (data.has_truth()) {
    summary["per_group_ari"] = per_group_ari;
    summary["pooled_ari"] =
        adjusted_rand_index(flatten_labels(data.true_labels), dahl.labels);
  }
  write_json((fs::path(c.out_dir) / "summary.json").string(), summary);
}

namespace {

// One MCMC fit reduced to its Dahl point partition.
std::vector<int> fit_point_partition(const RunConfig& c,
                                     const GroupedDataset& dataset,
                                     const std::string& rep_dir,
                                     const std::string& method) {
  RunConfig local = c;
  local.mode = method;
  local.out_dir = rep_dir;
  GroupedDataset data = dataset;
  GdpConfig cfg = resolve_fit_config(local, data.dim);
  LayeredDag ldag = run_dag(local, data);
  GibbsEngine engine(ldag, cfg, data);
  std::vector<ChainSamples> chains = engine.run_chains();
  write_chain_file(
      (fs::path(rep_dir) / ("chains_" + method + ".ndjson")).string(),
      chain_meta(engine), chains);
  std::vector<std::vector<int>> draws = pooled_label_draws(chains);
  DahlResult dahl = dahl_point_estimate(draws, coclustering(draws));
  return dahl.labels;
}

}  // namespace

ExperimentReport cmd_compare(const RunConfig& c) {
  if (!is_known_scenario(c.scenario))
    fail(Errc::UnknownScenario, "scenario '" + c.scenario + "' is not built in");

  ExperimentReport report;
  report.scenario = c.scenario;
  report.hash = config_hash(c);
  report.replicates = c.replicates;
  report.methods.assign(std::begin(kMethods), std::end(kMethods));

  std::vector<std::pair<int, int>> edges =
      c.edges.empty() ? eight_group_edges() : c.edges;
  LayeredDag ldag = dag_from_edges(edges);
  fs::create_directories(c.out_dir);

  for (int r = 0; r < c.replicates; ++r) {
    std::uint64_t rep_seed = c.seed + static_cast<std::uint64_t>(r);
    std::string rep_dir =
        (fs::path(c.out_dir) / ("rep_" + std::to_string(r))).string();
    fs::create_directories(rep_dir);

    Rng rng(rep_seed);
    SyntheticData synth =
        generate_synthetic(ldag, scenario_spec(c.scenario), rng);
    write_dataset(rep_dir, synth.data);

    RunConfig rep_cfg = c;
    rep_cfg.seed = rep_seed;
    for (const char* method : kMethods) {
      auto started = std::chrono::steady_clock::now();
      std::vector<int> pooled_labels;
      if (std::string(method) == "kmeans") {
        GdpConfig cfg = resolve_fit_config(rep_cfg, synth.data.dim);
        Rng krng(rep_seed);
        pooled_labels =
            kmeans(pooled_matrix(synth.data), cfg.L, 200, krng).labels;
      } else {
        pooled_labels =
            fit_point_partition(rep_cfg, synth.data, rep_dir, method);
      }
      double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        started)
              .count();
      write_partition_csv(
          (fs::path(rep_dir) / ("partition_" + std::string(method) + ".csv"))
              .string(),
          synth.data, split_by_group(synth.data, pooled_labels));
      MethodResult result;
      result.replicate = r;
      result.seed = rep_seed;
      result.metrics =
          evaluate_partition(method, synth.data, pooled_labels, seconds);
      report.results.push_back(std::move(result));
    }
  }

  std::vector<std::vector<double>> ari_series(report.methods.size());
  for (const MethodResult& res : report.results)
    for (std::size_t m = 0; m < report.methods.size(); ++m)
      if (res.metrics.method == report.methods[m])
        ari_series[m].push_back(res.metrics.pooled_ari);
  for (std::size_t m = 0; m < report.methods.size(); ++m)
    report.median_pooled_ari.emplace_back(report.methods[m],
                                          median_of(ari_series[m]));

  write_text((fs::path(c.out_dir) / "boxplot.svg").string(),
             boxplot_svg(report.methods, ari_series, "pooled ARI"));

  json jr;
  jr["record"] = "experiment-report";
  jr["library_version"] = kLibraryVersion;
  jr["scenario"] = report.scenario;
  jr["config_hash"] = report.hash;
  jr["replicates"] = report.replicates;
  jr["methods"] = report.methods;
  json rows = json::array();
  for (const MethodResult& res : report.results) {
    json row = metric_report_to_json(res.metrics);
    row["replicate"] = res.replicate;
    row["seed"] = res.seed;
    rows.push_back(row);
  }
  jr["results"] = rows;
  json medians;
  for (const auto& [method, value] : report.median_pooled_ari)
    medians[method] = value;
  jr["median_pooled_ari"] = medians;
  jr["config"] = run_config_to_json(c);
  write_json((fs::path(c.out_dir) / "report.json").string(), jr);
  return report;
}

MetricReport cmd_metrics(const RunConfig& c) {
  if (c.dataset_dir.empty())
    fail(Errc::ConfigMismatch, "metrics needs a dataset directory");
  GroupedDataset data = read_dataset(c.dataset_dir);
  std::string path = c.partition_path.empty()
                         ? (fs::path(c.out_dir) / "partition.csv").string()
                         : c.partition_path;

  std::ifstream in(path);
  if (!in) fail(Errc::IoFailure, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "group,node,row,label")
    fail(Errc::SchemaMismatch, path + " must start with 'group,node,row,label'");
  std::vector<std::vector<int>> labels(data.groups.size());
  for (std::size_t g = 0; g < labels.size(); ++g)
    labels[g].assign(static_cast<std::size_t>(data.groups[g].rows()), -1);
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    long vals[4];
    for (int f = 0; f < 4; ++f) {
      if (!std::getline(row, field, ','))
        fail(Errc::SchemaMismatch,
             path + " line " + std::to_string(line_no) + ": expected 4 fields");
      try {
        vals[f] = std::stol(field);
      } catch (const std::exception&) {
        fail(Errc::SchemaMismatch,
             path + " line " + std::to_string(line_no) + ": bad integer");
      }
    }
    if (vals[0] < 0 || vals[0] >= static_cast<long>(labels.size()) ||
        vals[2] < 0 ||
        vals[2] >= static_cast<long>(labels[static_cast<std::size_t>(vals[0])].size()))
      fail(Errc::SchemaMismatch,
           path + " line " + std::to_string(line_no) + ": row out of range");
    labels[static_cast<std::size_t>(vals[0])][static_cast<std::size_t>(vals[2])] =
        static_cast<int>(vals[3]);
  }
  for (const auto& g : labels)
    for (int z : g)
      if (z < 0)
        fail(Errc::SchemaMismatch, path + " does not cover every observation");

  MetricReport report =
      evaluate_partition("partition", data, flatten_labels(labels), 0.0);
  fs::create_directories(c.out_dir);
  write_json((fs::path(c.out_dir) / "metrics.json").string(),
             metric_report_to_json(report));
  return report;
}

}  // namespace gdp
