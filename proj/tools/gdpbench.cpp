#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <iostream>
#include <json.hpp>
#include <string>

#include "gdp/bench.hpp"
#include "gdp/error.hpp"
#include "gdp/scenario.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  std::string mode;
  std::string scenario;
  std::string dataset;
  std::string partition;
  std::uint64_t seed = 0;
  int replicates = 0;
  bool paper_scale = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON configuration file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "base random seed");
  cmd->add_option("--mode", f.mode, "model variant")
      ->check(CLI::IsMember({"gdp", "hdp-fork", "kmeans"}));
  cmd->add_option("--scenario", f.scenario, "built-in scenario name");
  cmd->add_option("--dataset", f.dataset, "input dataset directory");
  cmd->add_option("--partition", f.partition, "partition CSV for metrics");
  cmd->add_option("--replicates", f.replicates, "replicate count");
  cmd->add_flag("--paper-scale", f.paper_scale,
                "use the full published schedules instead of desk scale");
}

// Config file first, explicit flags on top.
gdp::RunConfig merge(const CLI::App* cmd, const CommonFlags& f) {
  gdp::RunConfig c;
  if (!f.config.empty()) c = gdp::load_run_config(f.config);
  if (cmd->count("--out")) c.out_dir = f.out;
  if (cmd->count("--seed")) c.seed = f.seed;
  if (cmd->count("--mode")) c.mode = f.mode;
  if (cmd->count("--scenario")) c.scenario = f.scenario;
  if (cmd->count("--dataset")) c.dataset_dir = f.dataset;
  if (cmd->count("--partition")) c.partition_path = f.partition;
  if (cmd->count("--replicates")) c.replicates = f.replicates;
  if (cmd->count("--paper-scale")) c.paper_scale = f.paper_scale;
  return c;
}

void print_error(const std::string& code, const std::string& message) {
  nlohmann::json record{{"error", {{"code", code}, {"message", message}}}};
  std::cerr << record.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graphical Dirichlet process mixtures: simulate, fit, compare"};
  app.require_subcommand(1);

  CommonFlags flags;
  CLI::App* simulate =
      app.add_subcommand("simulate", "generate a synthetic dataset");
  CLI::App* fit = app.add_subcommand("fit", "run the Gibbs sampler");
  CLI::App* summarize =
      app.add_subcommand("summarize", "point partition, plots, and summary");
  CLI::App* compare =
      app.add_subcommand("compare", "replicated GDP vs HDP vs k-means study");
  CLI::App* metrics =
      app.add_subcommand("metrics", "evaluate a stored partition");
  for (CLI::App* cmd : {simulate, fit, summarize, compare, metrics})
    add_common(cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    if (code != 0) print_error("UsageError", e.what());
    return code;
  }

  try {
    if (app.got_subcommand(simulate)) {
      gdp::RunConfig c = merge(simulate, flags);
      gdp::cmd_simulate(c);
      std::cout << "dataset written to " << c.out_dir << '\n';
    } else if (app.got_subcommand(fit)) {
      gdp::RunConfig c = merge(fit, flags);
      gdp::cmd_fit(c);
      std::cout << "chains written to " << c.out_dir << "/chains.ndjson\n";
    } else if (app.got_subcommand(summarize)) {
      gdp::RunConfig c = merge(summarize, flags);
      gdp::cmd_summarize(c);
      std::cout << "summary written to " << c.out_dir << '\n';
    } else if (app.got_subcommand(compare)) {
      gdp::RunConfig c = merge(compare, flags);
      gdp::ExperimentReport report = gdp::cmd_compare(c);
      std::cout << "report written to " << c.out_dir << "/report.json\n";
      for (const auto& [method, value] : report.median_pooled_ari)
        std::cout << "median pooled ARI " << method << ": " << value << '\n';
    } else if (app.got_subcommand(metrics)) {
      gdp::RunConfig c = merge(metrics, flags);
      gdp::MetricReport report = gdp::cmd_metrics(c);
      std::cout << "metrics written to " << c.out_dir << "/metrics.json"
                << " (pooled ARI " << report.pooled_ari << ")\n";
    }
  } catch (const gdp::Error& e) {
    print_error(gdp::errc_name(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("Unhandled", e.what());
    return 2;
  }
  return 0;
}
