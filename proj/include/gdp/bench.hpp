#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "gdp/chain_io.hpp"
#include "gdp/data.hpp"
#include "gdp/metrics.hpp"

namespace gdp {

inline constexpr const char* kLibraryVersion = "1.0.0";

// Orchestration settings shared by every subcommand. Unset fit fields fall
// back to the scenario's defaults (schedule, truncation, prior) so a config
// file only needs the keys it changes.
struct RunConfig {
  std::string mode = "gdp";  // "gdp" | "hdp-fork" | "kmeans"
  std::string scenario;      // built-in generator name; empty = external data
  std::string dataset_dir;   // input dataset directory (fit/summarize/metrics)
  std::string partition_path;  // labels under test for the metrics command
  std::string out_dir = "out";
  std::vector<std::pair<int, int>> edges;  // empty = eight-group default
  nlohmann::json fit_overrides;            // sparse overrides, may be null
  int replicates = 1;
  std::uint64_t seed = 1;
  bool paper_scale = false;
};

RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);
nlohmann::json run_config_to_json(const RunConfig& c);

// Stable hex digest of the canonical config echo; recorded in manifests.
std::string config_hash(const RunConfig& c);

// Scenario defaults (or library defaults for external data) merged with the
// config's sparse overrides. data_dim sizes the conjugate prior when the
// config does not pin one; an explicitly configured prior of the wrong
// dimension is a SchemaMismatch.
GdpConfig resolve_fit_config(const RunConfig& c, int data_dim);

// The DAG a fit runs on: the configured edges for "gdp", a single hidden
// root over all groups for "hdp-fork".
LayeredDag run_dag(const RunConfig& c, const GroupedDataset& data);

// Dataset directory layout: groups.csv maps per-group files to DAG nodes;
// group_<node>.csv holds observations; labels_<node>.csv (optional, all or
// none) holds 1-based truth labels.
void write_dataset(const std::string& dir, const GroupedDataset& data);
GroupedDataset read_dataset(const std::string& dir);

// Subcommand bodies. Each writes its artifacts under out_dir and is a pure
// function of (config, input files, seeds).
void cmd_simulate(const RunConfig& c);
void cmd_fit(const RunConfig& c);
void cmd_summarize(const RunConfig& c);

struct MethodResult {
  int replicate = 0;
  std::uint64_t seed = 0;
  MetricReport metrics;
};

struct ExperimentReport {
  std::string scenario;
  std::string hash;
  int replicates = 0;
  std::vector<std::string> methods;
  std::vector<MethodResult> results;  // replicate-major, method order as above
  std::vector<std::pair<std::string, double>> median_pooled_ari;
};

ExperimentReport cmd_compare(const RunConfig& c);

MetricReport cmd_metrics(const RunConfig& c);

}  // namespace gdp
