#pragma once

#include <string>
#include <vector>

#include "gdp/gibbs.hpp"

namespace gdp {

// Shape information written once per chain file; enough to rebuild every
// ChainState without the engine that produced it.
struct ChainFileMeta {
  int version = 1;
  int L = 0;
  int dim = 0;
  int nodes = 0;
  int root = 0;
  bool hidden_root = false;
  std::vector<int> group_nodes;   // [group] -> node id
  std::vector<long> group_sizes;  // [group] -> observation count
  std::vector<int> layers;        // [node id], slot 0 unused
  McmcSchedule schedule;          // run schedule with the base seed
};

ChainFileMeta chain_meta(const GibbsEngine& engine);

struct ChainFile {
  ChainFileMeta meta;
  std::vector<ChainSamples> chains;
};

// Newline-delimited records: one header line, then per chain one summary
// line (seed, acceptance rates, full log-likelihood trace) followed by one
// line per thinned sample. Numbers round-trip exactly.
void write_chain_file(const std::string& path, const ChainFileMeta& meta,
                      const std::vector<ChainSamples>& chains);

ChainFile read_chain_file(const std::string& path);

}  // namespace gdp
