#pragma once

#include <map>
#include <utility>
#include <vector>

namespace gdp {

// Node ids are 1-based throughout; adjacency vectors keep slot 0 unused so
// ids can index directly.
struct Dag {
  int node_count = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<std::vector<int>> parents;   // [id] -> sorted parent ids
  std::vector<std::vector<int>> children;  // [id] -> sorted child ids
};

// Validates ids, rejects self-loops, duplicate edges, and cycles.
Dag build_dag(int node_count, const std::vector<std::pair<int, int>>& edges);

struct AugmentedDag {
  Dag dag;
  bool hidden_root_added = false;  // true iff a synthetic root was appended
};

// If the DAG already has a unique parentless node it is returned unchanged.
// Otherwise node node_count+1 is appended with an edge to every original
// root. Applying the operation twice equals applying it once.
AugmentedDag augment_unique_root(const Dag& dag);

struct LayeredDag {
  Dag dag;
  int root = 0;
  bool hidden_root_added = false;
  std::vector<int> layer;                  // [id]; root has layer 0
  int depth = 0;                           // max layer
  std::vector<std::vector<int>> by_layer;  // [k] -> node ids, ascending
  std::vector<int> topo;                   // layer-major topological order
};

// Requires a unique root. Every root->j path must have the same length
// (graded DAG); the common length becomes layer(j).
LayeredDag layer_assignment(const Dag& dag, bool hidden_root_added = false);

// Convenience: augment + layer in one call.
LayeredDag layered_from_edges(int node_count,
                              const std::vector<std::pair<int, int>>& edges);

// ancestor -> number of distinct directed paths of the queried length.
using AncestorMultiset = std::map<int, long long>;

// Generation-gen ancestors of j: all nodes reachable by walking exactly
// `gen` edges backwards, with multiplicity = path count. 1 <= gen <= layer(j).
AncestorMultiset ancestor_multiset(const LayeredDag& ldag, int j, int gen);

// Entry m-1 holds the generation-m ancestor multiset of j, m = 1..layer(j)-1.
// Entry 0 is the parent set (all multiplicities 1). The concentration of the
// hidden measure at depth m is the multiplicity-weighted alpha sum over
// entry m-1 (see concentration_sum).
struct HypernodeChain {
  int node = 0;
  std::vector<AncestorMultiset> entries;
};

// Empty chain for layer-1 nodes; the root has no chain at all.
HypernodeChain hypernode_chain(const LayeredDag& ldag, int j);

// Sum of multiplicity * alpha[ancestor] over the multiset.
double concentration_sum(const AncestorMultiset& ms,
                         const std::vector<double>& alpha);

}  // namespace gdp
