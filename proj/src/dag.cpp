#include "gdp/dag.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <string>

#include "gdp/error.hpp"

namespace gdp {

Dag build_dag(int node_count, const std::vector<std::pair<int, int>>& edges) {
  if (node_count < 1) fail(Errc::NodeOutOfRange, "node_count must be positive");
  Dag d;
  d.node_count = node_count;
  d.parents.assign(static_cast<std::size_t>(node_count) + 1, {});
  d.children.assign(static_cast<std::size_t>(node_count) + 1, {});
  std::set<std::pair<int, int>> seen;
  for (auto [p, c] : edges) {
    if (p < 1 || p > node_count || c < 1 || c > node_count)
      fail(Errc::NodeOutOfRange,
           "edge (" + std::to_string(p) + "," + std::to_string(c) + ")");
    if (p == c) fail(Errc::SelfLoop, "node " + std::to_string(p));
    if (!seen.insert({p, c}).second)
      fail(Errc::DuplicateEdge,
           "edge (" + std::to_string(p) + "," + std::to_string(c) + ")");
    d.edges.emplace_back(p, c);
    d.parents[static_cast<std::size_t>(c)].push_back(p);
    d.children[static_cast<std::size_t>(p)].push_back(c);
  }
  for (int j = 1; j <= node_count; ++j) {
    std::sort(d.parents[static_cast<std::size_t>(j)].begin(),
              d.parents[static_cast<std::size_t>(j)].end());
    std::sort(d.children[static_cast<std::size_t>(j)].begin(),
              d.children[static_cast<std::size_t>(j)].end());
  }

  // Kahn's algorithm; leftover in-degree means a directed cycle.
  std::vector<int> indeg(static_cast<std::size_t>(node_count) + 1, 0);
  for (int j = 1; j <= node_count; ++j)
    indeg[static_cast<std::size_t>(j)] =
        static_cast<int>(d.parents[static_cast<std::size_t>(j)].size());
  std::deque<int> ready;
  for (int j = 1; j <= node_count; ++j)
    if (indeg[static_cast<std::size_t>(j)] == 0) ready.push_back(j);
  int removed = 0;
  while (!ready.empty()) {
    int j = ready.front();
    ready.pop_front();
    ++removed;
    for (int c : d.children[static_cast<std::size_t>(j)])
      if (--indeg[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
  }
  if (removed != node_count) fail(Errc::CycleDetected, "edge set has a cycle");
  return d;
}

static std::vector<int> find_roots(const Dag& dag) {
  std::vector<int> roots;
  for (int j = 1; j <= dag.node_count; ++j)
    if (dag.parents[static_cast<std::size_t>(j)].empty()) roots.push_back(j);
  return roots;
}

AugmentedDag augment_unique_root(const Dag& dag) {
  std::vector<int> roots = find_roots(dag);
  if (roots.size() == 1) return {dag, false};
  int fresh = dag.node_count + 1;
  std::vector<std::pair<int, int>> edges = dag.edges;
  for (int r : roots) edges.emplace_back(fresh, r);
  return {build_dag(fresh, edges), true};
}

LayeredDag layer_assignment(const Dag& dag, bool hidden_root_added) {
  std::vector<int> roots = find_roots(dag);
  if (roots.size() != 1)
    fail(Errc::ConfigMismatch, "layer_assignment needs a unique root; found " +
                                   std::to_string(roots.size()) +
                                   " (augment_unique_root first)");
  LayeredDag ld;
  ld.dag = dag;
  ld.root = roots[0];
  ld.hidden_root_added = hidden_root_added;
  ld.layer.assign(static_cast<std::size_t>(dag.node_count) + 1, -1);
  ld.layer[static_cast<std::size_t>(ld.root)] = 0;
  std::deque<int> queue{ld.root};
  while (!queue.empty()) {
    int j = queue.front();
    queue.pop_front();
    for (int c : dag.children[static_cast<std::size_t>(j)]) {
      if (ld.layer[static_cast<std::size_t>(c)] == -1) {
        ld.layer[static_cast<std::size_t>(c)] =
            ld.layer[static_cast<std::size_t>(j)] + 1;
        queue.push_back(c);
      }
    }
  }
  for (int j = 1; j <= dag.node_count; ++j)
    if (ld.layer[static_cast<std::size_t>(j)] == -1)
      fail(Errc::UnreachableNode, "node " + std::to_string(j));
  // Gradedness: every edge must step down exactly one layer, which is
  // equivalent to all root->j paths sharing one length.
  for (auto [p, c] : dag.edges)
    if (ld.layer[static_cast<std::size_t>(c)] !=
        ld.layer[static_cast<std::size_t>(p)] + 1)
      fail(Errc::NonGradedDag, "edge (" + std::to_string(p) + "," +
                                   std::to_string(c) +
                                   ") spans more than one layer");
  ld.depth = 0;
  for (int j = 1; j <= dag.node_count; ++j)
    ld.depth = std::max(ld.depth, ld.layer[static_cast<std::size_t>(j)]);
  ld.by_layer.assign(static_cast<std::size_t>(ld.depth) + 1, {});
  for (int j = 1; j <= dag.node_count; ++j)
    ld.by_layer[static_cast<std::size_t>(ld.layer[static_cast<std::size_t>(j)])]
        .push_back(j);
  for (auto& level : ld.by_layer) {
    std::sort(level.begin(), level.end());
    for (int j : level) ld.topo.push_back(j);
  }
  return ld;
}

LayeredDag layered_from_edges(int node_count,
                              const std::vector<std::pair<int, int>>& edges) {
  AugmentedDag aug = augment_unique_root(build_dag(node_count, edges));
  return layer_assignment(aug.dag, aug.hidden_root_added);
}

AncestorMultiset ancestor_multiset(const LayeredDag& ldag, int j, int gen) {
  if (j < 1 || j > ldag.dag.node_count)
    fail(Errc::NodeOutOfRange, "node " + std::to_string(j));
  int k = ldag.layer[static_cast<std::size_t>(j)];
  if (gen < 1 || gen > k)
    fail(Errc::GenerationOutOfRange,
         "generation " + std::to_string(gen) + " of node " + std::to_string(j) +
             " (layer " + std::to_string(k) + ")");
  // Walk `gen` edges backwards, accumulating path counts.
  AncestorMultiset cur{{j, 1}};
  for (int step = 0; step < gen; ++step) {
    AncestorMultiset next;
    for (auto [node, mult] : cur)
      for (int p : ldag.dag.parents[static_cast<std::size_t>(node)])
        next[p] += mult;
    cur = std::move(next);
  }
  return cur;
}

HypernodeChain hypernode_chain(const LayeredDag& ldag, int j) {
  if (j < 1 || j > ldag.dag.node_count)
    fail(Errc::NodeOutOfRange, "node " + std::to_string(j));
  if (j == ldag.root) fail(Errc::RootHasNoChain, "node " + std::to_string(j));
  HypernodeChain chain;
  chain.node = j;
  int k = ldag.layer[static_cast<std::size_t>(j)];
  for (int m = 1; m <= k - 1; ++m)
    chain.entries.push_back(ancestor_multiset(ldag, j, m));
  return chain;
}

double concentration_sum(const AncestorMultiset& ms,
                         const std::vector<double>& alpha) {
  double s = 0.0;
  for (auto [node, mult] : ms)
    s += static_cast<double>(mult) * alpha[static_cast<std::size_t>(node)];
  return s;
}

}  // namespace gdp
