#pragma once

#include <vector>

namespace lgo {

// Max-flow / min-cut on a small directed graph, BFS augmenting paths with
// capacity scaling. Deterministic: with the flow at optimum, the maximal
// min-cut (complement of the set of nodes that still reach the sink in the
// residual graph) is returned, so ties always resolve to the largest
// source-side set.
class MaxFlow {
 public:
  explicit MaxFlow(int node_count);

  // Adds a directed edge u -> v with capacity cap (and a 0-capacity reverse
  // residual edge). For symmetric pairwise terms call twice.
  void add_edge(int u, int v, double cap);
  void add_source_edge(int v, double cap);
  void add_sink_edge(int v, double cap);

  // Returns the max-flow value.
  double solve();

  // Valid after solve(): true when the node lies on the source side of the
  // maximal min-cut.
  std::vector<bool> max_source_side() const;

  // Sum of original capacities of edges crossing a given source-side set;
  // exact when capacities are exactly representable.
  double cut_value(const std::vector<bool>& source_side) const;

  // True when some edge with capacity >= big_threshold crosses the cut
  // (a constraint edge was severed).
  bool cut_crosses_big(const std::vector<bool>& source_side,
                       double big_threshold) const;

 private:
  struct Edge {
    int to;
    int rev;
    double cap;
    double orig;
  };

  bool bfs_augment(double delta, double& pushed);

  int n_;
  int source_;
  int sink_;
  double residual_tol_ = 0.0;
  std::vector<std::vector<Edge>> adj_;
};

}  // namespace lgo
