#include "lgo/maxflow.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace lgo {

MaxFlow::MaxFlow(int node_count)
    : n_(node_count + 2), source_(node_count), sink_(node_count + 1) {
  if (node_count < 0) throw std::invalid_argument("maxflow: negative size");
  adj_.resize(n_);
}

void MaxFlow::add_edge(int u, int v, double cap) {
  if (cap < 0.0 || !std::isfinite(cap))
    throw std::invalid_argument("maxflow: capacity must be finite and >= 0");
  adj_[u].push_back({v, static_cast<int>(adj_[v].size()), cap, cap});
  adj_[v].push_back({u, static_cast<int>(adj_[u].size()) - 1, 0.0, 0.0});
}

void MaxFlow::add_source_edge(int v, double cap) { add_edge(source_, v, cap); }
void MaxFlow::add_sink_edge(int v, double cap) { add_edge(v, sink_, cap); }

bool MaxFlow::bfs_augment(double delta, double& pushed) {
  std::vector<int> prev_node(n_, -1), prev_edge(n_, -1);
  std::queue<int> q;
  q.push(source_);
  prev_node[source_] = source_;
  while (!q.empty() && prev_node[sink_] < 0) {
    int u = q.front();
    q.pop();
    for (int k = 0; k < static_cast<int>(adj_[u].size()); ++k) {
      const Edge& e = adj_[u][k];
      if (e.cap >= delta && prev_node[e.to] < 0) {
        prev_node[e.to] = u;
        prev_edge[e.to] = k;
        q.push(e.to);
      }
    }
  }
  if (prev_node[sink_] < 0) return false;

  double bottleneck = std::numeric_limits<double>::infinity();
  for (int v = sink_; v != source_; v = prev_node[v])
    bottleneck = std::min(bottleneck, adj_[prev_node[v]][prev_edge[v]].cap);
  for (int v = sink_; v != source_; v = prev_node[v]) {
    Edge& e = adj_[prev_node[v]][prev_edge[v]];
    e.cap -= bottleneck;
    adj_[e.to][e.rev].cap += bottleneck;
  }
  pushed += bottleneck;
  return true;
}

double MaxFlow::solve() {
  double max_cap = 0.0;
  for (const auto& edges : adj_)
    for (const Edge& e : edges) max_cap = std::max(max_cap, e.cap);
  double flow = 0.0;
  if (max_cap == 0.0) return 0.0;

  double delta = std::exp2(std::floor(std::log2(max_cap)));
  const double floor_delta = std::max(max_cap * 1e-14, 1e-300);
  while (delta >= floor_delta) {
    while (bfs_augment(delta, flow)) {
    }
    delta *= 0.5;
  }
  residual_tol_ = floor_delta;
  return flow;
}

std::vector<bool> MaxFlow::max_source_side() const {
  // Nodes that still reach the sink through residual capacity belong to the
  // sink side; everything else is the maximal source-side min cut.
  std::vector<bool> reaches_sink(n_, false);
  std::queue<int> q;
  q.push(sink_);
  reaches_sink[sink_] = true;
  // Reverse residual reachability: u reaches sink iff some residual edge
  // u -> v exists with v reaching the sink.
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (const Edge& e : adj_[v]) {
      // Residual edge (e.to -> v) has capacity = reverse edge capacity.
      // Rounding dust below the augmentation floor does not count.
      const Edge& back = adj_[e.to][e.rev];
      if (back.cap > residual_tol_ && !reaches_sink[e.to]) {
        reaches_sink[e.to] = true;
        q.push(e.to);
      }
    }
  }
  std::vector<bool> side(n_ - 2);
  for (int v = 0; v < n_ - 2; ++v) side[v] = !reaches_sink[v];
  return side;
}

double MaxFlow::cut_value(const std::vector<bool>& source_side) const {
  auto on_source = [&](int v) {
    if (v == source_) return true;
    if (v == sink_) return false;
    return static_cast<bool>(source_side[v]);
  };
  double total = 0.0;
  for (int u = 0; u < n_; ++u) {
    if (!on_source(u)) continue;
    for (const Edge& e : adj_[u])
      if (e.orig > 0.0 && !on_source(e.to)) total += e.orig;
  }
  return total;
}

bool MaxFlow::cut_crosses_big(const std::vector<bool>& source_side,
                              double big_threshold) const {
  auto on_source = [&](int v) {
    if (v == source_) return true;
    if (v == sink_) return false;
    return static_cast<bool>(source_side[v]);
  };
  for (int u = 0; u < n_; ++u) {
    if (!on_source(u)) continue;
    for (const Edge& e : adj_[u])
      if (e.orig >= big_threshold && !on_source(e.to)) return true;
  }
  return false;
}

}  // namespace lgo
