#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace tvlab {

// Dinic max-flow on a sparse residual graph with double capacities. Arcs are
// stored as twin pairs (e, e^1); cap holds the remaining capacity.
class MaxFlow {
 public:
  explicit MaxFlow(int nodes) : head_(nodes, -1), level_(nodes), it_(nodes) {}

  int add_edge(int from, int to, double cap, double rev_cap = 0.0) {
    if (cap < 0.0 || rev_cap < 0.0) throw std::invalid_argument("MaxFlow: negative capacity");
    int id = static_cast<int>(to_.size());
    push_arc(from, to, cap);
    push_arc(to, from, rev_cap);
    max_cap_ = std::max(max_cap_, std::max(cap, rev_cap));
    return id;
  }

  int node_count() const { return static_cast<int>(head_.size()); }

  double solve(int source, int sink) {
    source_ = source;
    sink_ = sink;
    eps_ = 1e-12 * std::max(1.0, max_cap_);
    double flow = 0.0;
    while (bfs()) {
      std::fill(it_.begin(), it_.end(), -2);
      double pushed;
      while ((pushed = blocking_path()) > 0.0) flow += pushed;
    }
    flow_ = flow;
    return flow;
  }

  double residual(int arc) const { return cap_[arc]; }

  // Nodes that can still reach the sink in the residual graph; their
  // complement is the largest minimum-cut source side.
  std::vector<char> sink_side() const {
    std::vector<char> reach(head_.size(), 0);
    std::vector<int> queue;
    queue.push_back(sink_);
    reach[sink_] = 1;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      int v = queue[qi];
      for (int e = head_[v]; e != -1; e = next_[e]) {
        // arc v->u with twin u->v; u steps to v when the twin has residual
        int u = to_[e];
        if (!reach[u] && cap_[e ^ 1] > eps_) {
          reach[u] = 1;
          queue.push_back(u);
        }
      }
    }
    return reach;
  }

  double flow_value() const { return flow_; }

 private:
  void push_arc(int from, int to, double cap) {
    to_.push_back(to);
    cap_.push_back(cap);
    next_.push_back(head_[from]);
    head_[from] = static_cast<int>(to_.size()) - 1;
  }

  bool bfs() {
    std::fill(level_.begin(), level_.end(), -1);
    std::vector<int> queue;
    queue.push_back(source_);
    level_[source_] = 0;
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      int v = queue[qi];
      for (int e = head_[v]; e != -1; e = next_[e]) {
        if (cap_[e] > eps_ && level_[to_[e]] == -1) {
          level_[to_[e]] = level_[v] + 1;
          queue.push_back(to_[e]);
        }
      }
    }
    return level_[sink_] != -1;
  }

  // one augmenting path in the level graph, iterative
  double blocking_path() {
    path_.clear();
    int v = source_;
    while (true) {
      if (v == sink_) {
        double bottleneck = std::numeric_limits<double>::infinity();
        for (int e : path_) bottleneck = std::min(bottleneck, cap_[e]);
        for (int e : path_) {
          cap_[e] -= bottleneck;
          cap_[e ^ 1] += bottleneck;
        }
        return bottleneck;
      }
      if (it_[v] == -2) it_[v] = head_[v];
      int e = it_[v];
      for (; e != -1; e = next_[e]) {
        if (cap_[e] > eps_ && level_[to_[e]] == level_[v] + 1) break;
        // exhausted arcs stay skipped for the rest of this phase
      }
      it_[v] = e;
      if (e == -1) {
        level_[v] = -1;  // dead end in this phase
        if (path_.empty()) return 0.0;
        v = from_of(path_.back());
        path_.pop_back();
      } else {
        path_.push_back(e);
        v = to_[e];
      }
    }
  }

  int from_of(int arc) const { return to_[arc ^ 1]; }

  std::vector<int> head_, next_, to_, level_, it_;
  std::vector<double> cap_;
  std::vector<int> path_;
  double max_cap_ = 0.0;
  double eps_ = 1e-12;
  double flow_ = 0.0;
  int source_ = 0, sink_ = 0;
};

}  // namespace tvlab
