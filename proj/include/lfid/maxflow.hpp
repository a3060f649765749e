#pragma once

#include <span>
#include <string>
#include <vector>

#include "lfid/graph.hpp"

namespace lfid {

// Directed network with capacitated nodes and arcs plus designated source and sink nodes.
class FlowNetwork {
 public:
  struct Arc {
    int from;
    int to;
    int capacity;
  };

  int add_node(std::string name, int capacity);
  void add_arc(int from, int to, int capacity);
  void remove_arc(int from, int to);
  bool has_arc(int from, int to) const;

  int num_nodes() const { return static_cast<int>(names_.size()); }
  const std::string& node_name(int i) const { return names_.at(static_cast<std::size_t>(i)); }
  int node_capacity(int i) const { return capacity_.at(static_cast<std::size_t>(i)); }
  const std::vector<Arc>& arcs() const { return arcs_; }
  int find_node(const std::string& name) const;

  // Flow node for graph node i (unprimed) or its copy i' (primed); -1 when absent.
  int unprimed(int graph_node) const;
  int primed(int graph_node) const;
  void set_graph_mapping(std::vector<int> unprimed, std::vector<int> primed);

  std::vector<int> sources;
  std::vector<int> sinks;

  // Stand-in for an unbounded capacity.
  int infinity() const { return infinity_; }
  void set_infinity(int value) { infinity_ = value; }

 private:
  std::vector<std::string> names_;
  std::vector<int> capacity_;
  std::vector<Arc> arcs_;
  std::vector<int> unprimed_;
  std::vector<int> primed_;
  int infinity_ = 1 << 20;
};

// Unit capacities everywhere; i->j for j->i in D, i->i', i'->j' for i->j in D.
FlowNetwork build_det_flow(const LatentFactorGraph& g);

// Nodes (allowed u L) and (V' u L'); arcs a->h for h->a latent edges, w->w' for w in allowed u L,
// u'->w' for latent edges and observed edges with w outside z. Node capacity 1, arc capacity "infinite".
FlowNetwork build_elf_flow(const LatentFactorGraph& g, int v, NodeSet allowed, NodeSet z, NodeSet w_z,
                           NodeSet w_v);

// Node-split residual network solved with shortest augmenting paths. The structure is built once;
// sources and sinks can vary between calls.
class MaxFlowSolver {
 public:
  explicit MaxFlowSolver(const FlowNetwork& net);

  // Stops early once `limit` units have been routed.
  int solve(std::span<const int> sources, std::span<const int> sinks, int limit = 1 << 30);
  // Units leaving each source in the last solve, in the order the sources were passed.
  const std::vector<int>& source_outflow() const { return source_outflow_; }
  // Disable/enable an arc of the original network (by index in net.arcs()).
  void set_arc_enabled(int arc_index, bool enabled);

 private:
  struct ResArc {
    int to;
    int cap;
  };
  void add_res_arc(int a, int b, int cap);
  int augment(int s, int t);

  int n_ = 0;
  int base_arcs_ = 0;
  std::vector<ResArc> arcs_;
  std::vector<int> base_cap_;
  std::vector<int> orig_cap_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> arc_of_net_arc_;
  std::vector<int> source_outflow_;
  std::vector<int> parent_arc_;
  std::vector<int> queue_;
};

int max_flow(const FlowNetwork& net);

struct FlowResult {
  int value = 0;
  std::vector<int> source_outflow;  // aligned with net.sources
};
FlowResult max_flow_detailed(const FlowNetwork& net);

}  // namespace lfid
