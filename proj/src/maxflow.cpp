#include "lfid/maxflow.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace lfid {

int FlowNetwork::add_node(std::string name, int capacity) {
  if (capacity <= 0) throw std::invalid_argument("node capacity must be positive");
  names_.push_back(std::move(name));
  capacity_.push_back(capacity);
  return num_nodes() - 1;
}

void FlowNetwork::add_arc(int from, int to, int capacity) {
  if (from < 0 || to < 0 || from >= num_nodes() || to >= num_nodes()) {
    throw std::out_of_range("arc endpoint out of range");
  }
  if (capacity <= 0) throw std::invalid_argument("arc capacity must be positive");
  arcs_.push_back({from, to, capacity});
}

void FlowNetwork::remove_arc(int from, int to) {
  std::erase_if(arcs_, [&](const Arc& a) { return a.from == from && a.to == to; });
}

bool FlowNetwork::has_arc(int from, int to) const {
  return std::any_of(arcs_.begin(), arcs_.end(), [&](const Arc& a) { return a.from == from && a.to == to; });
}

int FlowNetwork::find_node(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  return it == names_.end() ? -1 : static_cast<int>(it - names_.begin());
}

int FlowNetwork::unprimed(int graph_node) const {
  if (graph_node < 0 || graph_node >= static_cast<int>(unprimed_.size())) return -1;
  return unprimed_[static_cast<std::size_t>(graph_node)];
}

int FlowNetwork::primed(int graph_node) const {
  if (graph_node < 0 || graph_node >= static_cast<int>(primed_.size())) return -1;
  return primed_[static_cast<std::size_t>(graph_node)];
}

void FlowNetwork::set_graph_mapping(std::vector<int> unprimed, std::vector<int> primed) {
  unprimed_ = std::move(unprimed);
  primed_ = std::move(primed);
}

FlowNetwork build_det_flow(const LatentFactorGraph& g) {
  FlowNetwork net;
  const int n = g.num_nodes();
  std::vector<int> un(static_cast<std::size_t>(n));
  std::vector<int> pr(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) un[static_cast<std::size_t>(i)] = net.add_node(g.name(i), 1);
  for (int i = 0; i < n; ++i) pr[static_cast<std::size_t>(i)] = net.add_node(g.name(i) + "'", 1);
  for (int i = 0; i < n; ++i) {
    for (int j : g.children(i)) net.add_arc(un[static_cast<std::size_t>(j)], un[static_cast<std::size_t>(i)], 1);
  }
  for (int i = 0; i < n; ++i) net.add_arc(un[static_cast<std::size_t>(i)], pr[static_cast<std::size_t>(i)], 1);
  for (int i = 0; i < n; ++i) {
    for (int j : g.children(i)) net.add_arc(pr[static_cast<std::size_t>(i)], pr[static_cast<std::size_t>(j)], 1);
  }
  net.set_graph_mapping(std::move(un), std::move(pr));
  net.set_infinity(1);
  return net;
}

FlowNetwork build_elf_flow(const LatentFactorGraph& g, int v, NodeSet allowed, NodeSet z, NodeSet w_z,
                           NodeSet w_v) {
  const NodeSet obs = g.observed();
  if (!allowed.subset_of(obs) || !z.subset_of(obs) || !w_z.subset_of(obs) || !w_v.subset_of(obs)) {
    throw GraphError(GraphError::Kind::wrong_endpoint_kind, "flow sets must contain observed nodes only");
  }
  if (allowed.intersects(z) || allowed.contains(v)) {
    throw GraphError(GraphError::Kind::malformed, "allowed nodes must avoid z and v");
  }
  const NodeSet targets = w_v | z | w_z;
  const int inf = std::max(1, targets.size());
  FlowNetwork net;
  net.set_infinity(inf);
  const int n = g.num_nodes();
  std::vector<int> un(static_cast<std::size_t>(n), -1);
  std::vector<int> pr(static_cast<std::size_t>(n), -1);
  for (int i : allowed | g.latent()) un[static_cast<std::size_t>(i)] = net.add_node(g.name(i), 1);
  for (int i = 0; i < n; ++i) pr[static_cast<std::size_t>(i)] = net.add_node(g.name(i) + "'", 1);
  for (int a : allowed) {
    for (int h : g.parents_lat(a)) net.add_arc(un[static_cast<std::size_t>(a)], un[static_cast<std::size_t>(h)], inf);
  }
  for (int w : allowed | g.latent()) net.add_arc(un[static_cast<std::size_t>(w)], pr[static_cast<std::size_t>(w)], inf);
  for (int u = 0; u < n; ++u) {
    for (int w : g.children(u)) {
      if (g.is_observed(u) && z.contains(w)) continue;
      net.add_arc(pr[static_cast<std::size_t>(u)], pr[static_cast<std::size_t>(w)], inf);
    }
  }
  for (int a : allowed) net.sources.push_back(un[static_cast<std::size_t>(a)]);
  for (int t : targets) net.sinks.push_back(pr[static_cast<std::size_t>(t)]);
  net.set_graph_mapping(std::move(un), std::move(pr));
  return net;
}

MaxFlowSolver::MaxFlowSolver(const FlowNetwork& net) {
  n_ = net.num_nodes();
  adj_.assign(static_cast<std::size_t>(2 * n_ + 2), {});
  for (int i = 0; i < n_; ++i) add_res_arc(2 * i, 2 * i + 1, net.node_capacity(i));
  for (const auto& a : net.arcs()) {
    arc_of_net_arc_.push_back(static_cast<int>(arcs_.size()));
    add_res_arc(2 * a.from + 1, 2 * a.to, a.capacity);
  }
  base_arcs_ = static_cast<int>(arcs_.size());
  base_cap_.resize(arcs_.size());
  for (std::size_t i = 0; i < arcs_.size(); ++i) base_cap_[i] = arcs_[i].cap;
  orig_cap_ = base_cap_;
  parent_arc_.assign(adj_.size(), -1);
}

void MaxFlowSolver::add_res_arc(int a, int b, int cap) {
  adj_[static_cast<std::size_t>(a)].push_back(static_cast<int>(arcs_.size()));
  arcs_.push_back({b, cap});
  adj_[static_cast<std::size_t>(b)].push_back(static_cast<int>(arcs_.size()));
  arcs_.push_back({a, 0});
}

void MaxFlowSolver::set_arc_enabled(int arc_index, bool enabled) {
  const int ra = arc_of_net_arc_.at(static_cast<std::size_t>(arc_index));
  base_cap_[static_cast<std::size_t>(ra)] = enabled ? orig_cap_[static_cast<std::size_t>(ra)] : 0;
}

int MaxFlowSolver::augment(int s, int t) {
  std::fill(parent_arc_.begin(), parent_arc_.end(), -1);
  queue_.clear();
  queue_.push_back(s);
  parent_arc_[static_cast<std::size_t>(s)] = -2;
  for (std::size_t head = 0; head < queue_.size(); ++head) {
    const int u = queue_[head];
    for (int ai : adj_[static_cast<std::size_t>(u)]) {
      const ResArc& a = arcs_[static_cast<std::size_t>(ai)];
      if (a.cap <= 0 || parent_arc_[static_cast<std::size_t>(a.to)] != -1) continue;
      parent_arc_[static_cast<std::size_t>(a.to)] = ai;
      if (a.to == t) {
        int bottleneck = std::numeric_limits<int>::max();
        for (int x = t; x != s;) {
          const int pa = parent_arc_[static_cast<std::size_t>(x)];
          bottleneck = std::min(bottleneck, arcs_[static_cast<std::size_t>(pa)].cap);
          x = arcs_[static_cast<std::size_t>(pa ^ 1)].to;
        }
        for (int x = t; x != s;) {
          const int pa = parent_arc_[static_cast<std::size_t>(x)];
          arcs_[static_cast<std::size_t>(pa)].cap -= bottleneck;
          arcs_[static_cast<std::size_t>(pa ^ 1)].cap += bottleneck;
          x = arcs_[static_cast<std::size_t>(pa ^ 1)].to;
        }
        return bottleneck;
      }
      queue_.push_back(a.to);
    }
  }
  return 0;
}

int MaxFlowSolver::solve(std::span<const int> sources, std::span<const int> sinks, int limit) {
  for (auto& list : adj_) {
    while (!list.empty() && list.back() >= base_arcs_) list.pop_back();
  }
  arcs_.resize(static_cast<std::size_t>(base_arcs_));
  for (int i = 0; i < base_arcs_; i += 2) {
    arcs_[static_cast<std::size_t>(i)].cap = base_cap_[static_cast<std::size_t>(i)];
    arcs_[static_cast<std::size_t>(i + 1)].cap = 0;
  }
  const int s = 2 * n_;
  const int t = 2 * n_ + 1;
  const int big = 1 << 29;
  std::vector<int> source_arc;
  source_arc.reserve(sources.size());
  for (int src : sources) {
    source_arc.push_back(static_cast<int>(arcs_.size()));
    add_res_arc(s, 2 * src, big);
  }
  for (int snk : sinks) add_res_arc(2 * snk + 1, t, big);

  int flow = 0;
  while (flow < limit) {
    const int pushed = augment(s, t);
    if (pushed == 0) break;
    flow += pushed;
  }

  source_outflow_.assign(sources.size(), 0);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    source_outflow_[i] = arcs_[static_cast<std::size_t>(source_arc[i]) ^ 1].cap;
  }
  return flow;
}

int max_flow(const FlowNetwork& net) {
  MaxFlowSolver solver(net);
  return solver.solve(net.sources, net.sinks);
}

FlowResult max_flow_detailed(const FlowNetwork& net) {
  MaxFlowSolver solver(net);
  FlowResult r;
  r.value = solver.solve(net.sources, net.sinks);
  r.source_outflow = solver.source_outflow();
  return r;
}

}  // namespace lfid
