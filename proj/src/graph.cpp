#include "lfid/graph.hpp"

#include <algorithm>

namespace lfid {

std::vector<NodeSet> subsets_of_size(NodeSet universe, int k) {
  std::vector<NodeSet> out;
  const std::vector<int> items = universe.to_vector();
  const int n = static_cast<int>(items.size());
  if (k < 0 || k > n) return out;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    NodeSet s;
    for (int i : idx) s.insert(items[static_cast<std::size_t>(i)]);
    out.push_back(s);
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (int j = pos + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

std::vector<NodeSet> subsets_in_search_order(NodeSet universe, int max_size) {
  std::vector<NodeSet> out;
  for (int k = 0; k <= std::min(max_size, universe.size()); ++k) {
    auto level = subsets_of_size(universe, k);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

LatentFactorGraph::LatentFactorGraph(const std::vector<std::string>& observed,
                                     const std::vector<std::string>& latent,
                                     const std::vector<NamedEdge>& edges_obs,
                                     const std::vector<NamedEdge>& edges_lat) {
  d_ = static_cast<int>(observed.size());
  l_ = static_cast<int>(latent.size());
  if (d_ + l_ > kMaxNodes) {
    throw GraphError(GraphError::Kind::too_many_nodes,
                     "graph has " + std::to_string(d_ + l_) + " nodes; at most " +
                         std::to_string(kMaxNodes) + " are supported");
  }
  auto names = std::make_shared<Names>();
  for (const auto* group : {&observed, &latent}) {
    for (const auto& id : *group) {
      if (id.empty()) throw GraphError(GraphError::Kind::malformed, "empty node id");
      if (!names->lookup.emplace(id, static_cast<int>(names->names.size())).second) {
        throw GraphError(GraphError::Kind::duplicate_node, "duplicate node id '" + id + "'");
      }
      names->names.push_back(id);
    }
  }
  names_ = std::move(names);
  pa_.assign(static_cast<std::size_t>(d_), NodeSet{});
  ch_.assign(static_cast<std::size_t>(d_ + l_), NodeSet{});

  for (const auto& [from, to] : edges_obs) {
    const int a = index(from);
    const int b = index(to);
    if (a == b) throw GraphError(GraphError::Kind::self_loop, "self-loop on '" + from + "'");
    if (is_latent(b)) {
      throw GraphError(GraphError::Kind::edge_into_latent, "edge into latent node '" + to + "'");
    }
    if (is_latent(a)) {
      throw GraphError(GraphError::Kind::wrong_endpoint_kind,
                       "observed edge list contains latent source '" + from + "'");
    }
    add_edge_checked(a, b);
  }
  for (const auto& [from, to] : edges_lat) {
    const int a = index(from);
    const int b = index(to);
    if (is_latent(b)) {
      if (is_latent(a)) {
        throw GraphError(GraphError::Kind::latent_not_source,
                         "latent-to-latent edge '" + from + "' -> '" + to + "'");
      }
      throw GraphError(GraphError::Kind::edge_into_latent, "edge into latent node '" + to + "'");
    }
    if (!is_latent(a)) {
      throw GraphError(GraphError::Kind::wrong_endpoint_kind,
                       "latent edge list contains observed source '" + from + "'");
    }
    add_edge_checked(a, b);
  }
}

void LatentFactorGraph::add_edge_checked(int from, int to) {
  if (ch_[static_cast<std::size_t>(from)].contains(to)) {
    throw GraphError(GraphError::Kind::duplicate_edge, "duplicate edge " + edge_name({from, to}));
  }
  ch_[static_cast<std::size_t>(from)].insert(to);
  pa_[static_cast<std::size_t>(to)].insert(from);
}

LatentFactorGraph LatentFactorGraph::numbered(int d, int l, const std::vector<Edge>& edges_obs,
                                              const std::vector<Edge>& edges_lat) {
  std::vector<std::string> obs;
  std::vector<std::string> lat;
  for (int i = 1; i <= d; ++i) obs.push_back(std::to_string(i));
  for (int i = 1; i <= l; ++i) lat.push_back("h" + std::to_string(i));
  auto lookup = [&](int i) { return i < d ? obs.at(static_cast<std::size_t>(i)) : lat.at(static_cast<std::size_t>(i - d)); };
  std::vector<NamedEdge> eo;
  std::vector<NamedEdge> el;
  for (Edge e : edges_obs) eo.emplace_back(lookup(e.from), lookup(e.to));
  for (Edge e : edges_lat) el.emplace_back(lookup(e.from), lookup(e.to));
  return {obs, lat, eo, el};
}

const std::string& LatentFactorGraph::name(int i) const {
  check_node(i);
  return names_->names[static_cast<std::size_t>(i)];
}

int LatentFactorGraph::index(std::string_view id) const {
  if (names_) {
    auto it = names_->lookup.find(std::string(id));
    if (it != names_->lookup.end()) return it->second;
  }
  throw GraphError(GraphError::Kind::unknown_node, "unknown node id '" + std::string(id) + "'");
}

NodeSet LatentFactorGraph::set_of(const std::vector<std::string>& ids) const {
  NodeSet s;
  for (const auto& id : ids) s.insert(index(id));
  return s;
}

std::vector<std::string> LatentFactorGraph::names_of(NodeSet s) const {
  std::vector<std::string> out;
  for (int i : s) out.push_back(name(i));
  return out;
}

std::string LatentFactorGraph::edge_name(Edge e) const { return name(e.from) + "->" + name(e.to); }

void LatentFactorGraph::check_node(int i) const {
  if (i < 0 || i >= d_ + l_) {
    throw GraphError(GraphError::Kind::unknown_node, "node index " + std::to_string(i) + " out of range");
  }
}

void LatentFactorGraph::check_observed(int v) const {
  check_node(v);
  if (!is_observed(v)) {
    throw GraphError(GraphError::Kind::wrong_endpoint_kind, "'" + name(v) + "' is not an observed node");
  }
}

NodeSet LatentFactorGraph::parents_obs(int v) const {
  check_observed(v);
  return pa_[static_cast<std::size_t>(v)] & observed();
}

NodeSet LatentFactorGraph::parents_lat(int v) const {
  check_observed(v);
  return pa_[static_cast<std::size_t>(v)] & latent();
}

NodeSet LatentFactorGraph::children(NodeSet s) const {
  NodeSet out;
  for (int i : s) {
    check_node(i);
    out |= ch_[static_cast<std::size_t>(i)];
  }
  return out;
}

NodeSet LatentFactorGraph::reach(NodeSet start) const {
  NodeSet seen = start;
  NodeSet frontier = start;
  while (!frontier.empty()) {
    NodeSet next = children(frontier) - seen;
    seen |= next;
    frontier = next;
  }
  return seen;
}

NodeSet LatentFactorGraph::descendants(NodeSet s) const { return reach(children(s)); }

NodeSet LatentFactorGraph::htr(NodeSet sources, NodeSet avoid) const {
  if (!avoid.subset_of(latent())) {
    throw GraphError(GraphError::Kind::wrong_endpoint_kind, "htr avoid set must contain latent nodes only");
  }
  NodeSet out;
  for (int s : sources) {
    check_observed(s);
    NodeSet via_latent = children(parents_lat(s) - avoid);
    NodeSet r = descendants(NodeSet::single(s)) | reach(via_latent);
    r.erase(s);
    out |= r;
  }
  return out & observed();
}

NodeSet LatentFactorGraph::latents_with_children(int k) const {
  NodeSet out;
  for (int h : latent()) {
    if (children(h).size() >= k) out.insert(h);
  }
  return out;
}

std::vector<Edge> LatentFactorGraph::edges_obs() const {
  std::vector<Edge> out;
  for (int a = 0; a < d_; ++a) {
    for (int b : children(a)) out.push_back({a, b});
  }
  return out;
}

std::vector<Edge> LatentFactorGraph::edges_lat() const {
  std::vector<Edge> out;
  for (int h : latent()) {
    for (int b : children(h)) out.push_back({h, b});
  }
  return out;
}

int LatentFactorGraph::num_edges_obs() const {
  int n = 0;
  for (int a = 0; a < d_; ++a) n += children(a).size();
  return n;
}

LatentFactorGraph LatentFactorGraph::without_edges(std::span<const Edge> removed) const {
  LatentFactorGraph g = *this;
  for (Edge e : removed) {
    check_observed(e.from);
    check_observed(e.to);
    g.ch_[static_cast<std::size_t>(e.from)].erase(e.to);
    g.pa_[static_cast<std::size_t>(e.to)].erase(e.from);
  }
  return g;
}

LatentFactorGraph LatentFactorGraph::with_observed_edges(const std::vector<Edge>& edges_obs) const {
  LatentFactorGraph g = *this;
  for (int v = 0; v < d_; ++v) {
    g.ch_[static_cast<std::size_t>(v)] = NodeSet{};
    g.pa_[static_cast<std::size_t>(v)] &= latent();
  }
  for (Edge e : edges_obs) {
    check_observed(e.from);
    check_observed(e.to);
    if (e.from == e.to) throw GraphError(GraphError::Kind::self_loop, "self-loop on '" + name(e.from) + "'");
    g.add_edge_checked(e.from, e.to);
  }
  return g;
}

bool LatentFactorGraph::operator==(const LatentFactorGraph& o) const {
  if (d_ != o.d_ || l_ != o.l_ || ch_ != o.ch_) return false;
  if (names_ == o.names_) return true;
  return names_ && o.names_ && names_->names == o.names_->names;
}

}  // namespace lfid
