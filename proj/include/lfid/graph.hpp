#pragma once

#include <compare>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lfid/node_set.hpp"

namespace lfid {

struct Edge {
  int from = -1;
  int to = -1;
  auto operator<=>(const Edge&) const = default;
};

class GraphError : public std::runtime_error {
 public:
  enum class Kind {
    unknown_node,
    duplicate_node,
    self_loop,
    edge_into_latent,
    latent_not_source,
    wrong_endpoint_kind,
    duplicate_edge,
    too_many_nodes,
    malformed,
  };

  GraphError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

using NamedEdge = std::pair<std::string, std::string>;

// Observed nodes take indices 0..d-1 and latent nodes d..d+l-1, both in declaration order.
// Sorted order everywhere means this index order.
class LatentFactorGraph {
 public:
  LatentFactorGraph() = default;
  LatentFactorGraph(const std::vector<std::string>& observed, const std::vector<std::string>& latent,
                    const std::vector<NamedEdge>& edges_obs, const std::vector<NamedEdge>& edges_lat);

  // Observed nodes named "1".."d", latent nodes "h1".."hl". Edges use indices.
  static LatentFactorGraph numbered(int d, int l, const std::vector<Edge>& edges_obs,
                                    const std::vector<Edge>& edges_lat);

  int num_observed() const { return d_; }
  int num_latent() const { return l_; }
  int num_nodes() const { return d_ + l_; }
  bool is_observed(int i) const { return i >= 0 && i < d_; }
  bool is_latent(int i) const { return i >= d_ && i < d_ + l_; }
  NodeSet observed() const { return NodeSet::first(d_); }
  NodeSet latent() const { return NodeSet::first(d_ + l_) - NodeSet::first(d_); }

  const std::string& name(int i) const;
  int index(std::string_view id) const;
  NodeSet set_of(const std::vector<std::string>& ids) const;
  std::vector<std::string> names_of(NodeSet s) const;
  std::string edge_name(Edge e) const;

  NodeSet parents_obs(int v) const;
  NodeSet parents_lat(int v) const;
  NodeSet parents_obs(std::string_view v) const { return parents_obs(index(v)); }
  NodeSet parents_lat(std::string_view v) const { return parents_lat(index(v)); }
  NodeSet children(int i) const { return ch_[static_cast<std::size_t>(i)]; }
  NodeSet children(NodeSet s) const;
  NodeSet descendants(NodeSet s) const;
  NodeSet htr(NodeSet sources, NodeSet avoid) const;
  // Directed reach including the start nodes themselves.
  NodeSet reach(NodeSet start) const;
  // Latent nodes with at least k children.
  NodeSet latents_with_children(int k) const;

  bool has_edge(int from, int to) const { return children(from).contains(to); }
  std::vector<Edge> edges_obs() const;
  std::vector<Edge> edges_lat() const;
  int num_edges_obs() const;

  LatentFactorGraph without_edges(std::span<const Edge> removed) const;
  LatentFactorGraph without_edge(Edge e) const { return without_edges({&e, 1}); }

  // Same names and latent structure, different observed edge set.
  LatentFactorGraph with_observed_edges(const std::vector<Edge>& edges_obs) const;

  bool operator==(const LatentFactorGraph& o) const;

 private:
  struct Names {
    std::vector<std::string> names;
    std::unordered_map<std::string, int> lookup;
  };

  void check_node(int i) const;
  void check_observed(int v) const;
  void add_edge_checked(int from, int to);

  std::shared_ptr<const Names> names_;
  int d_ = 0;
  int l_ = 0;
  std::vector<NodeSet> pa_;  // per observed node, observed and latent parents
  std::vector<NodeSet> ch_;  // per node
};

}  // namespace lfid
