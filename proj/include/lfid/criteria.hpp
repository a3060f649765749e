#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lfid/graph.hpp"

namespace lfid {

// How (S,T) pairs are drawn when cap_det_pairs is set. Without a cap the search is always exhaustive.
enum class DetPairOrder {
  lexicographic,  // ascending |S|, then S, then T; the first cap_det_pairs pairs
  sampled,        // cap_det_pairs draws: |S| uniform, then S and T uniform, with replacement
};

struct SearchConfig {
  std::optional<int> cap_det_pairs;  // (S,T) pairs tried per edge
  DetPairOrder det_order = DetPairOrder::lexicographic;
  std::uint64_t det_sample_seed = 0;
  std::optional<int> cap_h_size;     // largest latent set H
  bool simplify_wz_loop = false;     // W_z fixed to the unsolved parents of z
  std::optional<int> cap_recursion;  // deepest deletion level
  bool enable_det = true;
  bool enable_elf = true;
  bool enable_recursion = true;
  // Run only the node-wise LF-HTC; the other switches are ignored.
  bool legacy_lf_htc_only = false;
  // Use the node-wise LF-HTC in place of the eLF-HTC step, keeping the other switches.
  bool legacy_htc = false;

  void validate() const;
  // The polynomial-time profile: capped (S,T) pairs, |H| <= 1, no W_z loop, one deletion level.
  static SearchConfig simplified_profile();
};

struct HtcCertificate {
  int v = -1;
  NodeSet w_v;
  NodeSet y;
  NodeSet z;
  std::vector<std::pair<int, NodeSet>> w_z;  // one entry per member of z, ascending
  NodeSet h;
  bool legacy = false;

  NodeSet w_z_union() const;
  NodeSet w_z_of(int z_member) const;
};

struct DetCertificate {
  int v = -1;
  int w0 = -1;
  NodeSet deleted_parents;  // already solved parents whose arcs were cut
  NodeSet s;
  NodeSet t;

  bool v_in_s() const { return s.contains(v); }
};

using Certificate = std::variant<HtcCertificate, DetCertificate>;

struct Discovery {
  Edge edge;
  Certificate certificate;
  int depth = 0;
  std::vector<Edge> context;  // deleted edges, in deletion order
};

// Symmetric relation over observed nodes.
class AllowedCovariances {
 public:
  AllowedCovariances() = default;
  static AllowedCovariances all(int d);
  static AllowedCovariances none(int d);

  bool allowed(int x, int y) const { return rows_[static_cast<std::size_t>(x)].contains(y); }
  bool allowed_block(NodeSet rows, NodeSet cols) const;
  NodeSet row(int x) const { return rows_[static_cast<std::size_t>(x)]; }
  void set(int x, int y);
  int dimension() const { return static_cast<int>(rows_.size()); }
  bool is_full() const;
  int count() const;
  bool operator==(const AllowedCovariances&) const = default;

 private:
  std::vector<NodeSet> rows_;
};

// One deletion step: all edges p->v for p in removed_parents, applied to the pre-deletion graph g.
AllowedCovariances allowed_update(const LatentFactorGraph& g, const AllowedCovariances& allowed, int v,
                                  NodeSet removed_parents);

// Composes allowed_update over a sequence of single-edge deletions starting from the full set.
AllowedCovariances allowed_for_deletions(const LatentFactorGraph& g, const std::vector<Edge>& sequence);

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IdentificationState {
 public:
  IdentificationState() = default;
  explicit IdentificationState(const LatentFactorGraph& root);

  const LatentFactorGraph& root_graph() const { return graphs_.front(); }
  // Graph of the current recursion frame (root graph minus deleted edges).
  const LatentFactorGraph& graph() const { return graphs_.back(); }
  const AllowedCovariances& allowed_cov() const { return allowed_.back(); }
  const std::vector<Edge>& deleted_edges() const { return deleted_; }
  int depth() const { return static_cast<int>(deleted_.size()); }

  bool is_solved(Edge e) const { return solved_pa_[static_cast<std::size_t>(e.to)].contains(e.from); }
  NodeSet solved_parents(int v) const { return solved_pa_[static_cast<std::size_t>(v)]; }
  bool node_solved(int v) const;
  NodeSet solved_nodes() const;
  bool all_solved() const;
  int num_solved() const { return num_solved_; }
  std::vector<Edge> solved_edges() const;
  const std::vector<Discovery>& discoveries() const { return discoveries_; }

  void mark_solved(Edge e, Certificate certificate);
  // Marks an edge solved without a certificate (used to set up partial states).
  void assume_solved(Edge e);
  void push_deletion(Edge e);
  void pop_deletion();

  // Drives sampled (S,T) draws; seeded from the config seed and the root graph's edges.
  std::mt19937_64& rng() { return rng_; }
  void seed(std::uint64_t seed);

 private:
  std::deque<LatentFactorGraph> graphs_;  // stable references across push_deletion
  std::vector<AllowedCovariances> allowed_;
  std::vector<Edge> deleted_;
  std::vector<NodeSet> solved_pa_;
  std::vector<Discovery> discoveries_;
  int num_solved_ = 0;
  std::mt19937_64 rng_;
};

// Full LF-HTC hypotheses at v: set conditions, the half-trek system, and solved prerequisites
// (edges into z and into y within htr_H(z u {v})). `solved_nodes` defaults to parentless nodes.
bool check_lf_htc(const LatentFactorGraph& g, int v, NodeSet y, NodeSet z, NodeSet h,
                  std::optional<NodeSet> solved_nodes = std::nullopt, std::string* why = nullptr);

// Allowed sources A for fixed (v, z, h) in the state's current frame.
NodeSet elf_source_candidates(const LatentFactorGraph& g, const IdentificationState& state, int v, NodeSet z,
                              NodeSet h);

// One fixed eLF-HTC choice checked by max-flow. Returns the realizing Y on success.
std::optional<NodeSet> elf_htc_try(const LatentFactorGraph& g, const IdentificationState& state, int v,
                                   NodeSet w_v, NodeSet z, const std::vector<std::pair<int, NodeSet>>& w_z,
                                   NodeSet h);

// Each subprocedure returns true when at least one edge was newly solved.
bool elf_htc_subprocedure(const LatentFactorGraph& g, IdentificationState& state, int v, const SearchConfig& cfg);
bool lf_htc_subprocedure(const LatentFactorGraph& g, IdentificationState& state, int v, const SearchConfig& cfg);
bool det_subprocedure(const LatentFactorGraph& g, IdentificationState& state, int v, const SearchConfig& cfg);

IdentificationState combined_algorithm(const LatentFactorGraph& g, const SearchConfig& cfg = {});

bool is_graph_identified(const IdentificationState& state, const LatentFactorGraph& g);

// Re-checks a recorded certificate in the graph it was found in, independent of the search.
bool verify_certificate(const LatentFactorGraph& g, const HtcCertificate& cert, std::string* why = nullptr);
bool verify_certificate(const LatentFactorGraph& g, const DetCertificate& cert, std::string* why = nullptr);

}  // namespace lfid
