#include "lfid/criteria.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "lfid/maxflow.hpp"

namespace lfid {

void SearchConfig::validate() const {
  for (const auto* cap : {&cap_det_pairs, &cap_h_size, &cap_recursion}) {
    if (cap->has_value() && **cap < 0) throw std::invalid_argument("search caps must be non-negative");
  }
}

SearchConfig SearchConfig::simplified_profile() {
  SearchConfig cfg;
  cfg.cap_det_pairs = 100;
  cfg.cap_h_size = 1;
  cfg.simplify_wz_loop = true;
  cfg.cap_recursion = 1;
  return cfg;
}

NodeSet HtcCertificate::w_z_union() const {
  NodeSet u;
  for (const auto& [zm, w] : w_z) u |= w;
  return u;
}

NodeSet HtcCertificate::w_z_of(int z_member) const {
  for (const auto& [zm, w] : w_z) {
    if (zm == z_member) return w;
  }
  return {};
}

AllowedCovariances AllowedCovariances::all(int d) {
  AllowedCovariances a;
  a.rows_.assign(static_cast<std::size_t>(d), NodeSet::first(d));
  return a;
}

AllowedCovariances AllowedCovariances::none(int d) {
  AllowedCovariances a;
  a.rows_.assign(static_cast<std::size_t>(d), NodeSet{});
  return a;
}

bool AllowedCovariances::allowed_block(NodeSet rows, NodeSet cols) const {
  for (int x : rows) {
    if (!cols.subset_of(rows_[static_cast<std::size_t>(x)])) return false;
  }
  return true;
}

void AllowedCovariances::set(int x, int y) {
  rows_[static_cast<std::size_t>(x)].insert(y);
  rows_[static_cast<std::size_t>(y)].insert(x);
}

bool AllowedCovariances::is_full() const {
  const NodeSet full = NodeSet::first(dimension());
  return std::all_of(rows_.begin(), rows_.end(), [&](NodeSet r) { return r == full; });
}

int AllowedCovariances::count() const {
  int n = 0;
  for (NodeSet r : rows_) n += r.size();
  return n;
}

AllowedCovariances allowed_update(const LatentFactorGraph& g, const AllowedCovariances& allowed, int v,
                                  NodeSet removed_parents) {
  if (!removed_parents.subset_of(g.parents_obs(v))) {
    throw ContractViolation("removed parents of '" + g.name(v) + "' are not all observed parents");
  }
  if (removed_parents.empty()) return allowed;
  const int d = g.num_observed();
  const NodeSet dec = g.descendants(NodeSet::single(v)) & g.observed();
  AllowedCovariances out = AllowedCovariances::none(d);
  for (int x = 0; x < d; ++x) {
    if (dec.contains(x)) continue;
    for (int y : allowed.row(x) - dec) {
      if (y < x) continue;
      if (x == v && y == v) continue;
      if (y == v && !removed_parents.subset_of(allowed.row(x))) continue;
      if (x == v && !removed_parents.subset_of(allowed.row(y))) continue;
      out.set(x, y);
    }
  }
  return out;
}

AllowedCovariances allowed_for_deletions(const LatentFactorGraph& g, const std::vector<Edge>& sequence) {
  AllowedCovariances a = AllowedCovariances::all(g.num_observed());
  LatentFactorGraph cur = g;
  for (Edge e : sequence) {
    if (!cur.has_edge(e.from, e.to)) {
      throw ContractViolation("deletion sequence removes missing edge " + g.edge_name(e));
    }
    a = allowed_update(cur, a, e.to, NodeSet::single(e.from));
    cur = cur.without_edge(e);
  }
  return a;
}

IdentificationState::IdentificationState(const LatentFactorGraph& root) {
  graphs_.push_back(root);
  allowed_.push_back(AllowedCovariances::all(root.num_observed()));
  solved_pa_.assign(static_cast<std::size_t>(root.num_observed()), NodeSet{});
}

void IdentificationState::seed(std::uint64_t seed) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                                   static_cast<std::uint32_t>(root_graph().num_observed())};
  for (Edge e : root_graph().edges_obs()) words.push_back(static_cast<std::uint32_t>(e.from * kMaxNodes + e.to));
  std::seed_seq seq(words.begin(), words.end());
  rng_.seed(seq);
}

bool IdentificationState::node_solved(int v) const {
  return root_graph().parents_obs(v).subset_of(solved_pa_[static_cast<std::size_t>(v)]);
}

NodeSet IdentificationState::solved_nodes() const {
  NodeSet out;
  for (int v : root_graph().observed()) {
    if (node_solved(v)) out.insert(v);
  }
  return out;
}

bool IdentificationState::all_solved() const { return num_solved_ == root_graph().num_edges_obs(); }

std::vector<Edge> IdentificationState::solved_edges() const {
  std::vector<Edge> out;
  for (Edge e : root_graph().edges_obs()) {
    if (is_solved(e)) out.push_back(e);
  }
  return out;
}

void IdentificationState::mark_solved(Edge e, Certificate certificate) {
  if (!graph().has_edge(e.from, e.to)) {
    throw ContractViolation("cannot solve missing edge " + root_graph().edge_name(e));
  }
  if (is_solved(e)) return;
  solved_pa_[static_cast<std::size_t>(e.to)].insert(e.from);
  ++num_solved_;
  discoveries_.push_back({e, std::move(certificate), depth(), deleted_});
}

void IdentificationState::assume_solved(Edge e) {
  if (!root_graph().has_edge(e.from, e.to)) {
    throw ContractViolation("cannot solve missing edge " + root_graph().edge_name(e));
  }
  if (is_solved(e)) return;
  solved_pa_[static_cast<std::size_t>(e.to)].insert(e.from);
  ++num_solved_;
}

void IdentificationState::push_deletion(Edge e) {
  if (!is_solved(e)) throw ContractViolation("cannot delete unsolved edge " + root_graph().edge_name(e));
  if (!graph().has_edge(e.from, e.to)) {
    throw ContractViolation("edge " + root_graph().edge_name(e) + " already deleted");
  }
  allowed_.push_back(allowed_update(graph(), allowed_cov(), e.to, NodeSet::single(e.from)));
  graphs_.push_back(graph().without_edge(e));
  deleted_.push_back(e);
}

void IdentificationState::pop_deletion() {
  if (deleted_.empty()) throw ContractViolation("no deletion to undo");
  deleted_.pop_back();
  graphs_.pop_back();
  allowed_.pop_back();
}

namespace {

// Covariance columns an eLF-HTC row touches: v, its parents, z and the parents of z.
NodeSet elf_required_columns(const LatentFactorGraph& g, int v, NodeSet z) {
  NodeSet cols = g.parents_obs(v);
  cols.insert(v);
  for (int zm : z) cols |= g.parents_obs(zm);
  return cols | z;
}

NodeSet filter_by_allowed(const LatentFactorGraph& g, const AllowedCovariances& allowed, NodeSet candidates,
                          NodeSet htr_set, NodeSet cols) {
  NodeSet out;
  for (int y : candidates) {
    NodeSet rows = NodeSet::single(y);
    if (htr_set.contains(y)) rows |= g.parents_obs(y);
    if (allowed.allowed_block(rows, cols)) out.insert(y);
  }
  return out;
}

NodeSet excluded_sources(const LatentFactorGraph& g, NodeSet solved_nodes, int v, NodeSet z, NodeSet h,
                         NodeSet* htr_out) {
  NodeSet zv = z;
  zv.insert(v);
  NodeSet lat_parents;
  for (int x : zv) lat_parents |= g.parents_lat(x);
  const NodeSet htr_set = g.htr(zv, h);
  if (htr_out != nullptr) *htr_out = htr_set;
  return zv | g.children(lat_parents - h) | (htr_set - solved_nodes);
}

NodeSet sources_from_flow(const FlowNetwork& net, const std::vector<int>& outflow, NodeSet allowed) {
  NodeSet y;
  std::size_t i = 0;
  for (int a : allowed) {
    if (outflow[i] > 0) y.insert(a);
    ++i;
  }
  (void)net;
  return y;
}

// Supersets of `base` within `universe`, ascending number of added elements then lexicographic.
std::vector<NodeSet> supersets_in_order(NodeSet base, NodeSet universe) {
  std::vector<NodeSet> out;
  for (NodeSet extra : subsets_in_search_order(universe - base)) out.push_back(base | extra);
  return out;
}

std::vector<std::vector<std::pair<int, NodeSet>>> wz_choices(const LatentFactorGraph& g,
                                                             const IdentificationState& state, NodeSet z,
                                                             bool simplify) {
  std::vector<int> members = z.to_vector();
  std::vector<std::vector<NodeSet>> options;
  std::vector<NodeSet> bases;
  for (int zm : members) {
    const NodeSet pa = g.parents_obs(zm);
    const NodeSet unsolved = pa - state.solved_parents(zm);
    bases.push_back(unsolved);
    options.push_back(simplify ? std::vector<NodeSet>{unsolved} : supersets_in_order(unsolved, pa));
  }
  std::vector<std::vector<std::pair<int, NodeSet>>> combos(1);
  for (std::size_t i = 0; i < members.size(); ++i) {
    std::vector<std::vector<std::pair<int, NodeSet>>> next;
    for (const auto& c : combos) {
      for (NodeSet opt : options[i]) {
        next.push_back(c);
        next.back().emplace_back(members[i], opt);
      }
    }
    combos = std::move(next);
  }
  auto added = [&](const std::vector<std::pair<int, NodeSet>>& c) {
    int n = 0;
    for (std::size_t i = 0; i < c.size(); ++i) n += (c[i].second - bases[i]).size();
    return n;
  };
  std::stable_sort(combos.begin(), combos.end(),
                   [&](const auto& a, const auto& b) { return added(a) < added(b); });
  return combos;
}

struct ElfChoiceResult {
  bool feasible = false;  // passed the set conditions
  std::optional<NodeSet> y;
};

ElfChoiceResult try_elf_choice(const LatentFactorGraph& g, int v, NodeSet w_v, NodeSet z,
                               const std::vector<std::pair<int, NodeSet>>& w_z, NodeSet sources) {
  ElfChoiceResult r;
  NodeSet w_union;
  NodeSet z1;
  for (const auto& [zm, w] : w_z) {
    w_union |= w;
    if (w != g.parents_obs(zm)) z1.insert(zm);
  }
  if (z1.intersects(w_union | w_v)) return r;
  r.feasible = true;
  const NodeSet targets = w_v | z | w_union;
  if (sources.size() < targets.size()) return r;
  FlowNetwork net = build_elf_flow(g, v, sources, z, w_union, w_v);
  MaxFlowSolver solver(net);
  const int flow = solver.solve(net.sources, net.sinks);
  if (flow == targets.size()) r.y = sources_from_flow(net, solver.source_outflow(), sources);
  return r;
}

}  // namespace

NodeSet elf_source_candidates(const LatentFactorGraph& g, const IdentificationState& state, int v, NodeSet z,
                              NodeSet h) {
  NodeSet htr_set;
  const NodeSet excl = excluded_sources(g, state.solved_nodes(), v, z, h, &htr_set);
  NodeSet cand = g.observed() - excl;
  const AllowedCovariances& allowed = state.allowed_cov();
  if (!allowed.is_full()) {
    cand = filter_by_allowed(g, allowed, cand, htr_set, elf_required_columns(g, v, z));
  }
  return cand;
}

std::optional<NodeSet> elf_htc_try(const LatentFactorGraph& g, const IdentificationState& state, int v,
                                   NodeSet w_v, NodeSet z, const std::vector<std::pair<int, NodeSet>>& w_z,
                                   NodeSet h) {
  if (z.contains(v) || z.size() != h.size()) return std::nullopt;
  return try_elf_choice(g, v, w_v, z, w_z, elf_source_candidates(g, state, v, z, h)).y;
}

bool elf_htc_subprocedure(const LatentFactorGraph& g, IdentificationState& state, int v, const SearchConfig& cfg) {
  const NodeSet pa_v = g.parents_obs(v);
  NodeSet w_v = pa_v - state.solved_parents(v);
  if (w_v.empty()) return false;
  bool changed = false;
  const NodeSet l4 = g.latents_with_children(4);
  const int max_h = cfg.cap_h_size.value_or(kMaxNodes);
  for (NodeSet h : subsets_in_search_order(l4, max_h)) {
    const NodeSet ch_h = g.children(h) - NodeSet::single(v);
    for (NodeSet z : subsets_of_size(ch_h, h.size())) {
      const NodeSet sources = elf_source_candidates(g, state, v, z, h);
      for (const auto& w_z : wz_choices(g, state, z, cfg.simplify_wz_loop)) {
        auto r = try_elf_choice(g, v, w_v, z, w_z, sources);
        if (!r.y) continue;
        HtcCertificate cert{v, w_v, *r.y, z, w_z, h, false};
        NodeSet w_union = cert.w_z_union();
        for (int p : w_v - (z | w_union)) {
          state.mark_solved({p, v}, cert);
          changed = true;
        }
        w_v = pa_v - state.solved_parents(v);
        if (w_v.empty()) return changed;
      }
    }
  }
  return changed;
}

bool lf_htc_subprocedure(const LatentFactorGraph& g, IdentificationState& state, int v, const SearchConfig& cfg) {
  if (state.node_solved(v)) return false;
  const NodeSet pa_v = g.parents_obs(v);
  const NodeSet solved_nodes = state.solved_nodes();
  const NodeSet l4 = g.latents_with_children(4);
  const int max_h = cfg.cap_h_size.value_or(kMaxNodes);
  for (NodeSet h : subsets_in_search_order(l4, max_h)) {
    const NodeSet ch_h = (g.children(h) & solved_nodes) - pa_v - NodeSet::single(v);
    for (NodeSet z : subsets_of_size(ch_h, h.size())) {
      std::vector<std::pair<int, NodeSet>> w_z;
      for (int zm : z) w_z.emplace_back(zm, NodeSet{});
      const NodeSet sources = elf_source_candidates(g, state, v, z, h);
      auto r = try_elf_choice(g, v, pa_v, z, w_z, sources);
      if (!r.y) continue;
      HtcCertificate cert{v, pa_v, *r.y, z, w_z, h, true};
      for (int p : pa_v - state.solved_parents(v)) state.mark_solved({p, v}, cert);
      return true;
    }
  }
  return false;
}

bool det_subprocedure(const LatentFactorGraph& g, IdentificationState& state, int v, const SearchConfig& cfg) {
  const NodeSet pa_v = g.parents_obs(v);
  if ((pa_v - state.solved_parents(v)).empty()) return false;
  const NodeSet dec_v = g.descendants(NodeSet::single(v));
  if (dec_v.contains(v)) return false;
  const int d = g.num_observed();
  const AllowedCovariances& allowed = state.allowed_cov();
  const bool all_allowed = allowed.is_full();

  const FlowNetwork net = build_det_flow(g);
  MaxFlowSolver full(net);
  MaxFlowSolver cut(net);
  std::vector<int> parent_arc(static_cast<std::size_t>(d), -1);
  for (std::size_t i = 0; i < net.arcs().size(); ++i) {
    const auto& a = net.arcs()[i];
    if (a.to == net.primed(v) && a.from >= g.num_nodes() && g.is_observed(a.from - g.num_nodes())) {
      parent_arc[static_cast<std::size_t>(a.from - g.num_nodes())] = static_cast<int>(i);
    }
  }

  std::vector<std::vector<NodeSet>> s_by_size(static_cast<std::size_t>(d + 1));
  for (int k = 1; k <= d; ++k) s_by_size[static_cast<std::size_t>(k)] = subsets_of_size(g.observed(), k);

  bool changed = false;
  std::vector<int> srcs;
  std::vector<int> snks;
  const long cap = cfg.cap_det_pairs ? *cfg.cap_det_pairs : -1;
  const bool sampled = cap >= 0 && cfg.det_order == DetPairOrder::sampled;
  for (int w0 : pa_v - state.solved_parents(v)) {
    const NodeSet solved = state.solved_parents(v) & pa_v;
    for (int p : pa_v) cut.set_arc_enabled(parent_arc[static_cast<std::size_t>(p)], !(solved.contains(p) || p == w0));
    NodeSet t_universe = g.observed();
    t_universe.erase(v);
    t_universe.erase(w0);
    NodeSet cols = solved;
    cols.insert(v);
    cols.insert(w0);

    auto try_pair = [&](NodeSet s, NodeSet t) {
      if (t.intersects(dec_v)) return false;
      if (!all_allowed && !allowed.allowed_block(s, t | cols)) return false;
      const int k = s.size();
      srcs.clear();
      for (int x : s) srcs.push_back(net.unprimed(x));
      snks.clear();
      for (int x : t) snks.push_back(net.primed(x));
      snks.push_back(net.primed(w0));
      if (full.solve(srcs, snks) != k) return false;
      snks.back() = net.primed(v);
      if (cut.solve(srcs, snks, k) >= k) return false;
      state.mark_solved({w0, v}, DetCertificate{v, w0, solved, s, t});
      return true;
    };

    const int max_k = std::min(d, t_universe.size() + 1);
    if (sampled) {
      std::vector<std::vector<NodeSet>> s_sets(static_cast<std::size_t>(max_k + 1));
      std::vector<std::vector<NodeSet>> t_sets(static_cast<std::size_t>(max_k + 1));
      for (int k = 1; k <= max_k; ++k) {
        s_sets[static_cast<std::size_t>(k)] = subsets_of_size(g.observed(), k);
        t_sets[static_cast<std::size_t>(k)] = subsets_of_size(t_universe, k - 1);
      }
      auto& rng = state.rng();
      std::uniform_int_distribution<int> pick_k(1, max_k);
      for (long i = 0; i < cap; ++i) {
        const auto k = static_cast<std::size_t>(pick_k(rng));
        const auto& ss = s_sets[k];
        const auto& ts = t_sets[k];
        const NodeSet s = ss[std::uniform_int_distribution<std::size_t>(0, ss.size() - 1)(rng)];
        const NodeSet t = ts[std::uniform_int_distribution<std::size_t>(0, ts.size() - 1)(rng)];
        if (try_pair(s, t)) {
          changed = true;
          break;
        }
      }
      continue;
    }

    long pairs = 0;
    bool done = false;
    for (int k = 1; k <= max_k && !done; ++k) {
      const auto t_sets = subsets_of_size(t_universe, k - 1);
      for (NodeSet s : s_by_size[static_cast<std::size_t>(k)]) {
        for (NodeSet t : t_sets) {
          if (cap >= 0 && pairs >= cap) {
            done = true;
            break;
          }
          ++pairs;
          if (try_pair(s, t)) {
            changed = true;
            done = true;
            break;
          }
        }
        if (done) break;
      }
    }
  }
  return changed;
}

namespace {

// A frame is determined by the deleted edge set and its allowed covariances; the latter can depend on the
// deletion order when deleted edges point into different nodes.
using FrameKey = std::pair<std::vector<Edge>, std::vector<std::uint64_t>>;

struct RecursionMemo {
  std::map<FrameKey, int> finished_at;  // frame -> solved count after exploring it
};

FrameKey frame_key(const IdentificationState& state) {
  FrameKey key{state.deleted_edges(), {}};
  std::sort(key.first.begin(), key.first.end());
  const auto& allowed = state.allowed_cov();
  for (int x = 0; x < allowed.dimension(); ++x) key.second.push_back(allowed.row(x).bits());
  return key;
}

void explore(IdentificationState& state, const SearchConfig& cfg, RecursionMemo& memo) {
  const LatentFactorGraph& root = state.root_graph();
  while (true) {
    const int before = state.num_solved();
    for (int v : root.observed()) {
      if (state.node_solved(v)) continue;
      const LatentFactorGraph& g = state.graph();
      if (cfg.enable_elf) {
        if (cfg.legacy_htc) {
          lf_htc_subprocedure(g, state, v, cfg);
        } else {
          elf_htc_subprocedure(g, state, v, cfg);
        }
      }
      if (!state.node_solved(v) && cfg.enable_det) det_subprocedure(g, state, v, cfg);
    }
    if (state.all_solved()) return;
    if (cfg.enable_recursion && (!cfg.cap_recursion || state.depth() < *cfg.cap_recursion)) {
      std::vector<Edge> snapshot;
      for (Edge e : state.graph().edges_obs()) {
        if (state.is_solved(e)) snapshot.push_back(e);
      }
      for (Edge e : snapshot) {
        state.push_deletion(e);
        const FrameKey key = frame_key(state);
        auto it = memo.finished_at.find(key);
        if (it != memo.finished_at.end() && it->second == state.num_solved()) {
          state.pop_deletion();
          continue;
        }
        explore(state, cfg, memo);
        state.pop_deletion();
        memo.finished_at[key] = state.num_solved();
        if (state.all_solved()) return;
      }
    }
    if (state.num_solved() == before) return;
  }
}

}  // namespace

IdentificationState combined_algorithm(const LatentFactorGraph& g, const SearchConfig& cfg_in) {
  cfg_in.validate();
  SearchConfig cfg = cfg_in;
  if (cfg.legacy_lf_htc_only) {
    cfg.legacy_htc = true;
    cfg.enable_elf = true;
    cfg.enable_det = false;
    cfg.enable_recursion = false;
  }
  IdentificationState state(g);
  state.seed(cfg.det_sample_seed);
  RecursionMemo memo;
  explore(state, cfg, memo);
  return state;
}

bool is_graph_identified(const IdentificationState& state, const LatentFactorGraph& g) {
  for (Edge e : g.edges_obs()) {
    if (!state.is_solved(e)) return false;
  }
  return true;
}

bool check_lf_htc(const LatentFactorGraph& g, int v, NodeSet y, NodeSet z, NodeSet h,
                  std::optional<NodeSet> solved_nodes, std::string* why) {
  auto fail = [&](const char* msg) {
    if (why != nullptr) *why = msg;
    return false;
  };
  const NodeSet obs = g.observed();
  if (!y.subset_of(obs) || !z.subset_of(obs) || !h.subset_of(g.latent()) || !g.is_observed(v)) {
    return fail("malformed sets");
  }
  NodeSet solved;
  if (solved_nodes) {
    solved = *solved_nodes;
  } else {
    for (int x : obs) {
      if (g.parents_obs(x).empty()) solved.insert(x);
    }
  }
  const NodeSet pa_v = g.parents_obs(v);
  if (z.size() != h.size()) return fail("|Z| != |H|");
  if (y.size() != pa_v.size() + h.size()) return fail("|Y| != |pa(v)| + |H|");
  if (z.contains(v) || z.intersects(pa_v)) return fail("Z meets v or pa(v)");
  NodeSet zv = z;
  zv.insert(v);
  if (y.intersects(zv)) return fail("Y meets Z or v");
  NodeSet lat_y;
  NodeSet lat_zv;
  for (int x : y) lat_y |= g.parents_lat(x);
  for (int x : zv) lat_zv |= g.parents_lat(x);
  if (!(lat_y & lat_zv).subset_of(h)) return fail("shared latent parent outside H");
  if (!z.subset_of(solved)) return fail("edges into Z not solved");
  if (!(y & g.htr(zv, h)).subset_of(solved)) return fail("edges into Y within htr not solved");
  FlowNetwork net = build_elf_flow(g, v, y, z, NodeSet{}, pa_v);
  if (max_flow(net) != y.size()) return fail("no half-trek system");
  return true;
}

bool verify_certificate(const LatentFactorGraph& g, const HtcCertificate& c, std::string* why) {
  auto fail = [&](const char* msg) {
    if (why != nullptr) *why = msg;
    return false;
  };
  const NodeSet w_union = c.w_z_union();
  NodeSet z1;
  for (int zm : c.z) {
    const NodeSet w = c.w_z_of(zm);
    if (!w.subset_of(g.parents_obs(zm))) return fail("W_z not within pa(z)");
    if (w != g.parents_obs(zm)) z1.insert(zm);
  }
  if (static_cast<int>(c.w_z.size()) != c.z.size()) return fail("W_z map does not match Z");
  if (!c.w_v.subset_of(g.parents_obs(c.v))) return fail("W_v not within pa(v)");
  const NodeSet targets = c.w_v | c.z | w_union;
  if (c.z.size() != c.h.size()) return fail("|Z| != |H|");
  if (c.y.size() != targets.size()) return fail("|Y| != |W_v u Z u W_Z|");
  if (c.z.contains(c.v)) return fail("v in Z");
  if (z1.intersects(w_union | c.w_v)) return fail("Z1 meets W_Z or W_v");
  NodeSet zv = c.z;
  zv.insert(c.v);
  if (c.y.intersects(zv)) return fail("Y meets Z or v");
  NodeSet lat_y;
  NodeSet lat_zv;
  for (int x : c.y) lat_y |= g.parents_lat(x);
  for (int x : zv) lat_zv |= g.parents_lat(x);
  if (!(lat_y & lat_zv).subset_of(c.h)) return fail("shared latent parent outside H");
  FlowNetwork net = build_elf_flow(g, c.v, c.y, c.z, w_union, c.w_v);
  if (max_flow(net) != targets.size()) return fail("no half-trek system from Y");
  return true;
}

bool verify_certificate(const LatentFactorGraph& g, const DetCertificate& c, std::string* why) {
  auto fail = [&](const char* msg) {
    if (why != nullptr) *why = msg;
    return false;
  };
  const int k = c.s.size();
  if (c.t.size() + 1 != k) return fail("|S| != |T| + 1");
  if (c.t.contains(c.v) || c.t.contains(c.w0)) return fail("T meets v or w0");
  if (!g.parents_obs(c.v).contains(c.w0)) return fail("w0 is not a parent of v");
  NodeSet tv = c.t;
  tv.insert(c.v);
  if (g.descendants(NodeSet::single(c.v)).intersects(tv)) return fail("descendant of v in T u {v}");
  FlowNetwork net = build_det_flow(g);
  std::vector<int> src;
  std::vector<int> snk;
  for (int x : c.s) src.push_back(net.unprimed(x));
  for (int x : c.t) snk.push_back(net.primed(x));
  snk.push_back(net.primed(c.w0));
  net.sources = src;
  net.sinks = snk;
  if (max_flow(net) != k) return fail("flow to T' u {w0'} below k");
  for (int p : c.deleted_parents | NodeSet::single(c.w0)) net.remove_arc(net.primed(p), net.primed(c.v));
  net.sinks.back() = net.primed(c.v);
  if (max_flow(net) >= k) return fail("flow to T' u {v'} reaches k after cutting");
  return true;
}

}  // namespace lfid
