#include "lfid/enumeration.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <omp.h>

namespace lfid {

LatentPattern LatentPattern::single_factor(int num_observed) {
  return {num_observed, {NodeSet::first(num_observed)}};
}

LatentPattern LatentPattern::two_factor() {
  return {6, {NodeSet::of({0, 1, 2, 3}), NodeSet::of({3, 4, 5})}};
}

LatentPattern LatentPattern::by_name(const std::string& name) {
  if (name == "fig5a") return single_factor(6);
  if (name == "fig5b") return two_factor();
  throw std::invalid_argument("unknown latent pattern '" + name + "' (expected fig5a or fig5b)");
}

LatentFactorGraph LatentPattern::graph(const std::vector<Edge>& edges_obs) const {
  std::vector<Edge> lat;
  for (std::size_t h = 0; h < latent_children.size(); ++h) {
    for (int c : latent_children[h]) lat.push_back({num_observed + static_cast<int>(h), c});
  }
  return LatentFactorGraph::numbered(num_observed, static_cast<int>(latent_children.size()), edges_obs, lat);
}

std::vector<Permutation> pattern_automorphisms(const LatentPattern& pattern) {
  const int n = pattern.num_observed;
  if (n > 8) throw std::invalid_argument("pattern automorphisms are enumerated for at most 8 observed nodes");
  auto family = [&](const Permutation& p) {
    std::vector<std::uint64_t> sets;
    for (NodeSet c : pattern.latent_children) {
      NodeSet img;
      for (int i : c) img.insert(p[static_cast<std::size_t>(i)]);
      sets.push_back(img.bits());
    }
    std::sort(sets.begin(), sets.end());
    return sets;
  };
  Permutation p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  const auto reference = family(p);
  std::vector<Permutation> group;
  do {
    if (family(p) == reference) group.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return group;
}

AdjacencyCode permute_code(AdjacencyCode code, const Permutation& p, int n) {
  AdjacencyCode out = 0;
  for (int b : NodeSet(code)) {
    const int i = b / n;
    const int j = b % n;
    out |= AdjacencyCode{1} << (p[static_cast<std::size_t>(i)] * n + p[static_cast<std::size_t>(j)]);
  }
  return out;
}

AdjacencyCode canonical_code(AdjacencyCode code, const std::vector<Permutation>& group, int n) {
  AdjacencyCode best = code;
  for (const auto& p : group) best = std::min(best, permute_code(code, p, n));
  return best;
}

std::vector<Edge> code_edges(AdjacencyCode code, int n) {
  std::vector<Edge> edges;
  for (int b : NodeSet(code)) edges.push_back({b / n, b % n});
  return edges;
}

namespace {

bool reaches(AdjacencyCode code, int n, int from, int to) {
  NodeSet seen = NodeSet::single(from);
  NodeSet frontier = seen;
  while (!frontier.empty()) {
    NodeSet next;
    for (int u : frontier) next |= NodeSet((code >> (u * n)) & ((AdjacencyCode{1} << n) - 1));
    next -= seen;
    if (next.contains(to)) return true;
    seen |= next;
    frontier = next;
  }
  return false;
}

}  // namespace

std::vector<std::vector<AdjacencyCode>> enumerate_dag_codes(const LatentPattern& pattern, int max_edges) {
  const int n = pattern.num_observed;
  if (n * n > 64) throw std::invalid_argument("adjacency codes support at most 8 observed nodes");
  const int limit = n * (n - 1) / 2;
  if (max_edges > limit) throw std::invalid_argument("a DAG on these nodes has at most C(n,2) edges");
  const auto group = pattern_automorphisms(pattern);
  std::vector<std::vector<AdjacencyCode>> levels{{0}};
  for (int k = 1; k <= max_edges; ++k) {
    std::unordered_set<AdjacencyCode> seen;
    for (AdjacencyCode code : levels.back()) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const AdjacencyCode bit = AdjacencyCode{1} << (i * n + j);
          if (i == j || (code & bit) != 0) continue;
          if (reaches(code, n, j, i)) continue;
          seen.insert(canonical_code(code | bit, group, n));
        }
      }
    }
    std::vector<AdjacencyCode> level(seen.begin(), seen.end());
    std::sort(level.begin(), level.end());
    levels.push_back(std::move(level));
  }
  return levels;
}

std::vector<LatentFactorGraph> enumerate_dags(const LatentPattern& pattern, int num_edges) {
  const auto levels = enumerate_dag_codes(pattern, num_edges);
  std::vector<LatentFactorGraph> out;
  for (AdjacencyCode c : levels.back()) out.push_back(pattern.graph(code_edges(c, pattern.num_observed)));
  return out;
}

std::vector<std::string> method_names() {
  return {"LF-HTC",      "LF-HTC+rec",      "Det",         "Det+rec",         "Det+LF-HTC",
          "Det+LF-HTC+rec", "eLF-HTC",      "eLF-HTC+rec", "Det+eLF-HTC",     "Det+eLF-HTC+rec",
          "No-Wz-loop",  "Det<=10",         "Det<=100",    "Det<=500"};
}

Method method_by_name(const std::string& name) {
  SearchConfig cfg;
  std::string base = name;
  if (name == "No-Wz-loop") {
    cfg.simplify_wz_loop = true;
    return {name, cfg};
  }
  if (name.rfind("Det<=", 0) == 0) {
    cfg.cap_det_pairs = std::stoi(name.substr(5));
    return {name, cfg};
  }
  const std::string rec = "+rec";
  cfg.enable_recursion = base.size() > rec.size() && base.compare(base.size() - rec.size(), rec.size(), rec) == 0;
  if (cfg.enable_recursion) base.resize(base.size() - rec.size());
  if (base == "LF-HTC") {
    cfg.legacy_htc = true;
    cfg.enable_det = false;
  } else if (base == "Det") {
    cfg.enable_elf = false;
  } else if (base == "Det+LF-HTC") {
    cfg.legacy_htc = true;
  } else if (base == "eLF-HTC") {
    cfg.enable_det = false;
  } else if (base != "Det+eLF-HTC") {
    throw std::invalid_argument("unknown method '" + name + "'");
  }
  return {name, cfg};
}

namespace {

std::vector<BenchmarkRow> run_impl(const LatentPattern& pattern, int max_edges, const std::vector<Method>& methods,
                                   bool parallel, int workers) {
  const auto levels = enumerate_dag_codes(pattern, max_edges);
  const std::size_t m = methods.size();
  std::vector<BenchmarkRow> rows;
  for (int k = 0; k <= max_edges; ++k) {
    const auto& codes = levels[static_cast<std::size_t>(k)];
    const long count = static_cast<long>(codes.size());
    std::vector<char> ok(codes.size() * m, 0);
    std::vector<double> secs(codes.size() * m, 0.0);
    auto work = [&](long i) {
      const auto g = pattern.graph(code_edges(codes[static_cast<std::size_t>(i)], pattern.num_observed));
      for (std::size_t j = 0; j < m; ++j) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto state = combined_algorithm(g, methods[j].cfg);
        const auto t1 = std::chrono::steady_clock::now();
        ok[static_cast<std::size_t>(i) * m + j] = is_graph_identified(state, g) ? 1 : 0;
        secs[static_cast<std::size_t>(i) * m + j] = std::chrono::duration<double>(t1 - t0).count();
      }
    };
    if (parallel) {
      const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
      for (long i = 0; i < count; ++i) work(i);
    } else {
      for (long i = 0; i < count; ++i) work(i);
    }
    BenchmarkRow row;
    row.num_edges = k;
    row.total = static_cast<int>(count);
    row.identified.assign(m, 0);
    row.seconds.assign(m, 0.0);
    for (std::size_t i = 0; i < codes.size(); ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        row.identified[j] += ok[i * m + j];
        row.seconds[j] += secs[i * m + j];
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<BenchmarkRow> run_benchmark(const LatentPattern& pattern, int max_edges,
                                        const std::vector<Method>& methods, const BenchmarkOptions& opts) {
  return run_impl(pattern, max_edges, methods, true, opts.workers);
}

std::vector<BenchmarkRow> run_benchmark_serial(const LatentPattern& pattern, int max_edges,
                                               const std::vector<Method>& methods) {
  return run_impl(pattern, max_edges, methods, false, 1);
}

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows, const std::vector<Method>& methods) {
  std::ostringstream out;
  out << "edges,total";
  for (const auto& m : methods) out << ',' << m.name;
  out << '\n';
  for (const auto& r : rows) {
    out << r.num_edges << ',' << r.total;
    for (int c : r.identified) out << ',' << c;
    out << '\n';
  }
  return out.str();
}

std::string benchmark_runtime_csv(const std::vector<BenchmarkRow>& rows, const std::vector<Method>& methods) {
  std::ostringstream out;
  out << "edges,graphs";
  for (const auto& m : methods) out << ',' << m.name << "_seconds";
  out << '\n';
  for (const auto& r : rows) {
    out << r.num_edges << ',' << r.total;
    for (double s : r.seconds) out << ',' << s;
    out << '\n';
  }
  return out.str();
}

std::string benchmark_markdown(const std::vector<BenchmarkRow>& rows, const std::vector<Method>& methods) {
  std::ostringstream out;
  out << "| edges | total |";
  for (const auto& m : methods) out << ' ' << m.name << " |";
  out << "\n|---|---|";
  for (std::size_t i = 0; i < methods.size(); ++i) out << "---|";
  out << '\n';
  for (const auto& r : rows) {
    out << "| " << r.num_edges << " | " << r.total << " |";
    for (int c : r.identified) out << ' ' << c << " |";
    out << '\n';
  }
  return out.str();
}

}  // namespace lfid
