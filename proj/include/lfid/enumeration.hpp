#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lfid/criteria.hpp"
#include "lfid/graph.hpp"

namespace lfid {

struct LatentPattern {
  int num_observed = 0;
  std::vector<NodeSet> latent_children;  // observed indices per latent node

  static LatentPattern single_factor(int num_observed);
  // h1 -> {1,2,3,4}, h2 -> {4,5,6}.
  static LatentPattern two_factor();
  static LatentPattern by_name(const std::string& name);

  LatentFactorGraph graph(const std::vector<Edge>& edges_obs) const;
};

using Permutation = std::vector<int>;

// Observed-node permutations mapping the family of latent children sets onto itself.
std::vector<Permutation> pattern_automorphisms(const LatentPattern& pattern);

// Observed edge set as a bit string, bit (from * n + to).
using AdjacencyCode = std::uint64_t;

AdjacencyCode permute_code(AdjacencyCode code, const Permutation& p, int n);
AdjacencyCode canonical_code(AdjacencyCode code, const std::vector<Permutation>& group, int n);
std::vector<Edge> code_edges(AdjacencyCode code, int n);

// Canonical codes of all acyclic observed edge sets, per edge count 0..max_edges.
std::vector<std::vector<AdjacencyCode>> enumerate_dag_codes(const LatentPattern& pattern, int max_edges);

std::vector<LatentFactorGraph> enumerate_dags(const LatentPattern& pattern, int num_edges);

struct Method {
  std::string name;
  SearchConfig cfg;
};

// Method columns of the benchmark tables, by name.
Method method_by_name(const std::string& name);
std::vector<std::string> method_names();

struct BenchmarkRow {
  int num_edges = 0;
  int total = 0;
  std::vector<int> identified;    // per method
  std::vector<double> seconds;    // total runtime per method
};

struct BenchmarkOptions {
  int workers = 0;  // 0: OpenMP default
};

// OpenMP-parallel over graphs.
std::vector<BenchmarkRow> run_benchmark(const LatentPattern& pattern, int max_edges,
                                        const std::vector<Method>& methods, const BenchmarkOptions& opts = {});
// Single-threaded reference with identical results.
std::vector<BenchmarkRow> run_benchmark_serial(const LatentPattern& pattern, int max_edges,
                                               const std::vector<Method>& methods);

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows, const std::vector<Method>& methods);
// Summed wall-clock seconds per method and row.
std::string benchmark_runtime_csv(const std::vector<BenchmarkRow>& rows, const std::vector<Method>& methods);
std::string benchmark_markdown(const std::vector<BenchmarkRow>& rows, const std::vector<Method>& methods);

}  // namespace lfid
