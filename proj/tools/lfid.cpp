#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lfid/criteria.hpp"
#include "lfid/enumeration.hpp"
#include "lfid/examples.hpp"
#include "lfid/formulas.hpp"
#include "lfid/io.hpp"
#include "lfid/numerics.hpp"

namespace {

using namespace lfid;

constexpr int kExitIdentified = 0;
constexpr int kExitInputError = 1;
constexpr int kExitPartial = 2;
constexpr int kExitVerifyFailed = 3;

struct SearchFlags {
  std::optional<int> cap_det_pairs;
  std::optional<int> cap_h;
  std::optional<int> cap_recursion;
  bool simplify_wz = false;
  bool simplified = false;
  bool legacy_lf_htc = false;
  bool no_det = false;
  bool no_elf = false;
  bool no_rec = false;
  std::string det_order = "lexicographic";
  std::uint64_t det_seed = 0;

  void add_to(CLI::App* app) {
    app->add_option("--cap-det-pairs", cap_det_pairs, "Largest number of (S,T) pairs tried per edge")
        ->check(CLI::NonNegativeNumber);
    app->add_option("--cap-h", cap_h, "Largest latent set H")->check(CLI::NonNegativeNumber);
    app->add_option("--cap-recursion", cap_recursion, "Deepest edge-deletion level")->check(CLI::NonNegativeNumber);
    app->add_flag("--simplify-wz", simplify_wz, "Fix W_z to the unsolved parents of z");
    app->add_flag("--simplified", simplified,
                  "Capped profile: 100 (S,T) pairs, |H| <= 1, fixed W_z, one deletion level; explicit caps override");
    app->add_flag("--legacy-lf-htc", legacy_lf_htc, "Run only the node-wise LF-HTC");
    app->add_flag("--no-det", no_det, "Disable the determinantal criterion");
    app->add_flag("--no-elf", no_elf, "Disable the eLF-HTC");
    app->add_flag("--no-rec", no_rec, "Disable edge-deletion recursion");
    app->add_option("--det-order", det_order, "Order of capped (S,T) pairs")
        ->check(CLI::IsMember({"lexicographic", "sampled"}));
    app->add_option("--det-seed", det_seed, "Seed for sampled (S,T) pairs");
  }

  SearchConfig config() const {
    SearchConfig cfg = simplified ? SearchConfig::simplified_profile() : SearchConfig{};
    if (cap_det_pairs) cfg.cap_det_pairs = cap_det_pairs;
    if (cap_h) cfg.cap_h_size = cap_h;
    if (cap_recursion) cfg.cap_recursion = cap_recursion;
    cfg.simplify_wz_loop = cfg.simplify_wz_loop || simplify_wz;
    cfg.legacy_lf_htc_only = legacy_lf_htc;
    cfg.enable_det = !no_det;
    cfg.enable_elf = !no_elf;
    cfg.enable_recursion = !no_rec;
    cfg.det_order = det_order == "sampled" ? DetPairOrder::sampled : DetPairOrder::lexicographic;
    cfg.det_sample_seed = det_seed;
    cfg.validate();
    return cfg;
  }
};

LatentFactorGraph load_graph(const std::string& spec) {
  if (std::filesystem::exists(spec)) return io::read_graph(spec);
  for (const auto& name : examples::names()) {
    if (name == spec) return examples::by_name(name);
  }
  throw io::InputError("'" + spec + "' is neither a readable file nor a built-in example");
}

int status_code(const IdentificationState& state, const LatentFactorGraph& g) {
  return is_graph_identified(state, g) ? kExitIdentified : kExitPartial;
}

std::string check_markdown(const io::Json& report) {
  std::ostringstream out;
  out << "| edge | status | criterion | depth |\n|---|---|---|---|\n";
  for (const auto& row : report["edges"]) {
    out << "| " << row["edge"][0].get<std::string>() << "->" << row["edge"][1].get<std::string>() << " | "
        << row["status"].get<std::string>() << " | ";
    if (row.contains("criterion")) {
      out << row["criterion"].get<std::string>() << " | " << row["certificate"]["depth"].get<int>();
    } else {
      out << " | ";
    }
    out << " |\n";
  }
  return out.str();
}

int default_workers() {
  if (const char* env = std::getenv("LFID_WORKERS")) {
    try {
      return std::max(0, std::stoi(env));
    } catch (const std::exception&) {
      throw io::InputError("LFID_WORKERS must be an integer");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Identification of direct causal effects in linear models with latent factors"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "lfid 1.0.0");

  std::string graph_spec;
  std::string cov_path;
  std::string format;
  std::string output;
  std::uint64_t seed = 0;
  int trials = 100;
  double tol = 1e-8;
  double singular_tol = EvalOptions{}.singular_tol;
  int workers = -1;
  SearchFlags search;

  auto* check = app.add_subcommand("check", "Run the identification search and report per-edge status");
  auto* formula = app.add_subcommand("formula", "Emit identification formulas");
  auto* estimate = app.add_subcommand("estimate", "Evaluate the formulas at a covariance matrix");
  auto* verify = app.add_subcommand("verify", "Check the formulas against sampled parameters");
  auto* sample = app.add_subcommand("sample", "Write the covariance matrix of randomly sampled parameters");
  auto* enumerate = app.add_subcommand("enumerate", "Count identifiable graphs over a latent pattern");
  auto* dot = app.add_subcommand("dot", "Write the graph in DOT format");

  for (auto* sub : {check, formula, estimate, verify, sample, dot}) {
    sub->add_option("-g,--graph", graph_spec, "Graph JSON file or built-in example name")->required();
  }
  for (auto* sub : {check, formula, estimate, verify}) search.add_to(sub);
  check->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "md"}))->default_str("json");
  formula->add_option("--format", format, "Output format")->check(CLI::IsMember({"latex", "json"}))->default_str("latex");
  formula->add_option("-o,--output", output, "Write to this file instead of stdout");
  estimate->add_option("--cov", cov_path, "Covariance CSV with a header row of node ids")->required();
  estimate->add_option("--tol", singular_tol, "Relative singularity threshold")->check(CLI::PositiveNumber);
  for (auto* sub : {verify, sample}) sub->add_option("--seed", seed, "Root seed");
  verify->add_option("--trials", trials, "Parameter draws")->check(CLI::PositiveNumber);
  verify->add_option("--tol", tol, "Relative error tolerance")->check(CLI::PositiveNumber);

  std::string pattern = "fig5a";
  int max_edges = 6;
  std::vector<std::string> methods{"LF-HTC", "Det+eLF-HTC+rec"};
  std::string runtime_log;
  bool serial = false;
  enumerate->add_option("--pattern", pattern, "Latent pattern")->check(CLI::IsMember({"fig5a", "fig5b"}));
  enumerate->add_option("--max-edges", max_edges, "Largest number of observed edges")->check(CLI::NonNegativeNumber);
  enumerate->add_option("--methods", methods, "Method columns (use 'all' for every preset)");
  enumerate->add_option("--format", format, "Output format")->check(CLI::IsMember({"md", "csv"}))->default_str("md");
  enumerate->add_option("--workers", workers, "Worker threads (default: LFID_WORKERS or all cores)");
  enumerate->add_option("--runtime-log", runtime_log, "Write per-method runtimes as CSV to this file");
  enumerate->add_flag("--serial", serial, "Use the single-threaded reference loop");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  try {
    if (*enumerate) {
      if (format.empty()) format = "md";
      if (methods.size() == 1 && methods.front() == "all") methods = method_names();
      std::vector<Method> ms;
      for (const auto& m : methods) ms.push_back(method_by_name(m));
      const LatentPattern pat = LatentPattern::by_name(pattern);
      BenchmarkOptions opts;
      opts.workers = workers >= 0 ? workers : default_workers();
      const auto rows = serial ? run_benchmark_serial(pat, max_edges, ms) : run_benchmark(pat, max_edges, ms, opts);
      std::cout << (format == "csv" ? benchmark_csv(rows, ms) : benchmark_markdown(rows, ms));
      if (!runtime_log.empty()) {
        std::ofstream log(runtime_log);
        if (!log) throw io::InputError("cannot write runtime log '" + runtime_log + "'");
        log << benchmark_runtime_csv(rows, ms);
      }
      return 0;
    }

    const LatentFactorGraph g = load_graph(graph_spec);
    if (*dot) {
      std::cout << io::graph_to_dot(g);
      return 0;
    }
    if (*sample) {
      io::write_covariance_csv(std::cout, g, covariance(sample_parameters(g, seed)));
      return 0;
    }

    const SearchConfig cfg = search.config();
    const IdentificationState state = combined_algorithm(g, cfg);

    if (*check) {
      const io::Json report = io::check_report(g, state);
      if (format == "md") {
        std::cout << check_markdown(report);
      } else {
        std::cout << report.dump(2) << '\n';
      }
      return status_code(state, g);
    }
    if (*formula) {
      const FormulaMap fmap = build_formula_map(state);
      const std::string text =
          format == "json" ? io::formula_report(g, state, fmap).dump(2) + "\n" : io::formula_latex(g, fmap);
      if (output.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(output);
        if (!out) throw io::InputError("cannot write '" + output + "'");
        out << text;
      }
      return status_code(state, g);
    }
    if (*estimate) {
      const Eigen::MatrixXd sigma = io::read_covariance_csv(cov_path, g);
      const FormulaMap fmap = build_formula_map(state);
      const auto estimates = lfid::estimate(sigma, fmap, EvalOptions{singular_tol});
      std::cout << io::estimate_report(g, estimates, state).dump(2) << '\n';
      bool complete = is_graph_identified(state, g);
      for (const auto& e : estimates) complete = complete && !e.degenerate;
      return complete ? kExitIdentified : kExitPartial;
    }
    if (*verify) {
      VerifyOptions vopts;
      vopts.trials = trials;
      vopts.tol = tol;
      vopts.seed = seed;
      const VerificationReport report = verify_identification(g, state, vopts);
      std::cout << io::verify_report(g, report, vopts).dump(2) << '\n';
      if (!report.passed()) return kExitVerifyFailed;
      return report.unverified.empty() ? kExitIdentified : kExitPartial;
    }
  } catch (const io::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const GraphError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
