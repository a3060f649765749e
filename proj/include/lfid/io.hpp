#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "lfid/criteria.hpp"
#include "lfid/formulas.hpp"
#include "lfid/graph.hpp"
#include "lfid/numerics.hpp"

namespace lfid::io {

using Json = nlohmann::ordered_json;

// Unreadable or malformed input files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kGraphSchema = "lfid.graph/1";
inline constexpr const char* kReportSchema = "lfid.report/1";

// { "observed": [...], "latent": [...], "edges_obs": [[from,to],...], "edges_lat": [[latent,to],...] }
LatentFactorGraph graph_from_json(const Json& j);
Json graph_to_json(const LatentFactorGraph& g);
LatentFactorGraph read_graph(const std::string& path);
std::string graph_to_dot(const LatentFactorGraph& g);

Json certificate_to_json(const LatentFactorGraph& g, const Discovery& d);
Json expr_to_json(const Expr& e, const LatentFactorGraph& g);

// Per-edge status of a finished run.
Json check_report(const LatentFactorGraph& g, const IdentificationState& state);
// Per-edge LaTeX and expression trees; unidentified edges get a placeholder entry.
Json formula_report(const LatentFactorGraph& g, const IdentificationState& state, const FormulaMap& fmap);
std::string formula_latex(const LatentFactorGraph& g, const FormulaMap& fmap);
Json estimate_report(const LatentFactorGraph& g, const std::vector<EdgeEstimate>& estimates,
                     const IdentificationState& state);
Json verify_report(const LatentFactorGraph& g, const VerificationReport& report, const VerifyOptions& opts);

// Header row of observed ids (any order), then one numeric row per header entry.
Eigen::MatrixXd read_covariance_csv(std::istream& in, const LatentFactorGraph& g);
Eigen::MatrixXd read_covariance_csv(const std::string& path, const LatentFactorGraph& g);
void write_covariance_csv(std::ostream& out, const LatentFactorGraph& g, const Eigen::MatrixXd& sigma);

}  // namespace lfid::io
