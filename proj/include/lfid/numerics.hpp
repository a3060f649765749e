#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lfid/criteria.hpp"
#include "lfid/formulas.hpp"
#include "lfid/graph.hpp"

namespace lfid {

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SamplingSpec {
  // Edge coefficients are uniform on [-coef_max, -coef_min] u [coef_min, coef_max].
  double coef_min = 0.3;
  double coef_max = 1.0;
  double var_min = 0.5;
  double var_max = 1.5;
  int max_retries = 100;

  void validate() const;
};

struct ModelParameters {
  Eigen::MatrixXd lambda;      // d x d, entry (from, to)
  Eigen::MatrixXd gamma;       // l x d, entry (latent - d, to)
  Eigen::VectorXd omega;       // observed noise variances
  Eigen::VectorXd latent_var;  // latent variances

  double coefficient(Edge e) const { return lambda(e.from, e.to); }
};

ModelParameters sample_parameters(const LatentFactorGraph& g, std::uint64_t seed, const SamplingSpec& spec = {});

// (I - Lambda)^-T (Omega + Gamma^T V Gamma) (I - Lambda)^-1, symmetrized.
Eigen::MatrixXd covariance(const ModelParameters& params);

// Per-trial seed derived from a root seed and a trial counter.
std::uint64_t trial_seed(std::uint64_t root, std::uint64_t trial);

struct EdgeEstimate {
  Edge edge;
  double value = 0.0;
  bool degenerate = false;
  std::string message;
};

// One entry per formula, in edge order.
std::vector<EdgeEstimate> estimate(const Eigen::MatrixXd& sigma, const FormulaMap& fmap, EvalOptions opts = {});

struct VerifyOptions {
  int trials = 100;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  SamplingSpec spec;
  // Draws where some formula's denominator or system is this close to singular are redrawn.
  double near_singular = 1e-10;
  int max_resamples = 50;
};

struct EdgeCheck {
  Edge edge;
  double max_rel_error = 0.0;
  int failures = 0;
};

struct VerificationReport {
  int trials = 0;
  int resamples = 0;
  int failures = 0;       // draws where at least one formula missed the tolerance
  double max_rel_error = 0.0;
  std::vector<EdgeCheck> edges;  // solved edges with formulas
  std::vector<Edge> unverified;  // edges without a formula

  bool passed() const { return failures == 0; }
};

double relative_error(double estimate, double truth);

VerificationReport verify_identification(const LatentFactorGraph& g, const IdentificationState& state,
                                         const VerifyOptions& opts = {});

}  // namespace lfid
