#include "lfid/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace lfid {

void SamplingSpec::validate() const {
  if (!(coef_min >= 0.0 && coef_min <= coef_max)) throw SamplingError("coefficient range must satisfy 0 <= min <= max");
  if (!(var_min > 0.0 && var_min <= var_max)) throw SamplingError("variance range must satisfy 0 < min <= max");
  if (max_retries < 1) throw SamplingError("max_retries must be positive");
}

std::uint64_t trial_seed(std::uint64_t root, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(root), static_cast<std::uint32_t>(root >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

ModelParameters sample_parameters(const LatentFactorGraph& g, std::uint64_t seed, const SamplingSpec& spec) {
  spec.validate();
  const int d = g.num_observed();
  const int l = g.num_latent();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> magnitude(spec.coef_min, spec.coef_max);
  std::uniform_real_distribution<double> variance(spec.var_min, spec.var_max);
  std::bernoulli_distribution sign(0.5);
  auto coef = [&] { return sign(rng) ? magnitude(rng) : -magnitude(rng); };

  const auto edges = g.edges_obs();
  for (int attempt = 0; attempt < spec.max_retries; ++attempt) {
    ModelParameters p;
    p.lambda = Eigen::MatrixXd::Zero(d, d);
    p.gamma = Eigen::MatrixXd::Zero(l, d);
    p.omega.resize(d);
    p.latent_var.resize(l);
    for (Edge e : edges) p.lambda(e.from, e.to) = coef();
    for (Edge e : g.edges_lat()) p.gamma(e.from - d, e.to) = coef();
    for (int i = 0; i < d; ++i) p.omega(i) = variance(rng);
    for (int i = 0; i < l; ++i) p.latent_var(i) = variance(rng);
    const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(d, d) - p.lambda;
    if (d == 0 || std::abs(m.fullPivLu().determinant()) > 1e-9) return p;
  }
  throw SamplingError("I - Lambda stayed near-singular after " + std::to_string(spec.max_retries) + " draws");
}

Eigen::MatrixXd covariance(const ModelParameters& params) {
  const auto d = params.lambda.rows();
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(d, d) - params.lambda;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (d > 0 && std::abs(lu.determinant()) <= 1e-9) throw SamplingError("I - Lambda is singular");
  Eigen::MatrixXd omega = params.omega.asDiagonal();
  omega += params.gamma.transpose() * params.latent_var.asDiagonal() * params.gamma;
  const Eigen::MatrixXd inv = lu.inverse();
  const Eigen::MatrixXd sigma = inv.transpose() * omega * inv;
  return (sigma + sigma.transpose()) / 2.0;
}

std::vector<EdgeEstimate> estimate(const Eigen::MatrixXd& sigma, const FormulaMap& fmap, EvalOptions opts) {
  std::vector<EdgeEstimate> out;
  Evaluator ev(sigma, &fmap, opts);
  for (const auto& [edge, f] : fmap) {
    EdgeEstimate est;
    est.edge = edge;
    try {
      est.value = ev(expr::lambda(edge));
    } catch (const DegenerateInput& err) {
      est.degenerate = true;
      est.message = err.what();
    }
    out.push_back(std::move(est));
  }
  return out;
}

double relative_error(double estimate, double truth) {
  const double diff = std::abs(estimate - truth);
  return truth == 0.0 ? diff : diff / std::abs(truth);
}

VerificationReport verify_identification(const LatentFactorGraph& g, const IdentificationState& state,
                                         const VerifyOptions& opts) {
  VerificationReport report;
  const FormulaMap fmap = build_formula_map(state);
  for (Edge e : g.edges_obs()) {
    if (fmap.contains(e)) {
      report.edges.push_back({e});
    } else {
      report.unverified.push_back(e);
    }
  }
  if (report.edges.empty()) return report;

  const EvalOptions eval_opts{opts.near_singular};
  std::uint64_t counter = 0;
  for (int t = 0; t < opts.trials; ++t) {
    ++report.trials;
    bool done = false;
    for (int attempt = 0; attempt <= opts.max_resamples && !done; ++attempt) {
      const ModelParameters params = sample_parameters(g, trial_seed(opts.seed, counter++), opts.spec);
      const Eigen::MatrixXd sigma = covariance(params);
      Evaluator ev(sigma, &fmap, eval_opts);
      std::vector<double> values;
      try {
        for (const auto& check : report.edges) values.push_back(ev(expr::lambda(check.edge)));
      } catch (const DegenerateInput&) {
        ++report.resamples;
        continue;
      }
      bool failed = false;
      for (std::size_t i = 0; i < values.size(); ++i) {
        EdgeCheck& check = report.edges[i];
        const double err = relative_error(values[i], params.coefficient(check.edge));
        check.max_rel_error = std::max(check.max_rel_error, err);
        report.max_rel_error = std::max(report.max_rel_error, err);
        if (!(err <= opts.tol)) {
          ++check.failures;
          failed = true;
        }
      }
      if (failed) ++report.failures;
      done = true;
    }
    if (!done) ++report.failures;
  }
  return report;
}

}  // namespace lfid
