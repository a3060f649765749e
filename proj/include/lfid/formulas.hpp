#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "lfid/criteria.hpp"
#include "lfid/graph.hpp"

namespace lfid {

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  enum class Kind { covariance, constant, sum, product, negation, quotient, determinant, solve, lambda };

  Kind kind = Kind::constant;
  int x = -1;  // covariance: first index (x <= y); lambda: edge tail
  int y = -1;  // covariance: second index; lambda: edge head
  std::int64_t num = 0;
  std::int64_t den = 1;
  std::vector<Expr> args;    // sum/product terms; negation operand; quotient (numerator, denominator)
  int dim = 0;               // determinant/solve: square matrix size
  std::vector<Expr> matrix;  // row-major dim x dim
  std::vector<Expr> rhs;     // solve only
  int index = 0;             // solve: selected coordinate
};

class DependencyError : public std::runtime_error {
 public:
  explicit DependencyError(Edge missing);
  Edge edge() const { return edge_; }

 private:
  Edge edge_;
};

class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace expr {

Expr cov(int x, int y);
Expr constant(std::int64_t num, std::int64_t den = 1);
Expr zero();
Expr one();
Expr lambda(Edge e);
// Nested sums and products are flattened and zero/one operands dropped. Product factors are kept in the
// order compound, constant, lambda, covariance (stable within each group).
Expr sum(std::vector<Expr> terms);
Expr product(std::vector<Expr> factors);
Expr negate(Expr e);
Expr difference(Expr a, Expr b);
Expr quotient(Expr num, Expr den);
// 1x1 determinants fold to their entry.
Expr determinant(int dim, std::vector<Expr> entries);
Expr solve(int dim, std::vector<Expr> matrix, std::vector<Expr> rhs, int index);

bool is_zero(const Expr& e);
bool equal(const Expr& a, const Expr& b);
// Edges referenced through lambda handles, ascending.
std::vector<Edge> lambda_edges(const Expr& e);
std::size_t node_count(const Expr& e);

}  // namespace expr

struct EdgeFormula {
  Edge edge;
  Expr formula;
  std::string criterion;      // "eLF-HTC", "LF-HTC" or "determinantal"
  int depth = 0;
  std::vector<Edge> context;  // deleted edges the covariances are adjusted for
};

class FormulaMap {
 public:
  bool contains(Edge e) const { return entries_.count(e) != 0; }
  const EdgeFormula& at(Edge e) const;
  void insert(EdgeFormula f);
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::vector<Edge> edges() const;
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  std::map<Edge, EdgeFormula> entries_;
};

// Covariances of the subgraph obtained by deleting `deletions` (in order, one edge per step),
// expressed through the root graph's covariances and lambda handles of the deleted edges.
class CovarianceContext {
 public:
  CovarianceContext(const LatentFactorGraph& root, std::vector<Edge> deletions);

  const LatentFactorGraph& graph() const { return graph_; }
  const std::vector<Edge>& deletions() const { return deletions_; }
  const AllowedCovariances& allowed() const { return allowed_; }
  Expr cov(int x, int y) const;

 private:
  Expr level_cov(int x, int y, std::size_t level) const;

  LatentFactorGraph root_;
  LatentFactorGraph graph_;
  std::vector<Edge> deletions_;
  AllowedCovariances allowed_;
  mutable std::map<std::tuple<int, int, std::size_t>, Expr> memo_;
};

Expr adjusted_cov(const LatentFactorGraph& root, int x, int y, const std::vector<Edge>& deletions);

struct LinearSystem {
  std::vector<int> rows;         // Y ascending
  std::vector<int> columns;      // unknowns in column order
  int num_targets = 0;           // leading columns that are edge coefficients into v
  int v = -1;
  std::vector<Expr> matrix;      // rows.size() x columns.size(), row-major
  std::vector<Expr> rhs;

  int dim() const { return static_cast<int>(rows.size()); }
  const Expr& entry(int r, int c) const { return matrix[static_cast<std::size_t>(r * dim() + c)]; }
};

// Columns: edge parents of v outside Z2 and W_Z ascending, then Z1 ascending, then Z2 ascending,
// then the rest of W_Z ascending.
LinearSystem build_elf_system(const HtcCertificate& cert, const FormulaMap& fmap, const CovarianceContext& ctx);

std::vector<std::pair<Edge, Expr>> solve_alpha(const LinearSystem& system);

Expr build_det_formula(const DetCertificate& cert, const FormulaMap& fmap, const CovarianceContext& ctx);

// Formulas for every discovery of a finished run, in discovery order.
FormulaMap build_formula_map(const IdentificationState& state);

struct EvalOptions {
  double singular_tol = 1e-12;
};

// Evaluates expressions at a covariance matrix. Lambda handles resolve through `overrides` first,
// then through the formula map; resolved values are cached.
class Evaluator {
 public:
  Evaluator(const Eigen::MatrixXd& sigma, const FormulaMap* fmap, EvalOptions opts = {});
  void set_lambda(Edge e, double value);
  double operator()(const Expr& e);

 private:
  struct Value {
    double value;
    double scale;
  };
  Value eval(const Expr& e);
  double resolve(Edge e);

  const Eigen::MatrixXd& sigma_;
  const FormulaMap* fmap_;
  EvalOptions opts_;
  std::map<Edge, double> lambdas_;
  std::vector<Edge> resolving_;
};

double eval(const Expr& e, const Eigen::MatrixXd& sigma, const FormulaMap* fmap = nullptr, EvalOptions opts = {});

std::string render_latex(const Expr& e, const LatentFactorGraph& g);
std::string render_latex(const LinearSystem& system, const LatentFactorGraph& g);

}  // namespace lfid
