#include "lfid/formulas.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace lfid {

DependencyError::DependencyError(Edge missing)
    : std::runtime_error("no formula for prerequisite edge " + std::to_string(missing.from) + "->" +
                         std::to_string(missing.to)),
      edge_(missing) {}

namespace expr {

namespace {

Expr make(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

bool is_constant(const Expr& e, std::int64_t num) {
  return e->kind == ExprNode::Kind::constant && e->num == num && e->den == 1;
}

}  // namespace

Expr cov(int x, int y) {
  if (x < 0 || y < 0) throw std::invalid_argument("covariance indices must be non-negative");
  ExprNode n;
  n.kind = ExprNode::Kind::covariance;
  n.x = std::min(x, y);
  n.y = std::max(x, y);
  return make(std::move(n));
}

Expr constant(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("zero denominator in constant");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  ExprNode n;
  n.kind = ExprNode::Kind::constant;
  n.num = g == 0 ? 0 : num / g;
  n.den = g == 0 ? 1 : den / g;
  return make(std::move(n));
}

Expr zero() { return constant(0); }
Expr one() { return constant(1); }

Expr lambda(Edge e) {
  ExprNode n;
  n.kind = ExprNode::Kind::lambda;
  n.x = e.from;
  n.y = e.to;
  return make(std::move(n));
}

Expr sum(std::vector<Expr> terms) {
  std::vector<Expr> kept;
  for (auto& t : terms) {
    if (t->kind == ExprNode::Kind::sum) {
      kept.insert(kept.end(), t->args.begin(), t->args.end());
    } else if (!is_zero(t)) {
      kept.push_back(std::move(t));
    }
  }
  if (kept.empty()) return zero();
  if (kept.size() == 1) return kept.front();
  ExprNode n;
  n.kind = ExprNode::Kind::sum;
  n.args = std::move(kept);
  return make(std::move(n));
}

Expr product(std::vector<Expr> factors) {
  std::vector<Expr> kept;
  for (auto& f : factors) {
    if (is_zero(f)) return zero();
    if (f->kind == ExprNode::Kind::product) {
      kept.insert(kept.end(), f->args.begin(), f->args.end());
    } else if (!is_constant(f, 1)) {
      kept.push_back(std::move(f));
    }
  }
  if (kept.empty()) return one();
  if (kept.size() == 1) return kept.front();
  // Compound factors first, then constants, then lambdas, then covariances.
  auto rank = [](const Expr& f) {
    switch (f->kind) {
      case ExprNode::Kind::constant:
        return 1;
      case ExprNode::Kind::lambda:
        return 2;
      case ExprNode::Kind::covariance:
        return 3;
      default:
        return 0;
    }
  };
  std::stable_sort(kept.begin(), kept.end(), [&](const Expr& a, const Expr& b) { return rank(a) < rank(b); });
  ExprNode n;
  n.kind = ExprNode::Kind::product;
  n.args = std::move(kept);
  return make(std::move(n));
}

Expr negate(Expr e) {
  if (is_zero(e)) return e;
  if (e->kind == ExprNode::Kind::constant) return constant(-e->num, e->den);
  if (e->kind == ExprNode::Kind::negation) return e->args.front();
  ExprNode n;
  n.kind = ExprNode::Kind::negation;
  n.args = {std::move(e)};
  return make(std::move(n));
}

Expr difference(Expr a, Expr b) { return sum({std::move(a), negate(std::move(b))}); }

Expr quotient(Expr num, Expr den) {
  if (is_zero(den)) throw std::invalid_argument("quotient with structurally zero denominator");
  if (is_constant(den, 1)) return num;
  if (is_zero(num)) return num;
  ExprNode n;
  n.kind = ExprNode::Kind::quotient;
  n.args = {std::move(num), std::move(den)};
  return make(std::move(n));
}

Expr determinant(int dim, std::vector<Expr> entries) {
  if (dim <= 0 || entries.size() != static_cast<std::size_t>(dim * dim)) {
    throw std::invalid_argument("determinant needs a non-empty square matrix");
  }
  if (dim == 1) return entries.front();
  ExprNode n;
  n.kind = ExprNode::Kind::determinant;
  n.dim = dim;
  n.matrix = std::move(entries);
  return make(std::move(n));
}

Expr solve(int dim, std::vector<Expr> matrix, std::vector<Expr> rhs, int index) {
  if (dim <= 0 || matrix.size() != static_cast<std::size_t>(dim * dim) || rhs.size() != static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("solve needs a square system");
  }
  if (index < 0 || index >= dim) throw std::out_of_range("solve coordinate out of range");
  ExprNode n;
  n.kind = ExprNode::Kind::solve;
  n.dim = dim;
  n.matrix = std::move(matrix);
  n.rhs = std::move(rhs);
  n.index = index;
  return make(std::move(n));
}

bool is_zero(const Expr& e) { return e->kind == ExprNode::Kind::constant && e->num == 0; }

bool equal(const Expr& a, const Expr& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->x != b->x || a->y != b->y || a->num != b->num || a->den != b->den ||
      a->dim != b->dim || a->index != b->index || a->args.size() != b->args.size() ||
      a->matrix.size() != b->matrix.size() || a->rhs.size() != b->rhs.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a->args.size(); ++i) {
    if (!equal(a->args[i], b->args[i])) return false;
  }
  for (std::size_t i = 0; i < a->matrix.size(); ++i) {
    if (!equal(a->matrix[i], b->matrix[i])) return false;
  }
  for (std::size_t i = 0; i < a->rhs.size(); ++i) {
    if (!equal(a->rhs[i], b->rhs[i])) return false;
  }
  return true;
}

namespace {

template <typename F>
void visit(const Expr& e, F&& f) {
  f(e);
  for (const auto& c : e->args) visit(c, f);
  for (const auto& c : e->matrix) visit(c, f);
  for (const auto& c : e->rhs) visit(c, f);
}

}  // namespace

std::vector<Edge> lambda_edges(const Expr& e) {
  std::set<Edge> out;
  visit(e, [&](const Expr& n) {
    if (n->kind == ExprNode::Kind::lambda) out.insert({n->x, n->y});
  });
  return {out.begin(), out.end()};
}

std::size_t node_count(const Expr& e) {
  std::size_t n = 0;
  visit(e, [&](const Expr&) { ++n; });
  return n;
}

}  // namespace expr

const EdgeFormula& FormulaMap::at(Edge e) const {
  auto it = entries_.find(e);
  if (it == entries_.end()) throw DependencyError(e);
  return it->second;
}

void FormulaMap::insert(EdgeFormula f) {
  for (Edge dep : expr::lambda_edges(f.formula)) {
    if (dep == f.edge || !contains(dep)) throw DependencyError(dep);
  }
  const Edge key = f.edge;
  entries_.insert_or_assign(key, std::move(f));
}

std::vector<Edge> FormulaMap::edges() const {
  std::vector<Edge> out;
  for (const auto& [e, f] : entries_) out.push_back(e);
  return out;
}

CovarianceContext::CovarianceContext(const LatentFactorGraph& root, std::vector<Edge> deletions)
    : root_(root),
      graph_(root.without_edges(deletions)),
      deletions_(std::move(deletions)),
      allowed_(allowed_for_deletions(root, deletions_)) {}

Expr CovarianceContext::cov(int x, int y) const {
  if (!graph_.is_observed(x) || !graph_.is_observed(y)) {
    throw GraphError(GraphError::Kind::wrong_endpoint_kind, "covariances are indexed by observed nodes");
  }
  if (!allowed_.allowed(x, y)) {
    throw ContractViolation("covariance (" + graph_.name(x) + "," + graph_.name(y) +
                            ") is not computable in this subgraph");
  }
  return level_cov(x, y, deletions_.size());
}

Expr CovarianceContext::level_cov(int x, int y, std::size_t level) const {
  if (x > y) std::swap(x, y);
  if (level == 0) return expr::cov(x, y);
  const auto key = std::make_tuple(x, y, level);
  if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  const Edge del = deletions_[level - 1];
  std::vector<Expr> terms{level_cov(x, y, level - 1)};
  if (y == del.to) terms.push_back(expr::negate(expr::product({expr::lambda(del), level_cov(x, del.from, level - 1)})));
  if (x == del.to) terms.push_back(expr::negate(expr::product({expr::lambda(del), level_cov(y, del.from, level - 1)})));
  Expr out = expr::sum(std::move(terms));
  memo_.emplace(key, out);
  return out;
}

Expr adjusted_cov(const LatentFactorGraph& root, int x, int y, const std::vector<Edge>& deletions) {
  return CovarianceContext(root, deletions).cov(x, y);
}

namespace {

Expr require_lambda(const FormulaMap& fmap, Edge e) {
  if (!fmap.contains(e)) throw DependencyError(e);
  return expr::lambda(e);
}

}  // namespace

LinearSystem build_elf_system(const HtcCertificate& cert, const FormulaMap& fmap, const CovarianceContext& ctx) {
  const LatentFactorGraph& g = ctx.graph();
  const int v = cert.v;
  const NodeSet w_z_union = cert.w_z_union();
  NodeSet z1;
  NodeSet z2;
  for (const auto& [z, w] : cert.w_z) {
    if (w == g.parents_obs(z)) {
      z2.insert(z);
    } else {
      z1.insert(z);
    }
  }
  const NodeSet targets = cert.w_v - (z2 | w_z_union);
  const NodeSet htr = g.htr(cert.z | NodeSet::single(v), cert.h);

  LinearSystem sys;
  sys.v = v;
  sys.rows = cert.y.to_vector();
  for (int p : targets) sys.columns.push_back(p);
  sys.num_targets = targets.size();
  for (int z : z1) sys.columns.push_back(z);
  for (int z : z2) sys.columns.push_back(z);
  for (int w : w_z_union - z2) sys.columns.push_back(w);
  if (sys.columns.size() != sys.rows.size()) {
    throw ContractViolation("certificate does not give a square system");
  }

  // Row y of (I - Lambda)^T Sigma when y lies in the half-trek reach, else the plain covariance row.
  auto base = [&](int y, int x) {
    std::vector<Expr> terms{ctx.cov(y, x)};
    if (htr.contains(y)) {
      for (int p : g.parents_obs(y)) {
        terms.push_back(expr::negate(expr::product({require_lambda(fmap, {p, y}), ctx.cov(p, x)})));
      }
    }
    return expr::sum(std::move(terms));
  };
  // base(y, x) minus the contribution of x's already known parents outside `unknown`.
  auto reduced = [&](int y, int x, NodeSet unknown) {
    std::vector<Expr> terms{base(y, x)};
    for (int p : g.parents_obs(x) - unknown) {
      terms.push_back(expr::negate(expr::product({base(y, p), require_lambda(fmap, {p, x})})));
    }
    return expr::sum(std::move(terms));
  };

  for (int y : sys.rows) {
    for (std::size_t c = 0; c < sys.columns.size(); ++c) {
      const int col = sys.columns[c];
      if (z1.contains(col)) {
        sys.matrix.push_back(reduced(y, col, cert.w_z_of(col)));
      } else {
        sys.matrix.push_back(base(y, col));
      }
    }
    sys.rhs.push_back(reduced(y, v, cert.w_v));
  }
  return sys;
}

std::vector<std::pair<Edge, Expr>> solve_alpha(const LinearSystem& system) {
  std::vector<std::pair<Edge, Expr>> out;
  const int n = system.dim();
  for (int i = 0; i < system.num_targets; ++i) {
    const Edge e{system.columns[static_cast<std::size_t>(i)], system.v};
    if (n == 1) {
      out.emplace_back(e, expr::quotient(system.rhs.front(), system.matrix.front()));
    } else {
      out.emplace_back(e, expr::solve(n, system.matrix, system.rhs, i));
    }
  }
  return out;
}

Expr build_det_formula(const DetCertificate& cert, const FormulaMap& fmap, const CovarianceContext& ctx) {
  const std::vector<int> rows = cert.s.to_vector();
  const std::vector<int> t = cert.t.to_vector();
  const int k = static_cast<int>(rows.size());
  if (static_cast<int>(t.size()) + 1 != k) throw ContractViolation("determinantal certificate needs |S| = |T| + 1");
  auto minor = [&](int last) {
    std::vector<Expr> entries;
    for (int s : rows) {
      for (int c : t) entries.push_back(ctx.cov(s, c));
      entries.push_back(ctx.cov(s, last));
    }
    return expr::determinant(k, std::move(entries));
  };
  std::vector<Expr> num{minor(cert.v)};
  for (int w : cert.deleted_parents) {
    num.push_back(expr::negate(expr::product({require_lambda(fmap, {w, cert.v}), minor(w)})));
  }
  return expr::quotient(expr::sum(std::move(num)), minor(cert.w0));
}

FormulaMap build_formula_map(const IdentificationState& state) {
  FormulaMap fmap;
  const LatentFactorGraph& root = state.root_graph();
  for (const Discovery& d : state.discoveries()) {
    const CovarianceContext ctx(root, d.context);
    EdgeFormula f;
    f.edge = d.edge;
    f.depth = d.depth;
    f.context = d.context;
    if (const auto* htc = std::get_if<HtcCertificate>(&d.certificate)) {
      f.criterion = htc->legacy ? "LF-HTC" : "eLF-HTC";
      for (auto& [e, formula] : solve_alpha(build_elf_system(*htc, fmap, ctx))) {
        if (e == d.edge) f.formula = formula;
      }
      if (!f.formula) throw ContractViolation("certificate does not cover its discovered edge");
    } else {
      f.criterion = "determinantal";
      f.formula = build_det_formula(std::get<DetCertificate>(d.certificate), fmap, ctx);
    }
    fmap.insert(std::move(f));
  }
  return fmap;
}

Evaluator::Evaluator(const Eigen::MatrixXd& sigma, const FormulaMap* fmap, EvalOptions opts)
    : sigma_(sigma), fmap_(fmap), opts_(opts) {}

void Evaluator::set_lambda(Edge e, double value) { lambdas_[e] = value; }

double Evaluator::operator()(const Expr& e) { return eval(e).value; }

double Evaluator::resolve(Edge e) {
  if (auto it = lambdas_.find(e); it != lambdas_.end()) return it->second;
  if (fmap_ == nullptr || !fmap_->contains(e)) throw DependencyError(e);
  if (std::find(resolving_.begin(), resolving_.end(), e) != resolving_.end()) {
    throw ContractViolation("circular formula dependency");
  }
  resolving_.push_back(e);
  const double value = eval(fmap_->at(e).formula).value;
  resolving_.pop_back();
  lambdas_[e] = value;
  return value;
}

Evaluator::Value Evaluator::eval(const Expr& e) {
  using K = ExprNode::Kind;
  switch (e->kind) {
    case K::covariance: {
      if (e->y >= sigma_.rows()) throw std::out_of_range("covariance index outside the matrix");
      const double s = sigma_(e->x, e->y);
      return {s, std::abs(s)};
    }
    case K::constant: {
      const double c = static_cast<double>(e->num) / static_cast<double>(e->den);
      return {c, std::abs(c)};
    }
    case K::lambda: {
      const double l = resolve({e->x, e->y});
      return {l, std::abs(l)};
    }
    case K::sum: {
      Value out{0.0, 0.0};
      for (const auto& a : e->args) {
        const Value t = eval(a);
        out.value += t.value;
        out.scale += t.scale;
      }
      return out;
    }
    case K::product: {
      Value out{1.0, 1.0};
      for (const auto& a : e->args) {
        const Value t = eval(a);
        out.value *= t.value;
        out.scale *= t.scale;
      }
      return out;
    }
    case K::negation: {
      const Value t = eval(e->args.front());
      return {-t.value, t.scale};
    }
    case K::quotient: {
      const Value n = eval(e->args[0]);
      const Value d = eval(e->args[1]);
      if (!(std::abs(d.value) > opts_.singular_tol * d.scale)) {
        throw DegenerateInput("denominator vanishes at this covariance matrix");
      }
      const double q = n.value / d.value;
      return {q, std::abs(q)};
    }
    case K::determinant:
    case K::solve: {
      const int n = e->dim;
      Eigen::MatrixXd m(n, n);
      Eigen::VectorXd row_scale = Eigen::VectorXd::Zero(n);
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
          const Value t = eval(e->matrix[static_cast<std::size_t>(r * n + c)]);
          m(r, c) = t.value;
          row_scale(r) += t.scale * t.scale;
        }
      }
      double bound = 1.0;
      for (int r = 0; r < n; ++r) bound *= std::sqrt(row_scale(r));
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
      const double det = lu.determinant();
      if (e->kind == K::determinant) return {det, bound};
      if (!(std::abs(det) > opts_.singular_tol * bound)) {
        throw DegenerateInput("linear system is singular at this covariance matrix");
      }
      Eigen::VectorXd b(n);
      for (int r = 0; r < n; ++r) b(r) = eval(e->rhs[static_cast<std::size_t>(r)]).value;
      const double x = lu.solve(b)(e->index);
      return {x, std::abs(x)};
    }
  }
  throw std::logic_error("unknown expression kind");
}

double eval(const Expr& e, const Eigen::MatrixXd& sigma, const FormulaMap* fmap, EvalOptions opts) {
  Evaluator ev(sigma, fmap, opts);
  return ev(e);
}

namespace {

class LatexWriter {
 public:
  explicit LatexWriter(const LatentFactorGraph& g) : g_(g) {
    for (int i = 0; i < g.num_observed(); ++i) compact_ = compact_ && g.name(i).size() == 1;
  }

  std::string pair(int a, int b) const {
    if (compact_) return g_.name(a) + g_.name(b);
    return g_.name(a) + "," + g_.name(b);
  }

  std::string write(const Expr& e) const {
    using K = ExprNode::Kind;
    switch (e->kind) {
      case K::covariance:
        return "\\Sigma_{" + pair(e->x, e->y) + "}";
      case K::lambda:
        return "\\lambda_{" + pair(e->x, e->y) + "}";
      case K::constant:
        if (e->den == 1) return std::to_string(e->num);
        return (e->num < 0 ? "-" : "") + std::string("\\frac{") + std::to_string(std::abs(e->num)) + "}{" +
               std::to_string(e->den) + "}";
      case K::sum: {
        std::string out = write(e->args.front());
        for (std::size_t i = 1; i < e->args.size(); ++i) {
          const Expr& t = e->args[i];
          if (t->kind == K::negation) {
            out += " - " + factor(t->args.front());
          } else if (t->kind == K::constant && t->num < 0) {
            out += " - " + write(expr::constant(-t->num, t->den));
          } else {
            out += " + " + write(t);
          }
        }
        return out;
      }
      case K::product: {
        std::string out;
        for (std::size_t i = 0; i < e->args.size(); ++i) {
          if (i > 0) out += " ";
          out += factor(e->args[i]);
        }
        return out;
      }
      case K::negation:
        return "-" + factor(e->args.front());
      case K::quotient:
        return "\\frac{" + write(e->args[0]) + "}{" + write(e->args[1]) + "}";
      case K::determinant:
        return "\\det" + matrix(e->matrix, e->dim, e->dim);
      case K::solve:
        return "\\left[" + matrix(e->matrix, e->dim, e->dim) + "^{-1}" + matrix(e->rhs, e->dim, 1) + "\\right]_{" +
               std::to_string(e->index + 1) + "}";
    }
    return {};
  }

  std::string matrix(const std::vector<Expr>& entries, int rows, int cols) const {
    std::string out = "\\begin{pmatrix}";
    for (int r = 0; r < rows; ++r) {
      if (r > 0) out += " \\\\ ";
      for (int c = 0; c < cols; ++c) {
        if (c > 0) out += " & ";
        out += write(entries[static_cast<std::size_t>(r * cols + c)]);
      }
    }
    return out + "\\end{pmatrix}";
  }

 private:
  std::string factor(const Expr& e) const {
    using K = ExprNode::Kind;
    if (e->kind == K::sum || e->kind == K::negation || (e->kind == K::constant && e->num < 0)) {
      return "\\left(" + write(e) + "\\right)";
    }
    return write(e);
  }

  const LatentFactorGraph& g_;
  bool compact_ = true;
};

}  // namespace

std::string render_latex(const Expr& e, const LatentFactorGraph& g) { return LatexWriter(g).write(e); }

std::string render_latex(const LinearSystem& system, const LatentFactorGraph& g) {
  LatexWriter w(g);
  const int n = system.dim();
  std::vector<Expr> unknowns;
  for (int i = 0; i < system.num_targets; ++i) {
    unknowns.push_back(expr::lambda({system.columns[static_cast<std::size_t>(i)], system.v}));
  }
  std::string lhs = "\\begin{pmatrix}";
  for (std::size_t i = 0; i < unknowns.size(); ++i) {
    if (i > 0) lhs += " \\\\ ";
    lhs += w.write(unknowns[i]);
  }
  if (static_cast<int>(unknowns.size()) < n) lhs += " \\\\ \\vdots";
  lhs += "\\end{pmatrix}";
  return lhs + " = " + w.matrix(system.matrix, n, n) + "^{-1} " + w.matrix(system.rhs, n, 1);
}

}  // namespace lfid
