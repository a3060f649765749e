#include <doctest.h>

#include <map>
#include <random>

#include "lfid/criteria.hpp"
#include "lfid/examples.hpp"
#include "lfid/formulas.hpp"
#include "lfid/numerics.hpp"
#include "oracles.hpp"

using namespace lfid;

namespace {

using Grid = std::vector<std::vector<std::string>>;

// Every observed edge gets a placeholder formula so systems can reference its coefficient.
FormulaMap placeholders(const LatentFactorGraph& g) {
  FormulaMap fm;
  for (Edge e : g.edges_obs()) fm.insert({e, expr::constant(1), "eLF-HTC", 0, {}});
  return fm;
}

Grid rendered_matrix(const LinearSystem& sys, const LatentFactorGraph& g) {
  Grid out;
  for (int r = 0; r < sys.dim(); ++r) {
    out.emplace_back();
    for (int c = 0; c < sys.dim(); ++c) out.back().push_back(render_latex(sys.entry(r, c), g));
  }
  return out;
}

std::vector<std::string> rendered_rhs(const LinearSystem& sys, const LatentFactorGraph& g) {
  std::vector<std::string> out;
  for (const auto& e : sys.rhs) out.push_back(render_latex(e, g));
  return out;
}

HtcCertificate cert(const LatentFactorGraph& g, const std::string& v, std::vector<std::string> w_v,
                    std::vector<std::string> y, const std::string& z, std::vector<std::string> w_z) {
  return HtcCertificate{g.index(v),
                        g.set_of(w_v),
                        g.set_of(y),
                        g.set_of({z}),
                        {{g.index(z), g.set_of(w_z)}},
                        g.set_of({"h1"}),
                        false};
}

struct Display {
  HtcCertificate certificate;
  std::vector<std::string> columns;
  Grid matrix;
  std::vector<std::string> rhs;
};

void check_display(const LatentFactorGraph& g, const Display& d) {
  const auto fm = placeholders(g);
  const CovarianceContext ctx(g, {});
  const auto sys = build_elf_system(d.certificate, fm, ctx);
  std::vector<std::string> cols;
  for (int c : sys.columns) cols.push_back(g.name(c));
  CHECK(cols == d.columns);
  CHECK(rendered_matrix(sys, g) == d.matrix);
  CHECK(rendered_rhs(sys, g) == d.rhs);
}

Expr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 7 : 2);
  std::uniform_int_distribution<int> idx(0, 2);
  switch (pick(rng)) {
    case 0: return expr::cov(idx(rng), idx(rng));
    case 1: return expr::constant(std::uniform_int_distribution<int>(-3, 3)(rng), std::uniform_int_distribution<int>(1, 3)(rng));
    case 2: return expr::lambda({idx(rng), idx(rng) + 3});
    case 3: return expr::sum({random_expr(rng, depth - 1), random_expr(rng, depth - 1)});
    case 4: return expr::product({random_expr(rng, depth - 1), random_expr(rng, depth - 1)});
    case 5: return expr::negate(random_expr(rng, depth - 1));
    case 6: {
      auto den = random_expr(rng, depth - 1);
      if (expr::is_zero(den)) den = expr::cov(0, 0);
      return expr::quotient(random_expr(rng, depth - 1), den);
    }
    default: {
      std::vector<Expr> m;
      for (int i = 0; i < 4; ++i) m.push_back(random_expr(rng, depth - 1));
      return std::uniform_int_distribution<int>(0, 1)(rng) == 0
                 ? expr::determinant(2, m)
                 : expr::solve(2, m, {random_expr(rng, depth - 1), random_expr(rng, depth - 1)}, idx(rng) % 2);
    }
  }
}

}  // namespace

TEST_CASE("expression builders fold trivial structure") {
  CHECK(expr::equal(expr::cov(3, 1), expr::cov(1, 3)));
  CHECK(expr::equal(expr::constant(4, -6), expr::constant(-2, 3)));
  CHECK(expr::is_zero(expr::sum({expr::zero(), expr::zero()})));
  CHECK(expr::is_zero(expr::product({expr::cov(0, 1), expr::zero()})));
  CHECK(expr::equal(expr::product({expr::one(), expr::cov(0, 1)}), expr::cov(0, 1)));
  CHECK(expr::equal(expr::negate(expr::negate(expr::cov(0, 1))), expr::cov(0, 1)));
  CHECK(expr::equal(expr::negate(expr::constant(2)), expr::constant(-2)));
  CHECK(expr::equal(expr::determinant(1, {expr::cov(0, 2)}), expr::cov(0, 2)));
  CHECK(expr::equal(expr::sum({expr::sum({expr::cov(0, 0), expr::cov(1, 1)}), expr::cov(2, 2)}),
                    expr::sum({expr::cov(0, 0), expr::cov(1, 1), expr::cov(2, 2)})));
  CHECK_THROWS(expr::quotient(expr::cov(0, 1), expr::zero()));
  CHECK_THROWS(expr::constant(1, 0));
  CHECK(expr::lambda_edges(expr::product({expr::lambda({2, 3}), expr::lambda({0, 1}), expr::lambda({2, 3})})) ==
        std::vector<Edge>{{0, 1}, {2, 3}});
}

TEST_CASE("product factors render coefficient first") {
  const auto g = examples::fig2a();
  CHECK(render_latex(expr::product({expr::cov(0, 2), expr::lambda({2, 3})}), g) == "\\lambda_{34} \\Sigma_{13}");
  CHECK(render_latex(expr::difference(expr::cov(0, 3), expr::product({expr::lambda({2, 3}), expr::cov(0, 2)})), g) ==
        "\\Sigma_{14} - \\lambda_{34} \\Sigma_{13}");
}

TEST_CASE("multi-character names use comma subscripts") {
  const auto g = examples::household();
  CHECK(render_latex(expr::cov(g.index("IP"), g.index("HS")), g) == "\\Sigma_{IP,HS}");
}

TEST_CASE("one-factor chain systems") {
  const auto g = examples::fig2a();
  SUBCASE("node 4") {
    check_display(g, {cert(g, "4", {"3"}, {"1", "2", "3"}, "6", {"5"}),
                      {"3", "6", "5"},
                      {{"\\Sigma_{13}", "\\Sigma_{16}", "\\Sigma_{15}"},
                       {"\\Sigma_{23}", "\\Sigma_{26}", "\\Sigma_{25}"},
                       {"\\Sigma_{33}", "\\Sigma_{36}", "\\Sigma_{35}"}},
                      {"\\Sigma_{14}", "\\Sigma_{24}", "\\Sigma_{34}"}});
  }
  SUBCASE("node 6") {
    check_display(g, {cert(g, "6", {"5"}, {"1", "2", "3"}, "4", {"3"}),
                      {"5", "4", "3"},
                      {{"\\Sigma_{15}", "\\Sigma_{14}", "\\Sigma_{13}"},
                       {"\\Sigma_{25}", "\\Sigma_{24}", "\\Sigma_{23}"},
                       {"\\Sigma_{35}", "\\Sigma_{34}", "\\Sigma_{33}"}},
                      {"\\Sigma_{16}", "\\Sigma_{26}", "\\Sigma_{36}"}});
  }
  SUBCASE("node 2") {
    check_display(g, {cert(g, "2", {"1"}, {"1", "6"}, "4", {}),
                      {"1", "4"},
                      {{"\\Sigma_{11}", "\\Sigma_{14} - \\lambda_{34} \\Sigma_{13}"},
                       {"\\Sigma_{16} - \\lambda_{56} \\Sigma_{15}",
                        "\\Sigma_{46} - \\lambda_{56} \\Sigma_{45} - \\left(\\Sigma_{36} - \\lambda_{56} "
                        "\\Sigma_{35}\\right) \\lambda_{34}"}},
                      {"\\Sigma_{12}", "\\Sigma_{26} - \\lambda_{56} \\Sigma_{25}"}});
  }
  SUBCASE("node 3") {
    check_display(g, {cert(g, "3", {"2"}, {"2", "4"}, "1", {}),
                      {"2", "1"},
                      {{"\\Sigma_{22} - \\lambda_{12} \\Sigma_{12}", "\\Sigma_{12} - \\lambda_{12} \\Sigma_{11}"},
                       {"\\Sigma_{24} - \\lambda_{34} \\Sigma_{23}", "\\Sigma_{14} - \\lambda_{34} \\Sigma_{13}"}},
                      {"\\Sigma_{23} - \\lambda_{12} \\Sigma_{13}", "\\Sigma_{34} - \\lambda_{34} \\Sigma_{33}"}});
  }
  SUBCASE("node 5") {
    check_display(
        g, {cert(g, "5", {"1", "4"}, {"1", "3", "4"}, "2", {}),
            {"1", "4", "2"},
            {{"\\Sigma_{11}", "\\Sigma_{14}", "\\Sigma_{12} - \\lambda_{12} \\Sigma_{11}"},
             {"\\Sigma_{13} - \\lambda_{23} \\Sigma_{12}", "\\Sigma_{34} - \\lambda_{23} \\Sigma_{24}",
              "\\Sigma_{23} - \\lambda_{23} \\Sigma_{22} - \\left(\\Sigma_{13} - \\lambda_{23} \\Sigma_{12}\\right) "
              "\\lambda_{12}"},
             {"\\Sigma_{14} - \\lambda_{34} \\Sigma_{13}", "\\Sigma_{44} - \\lambda_{34} \\Sigma_{34}",
              "\\Sigma_{24} - \\lambda_{34} \\Sigma_{23} - \\left(\\Sigma_{14} - \\lambda_{34} \\Sigma_{13}\\right) "
              "\\lambda_{12}"}},
            {"\\Sigma_{15}", "\\Sigma_{35} - \\lambda_{23} \\Sigma_{25}", "\\Sigma_{45} - \\lambda_{34} \\Sigma_{35}"}});
  }
}

TEST_CASE("two-proxy system at node 3") {
  const auto g = examples::fig2b();
  check_display(g, {cert(g, "3", {"2", "4"}, {"1", "2"}, "4", {}),
                    {"2", "4"},
                    {{"\\Sigma_{12}", "\\Sigma_{14}"}, {"\\Sigma_{22}", "\\Sigma_{24}"}},
                    {"\\Sigma_{13}", "\\Sigma_{23}"}});
  const auto sys = build_elf_system(cert(g, "3", {"2", "4"}, {"1", "2"}, "4", {}), placeholders(g),
                                    CovarianceContext(g, {}));
  CHECK(sys.num_targets == 1);
  const auto alpha = solve_alpha(sys);
  REQUIRE(alpha.size() == 1);
  CHECK(alpha[0].first == Edge{g.index("2"), g.index("3")});
}

TEST_CASE("one-dimensional systems become quotients") {
  LinearSystem sys;
  sys.rows = {0};
  sys.columns = {0};
  sys.num_targets = 1;
  sys.v = 1;
  sys.matrix = {expr::cov(0, 0)};
  sys.rhs = {expr::cov(0, 1)};
  const auto alpha = solve_alpha(sys);
  REQUIRE(alpha.size() == 1);
  CHECK(alpha[0].second->kind == ExprNode::Kind::quotient);
  LinearSystem empty;
  CHECK(solve_alpha(empty).empty());
}

TEST_CASE("determinantal formula on the chain with a fork") {
  const auto g = examples::fig4a();
  auto c = [&](const char* a, const char* b) { return expr::cov(g.index(a), g.index(b)); };
  const DetCertificate det{g.index("5"), g.index("4"), NodeSet{}, g.set_of({"2", "3", "4"}), g.set_of({"1", "2"})};
  const Expr f = build_det_formula(det, FormulaMap{}, CovarianceContext(g, {}));
  const Expr expected = expr::quotient(
      expr::determinant(3, {c("1", "2"), c("2", "2"), c("2", "5"), c("1", "3"), c("2", "3"), c("3", "5"), c("1", "4"),
                            c("2", "4"), c("4", "5")}),
      expr::determinant(3, {c("1", "2"), c("2", "2"), c("2", "4"), c("1", "3"), c("2", "3"), c("3", "4"), c("1", "4"),
                            c("2", "4"), c("4", "4")}));
  CHECK(expr::equal(f, expected));
}

TEST_CASE("determinantal formula in the subgraph without 4->5") {
  const auto g = examples::fig4a();
  const Edge e45{g.index("4"), g.index("5")};
  FormulaMap fm;
  fm.insert({e45, expr::constant(1), "determinantal", 0, {}});
  auto c = [&](const char* a, const char* b) { return expr::cov(g.index(a), g.index(b)); };
  const Expr bar15 = expr::difference(c("1", "5"), expr::product({expr::lambda(e45), c("1", "4")}));
  const Expr bar25 = expr::difference(c("2", "5"), expr::product({expr::lambda(e45), c("2", "4")}));
  const DetCertificate det{g.index("3"), g.index("2"), NodeSet{}, g.set_of({"1", "2"}), g.set_of({"5"})};
  const Expr f = build_det_formula(det, fm, CovarianceContext(g, {e45}));
  const Expr expected = expr::quotient(expr::determinant(2, {bar15, c("1", "3"), bar25, c("2", "3")}),
                                       expr::determinant(2, {bar15, c("1", "2"), bar25, c("2", "2")}));
  CHECK(expr::equal(f, expected));
}

TEST_CASE("adjusted covariances after a deletion") {
  const auto g = examples::fig4a();
  const Edge e45{g.index("4"), g.index("5")};
  const Expr adj = adjusted_cov(g, g.index("1"), g.index("5"), {e45});
  CHECK(render_latex(adj, g) == "\\Sigma_{15} - \\lambda_{45} \\Sigma_{14}");
  CHECK(expr::equal(adjusted_cov(g, g.index("1"), g.index("2"), {e45}), expr::cov(g.index("1"), g.index("2"))));
  CHECK_THROWS_AS(adjusted_cov(g, g.index("5"), g.index("5"), {e45}), ContractViolation);
}

TEST_CASE("adjusted covariances match the subgraph covariance") {
  std::mt19937_64 rng(41);
  int checked = 0;
  while (checked < 150) {
    const auto g = oracle::random_graph(rng, {3, 6, 0, 2, 0.45, 0.6, true});
    auto edges = g.edges_obs();
    if (edges.empty()) continue;
    std::shuffle(edges.begin(), edges.end(), rng);
    edges.resize(std::min<std::size_t>(edges.size(), 1 + checked % 3));
    const auto params = sample_parameters(g, rng());
    const Eigen::MatrixXd sigma = covariance(params);
    auto sub_params = params;
    for (Edge e : edges) sub_params.lambda(e.from, e.to) = 0.0;
    const Eigen::MatrixXd sub_sigma = covariance(sub_params);
    const CovarianceContext ctx(g, edges);
    const auto allowed = allowed_for_deletions(g, edges);
    CHECK(ctx.allowed() == allowed);
    Evaluator ev(sigma, nullptr);
    for (Edge e : edges) ev.set_lambda(e, params.coefficient(e));
    for (int x = 0; x < g.num_observed(); ++x) {
      for (int y = x; y < g.num_observed(); ++y) {
        if (!allowed.allowed(x, y)) {
          CHECK_THROWS_AS(ctx.cov(x, y), ContractViolation);
          continue;
        }
        const double value = ev(ctx.cov(x, y));
        CHECK(std::abs(value - sub_sigma(x, y)) <= 1e-10 * std::max(1.0, std::abs(sub_sigma(x, y))));
      }
    }
    ++checked;
  }
}

TEST_CASE("evaluation") {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(3, 3);
  CHECK(eval(expr::quotient(expr::cov(0, 1), expr::cov(0, 0)), id) == 0.0);
  CHECK(eval(expr::determinant(2, {expr::cov(0, 0), expr::cov(0, 1), expr::cov(1, 0), expr::cov(1, 1)}), id) == 1.0);
  Eigen::MatrixXd s = id;
  s(0, 0) = 0.0;
  CHECK_THROWS_AS(eval(expr::quotient(expr::cov(0, 1), expr::cov(0, 0)), s), DegenerateInput);
  const Expr singular = expr::solve(2, {expr::cov(0, 0), expr::cov(0, 0), expr::cov(0, 0), expr::cov(0, 0)},
                                    {expr::cov(0, 1), expr::cov(1, 1)}, 0);
  CHECK_THROWS_AS(eval(singular, id), DegenerateInput);
  Eigen::MatrixXd m(2, 2);
  m << 2.0, 1.0, 1.0, 3.0;
  const Expr solved = expr::solve(2, {expr::cov(0, 0), expr::cov(0, 1), expr::cov(0, 1), expr::cov(1, 1)},
                                  {expr::constant(1), expr::constant(0)}, 1);
  CHECK(eval(solved, m) == doctest::Approx(-0.2));
  CHECK(eval(expr::constant(-3, 4), m) == -0.75);
}

TEST_CASE("missing prerequisites are reported by edge") {
  FormulaMap fm;
  CHECK_THROWS_AS(fm.insert({{0, 1}, expr::lambda({2, 3}), "eLF-HTC", 0, {}}), DependencyError);
  CHECK_THROWS_AS(fm.at({0, 1}), DependencyError);
  try {
    eval(expr::lambda({1, 2}), Eigen::MatrixXd::Identity(3, 3), &fm);
    FAIL("expected DependencyError");
  } catch (const DependencyError& e) {
    CHECK(e.edge() == Edge{1, 2});
  }
  const auto g = examples::fig2a();
  CHECK_THROWS_AS(build_elf_system(cert(g, "2", {"1"}, {"1", "6"}, "4", {}), FormulaMap{}, CovarianceContext(g, {})),
                  DependencyError);
}

TEST_CASE("formula map of a full run covers every solved edge") {
  for (const auto& name : examples::names()) {
    CAPTURE(name);
    const auto g = examples::by_name(name);
    const auto state = combined_algorithm(g);
    const auto fm = build_formula_map(state);
    CHECK(fm.edges() == state.solved_edges());
    for (const auto& [edge, f] : fm) {
      for (Edge dep : expr::lambda_edges(f.formula)) CHECK(fm.contains(dep));
    }
  }
}

TEST_CASE("rendering distinguishes distinct expressions") {
  const auto g = LatentFactorGraph::numbered(6, 0, {}, {});
  std::mt19937_64 rng(42);
  std::map<std::string, Expr> seen;
  for (int i = 0; i < 3000; ++i) {
    const Expr e = random_expr(rng, 3);
    const std::string text = render_latex(e, g);
    auto [it, inserted] = seen.emplace(text, e);
    if (!inserted) {
      CAPTURE(text);
      CHECK(expr::equal(it->second, e));
    }
  }
  CHECK(seen.size() > 500);
}
