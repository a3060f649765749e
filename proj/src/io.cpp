#include "lfid/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace lfid::io {

namespace {

std::string node_id(const Json& v, const std::string& field) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw InputError("field '" + field + "': node ids must be strings or integers");
}

std::vector<std::string> id_list(const Json& j, const std::string& field, bool required) {
  if (!j.contains(field)) {
    if (required) throw InputError("missing field '" + field + "'");
    return {};
  }
  const Json& arr = j.at(field);
  if (!arr.is_array()) throw InputError("field '" + field + "' must be an array");
  std::vector<std::string> out;
  for (const auto& v : arr) out.push_back(node_id(v, field));
  return out;
}

std::vector<NamedEdge> edge_list(const Json& j, const std::string& field) {
  if (!j.contains(field)) return {};
  const Json& arr = j.at(field);
  if (!arr.is_array()) throw InputError("field '" + field + "' must be an array");
  std::vector<NamedEdge> out;
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2) throw InputError("field '" + field + "': each edge must be a [from, to] pair");
    out.emplace_back(node_id(e[0], field), node_id(e[1], field));
  }
  return out;
}

Json names(const LatentFactorGraph& g, NodeSet s) { return g.names_of(s); }

Json edge_json(const LatentFactorGraph& g, Edge e) { return Json::array({g.name(e.from), g.name(e.to)}); }

Json edges_json(const LatentFactorGraph& g, const std::vector<Edge>& edges) {
  Json out = Json::array();
  for (Edge e : edges) out.push_back(edge_json(g, e));
  return out;
}

std::string criterion_name(const Discovery& d) {
  if (const auto* h = std::get_if<HtcCertificate>(&d.certificate)) return h->legacy ? "LF-HTC" : "eLF-HTC";
  return "determinantal";
}

const Discovery* find_discovery(const IdentificationState& state, Edge e) {
  for (const auto& d : state.discoveries()) {
    if (d.edge == e) return &d;
  }
  return nullptr;
}

}  // namespace

LatentFactorGraph graph_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("graph file must hold a JSON object");
  if (j.contains("schema") && j.at("schema") != kGraphSchema) {
    throw InputError("field 'schema': expected \"" + std::string(kGraphSchema) + "\"");
  }
  return LatentFactorGraph(id_list(j, "observed", true), id_list(j, "latent", false), edge_list(j, "edges_obs"),
                           edge_list(j, "edges_lat"));
}

Json graph_to_json(const LatentFactorGraph& g) {
  Json j;
  j["schema"] = kGraphSchema;
  j["observed"] = names(g, g.observed());
  j["latent"] = names(g, g.latent());
  j["edges_obs"] = edges_json(g, g.edges_obs());
  j["edges_lat"] = edges_json(g, g.edges_lat());
  return j;
}

LatentFactorGraph read_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open graph file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("graph file '" + path + "' is not valid JSON: " + e.what());
  }
  return graph_from_json(j);
}

std::string graph_to_dot(const LatentFactorGraph& g) {
  std::ostringstream out;
  out << "digraph G {\n";
  for (int i : g.observed()) out << "  \"" << g.name(i) << "\" [shape=circle];\n";
  for (int h : g.latent()) out << "  \"" << g.name(h) << "\" [shape=circle, style=filled, fillcolor=lightgray];\n";
  for (Edge e : g.edges_obs()) out << "  \"" << g.name(e.from) << "\" -> \"" << g.name(e.to) << "\";\n";
  for (Edge e : g.edges_lat()) {
    out << "  \"" << g.name(e.from) << "\" -> \"" << g.name(e.to) << "\" [style=dashed];\n";
  }
  out << "}\n";
  return out.str();
}

Json certificate_to_json(const LatentFactorGraph& g, const Discovery& d) {
  Json j;
  j["edge"] = edge_json(g, d.edge);
  j["criterion"] = criterion_name(d);
  j["depth"] = d.depth;
  j["context"] = edges_json(g, d.context);
  if (const auto* h = std::get_if<HtcCertificate>(&d.certificate)) {
    j["v"] = g.name(h->v);
    j["W_v"] = names(g, h->w_v);
    j["Y"] = names(g, h->y);
    j["Z"] = names(g, h->z);
    Json wz = Json::object();
    for (const auto& [z, w] : h->w_z) wz[g.name(z)] = names(g, w);
    j["W_z"] = wz;
    j["H"] = names(g, h->h);
  } else {
    const auto& c = std::get<DetCertificate>(d.certificate);
    j["v"] = g.name(c.v);
    j["w0"] = g.name(c.w0);
    j["deleted_parents"] = names(g, c.deleted_parents);
    j["S"] = names(g, c.s);
    j["T"] = names(g, c.t);
    j["v_in_S"] = c.v_in_s();
  }
  return j;
}

Json expr_to_json(const Expr& e, const LatentFactorGraph& g) {
  using K = ExprNode::Kind;
  auto list = [&](const std::vector<Expr>& xs) {
    Json arr = Json::array();
    for (const auto& x : xs) arr.push_back(expr_to_json(x, g));
    return arr;
  };
  Json j;
  switch (e->kind) {
    case K::covariance:
      j["op"] = "cov";
      j["nodes"] = Json::array({g.name(e->x), g.name(e->y)});
      break;
    case K::lambda:
      j["op"] = "lambda";
      j["edge"] = Json::array({g.name(e->x), g.name(e->y)});
      break;
    case K::constant:
      j["op"] = "const";
      j["num"] = e->num;
      j["den"] = e->den;
      break;
    case K::sum:
      j["op"] = "sum";
      j["args"] = list(e->args);
      break;
    case K::product:
      j["op"] = "product";
      j["args"] = list(e->args);
      break;
    case K::negation:
      j["op"] = "neg";
      j["arg"] = expr_to_json(e->args.front(), g);
      break;
    case K::quotient:
      j["op"] = "quotient";
      j["num"] = expr_to_json(e->args[0], g);
      j["den"] = expr_to_json(e->args[1], g);
      break;
    case K::determinant:
      j["op"] = "det";
      j["dim"] = e->dim;
      j["matrix"] = list(e->matrix);
      break;
    case K::solve:
      j["op"] = "solve";
      j["dim"] = e->dim;
      j["matrix"] = list(e->matrix);
      j["rhs"] = list(e->rhs);
      j["index"] = e->index;
      break;
  }
  return j;
}

Json check_report(const LatentFactorGraph& g, const IdentificationState& state) {
  Json j;
  j["schema"] = kReportSchema;
  j["kind"] = "check";
  const auto edges = g.edges_obs();
  int solved = 0;
  Json rows = Json::array();
  for (Edge e : edges) {
    Json row;
    row["edge"] = edge_json(g, e);
    if (const Discovery* d = find_discovery(state, e)) {
      ++solved;
      row["status"] = "solved";
      row["criterion"] = criterion_name(*d);
      row["certificate"] = certificate_to_json(g, *d);
    } else {
      row["status"] = "unsolved";
    }
    rows.push_back(std::move(row));
  }
  j["identified"] = solved == static_cast<int>(edges.size());
  j["solved"] = solved;
  j["total"] = edges.size();
  j["edges"] = std::move(rows);
  return j;
}

Json formula_report(const LatentFactorGraph& g, const IdentificationState& state, const FormulaMap& fmap) {
  Json j;
  j["schema"] = kReportSchema;
  j["kind"] = "formula";
  Json rows = Json::array();
  for (Edge e : g.edges_obs()) {
    Json row;
    row["edge"] = edge_json(g, e);
    if (fmap.contains(e)) {
      const EdgeFormula& f = fmap.at(e);
      row["status"] = "identified";
      row["criterion"] = f.criterion;
      row["depth"] = f.depth;
      row["context"] = edges_json(g, f.context);
      row["latex"] = render_latex(f.formula, g);
      row["expression"] = expr_to_json(f.formula, g);
      if (const Discovery* d = find_discovery(state, e)) row["certificate"] = certificate_to_json(g, *d);
    } else {
      row["status"] = "unidentified";
      row["latex"] = nullptr;
    }
    rows.push_back(std::move(row));
  }
  j["formulas"] = std::move(rows);
  return j;
}

std::string formula_latex(const LatentFactorGraph& g, const FormulaMap& fmap) {
  std::ostringstream out;
  out << "\\begin{align*}\n";
  const auto edges = g.edges_obs();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge e = edges[i];
    out << "  " << render_latex(expr::lambda(e), g) << " &= ";
    if (fmap.contains(e)) {
      out << render_latex(fmap.at(e).formula, g);
    } else {
      out << "\\text{unidentified}";
    }
    out << (i + 1 < edges.size() ? " \\\\\n" : "\n");
  }
  out << "\\end{align*}\n";
  return out.str();
}

Json estimate_report(const LatentFactorGraph& g, const std::vector<EdgeEstimate>& estimates,
                     const IdentificationState& state) {
  Json j;
  j["schema"] = kReportSchema;
  j["kind"] = "estimate";
  Json rows = Json::array();
  for (Edge e : g.edges_obs()) {
    Json row;
    row["edge"] = edge_json(g, e);
    const EdgeEstimate* est = nullptr;
    for (const auto& x : estimates) {
      if (x.edge == e) est = &x;
    }
    if (est == nullptr) {
      row["status"] = state.is_solved(e) ? "no formula" : "unidentified";
    } else if (est->degenerate) {
      row["status"] = "degenerate";
      row["message"] = est->message;
    } else {
      row["status"] = "estimated";
      row["value"] = est->value;
    }
    rows.push_back(std::move(row));
  }
  j["estimates"] = std::move(rows);
  return j;
}

Json verify_report(const LatentFactorGraph& g, const VerificationReport& report, const VerifyOptions& opts) {
  Json j;
  j["schema"] = kReportSchema;
  j["kind"] = "verify";
  j["seed"] = opts.seed;
  j["tolerance"] = opts.tol;
  j["trials"] = report.trials;
  j["resamples"] = report.resamples;
  j["failures"] = report.failures;
  j["max_rel_error"] = report.max_rel_error;
  Json rows = Json::array();
  for (const auto& c : report.edges) {
    Json row;
    row["edge"] = edge_json(g, c.edge);
    row["max_rel_error"] = c.max_rel_error;
    row["failures"] = c.failures;
    rows.push_back(std::move(row));
  }
  j["edges"] = std::move(rows);
  j["unverified"] = edges_json(g, report.unverified);
  return j;
}

Eigen::MatrixXd read_covariance_csv(std::istream& in, const LatentFactorGraph& g) {
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t\r\"");
      const auto e = cell.find_last_not_of(" \t\r\"");
      cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
    }
    return cells;
  };
  std::string line;
  if (!std::getline(in, line)) throw InputError("covariance CSV is empty");
  const auto header = split(line);
  const int d = g.num_observed();
  if (static_cast<int>(header.size()) != d) {
    throw InputError("covariance CSV header has " + std::to_string(header.size()) + " columns, graph has " +
                     std::to_string(d) + " observed nodes");
  }
  std::vector<int> index;
  NodeSet seen;
  for (const auto& id : header) {
    int i = -1;
    try {
      i = g.index(id);
    } catch (const GraphError&) {
    }
    if (!g.is_observed(i)) throw InputError("covariance CSV header: '" + id + "' is not an observed node");
    if (seen.contains(i)) throw InputError("covariance CSV header: '" + id + "' appears twice");
    seen.insert(i);
    index.push_back(i);
  }
  Eigen::MatrixXd sigma(d, d);
  for (int r = 0; r < d; ++r) {
    if (!std::getline(in, line)) throw InputError("covariance CSV has fewer than " + std::to_string(d) + " rows");
    const auto cells = split(line);
    if (static_cast<int>(cells.size()) != d) {
      throw InputError("covariance CSV row " + std::to_string(r + 1) + " has " + std::to_string(cells.size()) +
                       " entries");
    }
    for (int c = 0; c < d; ++c) {
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(cells[static_cast<std::size_t>(c)], &used);
        if (used != cells[static_cast<std::size_t>(c)].size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw InputError("covariance CSV row " + std::to_string(r + 1) + ": '" + cells[static_cast<std::size_t>(c)] +
                         "' is not a number");
      }
      sigma(index[static_cast<std::size_t>(r)], index[static_cast<std::size_t>(c)]) = v;
    }
  }
  const double scale = sigma.cwiseAbs().maxCoeff();
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, scale)) {
    throw InputError("covariance matrix is not symmetric");
  }
  if (d > 0 && Eigen::LLT<Eigen::MatrixXd>(sigma).info() != Eigen::Success) {
    throw InputError("covariance matrix is not positive definite");
  }
  return sigma;
}

Eigen::MatrixXd read_covariance_csv(const std::string& path, const LatentFactorGraph& g) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open covariance file '" + path + "'");
  return read_covariance_csv(in, g);
}

void write_covariance_csv(std::ostream& out, const LatentFactorGraph& g, const Eigen::MatrixXd& sigma) {
  const int d = g.num_observed();
  for (int i = 0; i < d; ++i) out << (i > 0 ? "," : "") << g.name(i);
  out << '\n' << std::setprecision(17);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) out << (c > 0 ? "," : "") << sigma(r, c);
    out << '\n';
  }
}

}  // namespace lfid::io
