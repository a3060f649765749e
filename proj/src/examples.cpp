#include "lfid/examples.hpp"

namespace lfid::examples {

namespace {

LatentFactorGraph one_factor_six(const std::vector<NamedEdge>& edges) {
  std::vector<NamedEdge> lat;
  for (int i = 1; i <= 6; ++i) lat.emplace_back("h1", std::to_string(i));
  return {{"1", "2", "3", "4", "5", "6"}, {"h1"}, edges, lat};
}

}  // namespace

LatentFactorGraph fig2a() {
  return one_factor_six({{"1", "2"}, {"2", "3"}, {"3", "4"}, {"4", "5"}, {"5", "6"}, {"1", "5"}});
}

LatentFactorGraph fig2b() {
  return {{"1", "2", "3", "4"},
          {"h1"},
          {{"1", "2"}, {"2", "3"}, {"4", "3"}},
          {{"h1", "1"}, {"h1", "2"}, {"h1", "3"}, {"h1", "4"}}};
}

LatentFactorGraph fig4a() {
  return one_factor_six({{"1", "2"}, {"2", "3"}, {"3", "4"}, {"4", "5"}, {"4", "6"}});
}

LatentFactorGraph household() {
  return {{"IP", "HS", "HA", "TA", "TC"},
          {"SES"},
          {{"HS", "HA"}, {"HS", "TA"}, {"HS", "TC"}, {"HA", "TC"}, {"TA", "TC"}},
          {{"SES", "IP"}, {"SES", "HS"}, {"SES", "HA"}, {"SES", "TA"}, {"SES", "TC"}}};
}

LatentFactorGraph fig3() {
  return one_factor_six({{"1", "2"},
                         {"1", "3"},
                         {"1", "5"},
                         {"2", "4"},
                         {"2", "6"},
                         {"3", "6"},
                         {"4", "5"},
                         {"4", "6"},
                         {"5", "6"}});
}

std::vector<std::string> names() { return {"fig2a", "fig2b", "fig4a", "household", "fig3"}; }

LatentFactorGraph by_name(const std::string& name) {
  if (name == "fig2a") return fig2a();
  if (name == "fig2b") return fig2b();
  if (name == "fig4a") return fig4a();
  if (name == "household") return household();
  if (name == "fig3") return fig3();
  throw GraphError(GraphError::Kind::unknown_node, "unknown built-in graph '" + name + "'");
}

}  // namespace lfid::examples
