#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#ifndef LFID_CLI_PATH
#error "LFID_CLI_PATH must point at the lfid executable"
#endif

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(LFID_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() : path(std::filesystem::temp_directory_path() / ("lfid_cli_test_" + std::to_string(::getpid()))) {
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name, const std::string& content) const {
    const auto p = (path / name).string();
    std::ofstream(p) << content;
    return p;
  }
};

}  // namespace

TEST_CASE("check exit codes") {
  CHECK(run("check -g fig2a").code == 0);
  CHECK(run("check -g household --legacy-lf-htc").code == 2);
  CHECK(run("check -g nope").code == 1);
  CHECK(run("").code == 1);
  CHECK(run("check -g fig2a --cap-h -1").code == 1);
}

TEST_CASE("simplified profile with explicit overrides") {
  CHECK(run("check -g fig2a --simplified").code == 0);
  CHECK(run("check -g fig4a --no-elf").code == 0);
  CHECK(run("check -g fig4a --simplified --no-elf").code == 2);
  CHECK(run("check -g fig4a --simplified --no-elf --cap-det-pairs 100000 --cap-recursion 10").code == 0);
  CHECK(run("check -g fig4a --simplified --no-elf --cap-det-pairs 100000 --cap-recursion 0").code == 2);
}

TEST_CASE("check report content") {
  const auto r = run("check -g fig2b");
  CHECK(r.code == 2);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["identified"] == false);
  CHECK(j["solved"] == 1);
  CHECK(j["total"] == 3);
  const auto md = run("check -g household --legacy-lf-htc --format md");
  CHECK(md.out.find("| HS->HA | solved | LF-HTC | 0 |") != std::string::npos);
}

TEST_CASE("malformed graph files") {
  TempDir tmp;
  const auto loop = tmp.file("loop.json", R"({"observed": ["a", "b"], "edges_obs": [["a", "a"]]})");
  CHECK(run("check -g " + loop).code == 1);
  const auto broken = tmp.file("broken.json", "{");
  CHECK(run("check -g " + broken).code == 1);
}

TEST_CASE("estimate from a sampled covariance") {
  TempDir tmp;
  const auto s = run("sample -g fig2a --seed 3");
  REQUIRE(s.code == 0);
  const auto cov = tmp.file("cov.csv", s.out);
  const auto e = run("estimate -g fig2a --cov " + cov);
  CHECK(e.code == 0);
  const auto j = nlohmann::json::parse(e.out);
  for (const auto& row : j["estimates"]) CHECK(row["status"] == "estimated");
  CHECK(run("estimate -g fig2a --cov " + (tmp.path / "missing.csv").string()).code == 1);
}

TEST_CASE("verify") {
  CHECK(run("verify -g fig4a --trials 20").code == 0);
  CHECK(run("verify -g household --legacy-lf-htc --trials 5").code == 2);
}

TEST_CASE("formula output") {
  const auto tex = run("formula -g fig4a");
  CHECK(tex.code == 0);
  CHECK(tex.out.rfind("\\begin{align*}", 0) == 0);
  const auto json = run("formula -g fig2b --format json");
  CHECK(nlohmann::json::parse(json.out)["formulas"].size() == 3);
}

TEST_CASE("repeated runs are byte-identical") {
  for (const std::string args : {"check -g fig4a", "formula -g fig2a", "sample -g household --seed 9",
                                 "verify -g fig2a --trials 10 --seed 4", "enumerate --pattern fig5b --max-edges 2",
                                 "enumerate --pattern fig5a --max-edges 4 --methods all --format csv"}) {
    CAPTURE(args);
    const auto a = run(args);
    const auto b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK_FALSE(a.out.empty());
  }
}

TEST_CASE("enumerate") {
  const auto r = run("enumerate --pattern fig5b --max-edges 2 --format csv --serial");
  CHECK(r.code == 0);
  CHECK(r.out == "edges,total,LF-HTC,Det+eLF-HTC+rec\n0,1,1,1\n1,8,6,6\n2,63,43,45\n");
  CHECK(run("enumerate --pattern nope").code == 1);
  CHECK(run("enumerate --methods Magic").code == 1);
}

TEST_CASE("dot") {
  const auto r = run("dot -g fig2b");
  CHECK(r.code == 0);
  CHECK(r.out.find("digraph") == 0);
}
