// End-to-end drive of the tuner binary via TUNER_BIN (set by ctest).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tuner/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string tuner_bin() {
  const char* bin = std::getenv("TUNER_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "TUNER_BIN must point at the tuner executable");
  return bin;
}

int run(const std::string& args) {
  const std::string cmd = tuner_bin() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

struct Workspace {
  fs::path root;
  Workspace() {
    root = fs::temp_directory_path() / ("tuner_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    std::ofstream cfg(root / "config.json");
    cfg << R"({
      "nystrom": {"trials": 4, "forest_trees": 8},
      "bo": {"iterations": 3, "n_uniform": 150, "n_local": 50},
      "cli": {"n_prior": 10, "threads": 1}
    })";
  }
  ~Workspace() { fs::remove_all(root); }
  std::string dir(const std::string& name) const { return (root / name).string(); }
  std::string config() const { return (root / "config.json").string(); }
};

std::string slurp(const std::string& path) { return tuner::io::read_text_file(path); }

}  // namespace

TEST_CASE("pipeline stages produce their artifacts and reproduce byte-identically") {
  Workspace ws;
  const std::string common = " --config " + ws.config() + " --seed 11";

  REQUIRE(run("prior --out " + ws.dir("prior") + common) == 0);
  CHECK(fs::exists(ws.dir("prior") + "/prior.csv"));
  CHECK(fs::exists(ws.dir("prior") + "/manifest.json"));

  // 10 data rows + header
  const auto prior_content = slurp(ws.dir("prior") + "/prior.csv");
  CHECK(std::count(prior_content.begin(), prior_content.end(), '\n') == 11);

  REQUIRE(run("prior --out " + ws.dir("prior2") + common) == 0);
  CHECK(slurp(ws.dir("prior2") + "/prior.csv") == prior_content);

  REQUIRE(run("select " + ws.dir("prior") + "/prior.csv --out " + ws.dir("select") + common) == 0);
  const auto selection = tuner::io::read_selection_json(ws.dir("select") + "/selection.json");
  CHECK(selection.ranking.avg_cree.size() == 9);
  CHECK(selection.ranking.selected.size() == 3);
  CHECK(selection.importances.size() == 9);

  REQUIRE(run("tune " + ws.dir("prior") + "/prior.csv " + ws.dir("select") + "/selection.json" +
              " --method ours --out " + ws.dir("tune") + common) == 0);
  const auto trace = tuner::io::read_trace_csv(ws.dir("tune") + "/trace.csv");
  CHECK(trace.records.size() == 3);
  for (std::size_t i = 1; i < trace.records.size(); ++i)
    CHECK(trace.records[i].best_so_far >= trace.records[i - 1].best_so_far);

  REQUIRE(run("tune " + ws.dir("prior") + "/prior.csv " + ws.dir("select") + "/selection.json" +
              " --method ours --out " + ws.dir("tune2") + common) == 0);
  CHECK(slurp(ws.dir("tune2") + "/trace.csv") == slurp(ws.dir("tune") + "/trace.csv"));
  CHECK(slurp(ws.dir("tune2") + "/best.json") == slurp(ws.dir("tune") + "/best.json"));

  REQUIRE(run("simulate " + ws.dir("tune") + "/best.json --config " + ws.config() + " --out " +
              ws.dir("sim")) == 0);
  CHECK(fs::exists(ws.dir("sim") + "/trajectory.csv"));
  CHECK(fs::exists(ws.dir("sim") + "/summary.json"));

  REQUIRE(run("report " + ws.dir("tune") + " --out " + ws.dir("report")) == 0);
  CHECK(fs::exists(ws.dir("report") + "/report.csv"));
  const auto txt = slurp(ws.dir("report") + "/report.txt");
  CHECK(txt.find("tune-ours-seed11") != std::string::npos);
}

TEST_CASE("tune supports explicit kernel orders and every method") {
  Workspace ws;
  const std::string common = " --config " + ws.config() + " --seed 4";
  REQUIRE(run("prior --out " + ws.dir("prior") + common) == 0);
  const std::string prior = ws.dir("prior") + "/prior.csv";

  CHECK(run("tune " + prior + " --kernel-orders 1 9 --method standard --out " + ws.dir("std") +
            common) == 0);
  CHECK(run("tune " + prior + " --method linebo --out " + ws.dir("line") + common) == 0);
  CHECK(run("tune " + prior + " --kernel-orders 2 3 --method unconstrained --out " +
            ws.dir("unc") + common) == 0);
  CHECK(run("tune " + prior + " --kernel-orders 1 2 --method ours --iterations 2 --out " +
            ws.dir("ours") + common) == 0);
  const auto trace = tuner::io::read_trace_csv(ws.dir("ours") + "/trace.csv");
  CHECK(trace.records.size() == 2);
}

TEST_CASE("exit codes distinguish failure classes") {
  Workspace ws;
  // unknown config key -> 2
  std::ofstream bad(ws.root / "bad.json");
  bad << R"({"bo": {"iterationz": 3}})";
  bad.close();
  CHECK(run("prior --config " + (ws.root / "bad.json").string() + " --out " + ws.dir("x")) == 2);
  // missing prior file -> 3
  CHECK(run("select " + ws.dir("missing") + "/prior.csv --out " + ws.dir("y")) == 3);
  // unknown method -> 2
  REQUIRE(run("prior --out " + ws.dir("prior") + " --config " + ws.config() + " --seed 1") == 0);
  CHECK(run("tune " + ws.dir("prior") + "/prior.csv --kernel-orders 1 --method sorcery --out " +
            ws.dir("z") + " --config " + ws.config()) == 2);
  // ours without selection or explicit orders -> 2
  CHECK(run("tune " + ws.dir("prior") + "/prior.csv --method ours --out " + ws.dir("w") +
            " --config " + ws.config()) == 2);
  // simulate with out-of-bounds gains -> 2
  CHECK(run("simulate --gains 25,0,0,0,0,0,0,0,0 --config " + ws.config() + " --out " +
            ws.dir("v")) == 2);
}

TEST_CASE("tune refuses a prior with no safe point") {
  Workspace ws;
  fs::create_directories(ws.dir("unsafe"));
  std::ofstream prior(ws.dir("unsafe") + "/prior.csv");
  prior << "p1,p2,p3,p4,p5,p6,p7,p8,p9,P\n";
  prior << "0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5,-10.0\n";
  prior << "0.4,0.4,0.4,0.4,0.4,0.4,0.4,0.4,0.4,-20.0\n";
  prior.close();
  CHECK(run("tune " + ws.dir("unsafe") + "/prior.csv --kernel-orders 1 --method ours --out " +
            ws.dir("t") + " --config " + ws.config()) == 2);
}
