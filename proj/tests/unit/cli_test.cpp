#include "mopc/cli/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "mopc/cli/manifest.hpp"
#include "mopc/io.hpp"
#include "test_graphs.hpp"

namespace mopc::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "mopc");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = parse_and_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mopc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    io::write_file(p, text);
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string cohort_graph() {
    return write("graph.json", io::graph_to_json(testing::six_leaf_cohort()).dump());
  }
  std::string simple_strategies() {
    return write("strategies.json", R"({"units": "normalized", "strategies": [
        {"score": 0.2, "workers": 1, "requirements": [[0,0,0,0],[0,0,0,0]]},
        {"score": 0.9, "workers": 3, "requirements": [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}]})");
  }

  fs::path dir_;
};

TEST_F(CliTest, StabilityMeasuredRow) {
  const CliRun r = run({"stability", "--epsilon", "6.93e-4", "--delta-t", "0.0033", "--t-grid", "1",
                     "--n-node-list", "2", "--k-list", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(l[0], "T,n_node,K,P_S_formula,P_S_mc,expected_attempts");
  EXPECT_EQ(l[1].rfind("1,2,1,0.81054", 0), 0u) << l[1];
}

TEST_F(CliTest, StabilityGridAndMonteCarlo) {
  const CliRun r = run({"stability", "--t-grid", "0.1,1", "--n-node-list", "2,4", "--k-list", "1,2",
                     "--mc-trials", "200", "--seed", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines(r.out).size(), 9u);
  EXPECT_EQ(r.out, run({"stability", "--t-grid", "0.1,1", "--n-node-list", "2,4", "--k-list", "1,2",
                        "--mc-trials", "200", "--seed", "5"}).out);
}

TEST_F(CliTest, SeedFromEnvironment) {
  const std::vector<std::string> args{"stability", "--t-grid", "1", "--mc-trials", "500"};
  ::setenv("MOPC_SEED", "11", 1);
  const CliRun a = run(args);
  const CliRun b = run({"stability", "--t-grid", "1", "--mc-trials", "500", "--seed", "11"});
  ::setenv("MOPC_SEED", "not-a-number", 1);
  const CliRun bad = run(args);
  ::unsetenv("MOPC_SEED");
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(bad.code, kExitInvalid);
  EXPECT_NE(bad.err.find("MOPC_SEED"), std::string::npos);
}

TEST_F(CliTest, MissingRequiredFlagExitsOne) {
  EXPECT_EQ(run({"find-path", "--graph", "g.json"}).code, kExitInvalid);
  EXPECT_EQ(run({"trim"}).code, kExitInvalid);
  EXPECT_EQ(run({}).code, kExitInvalid);
  EXPECT_EQ(run({"stability", "--bogus"}).code, kExitInvalid);
}

TEST_F(CliTest, HelpExitsZero) {
  const CliRun r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("find-path"), std::string::npos);
}

TEST_F(CliTest, InvalidReliabilityNamesNode) {
  const std::string g = write("bad.json", R"({"requester": 1, "nodes": [
      {"id": 1, "reliability": 1.0, "resources": [1,1,1,1]},
      {"id": 42, "reliability": 1.3, "resources": [1,1,1,1]}],
      "links": [{"s": 1, "t": 42, "quality": 0.5}]})");
  const CliRun r = run({"find-path", "--graph", g, "--strategies", simple_strategies()});
  EXPECT_EQ(r.code, kExitInvalid);
  EXPECT_NE(r.err.find("nodes[1].reliability"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("node 42"), std::string::npos) << r.err;
}

TEST_F(CliTest, MissingFileExitsTwo) {
  const CliRun r = run({"trim", "--graph", path("nope.json")});
  EXPECT_EQ(r.code, kExitIo);
  EXPECT_NE(r.err.find("nope.json"), std::string::npos);
}

TEST_F(CliTest, MalformedFileExitsOne) {
  EXPECT_EQ(run({"trim", "--graph", write("x.json", "{]")}).code, kExitInvalid);
}

TEST_F(CliTest, TrimWritesGraphAndReport) {
  const CliRun r = run({"trim", "--graph", cohort_graph(), "--eta", "1e9", "--out", path("reduced.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "nodes_before,nodes_after,edges_before,edges_after,R_E\n7,1,9,0,1\n");
  const WorkerGraph reduced = io::load_graph(path("reduced.json"));
  EXPECT_EQ(reduced.node_count(), 1u);
  EXPECT_EQ(reduced.node(0).label, 7);
}

TEST_F(CliTest, TrimAlphaImpliesNMax) {
  const std::string g = cohort_graph();
  EXPECT_EQ(run({"trim", "--graph", g, "--alpha", "1"}).code, 0);
  EXPECT_EQ(run({"trim", "--graph", g, "--alpha", "1", "--n-max", "4"}).code, kExitInvalid);
  EXPECT_EQ(run({"trim", "--graph", g, "--length1", "--theta", "0.1"}).code, 0);
  EXPECT_EQ(run({"trim", "--graph", g, "--rho", "0.5,0.5,0.5,0.5"}).code, kExitInvalid);
}

TEST_F(CliTest, FindPathBestAndAll) {
  const std::string g = cohort_graph();
  const std::string s = simple_strategies();
  const CliRun best = run({"find-path", "--graph", g, "--strategies", s});
  ASSERT_EQ(best.code, 0) << best.err;
  const auto l = lines(best.out);
  ASSERT_EQ(l.size(), 2u);
  EXPECT_EQ(l[0], "strategy,nodes,Q,R,score");
  EXPECT_EQ(l[1].rfind("1,7 2,", 0), 0u) << l[1];

  const CliRun all = run({"find-path", "--graph", g, "--strategies", s, "--all"});
  ASSERT_EQ(all.code, 0);
  EXPECT_EQ(lines(all.out).size(), 1u + 2u + 6u);

  const CliRun none = run({"find-path", "--graph", g, "--strategies", s, "--q-min", "0.95"});
  EXPECT_EQ(none.code, 0);
  EXPECT_EQ(lines(none.out).size(), 1u);
  EXPECT_NE(none.err.find("no feasible"), std::string::npos);
}

TEST_F(CliTest, FindPathWithTrimming) {
  const CliRun r = run({"find-path", "--graph", cohort_graph(), "--strategies", simple_strategies(),
                     "--eta", "1e9"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out).size(), 1u);
}

TEST_F(CliTest, ManifestRecordsInputsAndReproduces) {
  const std::string g = cohort_graph();
  const std::string s = simple_strategies();
  const CliRun r = run({"-o", path("best.csv"), "find-path", "--graph", g, "--strategies", s});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const json m = io::parse_json(io::read_file(path("best.csv.manifest.json")), "manifest");
  EXPECT_EQ(m["subcommand"], "find-path");
  EXPECT_EQ(m["version"], "0.1.0");
  ASSERT_EQ(m["inputs"].size(), 2u);
  EXPECT_EQ(m["inputs"][0]["sha256"], sha256_hex(io::read_file(g)));
  EXPECT_EQ(m["outputs"][0], path("best.csv"));

  std::vector<std::string> argv = m["argv"].get<std::vector<std::string>>();
  argv.erase(argv.begin());
  const std::string first = io::read_file(path("best.csv"));
  ASSERT_EQ(run(argv).code, 0);
  EXPECT_EQ(io::read_file(path("best.csv")), first);
}

TEST_F(CliTest, ExplicitManifestPath) {
  const CliRun r = run({"--manifest-out", path("m.json"), "stability", "--t-grid", "1"});
  ASSERT_EQ(r.code, 0);
  const json m = io::parse_json(io::read_file(path("m.json")), "manifest");
  EXPECT_EQ(m["config"]["t_grid"], json::array({1.0}));
  EXPECT_EQ(m["seed"], 1);
}

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_F(CliTest, PoolSimSmallConfig) {
  const std::string cfg = write("pool.json", R"({
      "trials": 20, "seed": 3, "theta": 0.4, "eta_grid": [0, 1e9],
      "cases": [{"name": "tiny", "pool_size": 8, "beta": [5, 2]}]})");
  const CliRun r = run({"pool-sim", "--config", cfg});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[0], "case,eta,R_E,S_P,P_P1,top_strategy");
  EXPECT_EQ(l[1].rfind("tiny,0,0,", 0), 0u) << l[1];
  EXPECT_EQ(l[2], "tiny,1000000000,1,nan,0,");
  EXPECT_EQ(run({"pool-sim", "--config", cfg}).out, r.out);
}

TEST_F(CliTest, PoolSimStrategiesRelativeToConfig) {
  simple_strategies();
  const std::string cfg = write("pool.json", R"({
      "strategies": "strategies.json", "trials": 5, "eta_grid": [0],
      "cases": [{"pool_size": 5, "quality": [5, 2], "reliability": [5, 2], "resource": [1, 1]}]})");
  const CliRun r = run({"-o", path("pool.csv"), "pool-sim", "--config", cfg, "--trials", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json m = io::parse_json(io::read_file(path("pool.csv.manifest.json")), "manifest");
  EXPECT_EQ(m["inputs"].size(), 2u);
  EXPECT_EQ(m["config"]["trials"], 3);
}

TEST_F(CliTest, PoolSimRejectsBadConfig) {
  EXPECT_EQ(run({"pool-sim", "--config", write("a.json", R"({"cases": []})")}).code, kExitInvalid);
  EXPECT_EQ(run({"pool-sim", "--config", write("b.json", R"({"eta_grid": [2, 1]})")}).code,
            kExitInvalid);
  EXPECT_EQ(run({"pool-sim", "--config",
                 write("c.json", R"({"cases": [{"pool_size": 5, "beta": [0, 1]}]})")})
                .code,
            kExitInvalid);
}

TEST_F(CliTest, SessionSimSummaryAndEvents) {
  const std::string spec = write("s.json", R"({
      "stages": [{"process_time": 1.0, "buffer_capacity": 100, "link_transfer_time": 0.0},
                 {"process_time": 1.0, "buffer_capacity": 100, "link_transfer_time": 0.0}],
      "n_packages": 50, "initial_feed_interval": 0.001, "timeout": 100, "rate_backoff_factor": 2})");
  const CliRun r = run({"session-sim", "--spec", spec, "--spec", spec, "--monolithic-time", "102",
                     "--events", path("events.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[1], l[2]);
  EXPECT_NE(l[1].find(",2,51,"), std::string::npos) << l[1];
  EXPECT_EQ(l[1].substr(l[1].rfind(',') + 1), "2");
  const auto events = lines(io::read_file(path("events.csv")));
  EXPECT_EQ(events[0], "spec,time,event,stage,package,requester_state,worker_state");
  EXPECT_GT(events.size(), 100u);
}

}  // namespace
}  // namespace mopc::cli
