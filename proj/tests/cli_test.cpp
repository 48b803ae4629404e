#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

const fs::path kData = STREAMSCHED_TEST_DATA;
const std::string kCli = STREAMSCHED_CLI;

struct Run {
  int code = -1;
  std::string output;  // stdout and stderr together
};

Run cli(const std::string& args) {
  Run r;
  const std::string cmd = kCli + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("streamsched_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string data(const char* name) const { return (kData / name).string(); }
  std::string tmp(const char* name) const { return (dir / name).string(); }

  fs::path dir;
};

TEST_F(Cli, ScheduleReportsStreamsAndSyncs) {
  auto r = cli("schedule " + data("fork3.json") + " --plan-out " + tmp("p.json") + " --order-out " + tmp("o.json"));
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(r.output, "3 streams, 2 syncs\n");
  auto plan = nlohmann::json::parse(slurp(tmp("p.json")));
  EXPECT_EQ(plan["num_streams"], 3);
  EXPECT_EQ(plan["sync"], nlohmann::json::parse("[[1,3],[1,4]]"));

  r = cli("schedule " + data("chain3.json") + " --plan-out " + tmp("p.json") + " --order-out " + tmp("o.json"));
  EXPECT_EQ(r.output, "1 stream, 0 syncs\n");
}

TEST_F(Cli, CycleIsAnInputError) {
  auto r = cli("schedule " + data("cycle.json") + " --plan-out " + tmp("p.json") + " --order-out " + tmp("o.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("cycle"), std::string::npos) << r.output;
}

TEST_F(Cli, MissingFileAndBadUsage) {
  EXPECT_EQ(cli("schedule " + tmp("nope.json")).code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("schedule " + data("chain3.json") + " --policy nimble").code, 2);
  EXPECT_EQ(cli("simulate " + data("chain3.json")).code, 2);
  EXPECT_EQ(cli("gen random").code, 2);
}

TEST_F(Cli, SimulateChainAndFork) {
  ASSERT_EQ(cli("schedule " + data("chain3.json") + " --policy sequential --plan-out " + tmp("p.json") +
                " --order-out " + tmp("o.json"))
                .code,
            0);
  auto r = cli("simulate " + data("chain3.json") + " --plan " + tmp("p.json") + " --order " + tmp("o.json") +
               " --out " + tmp("sim.json") + " --trace " + tmp("t.tsv"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(nlohmann::json::parse(slurp(tmp("sim.json")))["makespan_us"], 60.0);
  EXPECT_EQ(slurp(tmp("t.tsv")).substr(0, 5), "op_id");

  // fork(2): root and two children on the default preset.
  ASSERT_EQ(cli("gen fork 2 --out " + tmp("fork2.json")).code, 0);
  ASSERT_EQ(cli("schedule " + tmp("fork2.json") + " --plan-out " + tmp("p.json") + " --order-out " + tmp("o.json"))
                .code,
            0);
  r = cli("simulate " + tmp("fork2.json") + " --plan " + tmp("p.json") + " --order " + tmp("o.json"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(nlohmann::json::parse(r.output)["makespan_us"], 20.0);
}

TEST_F(Cli, SimulateRejectsIncompletePlan) {
  std::ofstream(tmp("p.json")) << R"({"streams":{"0":[1,2]},"sync":[],"num_streams":1})";
  std::ofstream(tmp("o.json")) << R"({"policy":"sequential","order":[1,2,3]})";
  auto r = cli("simulate " + data("chain3.json") + " --plan " + tmp("p.json") + " --order " + tmp("o.json"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("node 3 unassigned"), std::string::npos) << r.output;

  std::ofstream(tmp("p2.json")) << R"({"streams":{"0":[1,2,3]},"sync":[],"num_streams":1})";
  std::ofstream(tmp("o2.json")) << R"({"policy":"sequential","order":[2,1,3]})";
  EXPECT_EQ(cli("simulate " + data("chain3.json") + " --plan " + tmp("p2.json") + " --order " + tmp("o2.json")).code,
            2);
}

TEST_F(Cli, CompareInceptionAndChain) {
  ASSERT_EQ(cli("gen inception 4 2 --out " + tmp("inc.json")).code, 0);
  auto r = cli("compare " + tmp("inc.json") + " --policies sequential,opara --out " + tmp("cmp.json"));
  ASSERT_EQ(r.code, 0) << r.output;
  auto report = nlohmann::json::parse(slurp(tmp("cmp.json")));
  ASSERT_EQ(report["rows"].size(), 2u);
  EXPECT_EQ(report["rows"][1]["policy"], "opara");
  EXPECT_GT(report["rows"][1]["speedup_vs_sequential"].get<double>(), 1.0);

  ASSERT_EQ(cli("compare " + data("chain3.json") + " --out " + tmp("chain.json")).code, 0);
  auto chain = nlohmann::json::parse(slurp(tmp("chain.json")));
  for (const auto& row : chain["rows"]) EXPECT_EQ(row["makespan_us"], 60.0);

  EXPECT_EQ(cli("compare " + data("chain3.json") + " --policies opara").code, 2);
  EXPECT_EQ(cli("compare " + data("chain3.json") + " --policies opara,opara").code, 2);
}

TEST_F(Cli, GenIsDeterministic) {
  ASSERT_EQ(cli("gen random 100 --max-width 20 --seed 7 --out " + tmp("a.json")).code, 0);
  ASSERT_EQ(cli("gen random 100 --max-width 20 --seed 7 --out " + tmp("b.json")).code, 0);
  EXPECT_EQ(slurp(tmp("a.json")), slurp(tmp("b.json")));
  EXPECT_EQ(nlohmann::json::parse(slurp(tmp("a.json")))["nodes"].size(), 100u);
  ASSERT_EQ(cli("gen chain 3 --out " + tmp("c.json")).code, 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(tmp("c.json")))["nodes"].size(), 3u);
}

TEST_F(Cli, OracleOnSmallGraph) {
  auto r = cli("oracle " + data("fork3.json"));
  ASSERT_EQ(r.code, 0) << r.output;
  auto doc = nlohmann::json::parse(r.output);
  EXPECT_EQ(doc["search_space_exhausted"], true);
  EXPECT_EQ(doc["orders_examined"], 6);

  r = cli("oracle " + data("fork3.json") + " --max-streams 2 --t-overhead-us 0");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_LE(nlohmann::json::parse(r.output)["plan"]["num_streams"].get<int>(), 2);
}

TEST_F(Cli, ProfileAndConfigOverrides) {
  auto r = cli("compare " + data("fork3.json") + " --profile " + data("fork3_profile.json") +
               " --gpu-config 2080s-like --slowdown 1.0 --policies sequential,opara");
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(cli("compare " + data("fork3.json") + " --gpu-config " + tmp("missing.json")).code, 2);
  EXPECT_EQ(cli("compare " + data("fork3.json") + " --slowdown 0.5").code, 2);
}

}  // namespace
