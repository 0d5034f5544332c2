#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pprx/errors.hpp"
#include "pprx_cli/commands.hpp"
#include "pprx_cli/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace pprx;
using namespace pprx::cli;

namespace {

const fs::path kScenarios = PPRX_SCENARIO_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("pprx_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

int run(std::vector<std::string> args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  args.insert(args.begin(), "pprx");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text != nullptr) *out_text = out.str();
  if (err_text != nullptr) *err_text = err.str();
  return rc;
}

const char* kMinimal = R"(schema_version: 1
name: tiny
seed: 3
project:
  provision_point: 100
  contribution_budget: 50
  belief_budget: 20
  belief_deadline: 3
  contribution_deadline: 5
  low_cap_variant: paper
agents:
  - id: 1
    valuation: 80
    prior_belief: 0.7
    arrival_belief_phase: 1
    arrival_contribution_phase: 1
    walk: {family: symmetric_bernoulli, p: 0.5, step_up: 0.01, step_down: -0.01}
  - id: 2
    valuation: 40
    prior_belief: 0.3
    arrival_belief_phase: 2
    arrival_contribution_phase: 2
    walk: {family: deadline_drift, gain: 0.02, noise_scale: 0.01}
    policy: {kind: fixed, amount: 10, epoch: 3}
)";

}  // namespace

TEST(ScenarioIo, EmitParseRoundTrip) {
  const auto first = parse_scenario(kMinimal);
  EXPECT_TRUE(first.has_seed);
  EXPECT_EQ(first.scenario.agents.size(), 2u);
  const std::string text = emit_scenario(first.scenario);
  const auto second = parse_scenario(text);
  EXPECT_EQ(emit_scenario(second.scenario), text);
  for (const auto& entry : fs::recursive_directory_iterator(kScenarios)) {
    if (entry.path().extension() != ".yaml") continue;
    const auto sc = load_scenario(entry.path()).scenario;
    const auto once = emit_scenario(sc);
    EXPECT_EQ(emit_scenario(parse_scenario(once).scenario), once) << entry.path();
  }
}

TEST(ScenarioIo, DiagnosticsCarryLocation) {
  std::string bad = kMinimal;
  bad.replace(bad.find("valuation: 40"), 13, "valuation: -4");
  try {
    parse_scenario(bad, "bad.yaml");
    FAIL() << "accepted a negative valuation";
  } catch (const ScenarioFileError& e) {
    const std::string msg = e.what();
    EXPECT_EQ(msg.rfind("bad.yaml:", 0), 0u) << msg;
    EXPECT_NE(msg.find("valuation"), std::string::npos) << msg;
  }
  std::string unknown = kMinimal;
  unknown.replace(unknown.find("name: tiny"), 10, "nmae: tiny");
  EXPECT_THROW(parse_scenario(unknown), ScenarioFileError);
}

TEST(ScenarioIo, InsufficientInterestIsAScenarioError) {
  std::string low = kMinimal;
  low.replace(low.find("valuation: 80"), 13, "valuation: 50");
  EXPECT_THROW(parse_scenario(low), std::exception);
}

TEST(Args, RangeAndClaims) {
  EXPECT_EQ(parse_range("1,2.5,4"), (std::vector<double>{1, 2.5, 4}));
  const auto r = parse_range("0:1:0.25");
  ASSERT_EQ(r.size(), 5u);
  EXPECT_DOUBLE_EQ(r.back(), 1.0);
  EXPECT_THROW(parse_range(""), std::invalid_argument);
  EXPECT_THROW(parse_range("1:0:0.5"), std::invalid_argument);
  EXPECT_THROW(parse_range("0:1:0"), std::invalid_argument);
  EXPECT_EQ(parse_claims("all").size(), claim_ids().size());
  EXPECT_EQ(parse_claims("bstar,funded"), (std::vector<std::string>{"bstar", "funded"}));
  EXPECT_THROW(parse_claims("bstar,nope"), std::invalid_argument);
}

TEST(Cli, SweepThresholdTracksBudget) {
  const auto dir = scratch("sweep");
  ASSERT_EQ(run({"sweep", "--scenario", (kScenarios / "default.yaml").string(), "--param", "B_C",
                 "--range", "25,50,100", "--runs", "20", "--out", dir.string()}),
            kExitOk);
  std::ifstream in(dir / "sweep.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "#schema=pprx-sweep/1");
  std::vector<double> thresholds;
  while (std::getline(in, line)) {
    if (line.find(",belief_threshold,") == std::string::npos) continue;
    thresholds.push_back(std::stod(line.substr(line.rfind(',') + 1)));
  }
  ASSERT_EQ(thresholds.size(), 3u);
  EXPECT_NEAR(thresholds[0], 1.0 / 3.0, 1e-9);
  EXPECT_NEAR(thresholds[1], std::sqrt(0.5) / (1 + std::sqrt(0.5)), 1e-9);
  EXPECT_NEAR(thresholds[2], 0.5, 1e-9);
}

TEST(Cli, SimulateIsDeterministicAndReplays) {
  const auto a = scratch("sim_a");
  const auto b = scratch("sim_b");
  const auto scenario = (kScenarios / "default.yaml").string();
  ASSERT_EQ(run({"simulate", "--scenario", scenario, "--runs", "200", "--out", a.string()}), kExitOk);
  ASSERT_EQ(run({"simulate", "--scenario", scenario, "--runs", "200", "--out", b.string(),
                 "--threads", "3"}),
            kExitOk);
  for (const char* f : {"summary.json", "outcomes.csv", "agents.csv", "ledgers/run_00007.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    EXPECT_FALSE(slurp(a / f).empty()) << f;
  }
  std::string out;
  EXPECT_EQ(run({"replay", "--manifest", (a / "manifest.json").string()}, &out), kExitOk);
  EXPECT_NE(out.find("outputs reproduced"), std::string::npos);
}

TEST(Cli, EquilibriumWritesStrategies) {
  const auto dir = scratch("eq");
  ASSERT_EQ(run({"equilibrium", "--scenario", (kScenarios / "default.yaml").string(), "--out",
                 dir.string()}),
            kExitOk);
  const std::string csv = slurp(dir / "strategies.csv");
  EXPECT_EQ(csv.rfind("#schema=pprx-strategies/1\n", 0), 0u);
  EXPECT_TRUE(fs::exists(dir / "strategies.json"));
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("codes");
  fs::create_directories(dir);
  const auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return (dir / name).string();
  };
  std::string empty = kMinimal;
  empty = empty.substr(0, empty.find("agents:")) + "agents: []\n";
  std::string poor = kMinimal;
  poor.replace(poor.find("valuation: 80"), 13, "valuation: 50");

  std::string err;
  EXPECT_EQ(run({"simulate", "--scenario", write("empty.yaml", empty), "--out",
                 (dir / "o1").string()},
                nullptr, &err),
            kExitInvalidInput);
  EXPECT_EQ(run({"simulate", "--scenario", write("poor.yaml", poor), "--out",
                 (dir / "o2").string()},
                nullptr, &err),
            kExitInvalidInput);
  EXPECT_NE(err.find("insufficient"), std::string::npos) << err;
  EXPECT_EQ(run({"verify", "--scenario", write("ok.yaml", kMinimal), "--claims", "bogus",
                 "--out", (dir / "o3").string()}),
            kExitUsage);
  EXPECT_EQ(run({"verify", "--scenario", (dir / "ok.yaml").string(), "--runs", "10", "--out",
                 (dir / "o4").string()}),
            kExitUsage);
  EXPECT_EQ(run({"simulate", "--scenario", (dir / "ok.yaml").string(), "--variant", "other"}),
            kExitUsage);
  EXPECT_EQ(run({"simulate", "--scenario", (dir / "missing.yaml").string(), "--out",
                 (dir / "o5").string()}),
            kExitInvalidInput);
  EXPECT_EQ(run({"frobnicate"}), kExitUsage);
}

TEST(Cli, VerifyBstarOnly) {
  const auto dir = scratch("verify");
  std::string out;
  ASSERT_EQ(run({"verify", "--scenario", (kScenarios / "default.yaml").string(), "--claims",
                 "bstar,indifference", "--out", dir.string()},
                &out),
            kExitOk);
  const std::string csv = slurp(dir / "summary.csv");
  EXPECT_EQ(csv.rfind("#schema=", 0), 0u);
  EXPECT_NE(csv.find("bstar"), std::string::npos);
}
