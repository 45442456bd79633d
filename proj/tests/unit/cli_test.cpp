#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "offload/experiment.hpp"

namespace offload {
namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class ScratchDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           fmt_name(::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  static std::string fmt_name(const char* test) { return std::string("offload_cli_") + test; }

  ExperimentSpec small_spec(const std::string& sub) const {
    ExperimentSpec s;
    s.master_seed = 5;
    s.n_networks = 2;
    s.topology.total_nodes = 30;
    s.horizon = 150;
    s.loads = {0.5, 1.0};
    s.output_dir = dir_ / sub;
    return s;
  }

  fs::path dir_;
};

TEST_F(ScratchDir, GenerateTenNetworks) {
  ExperimentSpec s = small_spec("gen");
  s.n_networks = 10;
  const GeneratedFiles f = cmd_generate(s);
  EXPECT_EQ(f.topologies.size(), 10u);
  EXPECT_EQ(f.tasks.size(), 10u);
  for (const auto& p : f.topologies) EXPECT_TRUE(fs::exists(p));
  EXPECT_TRUE(fs::exists(f.manifest));
}

TEST_F(ScratchDir, GenerateMinimalInstance) {
  ExperimentSpec s = small_spec("min");
  s.n_networks = 1;
  s.topology.k_choices = {1};
  s.topology.tier2_per_core = 0;
  s.topology.total_nodes = 2;
  const GeneratedFiles f = cmd_generate(s);
  const Instance inst = load_instance(f.topologies[0], f.tasks[0]);
  EXPECT_EQ(inst.topology.num_nodes(), 2u);
  EXPECT_EQ(inst.topology.num_links(), 1u);
}

TEST_F(ScratchDir, GenerateIsDeterministic) {
  const GeneratedFiles a = cmd_generate(small_spec("a"));
  const GeneratedFiles b = cmd_generate(small_spec("b"));
  for (std::size_t k = 0; k < a.topologies.size(); ++k) {
    EXPECT_EQ(slurp(a.topologies[k]), slurp(b.topologies[k]));
    EXPECT_EQ(slurp(a.tasks[k]), slurp(b.tasks[k]));
  }
}

TEST_F(ScratchDir, LoadedInstanceMatchesInMemory) {
  const ExperimentSpec s = small_spec("load");
  const GeneratedFiles f = cmd_generate(s);
  const Instance disk = load_instance(f.topologies[1], f.tasks[1]);
  const Instance mem = make_instance(s, 1, 0);
  EXPECT_EQ(disk.topology, mem.topology);
  EXPECT_EQ(disk.mu, mem.mu);
  EXPECT_EQ(disk.tasks, mem.tasks);
}

TEST_F(ScratchDir, JointLpRejectsTwoTypes) {
  const Instance inst = make_instance(small_spec("x"), 0, 0);
  RunOptions o;
  o.scheme = SchemeKind::kJointLp;
  try {
    cmd_run(inst, o);
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_STREQ(e.what(), "joint_lp requires single task type");
  }
}

TEST_F(ScratchDir, SingleCellSweepEqualsRun) {
  ExperimentSpec s = small_spec("cell");
  s.n_networks = 1;
  s.loads = {1.0};
  s.schemes = {SchemeKind::kSpbpSpbp};
  const SweepReport rep = cmd_sweep(s, 1);
  EXPECT_EQ(rep.cells, 1u);

  RunOptions o;
  o.scheme = SchemeKind::kSpbpSpbp;
  o.load = 1.0;
  o.seed = cell_seed(s, 0, 0);
  o.horizon = s.horizon;
  const RunResult r = cmd_run(make_instance(s, 0, 0), o);
  const std::vector<RunResult> runs{r};
  std::stringstream summary;
  write_summary(summary, summarize(runs));
  EXPECT_EQ(slurp(rep.summary), summary.str());
  std::stringstream results;
  write_results(results, r);
  EXPECT_EQ(slurp(rep.results), results.str());
}

TEST_F(ScratchDir, InterruptedSweepResumes) {
  const ExperimentSpec s = small_spec("resume");
  const SweepReport first = cmd_sweep(s, 2);
  const std::string results = slurp(first.results);
  const std::string summary = slurp(first.summary);
  // Drop two cells as if the sweep had been killed.
  int removed = 0;
  for (const auto& e : fs::directory_iterator(s.output_dir / "cells")) {
    if (removed < 2) {
      fs::remove(e.path());
      ++removed;
    }
  }
  const SweepReport second = cmd_sweep(s, 1);
  EXPECT_EQ(second.reused, first.cells - 2);
  EXPECT_EQ(slurp(second.results), results);
  EXPECT_EQ(slurp(second.summary), summary);
}

TEST_F(ScratchDir, SweepRecordsInfeasibleCells) {
  ExperimentSpec s = small_spec("lp");
  s.n_networks = 1;
  s.scenario = Scenario::kSingleType;
  s.schemes = {SchemeKind::kJointLp};
  s.loads = {0.5, 50.0};
  const SweepReport rep = cmd_sweep(s, 1);
  EXPECT_EQ(rep.infeasible, 1u);
  std::ifstream in(rep.summary);
  const auto rows = read_summary(in);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_TRUE(rows[0].median.has_value());
  EXPECT_FALSE(rows[2].median.has_value());
  EXPECT_EQ(rows[2].load, 50.0);
}

// The command-line front end, driven as a subprocess.
int offsim(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(OFFSIM_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

TEST_F(ScratchDir, CommandLine) {
  const fs::path log = dir_ / "log.txt";
  EXPECT_EQ(offsim("--help", log), 0);
  EXPECT_NE(slurp(log).find("sweep"), std::string::npos);
  EXPECT_EQ(offsim("run --help", log), 0);
  for (const char* flag : {"--topology", "--tasks", "--scheme", "--load", "--seed", "--horizon"}) {
    EXPECT_NE(slurp(log).find(flag), std::string::npos) << flag;
  }
  EXPECT_EQ(offsim("frobnicate", log), 1);

  const fs::path out = dir_ / "gen";
  ASSERT_EQ(offsim("generate --networks 1 --nodes 40 --horizon 100 -o " + out.string(), log), 0) << slurp(log);
  const std::string topo = (out / "instances/net000.topology.json").string();
  const std::string tasks = (out / "instances/net000.tasks000.json").string();
  const std::string base = "run --topology " + topo + " --tasks " + tasks + " --horizon 100 ";

  EXPECT_EQ(offsim(base + "--scheme joint_lp -o " + (dir_ / "r.csv").string(), log), 1);
  EXPECT_NE(slurp(log).find("joint_lp requires single task type"), std::string::npos);
  EXPECT_EQ(offsim(base + "--scheme nonsense", log), 1);
  EXPECT_EQ(offsim(base + "--load 0", log), 1);
  EXPECT_EQ(offsim("run --topology /nonexistent --tasks " + tasks, log), 1);

  ASSERT_EQ(offsim(base + "-o " + (dir_ / "r1.csv").string() + " --summary " + (dir_ / "s1.csv").string(), log), 0)
      << slurp(log);
  ASSERT_EQ(offsim(base + "-o " + (dir_ / "r2.csv").string(), log), 0);
  EXPECT_EQ(slurp(dir_ / "r1.csv"), slurp(dir_ / "r2.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "r1.csv.manifest.json"));
  ASSERT_EQ(offsim("summarize " + (dir_ / "r1.csv").string() + " -o " + (dir_ / "s2.csv").string(), log), 0);
  EXPECT_EQ(slurp(dir_ / "s1.csv"), slurp(dir_ / "s2.csv"));

  const fs::path single = dir_ / "single";
  ASSERT_EQ(offsim("generate --networks 1 --nodes 40 --scenario single_type -o " + single.string(), log), 0);
  const std::string lp_base = "run --topology " + (single / "instances/net000.topology.json").string() +
                              " --tasks " + (single / "instances/net000.tasks000.json").string() +
                              " --horizon 50 --scheme joint_lp -o " + (dir_ / "lp.csv").string();
  EXPECT_EQ(offsim(lp_base + " --load 0.5", log), 0) << slurp(log);
  EXPECT_EQ(offsim(lp_base + " --load 100", log), 3);

  std::ofstream(dir_ / "bad.csv") << "not,a,results,file\n";
  EXPECT_EQ(offsim("summarize " + (dir_ / "bad.csv").string(), log), 2);
}

}  // namespace
}  // namespace offload
