#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "sleepcolor/experiment.hpp"

namespace sleepcolor {
namespace {

std::filesystem::path scratch() {
  const auto dir = std::filesystem::temp_directory_path() / "sleepcolor_cli_test";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentOptions gnp(std::size_t n, std::uint64_t seeds) {
  ExperimentOptions o;
  o.family = Family::Gnp;
  o.n = n;
  o.seeds = seeds;
  return o;
}

TEST(CmdRun, CsvShape) {
  std::ostringstream out, err;
  EXPECT_EQ(cmd_run(gnp(100, 3), out, err), 0);
  std::istringstream lines(out.str());
  std::string line;
  std::vector<std::string> rows;
  std::size_t comments = 0;
  while (std::getline(lines, line)) {
    if (line.starts_with("#")) ++comments;
    else rows.push_back(line);
  }
  EXPECT_EQ(comments, 7u);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], csv_header());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(std::count(rows[i].begin(), rows[i].end(), ','), 11 + 11) << rows[i];
    EXPECT_TRUE(rows[i].starts_with(std::to_string(i - 1) + ",gnp,100,0.08,"));
  }
  EXPECT_NE(err.str().find("runs=3 incomplete=0 invalid=0"), std::string::npos);
}

TEST(CmdRun, InstanceFileAndTrace) {
  const auto dir = scratch();
  const auto inst_path = dir / "k3.txt";
  write_instance_file(make_default_instance(generate({Family::Clique, 3}, 0)), inst_path.string());
  ExperimentOptions o;
  o.instance_path = inst_path.string();
  o.seeds = 2;
  o.out_path = (dir / "k3.csv").string();
  o.trace_path = (dir / "k3.trace").string();
  std::ostringstream out, err;
  EXPECT_EQ(cmd_run(o, out, err), 0) << err.str();
  const std::string trace = slurp(dir / "k3.trace");
  EXPECT_TRUE(trace.starts_with("# seed=0\n# phase1 start=1\n"));
  EXPECT_NE(trace.find("\nt=1 v=0 status=A act=send\n"), std::string::npos);
  EXPECT_NE(trace.find("# seed=1\n"), std::string::npos);
  EXPECT_NE(trace.find("msg t=1 0->1 delivered=1"), std::string::npos);
  EXPECT_NE(slurp(dir / "k3.csv").find(",instance,3,"), std::string::npos);
  EXPECT_NE(out.str().find("runs=2"), std::string::npos);
}

TEST(CmdRun, UsageAndInputErrors) {
  std::ostringstream out, err;
  ExperimentOptions none;
  EXPECT_EQ(cmd_run(none, out, err), 1);
  EXPECT_NE(err.str().find("error: usage:"), std::string::npos);

  const auto dir = scratch();
  std::ofstream(dir / "empty.txt").close();
  ExperimentOptions empty;
  empty.instance_path = (dir / "empty.txt").string();
  err.str("");
  EXPECT_EQ(cmd_run(empty, out, err), 1);
  EXPECT_NE(err.str().find("error: parse:"), std::string::npos);

  std::ofstream(dir / "bad.txt") << "dlc 1 2 1\nnode 1 1\nnode 2 1\nedge 1 2\n";
  ExperimentOptions bad;
  bad.instance_path = (dir / "bad.txt").string();
  err.str("");
  EXPECT_EQ(cmd_run(bad, out, err), 1);
  EXPECT_NE(err.str().find("error: instance:"), std::string::npos);

  ExperimentOptions reg;
  reg.family = Family::RandomRegular;
  reg.n = 5;
  reg.param = 3;
  err.str("");
  EXPECT_EQ(cmd_run(reg, out, err), 1);
}

TEST(CmdRun, RoundCapExitsTwo) {
  ExperimentOptions o;
  o.family = Family::Clique;
  o.n = 30;
  o.round_cap = 5;
  std::ostringstream out, err;
  EXPECT_EQ(cmd_run(o, out, err), 2);
  EXPECT_NE(err.str().find("incomplete=1"), std::string::npos);
}

TEST(CmdRun, ByteIdenticalAcrossInvocations) {
  const auto dir = scratch();
  std::string csv[2], trace[2];
  for (int k = 0; k < 2; ++k) {
    ExperimentOptions o = gnp(200, 2);
    o.seed_base = 5;
    o.out_path = (dir / ("d" + std::to_string(k) + ".csv")).string();
    o.trace_path = (dir / ("d" + std::to_string(k) + ".trace")).string();
    std::ostringstream out, err;
    ASSERT_EQ(cmd_run(o, out, err), 0);
    csv[k] = slurp(*o.out_path);
    trace[k] = slurp(*o.trace_path);
  }
  EXPECT_EQ(csv[0], csv[1]);
  EXPECT_EQ(trace[0], trace[1]);
  EXPECT_FALSE(trace[0].empty());
}

TEST(CmdScaling, AggregatesAndFit) {
  ExperimentOptions o = gnp(0, 3);
  o.sizes = {64, 256};
  std::ostringstream out, err;
  EXPECT_EQ(cmd_scaling(o, out, err), 0) << err.str();
  const std::string s = out.str();
  EXPECT_TRUE(s.starts_with("n,loglog_n,runs,"));
  EXPECT_NE(s.find("\n64,2.584963,3,0,0,"), std::string::npos);
  EXPECT_NE(s.find("\n256,3.000000,3,0,0,"), std::string::npos);
  EXPECT_NE(s.find("fit worst_awake_max"), std::string::npos);

  ExperimentOptions empty = gnp(0, 1);
  std::ostringstream err2;
  EXPECT_EQ(cmd_scaling(empty, out, err2), 1);
  EXPECT_NE(err2.str().find("usage"), std::string::npos);
}

TEST(FitLine, ExactLine) {
  const auto f = fit_line({1, 2, 3, 4}, {5, 7, 9, 11});
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, 3.0, 1e-12);
  EXPECT_NEAR(f.max_abs_residual, 0.0, 1e-12);
  EXPECT_THROW(fit_line({}, {}), UsageError);
}

TEST(CmdOracle, CatalogAndSingleInstance) {
  std::ostringstream out, err;
  ExperimentOptions o;
  EXPECT_EQ(cmd_oracle(o, out, err), 0);
  EXPECT_NE(out.str().find("instances=54 all_at_least_1/4=yes"), std::string::npos);
  EXPECT_EQ(out.str().find("BELOW_1/4"), std::string::npos);

  const auto path = scratch() / "edge.txt";
  std::ofstream(path) << "dlc 1 2 1\nnode 1 1 2\nnode 2 1 2\nedge 1 2\n";
  o.instance_path = path.string();
  std::ostringstream one;
  EXPECT_EQ(cmd_oracle(o, one, err), 0);
  EXPECT_NE(one.str().find(" v=1 p=3/8\n"), std::string::npos);
  EXPECT_NE(one.str().find("expected_uncolored=5/4\n"), std::string::npos);
}

}  // namespace
}  // namespace sleepcolor
