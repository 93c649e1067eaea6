#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "got/cli.hpp"

namespace got::cli {
namespace {

const std::string kData = GOT_TEST_DATA_DIR;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

double parse_distance(const std::string& out) {
  const auto p = out.find("distance=");
  EXPECT_NE(p, std::string::npos) << out;
  return std::strtod(out.c_str() + p + 9, nullptr);
}

TEST(Cli, FusedOnIdenticalFilesIsNearZero) {
  const CliRun r = run({"got", "--x", kData + "/x.csv", "--y", kData + "/x.csv"});
  EXPECT_EQ(r.code, kSuccess) << r.err;
  EXPECT_LE(parse_distance(r.out), 1e-3);
}

TEST(Cli, EveryDistanceSubcommandAcceptsBothFormats) {
  for (const char* sub : {"wd", "gwd", "got"}) {
    const CliRun csv = run({sub, "--x", kData + "/x.csv", "--y", kData + "/y.csv"});
    const CliRun json = run({sub, "--x", kData + "/x.csv", "--y", kData + "/y.json"});
    EXPECT_EQ(csv.code, kSuccess) << sub << ": " << csv.err;
    EXPECT_EQ(csv.out, json.out) << sub;
  }
}

TEST(Cli, MatchesLibraryAtPrintedPrecision) {
  const auto x = io::load_embeddings(kData + "/x.csv", io::FileFormat::csv);
  const auto y = io::load_embeddings(kData + "/y.csv", io::FileFormat::csv);
  SolverConfig c;
  c.lambda = 0.5;
  const double lib = solve_got(x.set, y.set, ProjectionPair::identity(), c).distance;
  const CliRun r = run({"got", "--x", kData + "/x.csv", "--y", kData + "/y.csv", "--lambda", "0.5"});
  EXPECT_EQ(r.out, distance_line(lib) + "\n");
}

TEST(Cli, NonPositiveBetaIsInputError) {
  const CliRun r = run({"wd", "--x", kData + "/x.csv", "--y", kData + "/y.csv", "--beta", "0"});
  EXPECT_EQ(r.code, kInputError);
  EXPECT_NE(r.err.find("beta"), std::string::npos) << r.err;
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run({"got", "--x", kData + "/x.csv", "--y", kData + "/y.csv", "--bogus"}).code,
            kInputError);
  EXPECT_EQ(run({"got", "--x", kData + "/x.csv"}).code, kInputError);
  EXPECT_EQ(run({}).code, kInputError);
  EXPECT_EQ(run({"got", "--x", kData + "/x.csv", "--y", kData + "/y.csv", "--mode", "both"}).code,
            kInputError);
  const CliRun missing = run({"wd", "--x", kData + "/nope.csv", "--y", kData + "/y.csv"});
  EXPECT_EQ(missing.code, kInputError);
  EXPECT_NE(missing.err.find("nope.csv"), std::string::npos);
  const CliRun ragged = run({"wd", "--x", kData + "/ragged.csv", "--y", kData + "/ragged.csv"});
  EXPECT_EQ(ragged.code, kInputError);
  EXPECT_NE(ragged.err.find("line 3"), std::string::npos) << ragged.err;
  EXPECT_EQ(run({"--help"}).code, kSuccess);
}

TEST(Cli, UnderflowingKernelExitsTwo) {
  const CliRun r = run(
      {"wd", "--x", kData + "/cond_x.csv", "--y", kData + "/cond_y.csv", "--beta", "0.001"});
  EXPECT_EQ(r.code, kConditioningError);
  EXPECT_NE(r.err.find("beta"), std::string::npos) << r.err;
}

TEST(Cli, SweepPrintsOneRowPerLambda) {
  const CliRun r = run({"sweep", "--lambdas", "0,0.5,1"});
  EXPECT_EQ(r.code, kSuccess) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[1].rfind("0,", 0), 0u);
  EXPECT_EQ(lines[2].rfind("0.5,", 0), 0u);
  EXPECT_EQ(lines[3].rfind("1,", 0), 0u);
}

TEST(Cli, DemoReportsMetrics) {
  const CliRun r = run({"demo"});
  EXPECT_EQ(r.code, kSuccess) << r.err;
  EXPECT_NE(r.out.find("accuracy=1\n"), std::string::npos) << r.out;
}

TEST(Cli, WrittenPlanAndHeatmapRevalidate) {
  const auto dir = std::filesystem::temp_directory_path() / "got_cli_test";
  std::filesystem::create_directories(dir);
  const std::string plan = (dir / "plan.json").string();
  const std::string svg = (dir / "plan.svg").string();
  const CliRun r = run({"got", "--x", kData + "/x.csv", "--y", kData + "/y.csv", "--mode",
                     "unshared", "--plan-out", plan, "--svg-out", svg});
  ASSERT_EQ(r.code, kSuccess) << r.err;
  const io::PlanFile f = io::read_plan_file(plan);
  EXPECT_EQ(f.solver, "got");
  EXPECT_EQ(f.config.mode, SolveMode::unshared);
  EXPECT_TRUE(f.entries_gwd.has_value());
  EXPECT_EQ(f.row_labels.front(), "dog");
  EXPECT_EQ(distance_line(f.distance) + "\n", r.out);
  EXPECT_TRUE(std::filesystem::file_size(svg) > 0);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace got::cli
