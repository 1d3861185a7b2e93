#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

namespace fs = std::filesystem;
using namespace twofluid;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome cli(const std::string& args) {
  const std::string cmd = std::string(TWOFLUID_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  Outcome o;
  if (!pipe) return o;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) o.out += buf;
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

std::string cases_dir() { return TWOFLUID_CASES_DIR; }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("twofluid_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  /// The shipped delta = 2 case with edits applied, written into the scratch dir.
  std::string edited_case(const std::string& name, const std::vector<std::pair<std::string, std::string>>& edits) {
    std::ifstream in(cases_dir() + "/toumi_delta2.case");
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    for (const auto& [from, to] : edits) {
      const auto at = text.find(from);
      EXPECT_NE(at, std::string::npos) << from;
      if (at != std::string::npos) text.replace(at, from.size(), to);
    }
    const fs::path p = dir_ / (name + ".case");
    std::ofstream(p) << text;
    return p.string();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, GenCoeffsPrintsUpwindStencil) {
  const Outcome o = cli("gen-coeffs --p 3");
  EXPECT_EQ(o.code, 0) << o.out;
  for (const char* s : {"-0.33333333333333", "1.5", "-3", "1.83333333333333"})
    EXPECT_NE(o.out.find(s), std::string::npos) << s << "\n" << o.out;
}

TEST_F(CliTest, GenCoeffsRejectsEvenOrder) { EXPECT_EQ(cli("gen-coeffs --p 2").code, 1); }

TEST_F(CliTest, UsageErrorPrintsSynopsis) {
  const Outcome none = cli("");
  EXPECT_EQ(none.code, 1);
  EXPECT_NE(none.out.find("run"), std::string::npos);
  const Outcome bad = cli("run --bogus");
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.out.find("Usage"), std::string::npos) << bad.out;
}

TEST_F(CliTest, RunAtTimeZeroWritesInitialSnapshot) {
  const std::string c = edited_case("zero", {{"t_end = 0.06", "t_end = 0"},
                                             {"times = 0.06", "times = 0"},
                                             {"files = toumi_delta2_t0.06.csv", "files = init.csv"}});
  const Outcome o = cli("run " + c + " --cells 200 --out " + dir_.string());
  EXPECT_EQ(o.code, 0) << o.out;
  const Snapshot s = read_snapshot_csv((dir_ / "init.csv").string());
  ASSERT_EQ(s.size(), 200u);
  EXPECT_EQ(s[Column::alpha1].front(), 0.25);
  EXPECT_EQ(s[Column::alpha1].back(), 0.1);
  EXPECT_TRUE(fs::exists(dir_ / "zero.gp"));
  EXPECT_TRUE(fs::exists(dir_ / "zero_report.txt"));
}

TEST_F(CliTest, CompareAgainstItselfIsZero) {
  const std::string c = cases_dir() + "/toumi_delta2.case";
  const Outcome o = cli("compare " + c + " " + c + " --cells 1000");
  EXPECT_EQ(o.code, 0) << o.out;
  std::istringstream in(o.out);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    for (const auto name : kColumnNames) {
      if (line.rfind(std::string(name) + " ", 0) != 0) continue;
      ++rows;
      std::istringstream fields(line.substr(name.size()));
      double v = 0.0;
      while (fields >> v) EXPECT_EQ(v, 0.0) << line;
    }
  }
  EXPECT_EQ(rows, kColumns) << o.out;
}

TEST_F(CliTest, InvalidCaseExitsOne) {
  const std::string c = edited_case("bad", {{"alpha1 = 0.25", "alpha1 = 1.2"}});
  const Outcome o = cli("run " + c + " --out " + dir_.string());
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.out.find("alpha1"), std::string::npos) << o.out;
  EXPECT_EQ(cli("run /nonexistent.case").code, 1);
}

TEST_F(CliTest, NumericalAbortExitsTwo) {
  const std::string c = edited_case("abort", {{"r = 0.0012", "r = 0.05"}});
  const Outcome o = cli("run " + c + " --cells 200 --out " + dir_.string());
  EXPECT_EQ(o.code, 2) << o.out;
  EXPECT_NE(o.out.find("CflViolation"), std::string::npos) << o.out;
}

TEST_F(CliTest, ConvergenceReportsLevels) {
  const std::string c = edited_case("conv", {{"t_end = 0.06", "t_end = 0.02"}, {"times = 0.06", "times = 0.02"}});
  const Outcome o = cli("convergence " + c + " --cells 500 --levels 3");
  EXPECT_EQ(o.code, 0) << o.out;
  EXPECT_NE(o.out.find("level 2: 2000 cells"), std::string::npos) << o.out;
  EXPECT_NE(o.out.find("observed order"), std::string::npos) << o.out;
}

TEST_F(CliTest, ShippedCasesRunAtReducedResolution) {
  for (const auto& entry : fs::directory_iterator(cases_dir())) {
    if (entry.path().extension() != ".case") continue;
    const CaseSpec cs = parse_case_file(entry.path().string());
    const std::size_t cells = std::min<std::size_t>(cs.grid.n_cells, 2000);
    const Outcome o = cli("run " + entry.path().string() + " --cells " + std::to_string(cells) + " --out " +
                          dir_.string());
    EXPECT_EQ(o.code, 0) << entry.path() << "\n" << o.out;
    for (const auto& f : cs.output.files) EXPECT_TRUE(fs::exists(dir_ / f)) << f;
  }
}
