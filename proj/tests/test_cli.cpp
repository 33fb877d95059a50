#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pipesim/cli.hpp"

namespace fs = std::filesystem;
using pipesim::cli::run_cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("pipesim_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto p = (dir_ / name).string();
    std::ofstream(p) << text;
    return p;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

constexpr const char* kLoadUse = "lw x1, 0(x2)\nadd x3, x1, x1\necall\n";

}  // namespace

TEST_F(CliTest, RunWritesJsonWithoutLoadUseStalls) {
  const auto src = write("loaduse.s", kLoadUse);
  const auto r = cli({"run", src, "--scheme", "ssr", "--json", path("out.json"), "--set", "x2=0x100", "--poke",
                      "0x100=5"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("out.json"));
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j.at("bubbles").at("load_use").get<int>(), 0);
  EXPECT_EQ(j.at("cycles").get<int>(), 7);
}

TEST_F(CliTest, CompareShowsRate) {
  const auto src = write("loaduse.s", kLoadUse);
  const auto r = cli({"compare", src, "--schemes", "stall,ssr"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("8 -> 7"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("+14.29%"), std::string::npos) << r.out;
}

TEST_F(CliTest, CompareOutputIsDeterministic) {
  const auto src = write("loaduse.s", kLoadUse);
  const auto a = cli({"compare", src, "--schemes", "ssr,stall,nobypass", "--json", "-"});
  const auto b = cli({"compare", src, "--schemes", "ssr,stall,nobypass", "--json", "-"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const auto j = nlohmann::json::parse(a.out);
  EXPECT_EQ(j.at("runs").at(0).at("scheme"), "ssr");
  EXPECT_EQ(j.at("runs").at(2).at("scheme"), "nobypass");
  EXPECT_EQ(j.at("comparisons").size(), 2u);
}

TEST_F(CliTest, UndefinedLabelExitsTwoWithLine) {
  const auto src = write("bad.s", "nop\nnop\nj nowhere\n");
  const auto r = cli({"run", src, "--scheme", "ssr"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(":3:"), std::string::npos) << r.err;
}

TEST_F(CliTest, SimulationErrorsExitOne) {
  const auto src = write("loop.s", "loop: j loop\n");
  const auto r = cli({"run", src, "--scheme", "stall", "--max-cycles", "50"});
  EXPECT_EQ(r.code, 1);
  const auto ill = write("ill.s", ".word 0\n");
  EXPECT_EQ(cli({"run", ill, "--scheme", "ssr"}).code, 1);
}

TEST_F(CliTest, UsageErrors) {
  const auto src = write("ok.s", "ecall\n");
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"run", src, "--scheme", "fast"}).code, 2);
  EXPECT_EQ(cli({"run", src, "--miss-penalty", "3"}).code, 2);
  EXPECT_EQ(cli({"run", src, "--cache", "on", "--cache-lines", "3"}).code, 2);
  EXPECT_EQ(cli({"compare", src, "--schemes", "ssr"}).code, 2);
  EXPECT_EQ(cli({"compare", src, "--schemes", "ssr,ssr"}).code, 2);
  EXPECT_EQ(cli({"run", path("missing.s")}).code, 2);
  EXPECT_EQ(cli({"run", src, "--set", "x0=1"}).code, 2);
  EXPECT_EQ(cli({"run", src, "--poke", "0x3=1"}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST_F(CliTest, AsmThenRunHex) {
  const auto src = write("p.s", "addi x1, x0, 5\necall\n");
  ASSERT_EQ(cli({"asm", src, "-o", path("p.hex")}).code, 0);
  std::ifstream in(path("p.hex"));
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first, "00500093");
  const auto r = cli({"run", path("p.hex"), "--scheme", "stall", "--json", "-"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out).at("cycles").get<int>(), 6);
}

TEST_F(CliTest, TraceToFileAndStdout) {
  const auto src = write("p.s", "addi x1, x0, 5\necall\n");
  const auto r = cli({"run", src, "--scheme", "ssr", "--trace"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("addi x1, x0, 5"), std::string::npos);
  ASSERT_EQ(cli({"run", src, "--scheme", "ssr", "--trace-out", path("t.txt")}).code, 0);
  EXPECT_TRUE(fs::exists(path("t.txt")));
}

TEST_F(CliTest, CacheFlags) {
  const auto src = write("loaduse.s", kLoadUse);
  const auto r = cli({"run", src, "--scheme", "ssr", "--cache", "on", "--miss-penalty", "3", "--set", "x2=0x100",
                      "--json", "-"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out).at("cycles").get<int>(), 10);
}

TEST_F(CliTest, GenerateAndRun) {
  ASSERT_EQ(cli({"gen", "random", "--seed", "3", "--length", "12", "-o", path("r.s")}).code, 0);
  EXPECT_EQ(cli({"compare", path("r.s"), "--schemes", "nobypass,stall,ssr"}).code, 0);
  const auto g = cli({"gen", "loaduse", "--iterations", "10", "--density", "0.1", "-o", path("l.s")});
  ASSERT_EQ(g.code, 0);
  EXPECT_NE(g.err.find("adjacencies: 10"), std::string::npos) << g.err;
  EXPECT_EQ(cli({"compare", path("l.s"), "--schemes", "stall,ssr"}).code, 0);
  EXPECT_EQ(cli({"gen", "loaduse", "--iterations", "10", "--density", "2"}).code, 2);
}
