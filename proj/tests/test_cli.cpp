#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tightbound/cli.hpp"

namespace fs = std::filesystem;
using tightbound::run_cli;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args, const std::string& in = "") {
  std::istringstream is(in);
  std::ostringstream os, es;
  const int code = run_cli(args, is, os, es);
  return {code, os.str(), es.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("tightbound_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, AnalyzeTwoPhaseJson) {
  const CliRun r = cli({"analyze", std::string(TIGHTBOUND_CORPUS) + "/two_phase.loop", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::ordered_json::parse(r.out);
  EXPECT_EQ(j["n"], 4);
  EXPECT_EQ(j["pb"], nlohmann::json({1, 2, 3, 4}));
  EXPECT_EQ(j["per_variable"]["x3"].size(), 3u);
  EXPECT_EQ(j["version"], "0.1.0");
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"n", "pb", "bounds", "per_variable", "superpoly", "witnesses", "stats",
                                            "unreduced_count", "budget", "version"}));
}

TEST_F(Cli, JsonIsByteStable) {
  const std::string f = std::string(TIGHTBOUND_CORPUS) + "/two_phase_counted.loop";
  const CliRun a = cli({"analyze", f, "--json", "--witness"});
  const CliRun b = cli({"analyze", f, "--json", "--witness", "--serial"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, cli({"analyze", f, "--json", "--witness"}).out);
}

TEST_F(Cli, InterpretEnumerate) {
  const std::string f = write("ex.loop", "loop X1 { X2 := X2 + X1 }\n");
  const CliRun r = cli({"interpret", f, "--input", "3,1", "--enumerate"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "(3,1)\n(3,4)\n(3,7)\n(3,10)\n");
  EXPECT_EQ(cli({"interpret", f, "--input", "3,1", "--schedule", "2"}).out, "(3,7)\n");
  EXPECT_EQ(cli({"interpret", f, "--input", "3,1", "--schedule", "5"}).code, 2);
  EXPECT_EQ(cli({"interpret", f}).code, 2);
}

TEST_F(Cli, AdversarialPipedToAnalyze) {
  const CliRun g = cli({"gen-adversarial", "6", "1"});
  ASSERT_EQ(g.code, 0);
  const CliRun r = cli({"analyze", "-", "--json"}, g.out);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["bounds"].size(), 27u);
  EXPECT_EQ(cli({"gen-adversarial", "6", "2"}).code, 2);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"bogus"}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
  const CliRun parse_err = cli({"analyze", "-"}, "loop X1 { X2 := X2");
  EXPECT_EQ(parse_err.code, 2);
  EXPECT_NE(parse_err.err.find("line 1"), std::string::npos);
  EXPECT_EQ(cli({"analyze", (dir_ / "missing.loop").string()}).code, 2);
  const std::string two = std::string(TIGHTBOUND_CORPUS) + "/two_phase.loop";
  EXPECT_EQ(cli({"analyze", two, "--max-set-size", "3"}).code, 1);
  EXPECT_EQ(cli({"analyze", two, "--max-rounds", "1"}).code, 1);
}

TEST_F(Cli, SolveSdl) {
  const CliRun r = cli({"solve-sdl", "-", "--json"}, R"({"arity": 2, "body": ["<x1+x2, x2>"]})");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("x1+x2*tau"), std::string::npos);
  EXPECT_EQ(cli({"solve-sdl", "-"}, "{not json").code, 2);
}

TEST_F(Cli, CheckPassAndFail) {
  write("acc.loop", "loop X2 { X1 := X1 + X3 }\n");
  write("acc.expect.json", R"({"pb": [1, 2, 3], "classification": {"x1": "polynomial"}})");
  const CliRun ok = cli({"check", dir_.string(), "--no-growth"});
  EXPECT_EQ(ok.code, 0) << ok.out << ok.err;
  EXPECT_NE(ok.out.find("PASS acc.loop"), std::string::npos);

  write("acc.expect.json", R"({"pb": [2, 3]})");
  const CliRun bad = cli({"check", dir_.string(), "--no-growth"});
  EXPECT_EQ(bad.code, 3);
  EXPECT_NE(bad.out.find("FAIL acc.loop"), std::string::npos);
}
