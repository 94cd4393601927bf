#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "crew/serialization.hpp"

namespace crew {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("crew_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"gen"}).code, kExitUsage);  // --out missing
  EXPECT_EQ(run({"gen", "--density", "-1", "--out", path("x.json")}).code, kExitUsage);
  EXPECT_EQ(run({"schedule", "--instance", path("i.json"), "--method", "magic", "--out", path("s.json")}).code,
            kExitUsage);
  EXPECT_EQ(run({"experiment", "--trials", "0", "--method", "baseline"}).code, kExitUsage);
  EXPECT_EQ(run({"experiment", "--method", "baseline,magic"}).code, kExitUsage);
  EXPECT_EQ(run({"--help"}).code, kExitOk);
}

TEST_F(Cli, BadInputsExitOne) {
  EXPECT_EQ(run({"schedule", "--instance", path("missing.json"), "--out", path("s.json")}).code,
            kExitDomainError);
  write_text_file(path("broken.json"), "{\"format_version\": 1,");
  EXPECT_EQ(run({"schedule", "--instance", path("broken.json"), "--out", path("s.json")}).code,
            kExitDomainError);
  ASSERT_EQ(run({"gen", "--seed", "1", "--out", path("inst.json")}).code, kExitOk);
  // Right file, wrong kind.
  EXPECT_EQ(run({"extract", "--weights", path("inst.json"), "--instance", path("inst.json"), "--out",
                 path("c.json")}).code,
            kExitDomainError);
}

TEST_F(Cli, GenIsDeterministicPerSeed) {
  ASSERT_EQ(run({"gen", "--seed", "7", "--out", path("a.json")}).code, kExitOk);
  ASSERT_EQ(run({"gen", "--seed", "7", "--out", path("b.json")}).code, kExitOk);
  ASSERT_EQ(run({"gen", "--seed", "8", "--out", path("c.json")}).code, kExitOk);
  EXPECT_EQ(read_text_file(path("a.json")), read_text_file(path("b.json")));
  EXPECT_NE(read_text_file(path("a.json")), read_text_file(path("c.json")));
  const Json a = read_json_file(path("a.json"));
  EXPECT_EQ(a.at("kind"), "instance");
  EXPECT_EQ(a.at("format_version"), 1);
  ASSERT_EQ(run({"gen", "--emit-profile", "--out", path("p.json")}).code, kExitOk);
  EXPECT_EQ(read_json_file(path("p.json")).at("kind"), "profile");
  ASSERT_EQ(run({"gen", "--profile", path("p.json"), "--seed", "7", "--out", path("d.json")}).code, kExitOk);
  // Same instance; the envelope hash records that a profile file was used.
  EXPECT_EQ(read_json_file(path("a.json")).at("body"), read_json_file(path("d.json")).at("body"));
}

TEST_F(Cli, PipelineFromInstanceToDisruption) {
  ASSERT_EQ(run({"gen", "--seed", "7", "--out", path("inst.json")}).code, kExitOk);
  ASSERT_EQ(run({"train", "--seed", "7", "--steps", "1024", "--hidden", "16", "--log", path("log.csv"),
                 "--out", path("w.json")}).code,
            kExitOk);
  EXPECT_EQ(read_text_file(path("log.csv")).rfind("steps,", 0), 0u);
  ASSERT_EQ(run({"extract", "--weights", path("w.json"), "--instance", path("inst.json"), "--n", "2",
                 "--seed", "7", "--out", path("c.json")}).code,
            kExitOk);
  EXPECT_EQ(read_json_file(path("c.json")).at("kind"), "coefficients");
  for (const std::string m : {"baseline", "nice"}) {
    const Outcome r = run({"schedule", "--instance", path("inst.json"), "--method", m, "--weights",
                       path("w.json"), "--seed", "7", "--lp", path(m + ".lp"), "--out", path(m + ".json")});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const Json body = artifact_body(read_json_file(path(m + ".json")), "schedule");
    EXPECT_TRUE(schedule_from_json(body).complete);
    EXPECT_NE(read_text_file(path(m + ".lp")).find("Subject To"), std::string::npos);
  }
  const Outcome d = run({"disrupt", "--instance", path("inst.json"), "--schedule", path("baseline.json"),
                     "--fraction-delayed", "0.5", "--seed", "3", "--out", path("dis.json")});
  ASSERT_EQ(d.code, kExitOk) << d.err;
  EXPECT_EQ(read_json_file(path("dis.json")).at("kind"), "disruption");
  // nice without weights is a usage mistake.
  EXPECT_EQ(run({"schedule", "--instance", path("inst.json"), "--method", "nice", "--out", path("x.json")}).code,
            kExitUsage);
}

TEST_F(Cli, ExperimentReportAndManifestRerun) {
  ASSERT_EQ(run({"train", "--seed", "2", "--steps", "1024", "--hidden", "16", "--out", path("w.json")}).code,
            kExitOk);
  const Outcome r = run({"experiment", "--weights", path("w.json"), "--trials", "3", "--method", "baseline,nice",
                     "--fraction-delayed", "0.5", "--seed", "7", "--out", path("x")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string report = read_text_file(path("x/report.txt"));
  EXPECT_NE(report.find("NICE"), std::string::npos);
  EXPECT_EQ(report.find("Buffer IP"), std::string::npos);
  EXPECT_EQ(report.find("RL"), std::string::npos);
  const Outcome again = run({"experiment", "--config", path("x/manifest.json"), "--out", path("y")});
  ASSERT_EQ(again.code, kExitOk) << again.err;
  const Json m1 = read_json_file(path("x/manifest.json"));
  const Json m2 = read_json_file(path("y/manifest.json"));
  EXPECT_EQ(m1.at("config_hash"), m2.at("config_hash"));
  // Everything above the timing footer must reproduce.
  auto table = [](const std::string& t) { return t.substr(0, t.find("Trials used")); };
  EXPECT_EQ(table(report), table(read_text_file(path("y/report.txt"))));
}

}  // namespace
}  // namespace crew
