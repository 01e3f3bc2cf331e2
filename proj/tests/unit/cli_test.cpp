#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "golden_payloads.hpp"
#include "nids/serialize.hpp"
#include "synthetic_flows.hpp"

namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("nids_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    csv_ = dir_ / "flows.csv";
    std::ofstream(csv_) << nids::testing::synthetic_flows_csv({.rows = 400, .seed = 5});
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) const {
    const std::string cmd = std::string(NIDS_CLI_PATH) + " " + args + " > " + (dir_ / "stdout.txt").string() +
                            " 2> " + (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string stdout_text() const { return nids::golden::read_file(dir_ / "stdout.txt"); }
  std::string stderr_text() const { return nids::golden::read_file(dir_ / "stderr.txt"); }

  fs::path dir_;
  fs::path csv_;
};

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("train --bogus"), 2);
  EXPECT_EQ(run("train --data " + csv_.string() + " --model svm"), 2);
  EXPECT_EQ(run("train --data " + csv_.string() + " --test-fraction 1.5"), 2);
  EXPECT_EQ(run("train --data " + csv_.string() + " --drop proto"), 2);
  EXPECT_EQ(run("train --data " + csv_.string() + " --max-features zero"), 2);
}

TEST_F(CliTest, PipelineErrorsExitOne) {
  EXPECT_EQ(run("train --data " + (dir_ / "absent.csv").string() + " --out " + (dir_ / "o").string()), 1);
  EXPECT_NE(stderr_text().find("load:"), std::string::npos) << stderr_text();
  EXPECT_EQ(run("evaluate --model " + (dir_ / "absent.json").string()), 1);
}

TEST_F(CliTest, TrainEvaluateReport) {
  const auto out = dir_ / "rf";
  ASSERT_EQ(run("train --data " + csv_.string() + " --model rf --trees 5 --out " + out.string()), 0) << stderr_text();
  ASSERT_EQ(run("evaluate --model " + (out / "model.json").string() + " --manifest " +
                (out / "manifest.json").string()),
            0)
      << stderr_text();
  EXPECT_NE(stdout_text().find("Classification Report for Random Forest:"), std::string::npos);
  const auto manifest = nids::Json::parse(nids::golden::read_file(out / "manifest.json"));
  EXPECT_EQ(nids::Json::parse(nids::golden::read_file(out / "metrics.json")), manifest["metrics"]);
  ASSERT_EQ(run("report --model " + (out / "model.json").string() + " --metrics " + (out / "metrics.json").string() +
                " --out " + (out / "fig").string()),
            0)
      << stderr_text();
  for (const char* f : {"confusion.svg", "roc.svg", "importances.svg", "correlation.svg"}) {
    EXPECT_TRUE(fs::exists(out / "fig" / f)) << f;
  }
}

TEST_F(CliTest, LogisticReportWarnsAndSkipsImportances) {
  const auto out = dir_ / "lr";
  ASSERT_EQ(run("train --data " + csv_.string() + " --model logreg --out " + out.string()), 0) << stderr_text();
  ASSERT_EQ(run("evaluate --model " + (out / "model.json").string() + " --manifest " +
                (out / "manifest.json").string()),
            0);
  ASSERT_EQ(run("report --model " + (out / "model.json").string() + " --metrics " + (out / "metrics.json").string() +
                " --out " + (out / "fig").string()),
            0);
  EXPECT_NE(stdout_text().find("warning"), std::string::npos);
  EXPECT_FALSE(fs::exists(out / "fig" / "importances.svg"));
}

TEST_F(CliTest, ConfigFilesAndOverrides) {
  const auto json_cfg = dir_ / "cfg.json";
  std::ofstream(json_cfg) << "{\"data\": \"" << csv_.string() << "\", \"seed\": 7, \"trees\": 3, \"model\": \"rf\","
                          << " \"test-fraction\": 0.25, \"out\": \"" << (dir_ / "json").string() << "\"}";
  ASSERT_EQ(run("train --config " + json_cfg.string()), 0) << stderr_text();
  auto doc = nids::Json::parse(nids::golden::read_file(dir_ / "json" / "model.json"));
  EXPECT_EQ(doc["pipeline"]["seed"], 7);
  EXPECT_EQ(doc["pipeline"]["test_fraction"], 0.25);
  EXPECT_EQ(doc["model"]["config"]["n_trees"], 3);

  ASSERT_EQ(run("train --config " + json_cfg.string() + " --seed 9"), 0) << stderr_text();
  doc = nids::Json::parse(nids::golden::read_file(dir_ / "json" / "model.json"));
  EXPECT_EQ(doc["pipeline"]["seed"], 9);

  const auto toml_cfg = dir_ / "cfg.toml";
  std::ofstream(toml_cfg) << "data = \"" << csv_.string() << "\"\nmodel = \"logreg\"\npenalty = \"l1\"\nout = \""
                          << (dir_ / "toml").string() << "\"\n";
  ASSERT_EQ(run("train --config " + toml_cfg.string()), 0) << stderr_text();
  doc = nids::Json::parse(nids::golden::read_file(dir_ / "toml" / "model.json"));
  EXPECT_EQ(doc["kind"], "logreg");
  EXPECT_EQ(doc["model"]["config"]["penalty"], "l1");
}

TEST_F(CliTest, RunAll) {
  ASSERT_EQ(run("run-all --data " + csv_.string() + " --trees 4 --out " + (dir_ / "all").string()), 0)
      << stderr_text();
  EXPECT_TRUE(fs::exists(dir_ / "all" / "logreg" / "metrics.json"));
  EXPECT_TRUE(fs::exists(dir_ / "all" / "rf" / "importances.svg"));
}

}  // namespace
