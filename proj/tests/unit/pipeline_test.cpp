#include "nids/pipeline.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "golden_payloads.hpp"
#include "nids/error.hpp"
#include "synthetic_flows.hpp"

namespace nids {
namespace {

namespace fs = std::filesystem;

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("nids_pipeline_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    csv_ = dir_ / "flows.csv";
    std::ofstream(csv_) << testing::synthetic_flows_csv({.rows = 600, .seed = 11});
  }
  void TearDown() override { fs::remove_all(dir_); }

  PipelineConfig config(ModelKind kind) const {
    PipelineConfig c;
    c.data = csv_;
    c.model = kind;
    c.out = dir_ / "out";
    c.forest.n_trees = 10;
    return c;
  }

  fs::path dir_;
  fs::path csv_;
};

TEST_F(PipelineTest, TrainWritesModelAndManifest) {
  std::ostringstream log;
  const auto outcome = cmd_train(config(ModelKind::Forest), log);
  EXPECT_TRUE(fs::exists(outcome.model_path));
  EXPECT_TRUE(fs::exists(outcome.manifest_path));
  const auto manifest = Json::parse(golden::read_file(outcome.manifest_path));
  EXPECT_EQ(manifest["total_rows"], 600);
  EXPECT_EQ(manifest["test_rows"].size(), 120u);
  EXPECT_EQ(manifest["train_row_count"], 480);
  EXPECT_EQ(outcome.test_metrics.confusion.total(), 120u);
  EXPECT_GT(outcome.test_metrics.report.accuracy, 0.7);
}

TEST_F(PipelineTest, ModelFileRoundTrips) {
  std::ostringstream log;
  for (auto kind : {ModelKind::Logistic, ModelKind::Forest}) {
    const auto outcome = cmd_train(config(kind), log);
    const auto loaded = load_model(outcome.model_path);
    EXPECT_EQ(loaded.kind, kind);
    EXPECT_EQ(to_json_document(loaded).dump(), to_json_document(outcome.model).dump());
    const auto doc = Json::parse(golden::read_file(outcome.model_path));
    EXPECT_EQ(doc["format"], "nids-model");
    EXPECT_EQ(doc["format_version"], TrainedModel::kFormatVersion);
    EXPECT_EQ(doc["kind"], std::string(to_string(kind)));
  }
}

TEST_F(PipelineTest, ManifestReevaluationReproducesMetrics) {
  std::ostringstream log;
  for (auto kind : {ModelKind::Logistic, ModelKind::Forest}) {
    const auto outcome = cmd_train(config(kind), log);
    EvaluateRequest req;
    req.model = outcome.model_path;
    req.manifest = outcome.manifest_path;
    req.metrics_out = dir_ / "metrics.json";
    std::ostringstream out;
    const auto eval = cmd_evaluate(req, out);
    EXPECT_EQ(eval.confusion, outcome.test_metrics.confusion);
    EXPECT_EQ(eval.report, outcome.test_metrics.report);
    EXPECT_EQ(eval.roc, outcome.test_metrics.roc);
    const auto stored = Json::parse(golden::read_file(outcome.manifest_path))["metrics"];
    EXPECT_EQ(Json::parse(golden::read_file(*req.metrics_out)), stored);
    EXPECT_NE(out.str().find("Classification Report for " + display_name(kind)), std::string::npos);
  }
}

TEST_F(PipelineTest, UnknownCategoryPolicy) {
  std::ostringstream log;
  const auto outcome = cmd_train(config(ModelKind::Logistic), log);
  auto text = testing::synthetic_flows_csv({.rows = 20, .seed = 99});
  const auto pos = text.find(",tcp,");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 5, ",zzz,");
  const auto novel = dir_ / "novel.csv";
  std::ofstream(novel) << text;

  EvaluateRequest req;
  req.model = outcome.model_path;
  req.data = novel;
  std::ostringstream out;
  EXPECT_NO_THROW(cmd_evaluate(req, out));
  req.unknown = UnknownPolicy::Strict;
  try {
    cmd_evaluate(req, out);
    FAIL() << "expected StageError";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "transform");
  }
}

TEST_F(PipelineTest, StageErrorsNameTheStage) {
  std::ostringstream log;
  auto cfg = config(ModelKind::Forest);
  cfg.data = dir_ / "missing.csv";
  try {
    cmd_train(cfg, log);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "load");
  }
  cfg = config(ModelKind::Forest);
  cfg.drop.push_back("no_such_column");
  try {
    cmd_train(cfg, log);
    FAIL();
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "drop");
  }
  cfg = config(ModelKind::Forest);
  cfg.test_fraction = 1.5;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = config(ModelKind::Forest);
  cfg.drop.push_back("proto");
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST_F(PipelineTest, ReportWritesFigures) {
  std::ostringstream log;
  for (auto kind : {ModelKind::Logistic, ModelKind::Forest}) {
    auto cfg = config(kind);
    cfg.out = dir_ / std::string(to_string(kind));
    const auto outcome = cmd_train(cfg, log);
    EvaluateRequest req{outcome.model_path, std::nullopt, outcome.manifest_path, UnknownPolicy::Strict,
                        cfg.out / "metrics.json"};
    std::ostringstream out;
    cmd_evaluate(req, out);
    std::ostringstream report_log;
    const auto written = cmd_report({outcome.model_path, cfg.out / "metrics.json", cfg.out / "figures", {}},
                                    report_log);
    const std::size_t figures = kind == ModelKind::Forest ? 4 : 3;
    EXPECT_EQ(written.size(), 2 * figures);
    for (const auto& p : written) EXPECT_TRUE(fs::exists(p)) << p;
    const bool warned = report_log.str().find("warning") != std::string::npos;
    EXPECT_EQ(warned, kind == ModelKind::Logistic);

    const auto cm_svg = golden::read_file(cfg.out / "figures" / "confusion.svg");
    const auto notes = golden::text_nodes(cm_svg, "annotation");
    ASSERT_EQ(notes.size(), 4u);
    EXPECT_EQ(std::stoull(notes[0]), outcome.test_metrics.confusion.counts[0][0]);
    EXPECT_EQ(std::stoull(notes[3]), outcome.test_metrics.confusion.counts[1][1]);
  }
}

TEST_F(PipelineTest, RunAllLayoutAndDeterminism) {
  auto cfg = config(ModelKind::Forest);
  std::ostringstream log;
  cmd_run_all(cfg, log);
  const std::vector<std::string> files{"model.json",     "manifest.json",   "metrics.json", "confusion.svg",
                                       "confusion.json", "roc.svg",         "roc.json",     "correlation.svg",
                                       "correlation.json"};
  for (const char* kind : {"logreg", "rf"}) {
    for (const auto& f : files) EXPECT_TRUE(fs::exists(cfg.out / kind / f)) << kind << "/" << f;
  }
  EXPECT_TRUE(fs::exists(cfg.out / "rf" / "importances.svg"));
  EXPECT_FALSE(fs::exists(cfg.out / "logreg" / "importances.svg"));
  EXPECT_NE(log.str().find("Evaluating Logistic Regression..."), std::string::npos);
  EXPECT_NE(log.str().find("Evaluating Random Forest..."), std::string::npos);

  const auto first = golden::read_file(cfg.out / "rf" / "model.json");
  auto again = cfg;
  again.out = dir_ / "again";
  cmd_run_all(again, log);
  EXPECT_EQ(golden::read_file(again.out / "rf" / "model.json"), first);
  EXPECT_EQ(golden::read_file(again.out / "logreg" / "metrics.json"),
            golden::read_file(cfg.out / "logreg" / "metrics.json"));
}

}  // namespace
}  // namespace nids
