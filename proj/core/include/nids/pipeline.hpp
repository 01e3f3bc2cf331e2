#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nids/forest.hpp"
#include "nids/linear.hpp"
#include "nids/metrics.hpp"
#include "nids/preprocess.hpp"
#include "nids/serialize.hpp"

namespace nids {

enum class ModelKind { Logistic, Forest };

/// "logreg" or "rf".
std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);
/// "Logistic Regression" or "Random Forest".
std::string display_name(ModelKind kind);

struct PipelineConfig {
  std::filesystem::path data;
  std::vector<std::string> drop{"id", "attack_cat"};
  std::vector<std::string> categorical{"proto", "service", "state"};
  std::string label = "label";
  double test_fraction = 0.2;
  std::uint64_t seed = 42;  // drives the split and the forest
  ModelKind model = ModelKind::Forest;
  LogisticConfig logistic;
  ForestConfig forest;
  std::filesystem::path out = "out";

  /// Throws InvalidArgument for an out-of-range fraction or overlapping
  /// drop/categorical/label names.
  void validate() const;
};

/// Self-describing model file contents.
struct TrainedModel {
  static constexpr int kFormatVersion = 1;

  ModelKind kind = ModelKind::Forest;
  PipelineConfig pipeline;
  EncoderModel encoder;
  std::variant<LogisticModel, ForestModel> model;

  std::vector<double> predict_proba(const FeatureMatrix& x) const;
  LabelVector predict(const FeatureMatrix& x) const;
};

struct Evaluation {
  ClassReport report;
  ConfusionMatrix confusion;
  RocCurve roc;
};

Json to_json_document(const TrainedModel& model);
TrainedModel model_from_json_document(const Json& doc);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

Json evaluation_to_json(ModelKind kind, const Evaluation& eval);
Evaluation evaluation_from_json(const Json& doc);

Evaluation evaluate(const TrainedModel& model, const FeatureMatrix& x, const LabelVector& y);

/// Loads the CSV, drops configured columns, and separates the label.
FeaturesAndLabels load_features(const PipelineConfig& config);

/// Output of a train run, with the files it wrote.
struct TrainOutcome {
  TrainedModel model;
  Evaluation test_metrics;
  std::filesystem::path model_path;
  std::filesystem::path manifest_path;
};

/// load -> drop -> split_xy -> fit_encoder -> transform -> split -> fit.
/// Writes <out>/model.json and <out>/manifest.json (test-row indices and
/// the test-fold metrics). Errors surface as StageError.
TrainOutcome cmd_train(const PipelineConfig& config, std::ostream& log);

struct EvaluateRequest {
  std::filesystem::path model;
  /// Data to score; defaults to the path recorded in the model.
  std::optional<std::filesystem::path> data;
  /// When set, only the manifest's test rows of the data are scored.
  std::optional<std::filesystem::path> manifest;
  UnknownPolicy unknown = UnknownPolicy::AllZeros;
  std::optional<std::filesystem::path> metrics_out;
};

/// Prints a classification report and writes metrics JSON when requested.
Evaluation cmd_evaluate(const EvaluateRequest& request, std::ostream& out);

struct ReportRequest {
  std::filesystem::path model;
  std::filesystem::path metrics;
  std::filesystem::path out_dir;
  /// Data for the correlation heatmap; defaults to the path recorded in the model.
  std::optional<std::filesystem::path> data;
};

/// Writes confusion.svg, roc.svg, importances.svg (forest only) and
/// correlation.svg, each with a JSON sidecar. Returns the written paths.
std::vector<std::filesystem::path> cmd_report(const ReportRequest& request, std::ostream& log);

/// Trains, evaluates and reports both model kinds under <out>/logreg and
/// <out>/rf. Stops at the first failing stage.
void cmd_run_all(const PipelineConfig& config, std::ostream& log);

}  // namespace nids
