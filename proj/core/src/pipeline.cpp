#include "nids/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <set>

#include "nids/error.hpp"
#include "nids/report.hpp"

namespace nids {
namespace {

template <typename Fn>
auto run_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error("cannot create directory '" + dir.string() + "'");
  }
}

Json pipeline_to_json(const PipelineConfig& c) {
  return Json{{"data", c.data.generic_string()},
              {"drop", c.drop},
              {"categorical", c.categorical},
              {"label", c.label},
              {"test_fraction", c.test_fraction},
              {"seed", c.seed}};
}

PipelineConfig pipeline_from_json(const Json& j) {
  PipelineConfig c;
  try {
    c.data = j.at("data").get<std::string>();
    c.drop = j.at("drop").get<std::vector<std::string>>();
    c.categorical = j.at("categorical").get<std::vector<std::string>>();
    c.label = j.at("label").get<std::string>();
    c.test_fraction = j.at("test_fraction").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
  } catch (const Json::exception& e) {
    throw FormatError(std::string("pipeline section: ") + e.what());
  }
  return c;
}

std::set<std::string, std::less<>> as_set(const std::vector<std::string>& v) {
  return {v.begin(), v.end()};
}


// Columns slated for dropping are read as text so free-form fields such as
// attack_cat never hit numeric validation.
std::set<std::string, std::less<>> text_columns(const PipelineConfig& config) {
  auto names = as_set(config.categorical);
  const auto header = read_csv_header(config.data);
  for (const auto& name : config.drop) {
    if (std::find(header.begin(), header.end(), name) != header.end()) names.insert(name);
  }
  return names;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::Logistic ? "logreg" : "rf";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "logreg") return ModelKind::Logistic;
  if (text == "rf") return ModelKind::Forest;
  throw InvalidArgument("unknown model kind '" + std::string(text) + "' (expected logreg or rf)");
}

std::string display_name(ModelKind kind) {
  return kind == ModelKind::Logistic ? "Logistic Regression" : "Random Forest";
}

void PipelineConfig::validate() const {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InvalidArgument("test fraction must lie in (0, 1)");
  }
  if (label.empty()) throw InvalidArgument("label column name is empty");
  std::set<std::string> seen;
  for (const auto* group : {&drop, &categorical}) {
    for (const auto& name : *group) {
      if (name == label || !seen.insert(name).second) {
        throw InvalidArgument("column '" + name + "' appears in more than one of drop/categorical/label");
      }
    }
  }
}

std::vector<double> TrainedModel::predict_proba(const FeatureMatrix& x) const {
  return std::visit(
      [&](const auto& m) -> std::vector<double> {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, LogisticModel>) {
          return predict_proba_linear(m, x);
        } else {
          return predict_proba_forest(m, x);
        }
      },
      model);
}

LabelVector TrainedModel::predict(const FeatureMatrix& x) const {
  return threshold_labels(predict_proba(x), 0.5);
}

Json to_json_document(const TrainedModel& m) {
  Json model_json = std::visit([](const auto& v) { return Json(v); }, m.model);
  return Json{{"format", "nids-model"},
              {"format_version", TrainedModel::kFormatVersion},
              {"kind", to_string(m.kind)},
              {"pipeline", pipeline_to_json(m.pipeline)},
              {"encoder", m.encoder},
              {"model", std::move(model_json)}};
}

TrainedModel model_from_json_document(const Json& doc) {
  if (!doc.is_object() || doc.value("format", "") != "nids-model") {
    throw FormatError("not a model file");
  }
  if (doc.value("format_version", 0) != TrainedModel::kFormatVersion) {
    throw FormatError("unsupported model format version");
  }
  TrainedModel m;
  try {
    m.kind = parse_model_kind(doc.at("kind").get<std::string>());
    m.pipeline = pipeline_from_json(doc.at("pipeline"));
    m.pipeline.model = m.kind;
    m.encoder = doc.at("encoder").get<EncoderModel>();
    if (m.kind == ModelKind::Logistic) {
      m.model = doc.at("model").get<LogisticModel>();
    } else {
      m.model = doc.at("model").get<ForestModel>();
    }
  } catch (const Json::exception& e) {
    throw FormatError(std::string("model file: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
  const std::size_t width = std::visit(
      [](const auto& v) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, LogisticModel>) {
          return v.weights.size();
        } else {
          return v.feature_count;
        }
      },
      m.model);
  if (width != m.encoder.width()) throw FormatError("model width does not match encoder width");
  return m;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  write_text(path, to_json_document(model).dump() + "\n");
}

TrainedModel load_model(const std::filesystem::path& path) {
  return model_from_json_document(read_json(path));
}

Json evaluation_to_json(ModelKind kind, const Evaluation& eval) {
  return Json{{"model", to_string(kind)},
              {"report", eval.report},
              {"confusion", eval.confusion},
              {"roc", eval.roc}};
}

Evaluation evaluation_from_json(const Json& doc) {
  Evaluation e;
  try {
    e.report = doc.at("report").get<ClassReport>();
    e.confusion = doc.at("confusion").get<ConfusionMatrix>();
    e.roc = doc.at("roc").get<RocCurve>();
  } catch (const Json::exception& err) {
    throw FormatError(std::string("metrics file: ") + err.what());
  }
  return e;
}

Evaluation evaluate(const TrainedModel& model, const FeatureMatrix& x, const LabelVector& y) {
  const auto proba = model.predict_proba(x);
  const auto predicted = threshold_labels(proba, 0.5);
  Evaluation e;
  e.confusion = confusion(y, predicted);
  e.report = class_report(e.confusion);
  e.roc = roc(y, proba);
  return e;
}

FeaturesAndLabels load_features(const PipelineConfig& config) {
  auto frame = run_stage("load", [&] {
    return load_csv(config.data, text_columns(config), config.label);
  });
  frame = run_stage("drop", [&] { return drop_columns(frame, config.drop); });
  return run_stage("split_xy", [&] { return split_xy(frame); });
}

TrainOutcome cmd_train(const PipelineConfig& config, std::ostream& log) {
  run_stage("config", [&] { config.validate(); });
  const auto [features, labels] = load_features(config);
  log << "loaded " << features.row_count() << " rows, " << features.column_count()
      << " feature columns\n";

  TrainOutcome outcome;
  TrainedModel& trained = outcome.model;
  trained.kind = config.model;
  trained.pipeline = config;
  trained.encoder = run_stage("fit_encoder", [&] { return fit_encoder(features); });
  const auto matrix = run_stage("transform", [&] {
    return transform(trained.encoder, features, UnknownPolicy::Strict);
  });
  const auto split = run_stage("split", [&] {
    return train_test_split(matrix, labels, config.test_fraction, config.seed);
  });
  log << "encoded width " << matrix.cols() << "; train " << split.train_rows.size() << ", test "
      << split.test_rows.size() << "\n";

  run_stage("fit", [&] {
    if (config.model == ModelKind::Logistic) {
      auto m = fit_logistic(split.train_x, split.train_y, config.logistic);
      log << "logistic regression: " << m.iterations << " iterations, "
          << (m.converged ? "converged" : "not converged") << ", objective " << m.objective << "\n";
      trained.model = std::move(m);
    } else {
      auto fc = config.forest;
      fc.seed = config.seed;
      trained.pipeline.forest = fc;
      trained.model = fit_forest(split.train_x, split.train_y, fc);
      log << "random forest: " << fc.n_trees << " trees\n";
    }
  });
  outcome.test_metrics = run_stage("evaluate", [&] { return evaluate(trained, split.test_x, split.test_y); });

  run_stage("write", [&] {
    ensure_directory(config.out);
    outcome.model_path = config.out / "model.json";
    outcome.manifest_path = config.out / "manifest.json";
    save_model(trained, outcome.model_path);
    const Json manifest{{"format", "nids-split-manifest"},
                        {"format_version", 1},
                        {"seed", config.seed},
                        {"test_fraction", config.test_fraction},
                        {"total_rows", matrix.rows()},
                        {"train_row_count", split.train_rows.size()},
                        {"test_rows", split.test_rows},
                        {"metrics", evaluation_to_json(config.model, outcome.test_metrics)}};
    write_text(outcome.manifest_path, manifest.dump(2) + "\n");
  });
  log << "wrote " << outcome.model_path.generic_string() << " and "
      << outcome.manifest_path.generic_string() << "\n";
  return outcome;
}

Evaluation cmd_evaluate(const EvaluateRequest& request, std::ostream& out) {
  const auto model = run_stage("load_model", [&] { return load_model(request.model); });
  PipelineConfig config = model.pipeline;
  if (request.data) config.data = *request.data;
  const auto [features, labels] = load_features(config);
  auto matrix = run_stage("transform", [&] { return transform(model.encoder, features, request.unknown); });
  LabelVector y = labels;

  if (request.manifest) {
    run_stage("manifest", [&] {
      const auto doc = read_json(*request.manifest);
      if (doc.value("format", "") != "nids-split-manifest") throw FormatError("not a split manifest");
      if (doc.at("total_rows").get<std::size_t>() != matrix.rows()) {
        throw DataError("manifest was written for " + std::to_string(doc.at("total_rows").get<std::size_t>()) +
                        " rows but the data has " + std::to_string(matrix.rows()));
      }
      const auto rows = doc.at("test_rows").get<std::vector<std::size_t>>();
      matrix = matrix.take_rows(rows);
      y = y.take(rows);
    });
  }

  const auto eval = run_stage("evaluate", [&] { return evaluate(model, matrix, y); });
  out << "Classification Report for " << display_name(model.kind) << ":\n"
      << format_class_report(eval.report);
  char auc[64];
  std::snprintf(auc, sizeof auc, "AUC: %.4f\n", eval.roc.auc);
  out << auc;

  if (request.metrics_out) {
    run_stage("write", [&] {
      if (request.metrics_out->has_parent_path()) ensure_directory(request.metrics_out->parent_path());
      write_text(*request.metrics_out, evaluation_to_json(model.kind, eval).dump(2) + "\n");
    });
  }
  return eval;
}

std::vector<std::filesystem::path> cmd_report(const ReportRequest& request, std::ostream& log) {
  const auto model = run_stage("load_model", [&] { return load_model(request.model); });
  const auto eval = run_stage("load_metrics", [&] { return evaluation_from_json(read_json(request.metrics)); });
  run_stage("write", [&] { ensure_directory(request.out_dir); });

  std::vector<std::filesystem::path> written;
  const auto emit = [&](const Figure& fig, const FigureSpec& spec) {
    run_stage("write", [&] { write_figure(fig, spec); });
    written.push_back(spec.output);
    written.push_back(sidecar_path(spec.output));
  };
  const std::string name = display_name(model.kind);

  FigureSpec cm_spec{FigureKind::ConfusionHeatmap, "Confusion Matrix for " + name, 800, 600,
                     request.out_dir / "confusion.svg"};
  emit(run_stage("render", [&] { return render_confusion(eval.confusion, cm_spec); }), cm_spec);

  FigureSpec roc_spec{FigureKind::RocPlot,
                      "Receiver Operating Characteristic (ROC) Curve for " + name, 800, 600,
                      request.out_dir / "roc.svg"};
  emit(run_stage("render", [&] { return render_roc(eval.roc, roc_spec); }), roc_spec);

  if (const auto* forest = std::get_if<ForestModel>(&model.model)) {
    FigureSpec imp_spec{FigureKind::ImportanceBars, "Feature Importances for " + name, 1000, 600,
                        request.out_dir / "importances.svg"};
    const auto top = top_k_importances(forest->importances.values, forest->feature_names, 10);
    emit(run_stage("render", [&] { return render_importances(top, imp_spec); }), imp_spec);
  } else {
    log << "warning: feature importance figure skipped (only available for random forest)\n";
  }

  PipelineConfig config = model.pipeline;
  if (request.data) config.data = *request.data;
  const auto corr = run_stage("correlation", [&] {
    const auto frame = load_csv(config.data, text_columns(config), config.label);
    return pearson(dummify_for_correlation(frame));
  });
  FigureSpec corr_spec{FigureKind::CorrelationHeatmap, "Correlation Heatmap", 1200, 1000,
                       request.out_dir / "correlation.svg"};
  emit(run_stage("render", [&] { return render_correlation(corr, corr_spec); }), corr_spec);

  for (const auto& p : written) log << "wrote " << p.generic_string() << "\n";
  return written;
}

void cmd_run_all(const PipelineConfig& config, std::ostream& log) {
  run_stage("config", [&] { config.validate(); });
  for (const ModelKind kind : {ModelKind::Logistic, ModelKind::Forest}) {
    log << "Evaluating " << display_name(kind) << "...\n";
    PipelineConfig cfg = config;
    cfg.model = kind;
    cfg.out = config.out / std::string(to_string(kind));
    const auto trained = cmd_train(cfg, log);
    EvaluateRequest eval_req;
    eval_req.model = trained.model_path;
    eval_req.data = cfg.data;
    eval_req.manifest = trained.manifest_path;
    eval_req.unknown = UnknownPolicy::Strict;
    eval_req.metrics_out = cfg.out / "metrics.json";
    cmd_evaluate(eval_req, log);
    cmd_report({trained.model_path, *eval_req.metrics_out, cfg.out, cfg.data}, log);
  }
}

}  // namespace nids
