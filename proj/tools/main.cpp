// nids: train, evaluate and report flow-record intrusion classifiers.
//
//   nids train    --data flows.csv --model rf --out out/rf
//   nids evaluate --model out/rf/model.json --manifest out/rf/manifest.json
//   nids report   --model out/rf/model.json --metrics out/rf/metrics.json --out out/rf
//   nids run-all  --data flows.csv --out out
//
// Exit codes: 0 success, 1 pipeline error, 2 usage error.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "config_format.hpp"
#include "nids/error.hpp"
#include "nids/pipeline.hpp"

namespace {

constexpr int kPipelineError = 1;
constexpr int kUsageError = 2;

struct PipelineFlags {
  std::string config;
  std::string data;
  std::vector<std::string> drop{"id", "attack_cat"};
  std::vector<std::string> categorical{"proto", "service", "state"};
  std::string label = "label";
  double test_fraction = 0.2;
  std::uint64_t seed = 42;
  std::string model = "rf";
  std::string out = "out";
  std::size_t trees = 100;
  std::size_t max_iter = 10000;
  std::string penalty = "l2";
  std::optional<double> lambda;
  std::string max_features = "sqrt";
  std::optional<std::size_t> max_depth;
  std::size_t threads = 0;

  void attach(CLI::App& cmd, bool with_model) {
    cmd.add_option("--config", config, "TOML or JSON file with flag defaults (flags override it)");
    cmd.add_option("--data", data, "Input CSV with a header row (required here or in --config)");
    cmd.add_option("--drop", drop, "Columns removed before training")->delimiter(',')->capture_default_str();
    cmd.add_option("--categorical", categorical, "Columns to one-hot encode")
        ->delimiter(',')
        ->capture_default_str();
    cmd.add_option("--label", label, "Binary label column")->capture_default_str();
    cmd.add_option("--test-fraction", test_fraction, "Held-out fraction in (0,1)")->capture_default_str();
    cmd.add_option("--seed", seed, "Split and forest seed")->capture_default_str();
    if (with_model) {
      cmd.add_option("--model", model, "Model kind")->check(CLI::IsMember({"logreg", "rf"}))->capture_default_str();
    }
    cmd.add_option("--out", out, "Output directory")->capture_default_str();
    cmd.add_option("--trees", trees, "Forest size")->check(CLI::PositiveNumber)->capture_default_str();
    cmd.add_option("--max-features", max_features, "sqrt, all or a count")->capture_default_str();
    cmd.add_option("--max-depth", max_depth, "Tree depth cap (unlimited when unset)");
    cmd.add_option("--max-iter", max_iter, "Logistic regression iteration cap")->capture_default_str();
    cmd.add_option("--penalty", penalty, "Logistic penalty")
        ->check(CLI::IsMember({"none", "l1", "l2"}))
        ->capture_default_str();
    cmd.add_option("--lambda", lambda, "Penalty strength (default 1/n_train)");
    cmd.add_option("--threads", threads, "Worker threads, 0 = all cores (results do not depend on it)")
        ->capture_default_str();
  }

  // Fills every option not given on the command line from the config file.
  void apply_config(CLI::App& cmd) {
    if (!config.empty()) {
      std::ifstream in(config, std::ios::binary);
      if (!in) throw CLI::FileError::Missing(config);
      for (const auto& item : nids::cli::JsonOrTomlConfig().from_config(in)) {
        if (!item.parents.empty() && item.parents != std::vector<std::string>{cmd.get_name()}) continue;
        std::string name = item.name;
        std::replace(name.begin(), name.end(), '_', '-');
        CLI::Option* op = name == "config" ? nullptr : cmd.get_option_no_throw("--" + name);
        if (op == nullptr) throw CLI::ConfigError::Extras(item.fullname());
        if (op->count() > 0) continue;
        op->add_result(item.inputs);
        op->run_callback();
      }
    }
    if (data.empty()) throw CLI::RequiredError("--data");
  }

  nids::PipelineConfig build() const {
    nids::PipelineConfig c;
    c.data = data;
    c.drop = drop;
    c.categorical = categorical;
    c.label = label;
    c.test_fraction = test_fraction;
    c.seed = seed;
    c.model = nids::parse_model_kind(model);
    c.out = out;
    c.forest.n_trees = trees;
    c.forest.seed = seed;
    c.forest.max_features = nids::MaxFeatures::parse(max_features);
    c.forest.max_depth = max_depth;
    c.forest.threads = threads;
    c.logistic.max_iterations = max_iter;
    c.logistic.penalty = nids::parse_penalty(penalty);
    c.logistic.strength = lambda;
    c.logistic.threads = threads;
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flow-record intrusion detection: logistic regression and random forest"};
  app.require_subcommand(1);

  PipelineFlags train_flags;
  auto* train = app.add_subcommand("train", "Fit a model and write model.json + manifest.json");
  train_flags.attach(*train, true);

  PipelineFlags all_flags;
  auto* run_all = app.add_subcommand("run-all", "Train, evaluate and report both model kinds");
  all_flags.attach(*run_all, false);

  nids::EvaluateRequest eval_req;
  std::string eval_model, eval_data, eval_manifest, eval_out, unknown = "zeros";
  auto* evaluate = app.add_subcommand("evaluate", "Score a data file (or a manifest's test fold)");
  evaluate->add_option("--model", eval_model, "Model file")->required();
  evaluate->add_option("--data", eval_data, "Data CSV (default: the training data path)");
  evaluate->add_option("--manifest", eval_manifest, "Restrict scoring to a split manifest's test rows");
  evaluate->add_option("--unknown", unknown, "Unseen categories: strict (error) or zeros")
      ->check(CLI::IsMember({"strict", "zeros"}))
      ->capture_default_str();
  evaluate->add_option("--out", eval_out, "Metrics JSON path (default: metrics.json beside the model)");

  std::string rep_model, rep_metrics, rep_out, rep_data;
  auto* report = app.add_subcommand("report", "Render confusion, ROC, importance and correlation figures");
  report->add_option("--model", rep_model, "Model file")->required();
  report->add_option("--metrics", rep_metrics, "Metrics JSON from evaluate")->required();
  report->add_option("--out", rep_out, "Figure directory")->required();
  report->add_option("--data", rep_data, "Data CSV for the correlation heatmap (default: training data)");

  try {
    app.parse(argc, argv);
    if (*train) train_flags.apply_config(*train);
    if (*run_all) all_flags.apply_config(*run_all);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*train) {
      const auto config = train_flags.build();
      config.validate();
      nids::cmd_train(config, std::cout);
    } else if (*run_all) {
      const auto config = all_flags.build();
      config.validate();
      nids::cmd_run_all(config, std::cout);
    } else if (*evaluate) {
      eval_req.model = eval_model;
      if (!eval_data.empty()) eval_req.data = eval_data;
      if (!eval_manifest.empty()) eval_req.manifest = eval_manifest;
      eval_req.unknown = unknown == "strict" ? nids::UnknownPolicy::Strict : nids::UnknownPolicy::AllZeros;
      eval_req.metrics_out = eval_out.empty() ? eval_req.model.parent_path() / "metrics.json"
                                              : std::filesystem::path(eval_out);
      nids::cmd_evaluate(eval_req, std::cout);
    } else if (*report) {
      nids::ReportRequest req{rep_model, rep_metrics, rep_out, std::nullopt};
      if (!rep_data.empty()) req.data = rep_data;
      nids::cmd_report(req, std::cout);
    }
  } catch (const nids::InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPipelineError;
  }
  return 0;
}
