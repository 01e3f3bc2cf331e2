#include "nids/serialize.hpp"

#include <gtest/gtest.h>

#include "nids/error.hpp"
#include "nids/random.hpp"

namespace nids {
namespace {

FeatureMatrix random_matrix(SplitMix64& rng, std::size_t n, std::size_t d) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < d; ++j) names.push_back("f" + std::to_string(j));
  FeatureMatrix m(n, names);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = rng.uniform() * 10 - 5;
  return m;
}

LabelVector labels_for(const FeatureMatrix& m) {
  std::vector<std::uint8_t> y;
  for (std::size_t i = 0; i < m.rows(); ++i) y.push_back(m(i, 0) + 0.3 * m(i, 1) > 0.1 ? 1 : 0);
  return LabelVector(y);
}

template <typename T>
T round_trip(const T& value) {
  return Json::parse(Json(value).dump()).get<T>();
}

TEST(Serialize, EncoderRoundTrip) {
  const EncoderModel enc({{"proto", {"tcp", "udp"}}, {"service", {"-", "http"}}}, {"dur", "sbytes"});
  EXPECT_EQ(round_trip(enc), enc);
  EXPECT_EQ(Json(enc)["width"], 6);
}

TEST(Serialize, LogisticRoundTripIsBitExact) {
  SplitMix64 rng(1);
  const auto x = random_matrix(rng, 100, 3);
  LogisticConfig cfg;
  cfg.penalty = Penalty::L1;
  cfg.strength = 0.01;
  const auto model = fit_logistic(x, labels_for(x), cfg);
  const auto back = round_trip(model);
  EXPECT_EQ(back.weights, model.weights);
  EXPECT_EQ(back.intercept, model.intercept);
  EXPECT_EQ(back.means, model.means);
  EXPECT_EQ(back.scales, model.scales);
  EXPECT_EQ(back.config.penalty, Penalty::L1);
  EXPECT_EQ(back.converged, model.converged);
  EXPECT_EQ(back.iterations, model.iterations);
  EXPECT_EQ(predict_proba_linear(back, x), predict_proba_linear(model, x));
}

TEST(Serialize, ForestRoundTripIsBitExact) {
  SplitMix64 rng(2);
  const auto x = random_matrix(rng, 150, 4);
  ForestConfig cfg;
  cfg.n_trees = 6;
  cfg.max_depth = 5;
  const auto model = fit_forest(x, labels_for(x), cfg);
  const auto back = round_trip(model);
  EXPECT_EQ(back.config, model.config);
  EXPECT_EQ(back.trees, model.trees);
  EXPECT_EQ(back.tree_seeds, model.tree_seeds);
  EXPECT_EQ(back.importances.values, model.importances.values);
  EXPECT_EQ(predict_proba_forest(back, x), predict_proba_forest(model, x));
  EXPECT_EQ(Json(back).dump(), Json(model).dump());
}

TEST(Serialize, MetricsRoundTrip) {
  ConfusionMatrix cm;
  cm.counts = {{{5, 1}, {2, 7}}};
  EXPECT_EQ(round_trip(cm), cm);
  const auto report = class_report(cm);
  EXPECT_EQ(round_trip(report), report);
  RocCurve curve{{0, 0.5, 1}, {0, 1, 1}, {1.9, 0.9, 0.1}, 0.75};
  EXPECT_EQ(round_trip(curve), curve);
  CorrelationMatrix corr{{"a", "b"}, {1.0, std::nullopt, std::nullopt, std::nullopt}};
  EXPECT_TRUE(Json(corr)["values"][1].is_null());
  EXPECT_EQ(round_trip(corr), corr);
}

TEST(Serialize, MalformedDocumentsFail) {
  EXPECT_THROW(Json::parse(R"({"categorical": 3})").get<EncoderModel>(), FormatError);
  EXPECT_THROW(Json::parse(R"([[0, 1.5, 2, 2], [1, 0]])").get<DecisionTree>(), FormatError);
  EXPECT_THROW(Json::parse(R"({"counts": [[1, 2]]})").get<ConfusionMatrix>(), FormatError);
}

}  // namespace
}  // namespace nids
