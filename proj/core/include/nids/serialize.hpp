#pragma once

#include <nlohmann/json.hpp>

#include "nids/forest.hpp"
#include "nids/linear.hpp"
#include "nids/metrics.hpp"
#include "nids/preprocess.hpp"

// nlohmann::json adapters for every persisted type. Keys are emitted in
// sorted order and reals in shortest round-trip form, so equal values always
// serialize to equal bytes.
namespace nids {

using Json = nlohmann::json;

void to_json(Json& j, const EncoderModel& e);
void from_json(const Json& j, EncoderModel& e);

void to_json(Json& j, const LogisticConfig& c);
void from_json(const Json& j, LogisticConfig& c);
void to_json(Json& j, const LogisticModel& m);
void from_json(const Json& j, LogisticModel& m);

void to_json(Json& j, const ForestConfig& c);
void from_json(const Json& j, ForestConfig& c);
/// Preorder node list: internal nodes as [feature, threshold, count0, count1],
/// leaves as [count0, count1]. Left children follow their parent directly.
void to_json(Json& j, const DecisionTree& t);
void from_json(const Json& j, DecisionTree& t);
void to_json(Json& j, const ForestModel& m);
void from_json(const Json& j, ForestModel& m);

void to_json(Json& j, const ConfusionMatrix& cm);
void from_json(const Json& j, ConfusionMatrix& cm);
void to_json(Json& j, const ClassReport& r);
void from_json(const Json& j, ClassReport& r);
void to_json(Json& j, const RocCurve& c);
void from_json(const Json& j, RocCurve& c);
/// Undefined entries serialize as null.
void to_json(Json& j, const CorrelationMatrix& c);
void from_json(const Json& j, CorrelationMatrix& c);

}  // namespace nids
