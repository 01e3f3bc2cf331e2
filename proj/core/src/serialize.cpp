#include "nids/serialize.hpp"

#include <string>

#include "nids/error.hpp"

namespace nids {
namespace {

template <typename T>
T get(const Json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw FormatError(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
std::optional<T> get_optional(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get<T>(j, key);
}

template <typename T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

void metrics_to_json(Json& j, const ClassMetrics& m) {
  j = Json{{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
}

ClassMetrics metrics_from_json(const Json& j) {
  return {get<double>(j, "precision"), get<double>(j, "recall"), get<double>(j, "f1"),
          get<std::uint64_t>(j, "support")};
}

}  // namespace

void to_json(Json& j, const EncoderModel& e) {
  Json cats = Json::array();
  for (const auto& v : e.categorical()) {
    cats.push_back({{"column", v.column}, {"categories", v.categories}});
  }
  j = Json{{"categorical", cats}, {"numeric", e.numeric()}, {"width", e.width()}};
}

void from_json(const Json& j, EncoderModel& e) {
  std::vector<CategoryVocabulary> cats;
  for (const auto& c : get<Json>(j, "categorical")) {
    cats.push_back({get<std::string>(c, "column"), get<std::vector<std::string>>(c, "categories")});
  }
  try {
    e = EncoderModel(std::move(cats), get<std::vector<std::string>>(j, "numeric"));
  } catch (const InvalidArgument& err) {
    throw FormatError(std::string("encoder: ") + err.what());
  }
  if (get<std::size_t>(j, "width") != e.width()) throw FormatError("encoder width mismatch");
}

void to_json(Json& j, const LogisticConfig& c) {
  j = Json{{"penalty", to_string(c.penalty)},
           {"strength", optional_json(c.strength)},
           {"max_iterations", c.max_iterations},
           {"tolerance", c.tolerance},
           {"initial_step", c.initial_step},
           {"armijo", c.armijo},
           {"backtrack", c.backtrack},
           {"fixed_step", optional_json(c.fixed_step)},
           {"standardize", c.standardize}};
}

void from_json(const Json& j, LogisticConfig& c) {
  try {
    c.penalty = parse_penalty(get<std::string>(j, "penalty"));
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
  c.strength = get_optional<double>(j, "strength");
  c.max_iterations = get<std::size_t>(j, "max_iterations");
  c.tolerance = get<double>(j, "tolerance");
  c.initial_step = get<double>(j, "initial_step");
  c.armijo = get<double>(j, "armijo");
  c.backtrack = get<double>(j, "backtrack");
  c.fixed_step = get_optional<double>(j, "fixed_step");
  c.standardize = get<bool>(j, "standardize");
}

void to_json(Json& j, const LogisticModel& m) {
  j = Json{{"weights", m.weights},
           {"intercept", m.intercept},
           {"means", m.means},
           {"scales", m.scales},
           {"config", m.config},
           {"strength", m.strength},
           {"diagnostics",
            {{"converged", m.converged},
             {"iterations", m.iterations},
             {"objective", m.objective},
             {"gradient_norm", m.gradient_norm}}}};
}

void from_json(const Json& j, LogisticModel& m) {
  m.weights = get<std::vector<double>>(j, "weights");
  m.intercept = get<double>(j, "intercept");
  m.means = get<std::vector<double>>(j, "means");
  m.scales = get<std::vector<double>>(j, "scales");
  m.config = get<LogisticConfig>(j, "config");
  m.strength = get<double>(j, "strength");
  const auto diag = get<Json>(j, "diagnostics");
  m.converged = get<bool>(diag, "converged");
  m.iterations = get<std::size_t>(diag, "iterations");
  m.objective = get<double>(diag, "objective");
  m.gradient_norm = get<double>(diag, "gradient_norm");
  if (!m.scales.empty() && (m.scales.size() != m.weights.size() || m.means.size() != m.weights.size())) {
    throw FormatError("standardization vectors do not match weight count");
  }
  for (double s : m.scales) {
    if (!(s > 0.0)) throw FormatError("standardization scale must be positive");
  }
}

void to_json(Json& j, const ForestConfig& c) {
  j = Json{{"n_trees", c.n_trees},
           {"seed", c.seed},
           {"max_features", c.max_features.to_string()},
           {"min_samples_split", c.min_samples_split},
           {"max_depth", optional_json(c.max_depth)},
           {"bootstrap", c.bootstrap}};
}

void from_json(const Json& j, ForestConfig& c) {
  c.n_trees = get<std::size_t>(j, "n_trees");
  c.seed = get<std::uint64_t>(j, "seed");
  try {
    c.max_features = MaxFeatures::parse(get<std::string>(j, "max_features"));
  } catch (const InvalidArgument& e) {
    throw FormatError(e.what());
  }
  c.min_samples_split = get<std::size_t>(j, "min_samples_split");
  c.max_depth = get_optional<std::size_t>(j, "max_depth");
  c.bootstrap = get<bool>(j, "bootstrap");
}

void to_json(Json& j, const DecisionTree& t) {
  j = Json::array();
  for (const auto& n : t.nodes()) {
    if (n.is_leaf()) {
      j.push_back({n.counts[0], n.counts[1]});
    } else {
      j.push_back({n.feature, n.threshold, n.counts[0], n.counts[1]});
    }
  }
}

void from_json(const Json& j, DecisionTree& t) {
  if (!j.is_array() || j.empty()) throw FormatError("tree must be a nonempty node array");
  std::vector<TreeNode> nodes(j.size());
  std::vector<std::uint32_t> open;  // internal nodes still missing a child
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    auto& node = nodes[i];
    try {
      if (e.size() == 2) {
        node.counts = {e[0].get<std::uint64_t>(), e[1].get<std::uint64_t>()};
      } else if (e.size() == 4) {
        node.feature = e[0].get<std::uint32_t>();
        node.threshold = e[1].get<double>();
        node.counts = {e[2].get<std::uint64_t>(), e[3].get<std::uint64_t>()};
      } else {
        throw FormatError("tree node must have 2 or 4 entries");
      }
    } catch (const Json::exception& err) {
      throw FormatError(std::string("tree node: ") + err.what());
    }
    if (i > 0) {
      if (open.empty()) throw FormatError("tree node list has unreachable nodes");
      auto& parent = nodes[open.back()];
      if (parent.left == 0) {
        parent.left = static_cast<std::uint32_t>(i);
      } else {
        parent.right = static_cast<std::uint32_t>(i);
        open.pop_back();
      }
    }
    if (!node.is_leaf()) open.push_back(static_cast<std::uint32_t>(i));
  }
  if (!open.empty()) throw FormatError("tree node list is truncated");
  t = DecisionTree(std::move(nodes));
}

void to_json(Json& j, const ForestModel& m) {
  Json trees = Json::array();
  for (std::size_t t = 0; t < m.trees.size(); ++t) {
    trees.push_back({{"seed", m.tree_seeds[t]}, {"nodes", m.trees[t]}});
  }
  j = Json{{"config", m.config},
           {"feature_count", m.feature_count},
           {"feature_names", m.feature_names},
           {"importances", m.importances.values},
           {"has_splits", m.importances.has_splits},
           {"trees", trees}};
}

void from_json(const Json& j, ForestModel& m) {
  m.config = get<ForestConfig>(j, "config");
  m.feature_count = get<std::size_t>(j, "feature_count");
  m.feature_names = get<std::vector<std::string>>(j, "feature_names");
  m.importances.values = get<std::vector<double>>(j, "importances");
  m.importances.names = m.feature_names;
  m.importances.has_splits = get<bool>(j, "has_splits");
  m.trees.clear();
  m.tree_seeds.clear();
  for (const auto& t : get<Json>(j, "trees")) {
    m.tree_seeds.push_back(get<std::uint64_t>(t, "seed"));
    m.trees.push_back(get<DecisionTree>(t, "nodes"));
  }
  if (m.trees.size() != m.config.n_trees) throw FormatError("tree count does not match config");
  if (m.feature_names.size() != m.feature_count || m.importances.values.size() != m.feature_count) {
    throw FormatError("forest feature vectors do not match feature_count");
  }
  for (const auto& tree : m.trees) {
    for (const auto& node : tree.nodes()) {
      if (!node.is_leaf() && node.feature >= m.feature_count) {
        throw FormatError("tree splits on a feature outside the model width");
      }
    }
  }
}

void to_json(Json& j, const ConfusionMatrix& cm) {
  j = Json{{"counts", {{cm.counts[0][0], cm.counts[0][1]}, {cm.counts[1][0], cm.counts[1][1]}}},
           {"total", cm.total()}};
}

void from_json(const Json& j, ConfusionMatrix& cm) {
  const auto rows = get<std::vector<std::vector<std::uint64_t>>>(j, "counts");
  if (rows.size() != 2 || rows[0].size() != 2 || rows[1].size() != 2) {
    throw FormatError("confusion counts must be 2x2");
  }
  for (int t = 0; t < 2; ++t) {
    for (int p = 0; p < 2; ++p) cm.counts[t][p] = rows[t][p];
  }
}

void to_json(Json& j, const ClassReport& r) {
  Json c0, c1, macro, weighted;
  metrics_to_json(c0, r.classes[0]);
  metrics_to_json(c1, r.classes[1]);
  metrics_to_json(macro, r.macro);
  metrics_to_json(weighted, r.weighted);
  j = Json{{"classes", {{"0", c0}, {"1", c1}}},
           {"accuracy", r.accuracy},
           {"macro_avg", macro},
           {"weighted_avg", weighted}};
}

void from_json(const Json& j, ClassReport& r) {
  const auto classes = get<Json>(j, "classes");
  r.classes[0] = metrics_from_json(get<Json>(classes, "0"));
  r.classes[1] = metrics_from_json(get<Json>(classes, "1"));
  r.accuracy = get<double>(j, "accuracy");
  r.macro = metrics_from_json(get<Json>(j, "macro_avg"));
  r.weighted = metrics_from_json(get<Json>(j, "weighted_avg"));
}

void to_json(Json& j, const RocCurve& c) {
  j = Json{{"fpr", c.fpr}, {"tpr", c.tpr}, {"thresholds", c.thresholds}, {"auc", c.auc}};
}

void from_json(const Json& j, RocCurve& c) {
  c.fpr = get<std::vector<double>>(j, "fpr");
  c.tpr = get<std::vector<double>>(j, "tpr");
  c.thresholds = get<std::vector<double>>(j, "thresholds");
  c.auc = get<double>(j, "auc");
  if (c.fpr.size() != c.tpr.size() || c.fpr.size() != c.thresholds.size()) {
    throw FormatError("ROC vectors differ in length");
  }
}

void to_json(Json& j, const CorrelationMatrix& c) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < c.size(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < c.size(); ++k) row.push_back(optional_json(c.at(i, k)));
    rows.push_back(std::move(row));
  }
  j = Json{{"names", c.names}, {"matrix", rows}};
}

void from_json(const Json& j, CorrelationMatrix& c) {
  c.names = get<std::vector<std::string>>(j, "names");
  const auto rows = get<Json>(j, "matrix");
  if (rows.size() != c.names.size()) throw FormatError("correlation matrix is not square");
  c.values.clear();
  for (const auto& row : rows) {
    if (row.size() != c.names.size()) throw FormatError("correlation matrix is not square");
    for (const auto& v : row) {
      c.values.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
    }
  }
}

}  // namespace nids
