#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nids/dataframe.hpp"
#include "nids/preprocess.hpp"

namespace nids {

/// Gini impurity 1 - p0^2 - p1^2. Throws InvalidArgument when both counts are zero.
double gini(std::uint64_t count0, std::uint64_t count1);

/// Number of candidate features drawn at each node.
struct MaxFeatures {
  enum class Kind { Sqrt, All, Fixed };

  Kind kind = Kind::Sqrt;
  std::size_t k = 0;  // only for Fixed

  static MaxFeatures sqrt() { return {Kind::Sqrt, 0}; }
  static MaxFeatures all() { return {Kind::All, 0}; }
  static MaxFeatures fixed(std::size_t k) { return {Kind::Fixed, k}; }

  /// ceil(sqrt(d)) for Sqrt, d for All, k for Fixed (which requires 1 <= k <= d).
  std::size_t resolve(std::size_t feature_count) const;

  /// "sqrt", "all" or a positive integer.
  static MaxFeatures parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const MaxFeatures&, const MaxFeatures&) = default;
};

struct ForestConfig {
  std::size_t n_trees = 100;
  std::uint64_t seed = 42;
  MaxFeatures max_features = MaxFeatures::sqrt();
  std::size_t min_samples_split = 2;
  std::optional<std::size_t> max_depth;  // root has depth 0; must be >= 1 when set
  bool bootstrap = true;
  std::size_t threads = 0;  // 0 picks the hardware concurrency; never affects results

  friend bool operator==(const ForestConfig&, const ForestConfig&) = default;
};

/// One node of a fitted tree. Every node keeps the (bootstrap-weighted) class
/// counts of the samples that reached it; internal nodes route x left iff
/// x[feature] <= threshold.
struct TreeNode {
  static constexpr std::uint32_t kLeaf = std::numeric_limits<std::uint32_t>::max();

  std::uint32_t feature = kLeaf;
  double threshold = 0.0;
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  std::array<std::uint64_t, 2> counts{};

  bool is_leaf() const noexcept { return feature == kLeaf; }
  std::uint64_t samples() const noexcept { return counts[0] + counts[1]; }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Binary CART tree stored as a preorder node list; node 0 is the root.
class DecisionTree {
 public:
  DecisionTree() = default;
  /// Validates child links and counts.
  explicit DecisionTree(std::vector<TreeNode> nodes);

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  const TreeNode& leaf_for(std::span<const double> x) const;
  /// Class-1 fraction of the leaf reached by x.
  double probability(std::span<const double> x) const;

  std::size_t depth() const;
  std::size_t internal_count() const;

  friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

 private:
  std::vector<TreeNode> nodes_;
};

struct SplitCandidate {
  std::size_t feature = 0;
  double threshold = 0.0;
  double impurity_decrease = 0.0;  // parent gini minus weighted child gini

  friend bool operator==(const SplitCandidate&, const SplitCandidate&) = default;
};

/// Best Gini split of the given rows over the candidate features.
///
/// Thresholds are midpoints between consecutive distinct values. The split
/// with the largest impurity decrease wins; ties go to the lowest feature
/// index, then the lowest threshold. Decreases are compared exactly in integer
/// arithmetic. A zero decrease still counts as a split. Returns nullopt when
/// the node is pure or no candidate feature takes two distinct values. `weights`, when nonempty, gives each row's multiplicity.
std::optional<SplitCandidate> best_split(const FeatureMatrix& x, const LabelVector& y,
                                         std::span<const std::size_t> rows,
                                         std::span<const std::size_t> candidates,
                                         std::span<const std::uint32_t> weights = {});

/// Grows one unpruned CART tree. Candidate features at each node are drawn
/// without replacement from SplitMix64(tree_seed) in preorder node order.
/// `weights` (one per row of x, zero excluded) carries bootstrap multiplicity;
/// empty means every row once.
DecisionTree fit_tree(const FeatureMatrix& x, const LabelVector& y, const ForestConfig& config,
                      std::uint64_t tree_seed, std::span<const std::uint32_t> weights = {});

/// Bootstrap multiplicities: n draws with replacement from
/// SplitMix64(mix64(tree_seed)), returned as a per-row count.
std::vector<std::uint32_t> bootstrap_counts(std::size_t n, std::uint64_t tree_seed);

struct FeatureImportances {
  std::vector<double> values;
  std::vector<std::string> names;
  bool has_splits = false;  // false: every tree is a single leaf, values all zero
};

struct ForestModel {
  ForestConfig config;
  std::vector<DecisionTree> trees;
  std::vector<std::uint64_t> tree_seeds;
  std::size_t feature_count = 0;
  std::vector<std::string> feature_names;
  FeatureImportances importances;
};

/// Tree t uses seed derive_stream_seed(config.seed, t), a bootstrap sample
/// when config.bootstrap, and is grown with fit_tree. Results do not depend on
/// config.threads.
ForestModel fit_forest(const FeatureMatrix& x, const LabelVector& y, const ForestConfig& config = {});

/// Mean over trees of each tree's leaf class-1 fraction.
std::vector<double> predict_proba_forest(const ForestModel& model, const FeatureMatrix& x);

LabelVector predict_label_forest(const ForestModel& model, const FeatureMatrix& x);

/// Mean decrease in impurity. Each internal node adds (node samples / root
/// samples) * impurity decrease to its feature; each tree's vector is
/// normalized to sum 1 (trees with no split are skipped), the vectors are
/// averaged and the result renormalized.
FeatureImportances feature_importances(const ForestModel& model);

/// The k largest importances in descending order, ties by ascending index.
std::vector<std::pair<std::string, double>> top_k_importances(std::span<const double> values,
                                                              std::span<const std::string> names,
                                                              std::size_t k = 10);

}  // namespace nids
