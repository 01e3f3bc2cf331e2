#include "nids/forest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "nids/error.hpp"
#include "nids/random.hpp"
#include "parallel.hpp"

namespace nids {
namespace {

using u128 = unsigned __int128;

// Largest node weight for which the exact split comparison cannot overflow:
// numerators are O(n^3), denominators O(n^2), and comparisons multiply them.
constexpr std::uint64_t kMaxNodeWeight = 40'000'000;

struct Sample {
  std::uint32_t row;
  std::uint32_t weight;
};

struct Keyed {
  double value;
  std::uint32_t weight;
  std::uint8_t label;
};

// A split's quality as the fraction q_L/n_L + q_R/n_R (q = c0^2 + c1^2). The
// parent's impurity is fixed, so a larger fraction means a larger decrease.
struct Score {
  u128 num = 0;
  u128 den = 1;
};

bool better(const Score& a, const Score& b) { return a.num * b.den > b.num * a.den; }

Score split_score(std::uint64_t l0, std::uint64_t l1, std::uint64_t r0, std::uint64_t r1) {
  const u128 nl = l0 + l1, nr = r0 + r1;
  const u128 ql = u128(l0) * l0 + u128(l1) * l1;
  const u128 qr = u128(r0) * r0 + u128(r1) * r1;
  return {ql * nr + qr * nl, nl * nr};
}

double weighted_decrease(std::uint64_t l0, std::uint64_t l1, std::uint64_t r0, std::uint64_t r1) {
  const double nl = double(l0 + l1), nr = double(r0 + r1), n = nl + nr;
  return std::max(0.0, gini(l0 + r0, l1 + r1) - (nl / n) * gini(l0, l1) - (nr / n) * gini(r0, r1));
}

double midpoint(double lo, double hi) {
  const double mid = lo / 2.0 + hi / 2.0;
  return (mid >= lo && mid < hi) ? mid : lo;
}

// Scans the candidate features in ascending order; ties keep the earlier split.
std::optional<SplitCandidate> search_split(const FeatureMatrix& x, const LabelVector& y,
                                           std::span<const Sample> node,
                                           std::span<const std::size_t> features,
                                           std::vector<Keyed>& buf) {
  std::uint64_t c0 = 0, c1 = 0;
  for (const auto& s : node) (y[s.row] ? c1 : c0) += s.weight;
  if (c0 == 0 || c1 == 0) return std::nullopt;
  if (c0 + c1 > kMaxNodeWeight) throw InvalidArgument("node weight exceeds exact-split limit");

  Score best{0, 1};
  std::optional<SplitCandidate> out;
  std::uint64_t best_l[2] = {0, 0};

  for (std::size_t f : features) {
    buf.clear();
    for (const auto& s : node) buf.push_back({x(s.row, f), s.weight, y[s.row]});
    std::sort(buf.begin(), buf.end(), [](const Keyed& a, const Keyed& b) { return a.value < b.value; });
    if (buf.front().value == buf.back().value) continue;

    std::uint64_t l0 = 0, l1 = 0;
    for (std::size_t i = 0; i + 1 < buf.size(); ++i) {
      (buf[i].label ? l1 : l0) += buf[i].weight;
      if (buf[i].value == buf[i + 1].value) continue;
      const Score s = split_score(l0, l1, c0 - l0, c1 - l1);
      if (!out || better(s, best)) {
        best = s;
        best_l[0] = l0;
        best_l[1] = l1;
        out = SplitCandidate{f, midpoint(buf[i].value, buf[i + 1].value), 0.0};
      }
    }
  }
  if (out) out->impurity_decrease = weighted_decrease(best_l[0], best_l[1], c0 - best_l[0], c1 - best_l[1]);
  return out;
}

void check_training_inputs(const FeatureMatrix& x, const LabelVector& y,
                           std::span<const std::uint32_t> weights) {
  if (x.rows() != y.size()) {
    throw InvalidArgument("feature rows (" + std::to_string(x.rows()) + ") and labels (" +
                          std::to_string(y.size()) + ") differ");
  }
  if (!weights.empty() && weights.size() != x.rows()) {
    throw InvalidArgument("weight vector length does not match row count");
  }
  if (x.cols() == 0) throw InvalidArgument("feature matrix has no columns");
  if (x.rows() > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("too many rows for a tree");
  }
}

void check_config(const ForestConfig& config, std::size_t feature_count) {
  if (config.min_samples_split < 2) throw InvalidArgument("min_samples_split must be >= 2");
  if (config.max_depth && *config.max_depth == 0) throw InvalidArgument("max_depth must be >= 1");
  config.max_features.resolve(feature_count);
}

std::vector<double> tree_importance(const DecisionTree& tree, std::size_t feature_count) {
  std::vector<double> out(feature_count, 0.0);
  const auto& nodes = tree.nodes();
  const double total = double(nodes.front().samples());
  for (const auto& node : nodes) {
    if (node.is_leaf()) continue;
    const auto& l = nodes[node.left].counts;
    const auto& r = nodes[node.right].counts;
    out[node.feature] += (double(node.samples()) / total) * weighted_decrease(l[0], l[1], r[0], r[1]);
  }
  return out;
}

}  // namespace

double gini(std::uint64_t count0, std::uint64_t count1) {
  const std::uint64_t n = count0 + count1;
  if (n == 0) throw InvalidArgument("gini of an empty node");
  const double p0 = double(count0) / double(n);
  const double p1 = double(count1) / double(n);
  return 1.0 - p0 * p0 - p1 * p1;
}

std::size_t MaxFeatures::resolve(std::size_t d) const {
  switch (kind) {
    case Kind::All: return d;
    case Kind::Sqrt: {
      std::size_t k = static_cast<std::size_t>(std::sqrt(double(d)));
      while (k * k < d) ++k;
      return std::max<std::size_t>(k, 1);
    }
    case Kind::Fixed:
      if (k < 1 || k > d) {
        throw InvalidArgument("max_features " + std::to_string(k) + " outside [1, " +
                              std::to_string(d) + "]");
      }
      return k;
  }
  return d;
}

MaxFeatures MaxFeatures::parse(std::string_view text) {
  if (text == "sqrt") return sqrt();
  if (text == "all") return all();
  std::size_t k = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), k);
  if (ec != std::errc() || ptr != text.data() + text.size() || k == 0) {
    throw InvalidArgument("max_features must be 'sqrt', 'all' or a positive integer, got '" +
                          std::string(text) + "'");
  }
  return fixed(k);
}

std::string MaxFeatures::to_string() const {
  switch (kind) {
    case Kind::Sqrt: return "sqrt";
    case Kind::All: return "all";
    case Kind::Fixed: return std::to_string(k);
  }
  return "sqrt";
}

DecisionTree::DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw FormatError("tree has no nodes");
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& node = nodes_[i];
    if (node.samples() == 0) throw FormatError("tree node with zero samples");
    if (node.is_leaf()) continue;
    if (node.left <= i || node.right <= i || node.left >= nodes_.size() ||
        node.right >= nodes_.size()) {
      throw FormatError("tree node has invalid child links");
    }
  }
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> x) const {
  const TreeNode* node = &nodes_.front();
  while (!node->is_leaf()) {
    node = &nodes_[x[node->feature] <= node->threshold ? node->left : node->right];
  }
  return *node;
}

double DecisionTree::probability(std::span<const double> x) const {
  const auto& leaf = leaf_for(x);
  return double(leaf.counts[1]) / double(leaf.samples());
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> depth(nodes_.size(), 0);
  std::size_t deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    deepest = std::max(deepest, depth[i]);
    if (!nodes_[i].is_leaf()) {
      depth[nodes_[i].left] = depth[i] + 1;
      depth[nodes_[i].right] = depth[i] + 1;
    }
  }
  return deepest;
}

std::size_t DecisionTree::internal_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return !n.is_leaf(); }));
}

std::optional<SplitCandidate> best_split(const FeatureMatrix& x, const LabelVector& y,
                                         std::span<const std::size_t> rows,
                                         std::span<const std::size_t> candidates,
                                         std::span<const std::uint32_t> weights) {
  if (!weights.empty() && weights.size() != rows.size()) {
    throw InvalidArgument("weights must align with rows");
  }
  std::vector<Sample> node;
  node.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= x.rows()) throw InvalidArgument("row index out of range");
    const std::uint32_t w = weights.empty() ? 1 : weights[i];
    if (w > 0) node.push_back({static_cast<std::uint32_t>(rows[i]), w});
  }
  if (node.empty()) return std::nullopt;
  std::vector<std::size_t> features(candidates.begin(), candidates.end());
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());
  for (auto f : features) {
    if (f >= x.cols()) throw InvalidArgument("candidate feature out of range");
  }
  std::vector<Keyed> buf;
  return search_split(x, y, node, features, buf);
}

std::vector<std::uint32_t> bootstrap_counts(std::size_t n, std::uint64_t tree_seed) {
  std::vector<std::uint32_t> counts(n, 0);
  SplitMix64 rng(mix64(tree_seed));
  for (std::size_t i = 0; i < n; ++i) ++counts[rng.below(n)];
  return counts;
}

DecisionTree fit_tree(const FeatureMatrix& x, const LabelVector& y, const ForestConfig& config,
                      std::uint64_t tree_seed, std::span<const std::uint32_t> weights) {
  check_training_inputs(x, y, weights);
  check_config(config, x.cols());

  const std::size_t d = x.cols();
  const std::size_t k = config.max_features.resolve(d);

  std::vector<Sample> samples;
  samples.reserve(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const std::uint32_t w = weights.empty() ? 1 : weights[r];
    if (w > 0) samples.push_back({static_cast<std::uint32_t>(r), w});
  }
  if (samples.empty()) throw InvalidArgument("tree needs at least one sample");

  SplitMix64 rng(tree_seed);
  std::vector<std::size_t> pool(d);
  std::vector<std::size_t> candidates;
  std::vector<Keyed> buf;
  buf.reserve(samples.size());

  struct Task {
    std::size_t begin, end, depth;
    std::uint32_t parent;
    bool is_left;
  };
  std::vector<TreeNode> nodes;
  std::vector<Task> stack{{0, samples.size(), 0, TreeNode::kLeaf, false}};

  while (!stack.empty()) {
    const Task task = stack.back();
    stack.pop_back();
    const auto index = static_cast<std::uint32_t>(nodes.size());
    if (task.parent != TreeNode::kLeaf) {
      (task.is_left ? nodes[task.parent].left : nodes[task.parent].right) = index;
    }

    TreeNode node;
    const std::span<Sample> here(samples.data() + task.begin, task.end - task.begin);
    for (const auto& s : here) node.counts[y[s.row]] += s.weight;
    nodes.push_back(node);

    const bool pure = node.counts[0] == 0 || node.counts[1] == 0;
    const bool too_small = node.samples() < config.min_samples_split;
    const bool too_deep = config.max_depth && task.depth >= *config.max_depth;
    if (pure || too_small || too_deep) continue;

    candidates.clear();
    if (k == d) {
      for (std::size_t f = 0; f < d; ++f) candidates.push_back(f);
    } else {
      std::iota(pool.begin(), pool.end(), std::size_t{0});
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(d - i));
        std::swap(pool[i], pool[j]);
        candidates.push_back(pool[i]);
      }
      std::sort(candidates.begin(), candidates.end());
    }

    const auto split = search_split(x, y, here, candidates, buf);
    if (!split) continue;

    const auto mid = std::partition(here.begin(), here.end(), [&](const Sample& s) {
      return x(s.row, split->feature) <= split->threshold;
    });
    const std::size_t pivot = task.begin + static_cast<std::size_t>(mid - here.begin());
    nodes[index].feature = static_cast<std::uint32_t>(split->feature);
    nodes[index].threshold = split->threshold;
    // Right pushed first so the left subtree is emitted next (preorder).
    stack.push_back({pivot, task.end, task.depth + 1, index, false});
    stack.push_back({task.begin, pivot, task.depth + 1, index, true});
  }
  return DecisionTree(std::move(nodes));
}

ForestModel fit_forest(const FeatureMatrix& x, const LabelVector& y, const ForestConfig& config) {
  check_training_inputs(x, y, {});
  if (config.n_trees == 0) throw InvalidArgument("forest needs at least one tree");
  if (x.rows() < 2) throw DataError("forest needs at least 2 rows");
  const std::size_t positives = y.count(1);
  if (positives == 0 || positives == y.size()) {
    throw DataError("forest needs both classes in the labels");
  }
  check_config(config, x.cols());

  ForestModel model;
  model.config = config;
  model.feature_count = x.cols();
  model.feature_names = x.names();
  model.trees.resize(config.n_trees);
  model.tree_seeds.resize(config.n_trees);
  for (std::size_t t = 0; t < config.n_trees; ++t) {
    model.tree_seeds[t] = derive_stream_seed(config.seed, t);
  }

  const std::size_t threads = config.threads == 0 ? detail::default_threads() : config.threads;
  detail::parallel_for(config.n_trees, threads, [&](std::size_t t) {
    const auto seed = model.tree_seeds[t];
    if (config.bootstrap) {
      const auto counts = bootstrap_counts(x.rows(), seed);
      model.trees[t] = fit_tree(x, y, config, seed, counts);
    } else {
      model.trees[t] = fit_tree(x, y, config, seed);
    }
  });
  model.importances = feature_importances(model);
  return model;
}

std::vector<double> predict_proba_forest(const ForestModel& model, const FeatureMatrix& x) {
  if (x.cols() != model.feature_count) {
    throw InvalidArgument("matrix width " + std::to_string(x.cols()) +
                          " does not match forest width " + std::to_string(model.feature_count));
  }
  if (model.trees.empty()) throw InvalidArgument("forest has no trees");
  std::vector<double> out(x.rows(), 0.0);
  const detail::Blocks blocks{x.rows(), 1024};
  const std::size_t threads =
      model.config.threads == 0 ? detail::default_threads() : model.config.threads;
  const double inv_trees = 1.0 / double(model.trees.size());
  detail::parallel_for(blocks.count(), threads, [&](std::size_t b) {
    for (std::size_t r = blocks.begin(b); r < blocks.end(b); ++r) {
      const auto row = x.row(r);
      double acc = 0.0;
      for (const auto& tree : model.trees) acc += tree.probability(row);
      out[r] = acc * inv_trees;
    }
  });
  return out;
}

LabelVector predict_label_forest(const ForestModel& model, const FeatureMatrix& x) {
  const auto proba = predict_proba_forest(model, x);
  std::vector<std::uint8_t> labels(proba.size());
  for (std::size_t i = 0; i < proba.size(); ++i) labels[i] = proba[i] >= 0.5 ? 1 : 0;
  return LabelVector(std::move(labels));
}

FeatureImportances feature_importances(const ForestModel& model) {
  FeatureImportances out;
  out.names = model.feature_names;
  out.values.assign(model.feature_count, 0.0);
  std::size_t contributing = 0;
  for (const auto& tree : model.trees) {
    auto per_tree = tree_importance(tree, model.feature_count);
    const double sum = std::accumulate(per_tree.begin(), per_tree.end(), 0.0);
    if (!(sum > 0.0)) continue;
    for (std::size_t f = 0; f < per_tree.size(); ++f) out.values[f] += per_tree[f] / sum;
    ++contributing;
  }
  if (contributing == 0) return out;
  out.has_splits = true;
  const double total = std::accumulate(out.values.begin(), out.values.end(), 0.0);
  for (auto& v : out.values) v /= total;
  return out;
}

std::vector<std::pair<std::string, double>> top_k_importances(std::span<const double> values,
                                                              std::span<const std::string> names,
                                                              std::size_t k) {
  if (k == 0) throw InvalidArgument("k must be at least 1");
  if (names.size() != values.size()) throw InvalidArgument("names and values differ in length");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  order.resize(std::min(k, order.size()));
  std::vector<std::pair<std::string, double>> out;
  out.reserve(order.size());
  for (auto i : order) out.emplace_back(names[i], values[i]);
  return out;
}

}  // namespace nids
