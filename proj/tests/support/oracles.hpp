#pragma once

// Slow, independent reference computations used to cross-check the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "nids/forest.hpp"
#include "nids/linear.hpp"

namespace nids::oracle {

/// Fraction of (positive, negative) pairs ranked correctly, ties counted 1/2.
inline double pair_count_auc(std::span<const std::uint8_t> y, std::span<const double> s) {
  std::uint64_t twice = 0, pairs = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[j] != 0) continue;
      ++pairs;
      if (s[i] > s[j]) twice += 2;
      else if (s[i] == s[j]) twice += 1;
    }
  }
  return double(twice) / (2.0 * double(pairs));
}

/// Nonnegative rational p/q, compared by cross-multiplication.
struct Ratio {
  unsigned __int128 p = 0, q = 1;
  friend bool operator<(const Ratio& a, const Ratio& b) { return a.p * b.q < b.p * a.q; }
  friend Ratio operator+(const Ratio& a, const Ratio& b) { return {a.p * b.q + b.p * a.q, a.q * b.q}; }
};

/// Size-weighted Gini impurity n * gini = 2ab/n for class counts a, b.
inline Ratio weighted_gini(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t n = a + b;
  if (n == 0) return {};
  return {static_cast<unsigned __int128>(2) * a * b, n};
}

/// Exhaustive recursive CART: tries every (feature, gap between sorted distinct
/// values) pair and keeps the first split with strictly lowest child impurity,
/// even when that impurity equals the parent's.
class CartOracle {
 public:
  CartOracle(const std::vector<std::vector<double>>& rows, const std::vector<std::uint8_t>& y)
      : rows_(rows), y_(y) {}

  std::vector<TreeNode> fit() {
    nodes_.clear();
    std::vector<std::size_t> all(rows_.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    grow(all);
    return nodes_;
  }

 private:
  std::uint32_t grow(const std::vector<std::size_t>& idx) {
    const auto me = static_cast<std::uint32_t>(nodes_.size());
    TreeNode node;
    for (auto i : idx) ++node.counts[y_[i]];
    nodes_.push_back(node);
    if (node.counts[0] == 0 || node.counts[1] == 0 || idx.size() < 2) return me;

    Ratio best;
    std::optional<std::pair<std::size_t, double>> choice;
    const std::size_t d = rows_.front().size();
    for (std::size_t f = 0; f < d; ++f) {
      std::vector<double> vals;
      for (auto i : idx) vals.push_back(rows_[i][f]);
      std::sort(vals.begin(), vals.end());
      vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
      for (std::size_t g = 0; g + 1 < vals.size(); ++g) {
        double t = (vals[g] + vals[g + 1]) / 2.0;
        if (!(t >= vals[g] && t < vals[g + 1])) t = vals[g];
        std::uint64_t l[2] = {0, 0}, r[2] = {0, 0};
        for (auto i : idx) (rows_[i][f] <= t ? l : r)[y_[i]]++;
        const Ratio child = weighted_gini(l[0], l[1]) + weighted_gini(r[0], r[1]);
        if (!choice || child < best) {
          best = child;
          choice = {f, t};
        }
      }
    }
    if (!choice) return me;

    std::vector<std::size_t> left, right;
    for (auto i : idx) (rows_[i][choice->first] <= choice->second ? left : right).push_back(i);
    nodes_[me].feature = static_cast<std::uint32_t>(choice->first);
    nodes_[me].threshold = choice->second;
    const auto l = grow(left);
    const auto r = grow(right);
    nodes_[me].left = l;
    nodes_[me].right = r;
    return me;
  }

  const std::vector<std::vector<double>>& rows_;
  const std::vector<std::uint8_t>& y_;
  std::vector<TreeNode> nodes_;
};

/// Central-difference gradient with step h.
inline std::vector<double> numeric_gradient(const std::function<double(std::span<const double>)>& f,
                                            std::vector<double> at, double h = 1e-6) {
  std::vector<double> g(at.size());
  for (std::size_t i = 0; i < at.size(); ++i) {
    const double keep = at[i];
    at[i] = keep + h;
    const double up = f(at);
    at[i] = keep - h;
    const double down = f(at);
    at[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// Mean log-loss plus penalty written out directly from the definition.
inline double logistic_objective(const std::vector<std::vector<double>>& x, const std::vector<std::uint8_t>& y,
                                 std::span<const double> params, Penalty penalty, double lambda) {
  const std::size_t d = params.size() - 1;
  long double loss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    long double z = params[d];
    for (std::size_t j = 0; j < d; ++j) z += (long double)params[j] * x[i][j];
    const long double p = 1.0L / (1.0L + std::exp(-z));
    loss -= y[i] ? std::log(p) : std::log(1.0L - p);
  }
  loss /= (long double)x.size();
  for (std::size_t j = 0; j < d; ++j) {
    if (penalty == Penalty::L2) loss += 0.5L * lambda * params[j] * params[j];
    if (penalty == Penalty::L1) loss += lambda * std::fabs(params[j]);
  }
  return double(loss);
}

}  // namespace nids::oracle
