#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "nids/dataframe.hpp"
#include "nids/preprocess.hpp"

namespace nids {

enum class Penalty { None, L1, L2 };

std::string_view to_string(Penalty penalty);
/// Accepts "none", "l1", "l2" (case-sensitive). Throws InvalidArgument.
Penalty parse_penalty(std::string_view text);

struct LogisticConfig {
  Penalty penalty = Penalty::L2;
  /// Penalty weight. Unset means 1 / (training rows) for L1/L2.
  std::optional<double> strength;
  /// Zero is allowed and returns the all-zero model.
  std::size_t max_iterations = 10000;
  /// Stop once the max-norm of the (proximal) gradient falls to this value.
  double tolerance = 1e-6;
  /// First trial step; later iterations start from twice the last accepted step.
  double initial_step = 1.0;
  /// Sufficient-decrease constant of the Armijo test.
  double armijo = 1e-4;
  /// Step shrink factor applied on each failed Armijo test.
  double backtrack = 0.5;
  /// When set, every iteration takes exactly this step (no line search).
  std::optional<double> fixed_step;
  bool standardize = true;
  /// Keep the objective value after every iteration in LogisticModel::history.
  bool record_history = false;
  /// Worker threads for the gradient; 0 picks the hardware concurrency.
  std::size_t threads = 0;
};

/// Fitted binary logistic regression. Weights act on standardized features
/// when `means`/`scales` are non-empty.
struct LogisticModel {
  std::vector<double> weights;
  double intercept = 0.0;
  std::vector<double> means;
  std::vector<double> scales;
  LogisticConfig config;
  double strength = 0.0;  // resolved penalty weight
  bool converged = false;
  std::size_t iterations = 0;
  double objective = 0.0;
  double gradient_norm = 0.0;
  std::vector<double> history;

  std::size_t feature_count() const noexcept { return weights.size(); }
  bool standardized() const noexcept { return !scales.empty(); }
};

/// Penalized mean negative log-likelihood over a fixed design matrix.
///
/// Parameters are packed as [w_0, ..., w_{d-1}, b]. The intercept b is never
/// penalized. L2 adds (strength/2)*|w|^2, L1 adds strength*|w|_1.
class LogisticObjective {
 public:
  LogisticObjective(const FeatureMatrix& x, const LabelVector& y, Penalty penalty, double strength,
                    std::size_t threads = 1);

  std::size_t dimension() const noexcept { return x_.cols() + 1; }

  double value(std::span<const double> params) const;

  /// Gradient of value(). For L1 this uses strength*sign(w_j), which is the
  /// derivative only where every w_j is nonzero.
  std::vector<double> gradient(std::span<const double> params) const;

 private:
  friend class LogisticTrainer;

  const FeatureMatrix& x_;
  const LabelVector& y_;
  Penalty penalty_;
  double strength_;
  std::size_t threads_;
};

/// Full-batch gradient descent with Armijo backtracking from zero weights.
/// L1 uses a proximal (soft-threshold) step. Throws DataError for a single
/// class or non-finite inputs.
LogisticModel fit_logistic(const FeatureMatrix& x, const LabelVector& y,
                           const LogisticConfig& config = {});

std::vector<double> predict_proba_linear(const LogisticModel& model, const FeatureMatrix& x);

LabelVector predict_label_linear(const LogisticModel& model, const FeatureMatrix& x,
                                 double threshold = 0.5);

/// 1 where probability >= threshold. threshold must lie in (0, 1).
LabelVector threshold_labels(std::span<const double> probabilities, double threshold = 0.5);

/// Numerically stable logistic function.
double sigmoid(double z) noexcept;

}  // namespace nids
