#include "nids/linear.hpp"

#include <algorithm>
#include <cmath>

#include "nids/error.hpp"
#include "parallel.hpp"

namespace nids {
namespace {

constexpr std::size_t kRowBlock = 2048;

double softplus(double m) noexcept {
  return m > 0.0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m));
}

std::size_t resolve_threads(std::size_t requested) {
  return requested == 0 ? detail::default_threads() : requested;
}

// margins[r] = b + x_r . w
void compute_margins(const FeatureMatrix& x, std::span<const double> w, double b,
                     std::span<double> margins, std::size_t threads) {
  const detail::Blocks blocks{x.rows(), kRowBlock};
  detail::parallel_for(blocks.count(), threads, [&](std::size_t blk) {
    for (std::size_t r = blocks.begin(blk); r < blocks.end(blk); ++r) {
      const auto row = x.row(r);
      double acc = 0.0;
      for (std::size_t j = 0; j < row.size(); ++j) acc += row[j] * w[j];
      margins[r] = b + acc;
    }
  });
}

// Mean negative log-likelihood given margins.
double mean_loss(std::span<const double> margins, const LabelVector& y, std::size_t threads) {
  const detail::Blocks blocks{margins.size(), kRowBlock};
  std::vector<double> partial(blocks.count(), 0.0);
  detail::parallel_for(blocks.count(), threads, [&](std::size_t blk) {
    double acc = 0.0;
    for (std::size_t r = blocks.begin(blk); r < blocks.end(blk); ++r) {
      acc += softplus(margins[r]) - (y[r] ? margins[r] : 0.0);
    }
    partial[blk] = acc;
  });
  return detail::pairwise_sum(std::move(partial)) / static_cast<double>(margins.size());
}

// mean_loss(margins + delta) - mean_loss(margins), accurate when the change is
// far below the loss itself.
double loss_change(std::span<const double> margins, std::span<const double> delta, const LabelVector& y,
                   std::size_t threads) {
  const detail::Blocks blocks{margins.size(), kRowBlock};
  std::vector<double> partial(blocks.count(), 0.0);
  detail::parallel_for(blocks.count(), threads, [&](std::size_t blk) {
    double acc = 0.0;
    for (std::size_t r = blocks.begin(blk); r < blocks.end(blk); ++r) {
      const double s = y[r] ? -margins[r] : margins[r];
      const double ds = y[r] ? -delta[r] : delta[r];
      double change = std::log1p(sigmoid(s) * std::expm1(ds));
      if (std::abs(ds) > 30.0 || !std::isfinite(change)) change = softplus(s + ds) - softplus(s);
      acc += change;
    }
    partial[blk] = acc;
  });
  return detail::pairwise_sum(std::move(partial)) / static_cast<double>(margins.size());
}

double penalty_change(Penalty penalty, double strength, std::span<const double> from, std::span<const double> to) {
  double acc = 0.0;
  for (std::size_t j = 0; j < from.size(); ++j) {
    if (penalty == Penalty::L2) acc += (to[j] - from[j]) * (to[j] + from[j]);
    if (penalty == Penalty::L1) acc += std::abs(to[j]) - std::abs(from[j]);
  }
  return penalty == Penalty::L2 ? 0.5 * strength * acc : strength * acc;
}

// Gradient of mean_loss with respect to [w, b].
std::vector<double> loss_gradient(const FeatureMatrix& x, std::span<const double> margins,
                                  const LabelVector& y, std::size_t threads) {
  const std::size_t d = x.cols();
  const detail::Blocks blocks{x.rows(), kRowBlock};
  std::vector<std::vector<double>> partial(blocks.count(), std::vector<double>(d + 1, 0.0));
  detail::parallel_for(blocks.count(), threads, [&](std::size_t blk) {
    auto& acc = partial[blk];
    for (std::size_t r = blocks.begin(blk); r < blocks.end(blk); ++r) {
      const double residual = y[r] ? -sigmoid(-margins[r]) : sigmoid(margins[r]);
      const auto row = x.row(r);
      for (std::size_t j = 0; j < d; ++j) acc[j] += residual * row[j];
      acc[d] += residual;
    }
  });
  for (std::size_t stride = 1; stride < partial.size(); stride *= 2) {
    for (std::size_t i = 0; i + stride < partial.size(); i += 2 * stride) {
      for (std::size_t j = 0; j <= d; ++j) partial[i][j] += partial[i + stride][j];
    }
  }
  std::vector<double> grad = partial.empty() ? std::vector<double>(d + 1, 0.0) : partial[0];
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  for (auto& g : grad) g *= inv_n;
  return grad;
}

double penalty_value(Penalty penalty, double strength, std::span<const double> w) {
  double acc = 0.0;
  switch (penalty) {
    case Penalty::None: return 0.0;
    case Penalty::L1:
      for (double v : w) acc += std::abs(v);
      return strength * acc;
    case Penalty::L2:
      for (double v : w) acc += v * v;
      return 0.5 * strength * acc;
  }
  return 0.0;
}

double soft_threshold(double v, double t) noexcept {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

void check_inputs(const FeatureMatrix& x, const LabelVector& y) {
  if (x.rows() != y.size()) {
    throw InvalidArgument("feature rows (" + std::to_string(x.rows()) + ") and labels (" +
                          std::to_string(y.size()) + ") differ");
  }
  if (x.rows() < 2) throw DataError("logistic regression needs at least 2 rows");
  const std::size_t positives = y.count(1);
  if (positives == 0 || positives == y.size()) {
    throw DataError("logistic regression needs both classes in the labels");
  }
  for (double v : x.values()) {
    if (!std::isfinite(v)) throw DataError("feature matrix contains a non-finite value");
  }
}

}  // namespace

std::string_view to_string(Penalty penalty) {
  switch (penalty) {
    case Penalty::None: return "none";
    case Penalty::L1: return "l1";
    case Penalty::L2: return "l2";
  }
  return "unknown";
}

Penalty parse_penalty(std::string_view text) {
  if (text == "none") return Penalty::None;
  if (text == "l1") return Penalty::L1;
  if (text == "l2") return Penalty::L2;
  throw InvalidArgument("unknown penalty '" + std::string(text) + "' (expected none, l1 or l2)");
}

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

LogisticObjective::LogisticObjective(const FeatureMatrix& x, const LabelVector& y, Penalty penalty,
                                     double strength, std::size_t threads)
    : x_(x), y_(y), penalty_(penalty), strength_(strength), threads_(resolve_threads(threads)) {
  if (x.rows() != y.size() || x.rows() == 0) {
    throw InvalidArgument("objective needs matching, nonempty features and labels");
  }
  if (strength < 0.0) throw InvalidArgument("penalty strength must be nonnegative");
}

double LogisticObjective::value(std::span<const double> params) const {
  if (params.size() != dimension()) throw InvalidArgument("parameter vector has wrong length");
  const auto w = params.first(x_.cols());
  std::vector<double> margins(x_.rows());
  compute_margins(x_, w, params.back(), margins, threads_);
  return mean_loss(margins, y_, threads_) + penalty_value(penalty_, strength_, w);
}

std::vector<double> LogisticObjective::gradient(std::span<const double> params) const {
  if (params.size() != dimension()) throw InvalidArgument("parameter vector has wrong length");
  const std::size_t d = x_.cols();
  std::vector<double> margins(x_.rows());
  compute_margins(x_, params.first(d), params.back(), margins, threads_);
  auto grad = loss_gradient(x_, margins, y_, threads_);
  for (std::size_t j = 0; j < d; ++j) {
    if (penalty_ == Penalty::L2) grad[j] += strength_ * params[j];
    if (penalty_ == Penalty::L1 && params[j] != 0.0) {
      grad[j] += strength_ * (params[j] > 0.0 ? 1.0 : -1.0);
    }
  }
  return grad;
}

LogisticModel fit_logistic(const FeatureMatrix& x, const LabelVector& y,
                           const LogisticConfig& config) {
  check_inputs(x, y);
  if (config.tolerance <= 0.0) throw InvalidArgument("tolerance must be positive");
  if (!(config.backtrack > 0.0 && config.backtrack < 1.0)) {
    throw InvalidArgument("backtrack factor must lie in (0, 1)");
  }
  if (config.initial_step <= 0.0 || (config.fixed_step && *config.fixed_step <= 0.0)) {
    throw InvalidArgument("step sizes must be positive");
  }

  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  const std::size_t threads = resolve_threads(config.threads);

  LogisticModel model;
  model.config = config;
  model.strength = config.penalty == Penalty::None
                       ? 0.0
                       : config.strength.value_or(1.0 / static_cast<double>(n));
  if (model.strength < 0.0) throw InvalidArgument("penalty strength must be nonnegative");
  const double lambda = model.strength;
  const Penalty penalty = lambda == 0.0 ? Penalty::None : config.penalty;

  // Standardized design; constant columns keep scale 1.
  FeatureMatrix scaled;
  const FeatureMatrix* design = &x;
  if (config.standardize) {
    model.means.assign(d, 0.0);
    model.scales.assign(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
      double lo = x(0, j), hi = x(0, j), sum = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        lo = std::min(lo, x(r, j));
        hi = std::max(hi, x(r, j));
        sum += x(r, j);
      }
      const double mean = sum / static_cast<double>(n);
      model.means[j] = mean;
      if (lo == hi) {
        model.means[j] = lo;
        continue;
      }
      double ss = 0.0;
      for (std::size_t r = 0; r < n; ++r) ss += (x(r, j) - mean) * (x(r, j) - mean);
      const double sd = std::sqrt(ss / static_cast<double>(n));
      model.scales[j] = sd > 0.0 ? sd : 1.0;
    }
    scaled = x;
    for (std::size_t r = 0; r < n; ++r) {
      auto row = scaled.row(r);
      for (std::size_t j = 0; j < d; ++j) row[j] = (row[j] - model.means[j]) / model.scales[j];
    }
    design = &scaled;
  }

  std::vector<double> w(d, 0.0);
  double b = 0.0;
  std::vector<double> margins(n, 0.0);
  std::vector<double> trial_margins(n);
  std::vector<double> direction(n);
  std::vector<double> delta(n);
  std::vector<double> trial_w(d);

  double smooth = mean_loss(margins, y, threads);
  const auto objective = [&](double loss, std::span<const double> weights) {
    return loss + penalty_value(penalty, lambda, weights);
  };
  double f = objective(smooth, w);
  double step = config.fixed_step.value_or(config.initial_step);

  for (;;) {
    auto g = loss_gradient(*design, margins, y, threads);
    if (penalty == Penalty::L2) {
      for (std::size_t j = 0; j < d; ++j) g[j] += lambda * w[j];
    }

    // Max-norm of the gradient, or of the minimum-norm subgradient for L1.
    double opt = std::abs(g[d]);
    for (std::size_t j = 0; j < d; ++j) {
      double gj = g[j];
      if (penalty == Penalty::L1) {
        gj = w[j] != 0.0 ? g[j] + lambda * (w[j] > 0.0 ? 1.0 : -1.0)
                         : std::max(0.0, std::abs(g[j]) - lambda);
      }
      opt = std::max(opt, std::abs(gj));
    }
    model.gradient_norm = opt;
    if (opt <= config.tolerance) {
      model.converged = true;
      break;
    }
    if (model.iterations >= config.max_iterations) break;

    bool accepted = false;
    if (penalty != Penalty::L1) {
      // Margins move linearly along -g, so one matrix pass serves every trial.
      std::vector<double> neg(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(d));
      for (auto& v : neg) v = -v;
      compute_margins(*design, neg, -g[d], direction, threads);
      double gg = 0.0;
      for (double v : g) gg += v * v;
      for (;;) {
        for (std::size_t r = 0; r < n; ++r) {
          delta[r] = step * direction[r];
          trial_margins[r] = margins[r] + delta[r];
        }
        for (std::size_t j = 0; j < d; ++j) trial_w[j] = w[j] - step * g[j];
        const double change = loss_change(margins, delta, y, threads) + penalty_change(penalty, lambda, w, trial_w);
        if (config.fixed_step || change <= -config.armijo * step * gg) {
          const double trial_loss = mean_loss(trial_margins, y, threads);
          const double trial_f = objective(trial_loss, trial_w);
          w.swap(trial_w);
          b -= step * g[d];
          margins.swap(trial_margins);
          smooth = trial_loss;
          f = trial_f;
          accepted = true;
          break;
        }
        step *= config.backtrack;
        if (step < 1e-30) break;
      }
    } else {
      for (;;) {
        double gap = 0.0, dist2 = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          trial_w[j] = soft_threshold(w[j] - step * g[j], step * lambda);
          const double delta = trial_w[j] - w[j];
          gap += g[j] * delta;
          dist2 += delta * delta;
        }
        const double trial_b = b - step * g[d];
        const double shift = trial_b - b;
        gap += g[d] * shift;
        dist2 += shift * shift;
        compute_margins(*design, trial_w, trial_b, trial_margins, threads);
        for (std::size_t r = 0; r < n; ++r) delta[r] = trial_margins[r] - margins[r];
        if (config.fixed_step || loss_change(margins, delta, y, threads) <= gap + dist2 / (2.0 * step)) {
          const double trial_loss = mean_loss(trial_margins, y, threads);
          w.swap(trial_w);
          b = trial_b;
          margins.swap(trial_margins);
          smooth = trial_loss;
          f = objective(smooth, w);
          accepted = true;
          break;
        }
        step *= config.backtrack;
        if (step < 1e-30) break;
      }
    }
    if (!accepted) break;  // line search could not make progress
    ++model.iterations;
    if (config.record_history) model.history.push_back(f);
    if (!config.fixed_step) step = std::min(step * 2.0, 1e6);
  }

  model.weights = std::move(w);
  model.intercept = b;
  model.objective = f;
  return model;
}

std::vector<double> predict_proba_linear(const LogisticModel& model, const FeatureMatrix& x) {
  const std::size_t d = model.weights.size();
  if (x.cols() != d) {
    throw InvalidArgument("matrix width " + std::to_string(x.cols()) +
                          " does not match model width " + std::to_string(d));
  }
  // Same operation order as training so fitted margins reproduce exactly.
  std::vector<double> out(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto row = x.row(r);
    double acc = 0.0;
    if (model.standardized()) {
      for (std::size_t j = 0; j < d; ++j) {
        acc += ((row[j] - model.means[j]) / model.scales[j]) * model.weights[j];
      }
    } else {
      for (std::size_t j = 0; j < d; ++j) acc += row[j] * model.weights[j];
    }
    out[r] = sigmoid(model.intercept + acc);
  }
  return out;
}

LabelVector threshold_labels(std::span<const double> probabilities, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw InvalidArgument("threshold must lie in (0, 1)");
  }
  std::vector<std::uint8_t> labels(probabilities.size());
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    labels[i] = probabilities[i] >= threshold ? 1 : 0;
  }
  return LabelVector(std::move(labels));
}

LabelVector predict_label_linear(const LogisticModel& model, const FeatureMatrix& x,
                                 double threshold) {
  return threshold_labels(predict_proba_linear(model, x), threshold);
}

}  // namespace nids
