#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nids/dataframe.hpp"
#include "nids/preprocess.hpp"

namespace nids {

/// counts[true_class][predicted_class]
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, 2>, 2> counts{};

  std::uint64_t total() const noexcept;
  std::uint64_t support(int cls) const noexcept { return counts[cls][0] + counts[cls][1]; }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;

  friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

struct ClassReport {
  std::array<ClassMetrics, 2> classes;
  double accuracy = 0.0;
  ClassMetrics macro;     // unweighted mean over classes; support = total
  ClassMetrics weighted;  // support-weighted mean; support = total

  friend bool operator==(const ClassReport&, const ClassReport&) = default;
};

struct RocCurve {
  std::vector<double> fpr;
  std::vector<double> tpr;
  std::vector<double> thresholds;  // descending; thresholds[0] is max score + 1
  double auc = 0.0;

  friend bool operator==(const RocCurve&, const RocCurve&) = default;
};

/// Symmetric Pearson matrix; nullopt marks an undefined entry (zero variance).
struct CorrelationMatrix {
  std::vector<std::string> names;
  std::vector<std::optional<double>> values;  // row-major, names.size()^2

  std::size_t size() const noexcept { return names.size(); }
  const std::optional<double>& at(std::size_t i, std::size_t j) const {
    return values[i * names.size() + j];
  }

  friend bool operator==(const CorrelationMatrix&, const CorrelationMatrix&) = default;
};

ConfusionMatrix confusion(const LabelVector& y_true, const LabelVector& y_pred);

/// Per-class precision, recall, f1 with 0/0 taken as 0.
ClassReport class_report(const LabelVector& y_true, const LabelVector& y_pred);
ClassReport class_report(const ConfusionMatrix& cm);

/// Human-readable table in the usual classification-report layout.
std::string format_class_report(const ClassReport& report);

/// One point per distinct score (descending) after a leading (0, 0) point at a
/// sentinel threshold above the maximum; a sample is predicted positive iff
/// score >= threshold. AUC is the trapezoidal area, accumulated in exact
/// integer counts. Throws DataError unless both classes are present.
RocCurve roc(const LabelVector& y_true, std::span<const double> scores);

/// Pearson correlation of every column pair. Throws InvalidArgument for
/// fewer than two rows.
CorrelationMatrix pearson(const FeatureMatrix& m);

/// Selects proto, service, state and label; label passes through first, then
/// one-hot blocks for the three categorical columns (sorted categories,
/// "<column>=<category>" names).
FeatureMatrix dummify_for_correlation(const DataFrame& frame);

}  // namespace nids
