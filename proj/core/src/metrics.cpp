#include "nids/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "nids/error.hpp"

namespace nids {
namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw InvalidArgument("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
  if (a == 0) throw InvalidArgument("metrics need at least one sample");
}

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : double(num) / double(den);
}

double harmonic(double p, double r) { return (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace

std::uint64_t ConfusionMatrix::total() const noexcept {
  return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

ConfusionMatrix confusion(const LabelVector& y_true, const LabelVector& y_pred) {
  check_lengths(y_true.size(), y_pred.size());
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) ++cm.counts[y_true[i]][y_pred[i]];
  return cm;
}

ClassReport class_report(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) throw InvalidArgument("empty confusion matrix");
  ClassReport rep;
  for (int c = 0; c < 2; ++c) {
    const std::uint64_t tp = cm.counts[c][c];
    const std::uint64_t predicted = cm.counts[0][c] + cm.counts[1][c];
    auto& m = rep.classes[c];
    m.support = cm.support(c);
    m.precision = ratio(tp, predicted);
    m.recall = ratio(tp, m.support);
    m.f1 = harmonic(m.precision, m.recall);
  }
  rep.accuracy = ratio(cm.counts[0][0] + cm.counts[1][1], total);
  const auto& a = rep.classes[0];
  const auto& b = rep.classes[1];
  rep.macro = {(a.precision + b.precision) / 2.0, (a.recall + b.recall) / 2.0,
               (a.f1 + b.f1) / 2.0, total};
  const double wa = double(a.support) / double(total);
  const double wb = double(b.support) / double(total);
  rep.weighted = {wa * a.precision + wb * b.precision, wa * a.recall + wb * b.recall,
                  wa * a.f1 + wb * b.f1, total};
  return rep;
}

ClassReport class_report(const LabelVector& y_true, const LabelVector& y_pred) {
  return class_report(confusion(y_true, y_pred));
}

std::string format_class_report(const ClassReport& r) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof line, "%14s %10s %10s %10s %10s\n\n", "", "precision", "recall",
                "f1-score", "support");
  out += line;
  for (int c = 0; c < 2; ++c) {
    const auto& m = r.classes[c];
    std::snprintf(line, sizeof line, "%14d %10.2f %10.2f %10.2f %10llu\n", c, m.precision, m.recall,
                  m.f1, static_cast<unsigned long long>(m.support));
    out += line;
  }
  std::snprintf(line, sizeof line, "\n%14s %10s %10s %10.2f %10llu\n", "accuracy", "", "",
                r.accuracy, static_cast<unsigned long long>(r.macro.support));
  out += line;
  for (const auto& [name, m] : {std::pair{"macro avg", r.macro}, std::pair{"weighted avg", r.weighted}}) {
    std::snprintf(line, sizeof line, "%14s %10.2f %10.2f %10.2f %10llu\n", name, m.precision,
                  m.recall, m.f1, static_cast<unsigned long long>(m.support));
    out += line;
  }
  return out;
}

RocCurve roc(const LabelVector& y_true, std::span<const double> scores) {
  check_lengths(y_true.size(), scores.size());
  for (double s : scores) {
    if (!std::isfinite(s)) throw InvalidArgument("ROC scores must be finite");
  }
  const std::uint64_t positives = y_true.count(1);
  const std::uint64_t negatives = y_true.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw DataError("ROC/AUC undefined: labels contain a single class");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.thresholds.push_back(scores[order.front()] + 1.0);
  curve.fpr.push_back(0.0);
  curve.tpr.push_back(0.0);

  unsigned __int128 twice_area = 0;
  std::uint64_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    const std::uint64_t prev_tp = tp, prev_fp = fp;
    for (; i < order.size() && scores[order[i]] == threshold; ++i) (y_true[order[i]] ? tp : fp) += 1;
    twice_area += static_cast<unsigned __int128>(fp - prev_fp) * (tp + prev_tp);
    curve.thresholds.push_back(threshold);
    curve.fpr.push_back(double(fp) / double(negatives));
    curve.tpr.push_back(double(tp) / double(positives));
  }
  curve.auc = double(twice_area) / (2.0 * double(positives) * double(negatives));
  return curve;
}

CorrelationMatrix pearson(const FeatureMatrix& m) {
  if (m.rows() < 2) throw InvalidArgument("correlation needs at least 2 rows");
  const std::size_t d = m.cols();
  const std::size_t n = m.rows();
  std::vector<std::vector<double>> centered(d);
  std::vector<bool> constant(d, false);
  std::vector<double> norm(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    auto col = m.column(j);
    const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    constant[j] = *lo == *hi;
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / double(n);
    double ss = 0.0;
    for (auto& v : col) {
      v -= mean;
      ss += v * v;
    }
    norm[j] = std::sqrt(ss);
    centered[j] = std::move(col);
  }

  CorrelationMatrix out;
  out.names = m.names();
  out.values.assign(d * d, std::nullopt);
  for (std::size_t i = 0; i < d; ++i) {
    if (constant[i]) continue;
    out.values[i * d + i] = 1.0;
    for (std::size_t j = i + 1; j < d; ++j) {
      if (constant[j]) continue;
      double sxy = 0.0;
      for (std::size_t r = 0; r < n; ++r) sxy += centered[i][r] * centered[j][r];
      const double r = std::clamp(sxy / (norm[i] * norm[j]), -1.0, 1.0);
      out.values[i * d + j] = r;
      out.values[j * d + i] = r;
    }
  }
  return out;
}

FeatureMatrix dummify_for_correlation(const DataFrame& frame) {
  static const std::array<std::string, 3> kCategorical = {"proto", "service", "state"};
  static const std::string kLabel = "label";

  const Column& label = frame.column(kLabel);
  if (label.is_text()) throw DataError("column 'label' must be numeric");
  std::vector<CategoryVocabulary> vocab;
  for (const auto& name : kCategorical) {
    const Column& col = frame.column(name);
    if (!col.is_text()) throw DataError("column '" + name + "' must be categorical");
    auto cats = col.text();
    std::sort(cats.begin(), cats.end());
    cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
    vocab.push_back({name, std::move(cats)});
  }

  std::vector<std::string> names{kLabel};
  for (const auto& v : vocab) {
    for (const auto& c : v.categories) names.push_back(v.column + "=" + c);
  }
  FeatureMatrix out(frame.row_count(), std::move(names));
  const auto& labels = label.numbers();
  std::vector<const std::vector<std::string>*> tokens;
  for (const auto& v : vocab) tokens.push_back(&frame.column(v.column).text());
  for (std::size_t r = 0; r < frame.row_count(); ++r) {
    auto row = out.row(r);
    row[0] = labels[r];
    std::size_t offset = 1;
    for (std::size_t b = 0; b < vocab.size(); ++b) {
      const auto& v = vocab[b];
      const auto& token = (*tokens[b])[r];
      const auto it = std::lower_bound(v.categories.begin(), v.categories.end(), token);
      row[offset + static_cast<std::size_t>(it - v.categories.begin())] = 1.0;
      offset += v.categories.size();
    }
  }
  return out;
}

}  // namespace nids
