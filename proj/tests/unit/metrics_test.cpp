#include "nids/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "nids/error.hpp"
#include "nids/random.hpp"
#include "oracles.hpp"

namespace nids {
namespace {

TEST(Confusion, Counts) {
  const auto cm = confusion(LabelVector({0, 0, 1, 1}), LabelVector({0, 1, 1, 1}));
  EXPECT_EQ(cm.counts[0][0], 1u);
  EXPECT_EQ(cm.counts[0][1], 1u);
  EXPECT_EQ(cm.counts[1][0], 0u);
  EXPECT_EQ(cm.counts[1][1], 2u);
  EXPECT_EQ(cm.total(), 4u);
  EXPECT_THROW(confusion(LabelVector({0}), LabelVector({0, 1})), InvalidArgument);
}

TEST(ClassReport, WorkedExample) {
  const auto r = class_report(LabelVector({0, 0, 1, 1}), LabelVector({0, 1, 1, 1}));
  EXPECT_DOUBLE_EQ(r.classes[1].precision, 2.0 / 3.0);
  EXPECT_EQ(r.classes[1].recall, 1.0);
  EXPECT_DOUBLE_EQ(r.classes[1].f1, 0.8);
  EXPECT_EQ(r.classes[0].precision, 1.0);
  EXPECT_EQ(r.classes[0].recall, 0.5);
  EXPECT_EQ(r.accuracy, 0.75);
  EXPECT_EQ(r.macro.support, 4u);
}

TEST(ClassReport, ZeroDivisionIsZero) {
  const auto r = class_report(LabelVector({0, 0, 1}), LabelVector({0, 0, 0}));
  EXPECT_EQ(r.classes[1].precision, 0.0);
  EXPECT_EQ(r.classes[1].recall, 0.0);
  EXPECT_EQ(r.classes[1].f1, 0.0);
}

TEST(ClassReport, FormattedTable) {
  const auto text = format_class_report(class_report(LabelVector({0, 0, 1, 1}), LabelVector({0, 1, 1, 1})));
  EXPECT_NE(text.find("precision"), std::string::npos);
  EXPECT_NE(text.find("accuracy"), std::string::npos);
  EXPECT_NE(text.find("macro avg"), std::string::npos);
  EXPECT_NE(text.find("weighted avg"), std::string::npos);
  EXPECT_NE(text.find("0.67"), std::string::npos);
}

TEST(MetricsProperty, ReportConsistentWithConfusion) {
  SplitMix64 rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.below(100);
    std::vector<std::uint8_t> t(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = std::uint8_t(rng.below(2));
      p[i] = std::uint8_t(rng.below(2));
    }
    const LabelVector yt(t), yp(p);
    const auto cm = confusion(yt, yp);
    ASSERT_EQ(cm.total(), n);
    ASSERT_EQ(cm.support(0), yt.count(0));
    ASSERT_EQ(cm.support(1), yt.count(1));
    const auto r = class_report(yt, yp);
    ASSERT_EQ(r.accuracy, double(cm.counts[0][0] + cm.counts[1][1]) / double(n));
    ASSERT_EQ(r, class_report(cm));
    ASSERT_EQ(r.classes[0].support + r.classes[1].support, n);
    for (const auto& c : r.classes) {
      for (double v : {c.precision, c.recall, c.f1}) {
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
      }
      const double hm = c.precision + c.recall == 0 ? 0 : 2 * c.precision * c.recall / (c.precision + c.recall);
      ASSERT_NEAR(c.f1, hm, 1e-15);
    }
  }
}

TEST(Roc, WorkedExample) {
  const std::vector<double> s{0.1, 0.4, 0.35, 0.8};
  const auto curve = roc(LabelVector({0, 0, 1, 1}), s);
  EXPECT_EQ(curve.auc, 0.75);
  EXPECT_EQ(curve.fpr, (std::vector<double>{0, 0, 0.5, 0.5, 1}));
  EXPECT_EQ(curve.tpr, (std::vector<double>{0, 0.5, 0.5, 1, 1}));
  EXPECT_EQ(curve.thresholds.front(), 1.8);
}

TEST(Roc, PerfectAndTied) {
  const std::vector<double> perfect{0.1, 0.2, 0.8, 0.9};
  EXPECT_EQ(roc(LabelVector({0, 0, 1, 1}), perfect).auc, 1.0);
  const std::vector<double> tied{0.5, 0.5, 0.5, 0.5};
  EXPECT_EQ(roc(LabelVector({0, 1, 0, 1}), tied).auc, 0.5);
  EXPECT_THROW(roc(LabelVector({1, 1}), std::span<const double>(perfect).first(2)), DataError);
}

TEST(RocProperty, AgreesWithPairCountingAndIsMonotone) {
  SplitMix64 rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng.below(199);
    std::vector<std::uint8_t> y(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = std::uint8_t(rng.below(2));
      s[i] = trial % 2 ? double(rng.below(8)) / 8.0 : rng.uniform();
    }
    y[0] = 0;
    y[1] = 1;
    const auto curve = roc(LabelVector(y), s);
    ASSERT_NEAR(curve.auc, oracle::pair_count_auc(y, s), 1e-12);
    ASSERT_EQ(curve.fpr.front(), 0.0);
    ASSERT_EQ(curve.tpr.front(), 0.0);
    ASSERT_EQ(curve.fpr.back(), 1.0);
    ASSERT_EQ(curve.tpr.back(), 1.0);
    ASSERT_EQ(curve.fpr.size(), curve.tpr.size());
    ASSERT_EQ(curve.fpr.size(), curve.thresholds.size());
    for (std::size_t i = 1; i < curve.fpr.size(); ++i) {
      ASSERT_GE(curve.fpr[i], curve.fpr[i - 1]);
      ASSERT_GE(curve.tpr[i], curve.tpr[i - 1]);
      ASSERT_LT(curve.thresholds[i], curve.thresholds[i - 1]);
    }

    std::vector<double> warped(n);
    for (std::size_t i = 0; i < n; ++i) warped[i] = std::exp(3 * s[i]) - 7;
    const auto other = roc(LabelVector(y), warped);
    ASSERT_EQ(other.fpr, curve.fpr);
    ASSERT_EQ(other.tpr, curve.tpr);
    ASSERT_EQ(other.auc, curve.auc);
  }
}

FeatureMatrix columns(const std::vector<std::vector<double>>& cols) {
  const std::size_t n = cols.front().size();
  FeatureMatrix m(n, std::vector<std::string>(cols.size(), "c"));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) m(i, j) = cols[j][i];
  return m;
}

TEST(Pearson, KnownValues) {
  const auto c = pearson(columns({{1, 2, 3}, {2, 4, 6}, {1, 2, 4}, {5, 5, 5}, {3, 2, 1}}));
  EXPECT_EQ(*c.at(0, 0), 1.0);
  EXPECT_NEAR(*c.at(0, 1), 1.0, 1e-15);
  EXPECT_NEAR(*c.at(0, 2), 0.981, 1e-3);
  EXPECT_FALSE(c.at(3, 3).has_value());
  EXPECT_FALSE(c.at(0, 3).has_value());
  EXPECT_NEAR(*c.at(0, 4), -1.0, 1e-15);
  EXPECT_THROW(pearson(columns({{1}})), InvalidArgument);
}

TEST(PearsonProperty, SymmetricAndAffineInvariant) {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + rng.below(40);
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng.uniform();
      b[i] = a[i] * 0.3 + rng.uniform();
    }
    std::vector<double> scaled(n), flipped(n);
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = 4.0 * b[i] + 9.0;
      flipped[i] = -2.5 * b[i] + 1.0;
    }
    const auto c = pearson(columns({a, b, scaled, flipped}));
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_EQ(*c.at(i, i), 1.0);
      for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(c.at(i, j), c.at(j, i));
    }
    EXPECT_NEAR(*c.at(0, 2), *c.at(0, 1), 1e-12);
    EXPECT_NEAR(*c.at(0, 3), -*c.at(0, 1), 1e-12);
  }
}

TEST(Dummify, LabelFirstThenBlocks) {
  const DataFrame frame({Column{{"dur", ColumnKind::Numeric}, std::vector<double>{1, 2, 3}},
                         Column{{"proto", ColumnKind::Categorical}, std::vector<std::string>{"udp", "tcp", "udp"}},
                         Column{{"service", ColumnKind::Categorical}, std::vector<std::string>{"-", "-", "dns"}},
                         Column{{"state", ColumnKind::Categorical}, std::vector<std::string>{"FIN", "INT", "CON"}},
                         Column{{"label", ColumnKind::Label}, std::vector<double>{1, 0, 1}}});
  const auto m = dummify_for_correlation(frame);
  EXPECT_EQ(m.names(), (std::vector<std::string>{"label", "proto=tcp", "proto=udp", "service=-", "service=dns",
                                                 "state=CON", "state=FIN", "state=INT"}));
  EXPECT_EQ(m.column(0), (std::vector<double>{1, 0, 1}));
  for (std::size_t r = 0; r < 3; ++r) {
    EXPECT_EQ(m(r, 1) + m(r, 2), 1.0);
    EXPECT_EQ(m(r, 3) + m(r, 4), 1.0);
    EXPECT_EQ(m(r, 5) + m(r, 6) + m(r, 7), 1.0);
  }
}

}  // namespace
}  // namespace nids
