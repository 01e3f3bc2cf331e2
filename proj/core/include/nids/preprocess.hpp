#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nids/dataframe.hpp"

namespace nids {

/// Dense row-major matrix of reals with one name per column.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::vector<std::string> names);
  FeatureMatrix(std::size_t rows, std::vector<std::string> names, std::vector<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }

  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }

  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values_).subspan(r * cols(), cols());
  }
  std::span<double> row(std::size_t r) {
    return std::span<double>(values_).subspan(r * cols(), cols());
  }
  std::span<const double> values() const noexcept { return values_; }

  std::vector<double> column(std::size_t c) const;
  FeatureMatrix take_rows(std::span<const std::size_t> rows) const;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::vector<std::string> names_;
  std::vector<double> values_;
};

struct CategoryVocabulary {
  std::string column;
  std::vector<std::string> categories;  // sorted, duplicate-free

  friend bool operator==(const CategoryVocabulary&, const CategoryVocabulary&) = default;
};

/// Fitted one-hot layout: every categorical block first, in column
/// declaration order, then the numeric columns passed through unchanged.
class EncoderModel {
 public:
  EncoderModel() = default;
  /// Throws InvalidArgument if a vocabulary is unsorted, has duplicates, or
  /// the resulting width is zero.
  EncoderModel(std::vector<CategoryVocabulary> categorical, std::vector<std::string> numeric);

  const std::vector<CategoryVocabulary>& categorical() const noexcept { return categorical_; }
  const std::vector<std::string>& numeric() const noexcept { return numeric_; }
  std::size_t width() const noexcept { return width_; }

  /// Column names of the encoded matrix: "<column>=<category>" then numeric names.
  std::vector<std::string> output_names() const;

  friend bool operator==(const EncoderModel&, const EncoderModel&) = default;

 private:
  std::vector<CategoryVocabulary> categorical_;
  std::vector<std::string> numeric_;
  std::size_t width_ = 0;
};

/// How transform treats a category absent from the fitted vocabulary.
enum class UnknownPolicy { Strict, AllZeros };

/// Vocabularies are the sorted distinct values of each Categorical column;
/// Numeric columns pass through. Label columns are ignored.
EncoderModel fit_encoder(const DataFrame& frame);

FeatureMatrix transform(const EncoderModel& encoder, const DataFrame& frame,
                        UnknownPolicy policy = UnknownPolicy::Strict);

struct SplitResult {
  FeatureMatrix train_x;
  FeatureMatrix test_x;
  LabelVector train_y;
  LabelVector test_y;
  std::vector<std::size_t> train_rows;  // source row indices, in shuffled order
  std::vector<std::size_t> test_rows;
  std::uint64_t seed = 0;
  double test_fraction = 0.0;
};

/// Number of test rows for n rows: ceil(test_fraction * n).
std::size_t test_row_count(std::size_t n, double test_fraction);

/// Shuffles row indices with SplitMix64(seed) + Fisher-Yates; the first
/// test_row_count(n) shuffled indices form the test set.
SplitResult train_test_split(const FeatureMatrix& x, const LabelVector& y, double test_fraction,
                             std::uint64_t seed);

}  // namespace nids
