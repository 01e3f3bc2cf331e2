#include "nids/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "nids/error.hpp"
#include "nids/random.hpp"
#include "parallel.hpp"

namespace nids {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::vector<std::string> names)
    : rows_(rows), names_(std::move(names)), values_(rows_ * names_.size(), 0.0) {}

FeatureMatrix::FeatureMatrix(std::size_t rows, std::vector<std::string> names,
                             std::vector<double> values)
    : rows_(rows), names_(std::move(names)), values_(std::move(values)) {
  if (values_.size() != rows_ * names_.size()) {
    throw InvalidArgument("matrix value count " + std::to_string(values_.size()) +
                          " does not match " + std::to_string(rows_) + "x" +
                          std::to_string(names_.size()));
  }
}

std::vector<double> FeatureMatrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

FeatureMatrix FeatureMatrix::take_rows(std::span<const std::size_t> rows) const {
  FeatureMatrix out(rows.size(), names_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= rows_) throw InvalidArgument("row index out of range");
    std::copy_n(row(rows[i]).begin(), cols(), out.row(i).begin());
  }
  return out;
}

EncoderModel::EncoderModel(std::vector<CategoryVocabulary> categorical,
                           std::vector<std::string> numeric)
    : categorical_(std::move(categorical)), numeric_(std::move(numeric)) {
  width_ = numeric_.size();
  for (const auto& voc : categorical_) {
    if (voc.categories.empty()) {
      throw InvalidArgument("empty vocabulary for column '" + voc.column + "'");
    }
    if (std::adjacent_find(voc.categories.begin(), voc.categories.end(),
                           std::greater_equal<>()) != voc.categories.end()) {
      throw InvalidArgument("vocabulary for column '" + voc.column +
                            "' is not sorted and duplicate-free");
    }
    width_ += voc.categories.size();
  }
  if (width_ == 0) throw InvalidArgument("encoder has zero output width");
}

std::vector<std::string> EncoderModel::output_names() const {
  std::vector<std::string> names;
  names.reserve(width_);
  for (const auto& voc : categorical_) {
    for (const auto& cat : voc.categories) names.push_back(voc.column + "=" + cat);
  }
  names.insert(names.end(), numeric_.begin(), numeric_.end());
  return names;
}

EncoderModel fit_encoder(const DataFrame& frame) {
  if (frame.row_count() == 0) throw DataError("cannot fit encoder on an empty frame");
  std::vector<CategoryVocabulary> vocabularies;
  std::vector<std::string> numeric;
  for (const auto& col : frame.columns()) {
    switch (col.spec.kind) {
      case ColumnKind::Categorical: {
        auto cats = col.text();
        std::sort(cats.begin(), cats.end());
        cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
        vocabularies.push_back({col.spec.name, std::move(cats)});
        break;
      }
      case ColumnKind::Numeric:
        numeric.push_back(col.spec.name);
        break;
      case ColumnKind::Label:
        break;
    }
  }
  return EncoderModel(std::move(vocabularies), std::move(numeric));
}

FeatureMatrix transform(const EncoderModel& encoder, const DataFrame& frame, UnknownPolicy policy) {
  struct Block {
    const std::vector<std::string>* tokens;
    std::unordered_map<std::string_view, std::size_t> index;
    std::size_t offset;
    const std::string* column;
  };
  std::vector<Block> blocks;
  std::size_t offset = 0;
  for (const auto& voc : encoder.categorical()) {
    const Column* col = frame.find(voc.column);
    if (!col) throw DataError("missing categorical column '" + voc.column + "'");
    if (!col->is_text()) throw DataError("column '" + voc.column + "' is not categorical");
    Block b{&col->text(), {}, offset, &voc.column};
    for (std::size_t i = 0; i < voc.categories.size(); ++i) b.index.emplace(voc.categories[i], i);
    blocks.push_back(std::move(b));
    offset += voc.categories.size();
  }
  std::vector<const std::vector<double>*> numeric;
  for (const auto& name : encoder.numeric()) {
    const Column* col = frame.find(name);
    if (!col) throw DataError("missing numeric column '" + name + "'");
    if (col->is_text()) throw DataError("column '" + name + "' is not numeric");
    numeric.push_back(&col->numbers());
  }

  const std::size_t n = frame.row_count();
  FeatureMatrix out(n, encoder.output_names());
  const detail::Blocks ranges{n, 4096};
  detail::parallel_for(ranges.count(), detail::default_threads(), [&](std::size_t b) {
    for (std::size_t r = ranges.begin(b); r < ranges.end(b); ++r) {
      auto row = out.row(r);
      for (const auto& blk : blocks) {
        const auto& token = (*blk.tokens)[r];
        const auto it = blk.index.find(token);
        if (it != blk.index.end()) {
          row[blk.offset + it->second] = 1.0;
        } else if (policy == UnknownPolicy::Strict) {
          throw DataError("row " + std::to_string(r) + ", column '" + *blk.column +
                          "': unseen category '" + token + "'");
        }
      }
      for (std::size_t j = 0; j < numeric.size(); ++j) row[offset + j] = (*numeric[j])[r];
    }
  });
  return out;
}

std::size_t test_row_count(std::size_t n, double test_fraction) {
  const double exact = test_fraction * static_cast<double>(n);
  const double nearest = std::round(exact);
  // Absorb representation error so 0.2 * 1000 yields 200, not 201.
  if (std::abs(exact - nearest) <= 1e-9 * std::max(1.0, exact)) {
    return static_cast<std::size_t>(nearest);
  }
  return static_cast<std::size_t>(std::ceil(exact));
}

SplitResult train_test_split(const FeatureMatrix& x, const LabelVector& y, double test_fraction,
                             std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InvalidArgument("test fraction must lie in (0, 1)");
  }
  if (x.rows() != y.size()) {
    throw InvalidArgument("feature rows (" + std::to_string(x.rows()) + ") and labels (" +
                          std::to_string(y.size()) + ") differ");
  }
  const std::size_t n = x.rows();
  if (n < 2) throw InvalidArgument("need at least 2 rows to split");
  const std::size_t n_test = test_row_count(n, test_fraction);
  if (n_test == 0 || n_test >= n) {
    throw InvalidArgument("split of " + std::to_string(n) + " rows at fraction " +
                          std::to_string(test_fraction) + " leaves an empty partition");
  }

  auto order = shuffled_indices(n, seed);
  SplitResult s;
  s.seed = seed;
  s.test_fraction = test_fraction;
  s.test_rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  s.train_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  s.test_x = x.take_rows(s.test_rows);
  s.train_x = x.take_rows(s.train_rows);
  s.test_y = y.take(s.test_rows);
  s.train_y = y.take(s.train_rows);
  return s;
}

}  // namespace nids
