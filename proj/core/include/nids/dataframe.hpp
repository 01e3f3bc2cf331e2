#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace nids {

enum class ColumnKind { Categorical, Numeric, Label };

std::string_view to_string(ColumnKind kind);

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;

  friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

/// One named column. Categorical columns hold text tokens; Numeric and Label
/// columns hold 64-bit reals.
struct Column {
  ColumnSpec spec;
  std::variant<std::vector<std::string>, std::vector<double>> values;

  std::size_t size() const;
  bool is_text() const { return std::holds_alternative<std::vector<std::string>>(values); }
  const std::vector<std::string>& text() const;
  const std::vector<double>& numbers() const;

  friend bool operator==(const Column&, const Column&) = default;
};

/// Immutable column-major table.
///
/// Construction validates the table: names are unique, every column has the
/// same length, Categorical columns are text with no empty token, Numeric and
/// Label columns are finite reals. The token "-" is an ordinary category.
class DataFrame {
 public:
  DataFrame() = default;
  explicit DataFrame(std::vector<Column> columns);

  std::size_t row_count() const noexcept { return rows_; }
  std::size_t column_count() const noexcept { return columns_.size(); }
  std::span<const Column> columns() const noexcept { return columns_; }

  /// Throws DataError if the column does not exist.
  const Column& column(std::string_view name) const;
  const Column* find(std::string_view name) const noexcept;
  bool contains(std::string_view name) const noexcept { return find(name) != nullptr; }

  std::vector<std::string> names() const;
  std::vector<std::string> names_of_kind(ColumnKind kind) const;

  friend bool operator==(const DataFrame&, const DataFrame&) = default;

 private:
  std::vector<Column> columns_;
  std::size_t rows_ = 0;
};

/// Binary class ids, each exactly 0 or 1.
class LabelVector {
 public:
  LabelVector() = default;
  /// Throws DataError if any value is not 0 or 1.
  explicit LabelVector(std::vector<std::uint8_t> values);

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  std::uint8_t operator[](std::size_t i) const { return values_[i]; }
  std::span<const std::uint8_t> values() const noexcept { return values_; }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  std::size_t count(std::uint8_t cls) const noexcept;
  LabelVector take(std::span<const std::size_t> rows) const;

  friend bool operator==(const LabelVector&, const LabelVector&) = default;

 private:
  std::vector<std::uint8_t> values_;
};

/// Parses comma-delimited, RFC 4180 quoted CSV with a mandatory header row.
/// Header columns named in `categorical` become Categorical, `label` becomes
/// Label, everything else is Numeric. `source` names the input in errors.
DataFrame parse_csv(std::istream& in, const std::set<std::string, std::less<>>& categorical,
                    std::string_view label, std::string_view source = "<stream>");

DataFrame load_csv(const std::filesystem::path& path,
                   const std::set<std::string, std::less<>>& categorical, std::string_view label);

/// Column names from the header row of a CSV file.
std::vector<std::string> read_csv_header(const std::filesystem::path& path);

/// Writes the frame with a header row. Reals use the shortest round-trip form.
void write_csv(const DataFrame& frame, std::ostream& out);

enum class DropMode { Strict, Lenient };

/// Removes the named columns. Strict mode rejects unknown names.
DataFrame drop_columns(const DataFrame& frame, std::span<const std::string> names,
                       DropMode mode = DropMode::Strict);

/// Keeps only the named columns, in the order given.
DataFrame select_columns(const DataFrame& frame, std::span<const std::string> names);

struct FeaturesAndLabels {
  DataFrame features;
  LabelVector labels;
};

/// Separates the single Label column from the features.
FeaturesAndLabels split_xy(const DataFrame& frame);

}  // namespace nids
