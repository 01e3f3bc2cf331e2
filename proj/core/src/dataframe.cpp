#include "nids/dataframe.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "nids/error.hpp"

namespace nids {
namespace {

// Splits one logical CSV record, which may span several physical lines when a
// quoted field contains a newline. Returns false at end of input.
class CsvRecordReader {
 public:
  explicit CsvRecordReader(std::istream& in) : in_(in) {}

  bool next(std::vector<std::string>& fields) {
    fields.clear();
    std::string line;
    if (!std::getline(in_, line)) return false;
    ++line_;
    record_line_ = line_;

    std::string field;
    bool quoted = false;
    bool after_quote = false;
    for (;;) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
          if (c == '"') {
            if (i + 1 < line.size() && line[i + 1] == '"') {
              field.push_back('"');
              ++i;
            } else {
              quoted = false;
              after_quote = true;
            }
          } else {
            field.push_back(c);
          }
        } else if (c == ',') {
          fields.push_back(std::move(field));
          field.clear();
          after_quote = false;
        } else if (c == '"' && field.empty() && !after_quote) {
          quoted = true;
        } else if (after_quote) {
          throw DataError(position() + ": unexpected character after closing quote");
        } else {
          field.push_back(c);
        }
      }
      if (!quoted) break;
      if (!std::getline(in_, line)) {
        throw DataError(position() + ": unterminated quoted field");
      }
      ++line_;
      field.push_back('\n');
    }
    fields.push_back(std::move(field));
    return true;
  }

  std::size_t record_line() const { return record_line_; }

  void set_source(std::string_view source) { source_ = source; }

  std::string position() const { return std::string(source_) + ":" + std::to_string(record_line_); }

 private:
  std::istream& in_;
  std::string_view source_ = "<stream>";
  std::size_t line_ = 0;
  std::size_t record_line_ = 0;
};

bool parse_real(std::string_view token, double& out) {
  if (token.empty()) return false;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

bool needs_quoting(std::string_view s) {
  return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

void write_field(std::ostream& out, std::string_view s) {
  if (!needs_quoting(s)) {
    out << s;
    return;
  }
  out << '"';
  for (char c : s) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

}  // namespace

std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::Categorical: return "categorical";
    case ColumnKind::Numeric: return "numeric";
    case ColumnKind::Label: return "label";
  }
  return "unknown";
}

std::size_t Column::size() const {
  return std::visit([](const auto& v) { return v.size(); }, values);
}

const std::vector<std::string>& Column::text() const {
  if (!is_text()) throw DataError("column '" + spec.name + "' is not categorical");
  return std::get<std::vector<std::string>>(values);
}

const std::vector<double>& Column::numbers() const {
  if (is_text()) throw DataError("column '" + spec.name + "' is not numeric");
  return std::get<std::vector<double>>(values);
}

DataFrame::DataFrame(std::vector<Column> columns) : columns_(std::move(columns)) {
  std::unordered_set<std::string_view> seen;
  for (const auto& col : columns_) {
    if (col.spec.name.empty()) throw DataError("column with empty name");
    if (!seen.insert(col.spec.name).second) {
      throw DataError("duplicate column name '" + col.spec.name + "'");
    }
    const bool wants_text = col.spec.kind == ColumnKind::Categorical;
    if (wants_text != col.is_text()) {
      throw DataError("column '" + col.spec.name + "' storage does not match kind " +
                      std::string(to_string(col.spec.kind)));
    }
  }
  rows_ = columns_.empty() ? 0 : columns_.front().size();
  for (const auto& col : columns_) {
    if (col.size() != rows_) {
      throw DataError("column '" + col.spec.name + "' has " + std::to_string(col.size()) +
                      " rows, expected " + std::to_string(rows_));
    }
    if (col.is_text()) {
      const auto& text = col.text();
      for (std::size_t r = 0; r < text.size(); ++r) {
        if (text[r].empty()) {
          throw DataError("row " + std::to_string(r) + ", column '" + col.spec.name +
                          "': empty category token");
        }
      }
    } else {
      const auto& nums = col.numbers();
      for (std::size_t r = 0; r < nums.size(); ++r) {
        if (!std::isfinite(nums[r])) {
          throw DataError("row " + std::to_string(r) + ", column '" + col.spec.name +
                          "': non-finite value");
        }
      }
    }
  }
}

const Column* DataFrame::find(std::string_view name) const noexcept {
  const auto it = std::find_if(columns_.begin(), columns_.end(),
                               [&](const Column& c) { return c.spec.name == name; });
  return it == columns_.end() ? nullptr : &*it;
}

const Column& DataFrame::column(std::string_view name) const {
  if (const Column* c = find(name)) return *c;
  throw DataError("no column named '" + std::string(name) + "'");
}

std::vector<std::string> DataFrame::names() const {
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.spec.name);
  return out;
}

std::vector<std::string> DataFrame::names_of_kind(ColumnKind kind) const {
  std::vector<std::string> out;
  for (const auto& c : columns_) {
    if (c.spec.kind == kind) out.push_back(c.spec.name);
  }
  return out;
}

LabelVector::LabelVector(std::vector<std::uint8_t> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] > 1) {
      throw DataError("label at row " + std::to_string(i) + " is " +
                      std::to_string(values_[i]) + ", expected 0 or 1");
    }
  }
}

std::size_t LabelVector::count(std::uint8_t cls) const noexcept {
  return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), cls));
}

LabelVector LabelVector::take(std::span<const std::size_t> rows) const {
  std::vector<std::uint8_t> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(values_.at(r));
  return LabelVector(std::move(out));
}

DataFrame parse_csv(std::istream& in, const std::set<std::string, std::less<>>& categorical,
                    std::string_view label, std::string_view source) {
  CsvRecordReader reader(in);
  reader.set_source(source);
  std::vector<std::string> header;
  if (!reader.next(header) || (header.size() == 1 && header[0].empty())) {
    throw DataError(std::string(source) + ": missing header row");
  }

  std::vector<ColumnKind> kinds(header.size(), ColumnKind::Numeric);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == label) {
      kinds[c] = ColumnKind::Label;
    } else if (categorical.contains(header[c])) {
      kinds[c] = ColumnKind::Categorical;
    }
  }
  const auto has = [&](std::string_view name) {
    return std::find(header.begin(), header.end(), name) != header.end();
  };
  for (const auto& name : categorical) {
    if (!has(name)) {
      throw DataError(std::string(source) + ": header is missing categorical column '" + name + "'");
    }
  }
  if (!has(label)) {
    throw DataError(std::string(source) + ": header is missing label column '" +
                    std::string(label) + "'");
  }

  std::vector<std::vector<std::string>> text(header.size());
  std::vector<std::vector<double>> nums(header.size());
  std::vector<std::string> fields;
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != header.size()) {
      throw DataError(reader.position() + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (kinds[c] == ColumnKind::Categorical) {
        if (fields[c].empty()) {
          throw DataError(reader.position() + ", column '" + header[c] + "': empty category token");
        }
        text[c].push_back(std::move(fields[c]));
        continue;
      }
      double v = 0.0;
      if (!parse_real(fields[c], v)) {
        throw DataError(reader.position() + ", column '" + header[c] +
                        "': non-numeric token '" + fields[c] + "'");
      }
      if (kinds[c] == ColumnKind::Label && v != 0.0 && v != 1.0) {
        throw DataError(reader.position() + ", column '" + header[c] + "': label value '" +
                        fields[c] + "' is not 0 or 1");
      }
      nums[c].push_back(v);
    }
  }

  std::vector<Column> columns;
  columns.reserve(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    Column col{{header[c], kinds[c]}, {}};
    if (kinds[c] == ColumnKind::Categorical) {
      col.values = std::move(text[c]);
    } else {
      col.values = std::move(nums[c]);
    }
    columns.push_back(std::move(col));
  }
  return DataFrame(std::move(columns));
}

DataFrame load_csv(const std::filesystem::path& path,
                   const std::set<std::string, std::less<>>& categorical, std::string_view label) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return parse_csv(in, categorical, label, path.string());
}

std::vector<std::string> read_csv_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  CsvRecordReader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header) || (header.size() == 1 && header[0].empty())) {
    throw DataError(path.string() + ": missing header row");
  }
  return header;
}

void write_csv(const DataFrame& frame, std::ostream& out) {
  const auto cols = frame.columns();
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (c) out << ',';
    write_field(out, cols[c].spec.name);
  }
  out << '\n';
  for (std::size_t r = 0; r < frame.row_count(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (c) out << ',';
      if (cols[c].is_text()) {
        write_field(out, cols[c].text()[r]);
      } else {
        out << format_real(cols[c].numbers()[r]);
      }
    }
    out << '\n';
  }
}

DataFrame drop_columns(const DataFrame& frame, std::span<const std::string> names, DropMode mode) {
  if (mode == DropMode::Strict) {
    for (const auto& n : names) {
      if (!frame.contains(n)) throw DataError("cannot drop unknown column '" + n + "'");
    }
  }
  std::vector<Column> kept;
  for (const auto& col : frame.columns()) {
    if (std::find(names.begin(), names.end(), col.spec.name) == names.end()) kept.push_back(col);
  }
  return DataFrame(std::move(kept));
}

DataFrame select_columns(const DataFrame& frame, std::span<const std::string> names) {
  std::vector<Column> picked;
  picked.reserve(names.size());
  for (const auto& n : names) picked.push_back(frame.column(n));
  return DataFrame(std::move(picked));
}

FeaturesAndLabels split_xy(const DataFrame& frame) {
  const auto labels = frame.names_of_kind(ColumnKind::Label);
  if (labels.size() != 1) {
    throw DataError("expected exactly one label column, found " + std::to_string(labels.size()));
  }
  const auto& values = frame.column(labels.front()).numbers();
  std::vector<std::uint8_t> ids;
  ids.reserve(values.size());
  for (std::size_t r = 0; r < values.size(); ++r) {
    if (values[r] != 0.0 && values[r] != 1.0) {
      throw DataError("row " + std::to_string(r) + ": label value " + format_real(values[r]) +
                      " is not 0 or 1");
    }
    ids.push_back(static_cast<std::uint8_t>(values[r]));
  }
  return {drop_columns(frame, labels), LabelVector(std::move(ids))};
}

}  // namespace nids
