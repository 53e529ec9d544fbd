#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sensecf/core.hpp"
#include "sensecf/schema.hpp"

namespace sensecf {

/// One row of predictor values, ordered like schema.predictors().
struct Instance {
  std::vector<Value> values;

  bool operator==(const Instance& other) const { return values == other.values; }
};

struct Dataset {
  FeatureSchema schema;
  std::vector<Instance> rows;
  std::vector<int> labels;  // parallel to rows, each 0 or 1

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }

  std::size_t count_label(int label) const {
    std::size_t n = 0;
    for (int y : labels) n += (y == label) ? 1 : 0;
    return n;
  }
};

/// Per-feature value ranges observed on a reference dataset: (min, max) for
/// continuous features, the observed token set for categoricals.
struct Bounds {
  struct Entry {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::string> tokens;  // sorted, categorical only
  };
  std::vector<Entry> entries;  // aligned with schema.predictors()

  double width(std::size_t i) const { return entries[i].hi - entries[i].lo; }

  bool contains(const FeatureSchema& schema, const Instance& x) const {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (schema.predictor(i).is_continuous()) {
        const double v = as_number(x.values[i]);
        if (v < entries[i].lo || v > entries[i].hi) return false;
      } else {
        const auto& tokens = entries[i].tokens;
        if (!std::binary_search(tokens.begin(), tokens.end(), as_token(x.values[i]))) return false;
      }
    }
    return true;
  }
};

inline void check_arity(const FeatureSchema& schema, const Instance& x) {
  if (x.values.size() != schema.predictor_count())
    fail(ErrorCode::ArityMismatch, "instance has " + std::to_string(x.values.size()) + " values, schema expects " +
                                       std::to_string(schema.predictor_count()));
}

namespace detail {

/// RFC-4180 style reader: quoted fields, doubled quotes, CRLF tolerant,
/// embedded newlines inside quotes.
inline bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  int ch;
  while ((ch = in.get()) != EOF) {
    any = true;
    const char c = static_cast<char>(ch);
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get();
      fields.push_back(std::move(field));
      return true;
    } else if (c == '\n') {
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(c);
    }
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

inline double parse_number(const std::string& text, std::size_t row, const std::string& column) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
  double value = 0.0;
  auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(value))
    fail(ErrorCode::NonNumericValue,
         "row " + std::to_string(row) + ", column '" + column + "': '" + text + "' is not a finite number");
  return value;
}

}  // namespace detail

/// Loads a CSV with a header row against the schema. Header matching is
/// case-sensitive and order-insensitive; columns not named in the schema are
/// ignored, so supersets of the schema load unchanged.
inline Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path.string() + "'");

  std::vector<std::string> header;
  if (!detail::read_record(in, header)) fail(ErrorCode::CsvParse, "'" + path.string() + "' is empty (no header row)");

  auto column_of = [&](const std::string& name) {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == name) return c;
    fail(ErrorCode::MissingColumn, "column '" + name + "' not found in '" + path.string() + "'");
  };

  std::vector<std::size_t> predictor_cols;
  for (const auto& f : schema.predictors()) predictor_cols.push_back(column_of(f.name));
  const std::size_t target_col = column_of(schema.target().name);

  Dataset data;
  data.schema = schema;
  std::vector<std::string> fields;
  std::size_t row_index = 0;
  while (detail::read_record(in, fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank line
    if (fields.size() != header.size())
      fail(ErrorCode::CsvParse, "row " + std::to_string(row_index) + " has " + std::to_string(fields.size()) +
                                    " fields, header has " + std::to_string(header.size()));
    Instance instance;
    instance.values.reserve(schema.predictor_count());
    for (std::size_t i = 0; i < schema.predictor_count(); ++i) {
      const FeatureSpec& spec = schema.predictor(i);
      const std::string& text = fields[predictor_cols[i]];
      if (spec.is_continuous()) {
        instance.values.emplace_back(detail::parse_number(text, row_index, spec.name));
      } else {
        if (!spec.category_index(text))
          fail(ErrorCode::UnknownCategory,
               "row " + std::to_string(row_index) + ", column '" + spec.name + "': token '" + text + "'");
        instance.values.emplace_back(text);
      }
    }
    const std::string& target_text = fields[target_col];
    auto target_idx = schema.target().category_index(target_text);
    if (!target_idx)
      fail(ErrorCode::UnknownCategory,
           "row " + std::to_string(row_index) + ", target column '" + schema.target().name + "': token '" +
               target_text + "'");
    data.rows.push_back(std::move(instance));
    data.labels.push_back(static_cast<int>(*target_idx));
    ++row_index;
  }
  return data;
}

inline void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path.string() + "'");
  std::string line;
  for (const auto& f : data.schema.predictors()) {
    line += detail::csv_escape(f.name);
    line += ',';
  }
  line += detail::csv_escape(data.schema.target().name);
  out << line << "\n";
  for (std::size_t r = 0; r < data.size(); ++r) {
    line.clear();
    for (const auto& v : data.rows[r].values) {
      line += detail::csv_escape(value_to_string(v));
      line += ',';
    }
    line += detail::csv_escape(data.schema.label_token(data.labels[r]));
    out << line << "\n";
  }
  if (!out) fail(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

/// Deterministic train/test partition. Stratified mode keeps the class ratio
/// within one row per class: per-class test counts start at floor(n_c * f) and
/// leftover slots go to the classes with the largest fractional part, larger
/// class first on ties.
inline std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction, std::uint64_t seed,
                                         bool stratified) {
  if (data.empty()) fail(ErrorCode::EmptyDataset, "cannot split an empty dataset");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    fail(ErrorCode::FractionOutOfRange, "test_fraction must be in (0, 1), got " + std::to_string(test_fraction));

  const std::size_t n = data.size();
  std::vector<bool> in_test(n, false);
  Rng rng(seed);

  if (stratified) {
    std::vector<std::size_t> class_rows[2];
    for (std::size_t i = 0; i < n; ++i) class_rows[data.labels[i]].push_back(i);
    for (int c = 0; c < 2; ++c)
      if (!class_rows[c].empty() && class_rows[c].size() < 2)
        fail(ErrorCode::ClassTooSmall, "class " + std::to_string(c) + " has fewer than 2 rows");

    const std::size_t total_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
    std::size_t take[2];
    double frac[2];
    std::size_t assigned = 0;
    for (int c = 0; c < 2; ++c) {
      const double ideal = static_cast<double>(class_rows[c].size()) * test_fraction;
      take[c] = static_cast<std::size_t>(std::floor(ideal));
      frac[c] = ideal - static_cast<double>(take[c]);
      assigned += take[c];
    }
    while (assigned < total_test) {
      int pick;
      if (frac[0] != frac[1]) {
        pick = frac[0] > frac[1] ? 0 : 1;
      } else {
        pick = class_rows[0].size() >= class_rows[1].size() ? 0 : 1;
      }
      if (take[pick] >= class_rows[pick].size()) pick = 1 - pick;
      ++take[pick];
      frac[pick] = -1.0;
      ++assigned;
    }
    for (int c = 0; c < 2; ++c) {
      Rng class_rng = rng.fork(static_cast<std::uint64_t>(c));
      class_rng.shuffle(class_rows[c]);
      for (std::size_t k = 0; k < take[c] && k < class_rows[c].size(); ++k) in_test[class_rows[c][k]] = true;
    }
  } else {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    const std::size_t total_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
    for (std::size_t k = 0; k < total_test; ++k) in_test[order[k]] = true;
  }

  Dataset train, test;
  train.schema = data.schema;
  test.schema = data.schema;
  for (std::size_t i = 0; i < n; ++i) {
    Dataset& part = in_test[i] ? test : train;
    part.rows.push_back(data.rows[i]);
    part.labels.push_back(data.labels[i]);
  }
  return {std::move(train), std::move(test)};
}

/// Observed per-feature ranges of this dataset only.
inline Bounds feature_bounds(const Dataset& data) {
  if (data.empty()) fail(ErrorCode::EmptyDataset, "cannot derive bounds from an empty dataset");
  const FeatureSchema& schema = data.schema;
  Bounds bounds;
  bounds.entries.resize(schema.predictor_count());
  for (std::size_t i = 0; i < schema.predictor_count(); ++i) {
    Bounds::Entry& entry = bounds.entries[i];
    if (schema.predictor(i).is_continuous()) {
      entry.lo = std::numeric_limits<double>::infinity();
      entry.hi = -std::numeric_limits<double>::infinity();
      for (const auto& row : data.rows) {
        const double v = as_number(row.values[i]);
        entry.lo = std::min(entry.lo, v);
        entry.hi = std::max(entry.hi, v);
      }
    } else {
      for (const auto& row : data.rows) entry.tokens.push_back(as_token(row.values[i]));
      std::sort(entry.tokens.begin(), entry.tokens.end());
      entry.tokens.erase(std::unique(entry.tokens.begin(), entry.tokens.end()), entry.tokens.end());
    }
  }
  return bounds;
}

}  // namespace sensecf
