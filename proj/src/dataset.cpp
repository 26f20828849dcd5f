#include "gaudit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "gaudit/csv.hpp"
#include "gaudit/errors.hpp"
#include "gaudit/seeding.hpp"

namespace gaudit {

std::string_view to_string(ColumnRole role) {
  switch (role) {
    case ColumnRole::feature: return "feature";
    case ColumnRole::attribute: return "attribute";
    case ColumnRole::label: return "label";
    case ColumnRole::ignore: return "ignore";
  }
  return "?";
}

std::string_view to_string(ColumnKind kind) {
  return kind == ColumnKind::continuous ? "continuous" : "categorical";
}

ColumnRole parse_role(std::string_view text) {
  if (text == "feature") return ColumnRole::feature;
  if (text == "attribute") return ColumnRole::attribute;
  if (text == "label") return ColumnRole::label;
  if (text == "ignore") return ColumnRole::ignore;
  throw DataError("unknown column role '" + std::string(text) + "'");
}

ColumnKind parse_kind(std::string_view text) {
  if (text == "continuous") return ColumnKind::continuous;
  if (text == "categorical") return ColumnKind::categorical;
  throw DataError("unknown column kind '" + std::string(text) + "'");
}

void validate_schema(std::span<const ColumnSchema> schema) {
  std::set<std::string> names;
  int labels = 0;
  int features = 0;
  for (const auto& col : schema) {
    if (col.name.empty()) throw DataError("schema column with empty name");
    if (!names.insert(col.name).second) throw DataError("duplicate column name '" + col.name + "'");
    labels += col.role == ColumnRole::label;
    features += col.role == ColumnRole::feature;
  }
  if (labels != 1) {
    throw DataError("schema must declare exactly one label column (found " +
                    std::to_string(labels) + ")");
  }
  if (features < 1) throw DataError("schema must declare at least one feature column");
}

// ---------------------------------------------------------------------------
// CategoricalSeries

std::vector<std::int64_t> CategoricalSeries::counts() const {
  std::vector<std::int64_t> out(names.size(), 0);
  for (int c : codes) ++out[static_cast<std::size_t>(c)];
  return out;
}

void CategoricalSeries::validate() const {
  if (names.empty()) throw DataError("categorical series needs at least one category");
  for (int c : codes) {
    if (c < 0 || c >= category_count()) {
      throw DataError("category code " + std::to_string(c) + " outside [0, " +
                      std::to_string(category_count()) + ")");
    }
  }
}

CategoricalSeries categorize(std::span<const std::string> values) {
  std::vector<std::string> names(values.begin(), values.end());
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  std::unordered_map<std::string_view, int> index;
  for (std::size_t i = 0; i < names.size(); ++i) index.emplace(names[i], static_cast<int>(i));
  CategoricalSeries out;
  out.codes.reserve(values.size());
  for (const auto& v : values) out.codes.push_back(index.at(v));
  out.names = std::move(names);
  if (out.names.empty()) out.names.push_back("(empty)");
  return out;
}

CategoricalSeries subset(const CategoricalSeries& series, std::span<const std::size_t> rows) {
  CategoricalSeries out;
  out.names = series.names;
  out.codes.reserve(rows.size());
  for (auto r : rows) out.codes.push_back(series.codes.at(r));
  return out;
}

CategoricalSeries densify(const CategoricalSeries& series) {
  const auto counts = series.counts();
  std::vector<int> remap(counts.size(), -1);
  CategoricalSeries out;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] > 0) {
      remap[c] = static_cast<int>(out.names.size());
      out.names.push_back(series.names[c]);
    }
  }
  out.codes.reserve(series.codes.size());
  for (int c : series.codes) out.codes.push_back(remap[static_cast<std::size_t>(c)]);
  if (out.names.empty()) out.names.push_back("(empty)");
  return out;
}

// ---------------------------------------------------------------------------
// RawColumn / Dataset

std::size_t RawColumn::missing_count() const {
  return static_cast<std::size_t>(std::count(missing.begin(), missing.end(), std::uint8_t{1}));
}

RawColumn RawColumn::continuous(std::string name, std::vector<double> values) {
  RawColumn col;
  col.name = std::move(name);
  col.kind = ColumnKind::continuous;
  col.missing.assign(values.size(), 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isnan(values[i])) col.missing[i] = 1;
  }
  col.numbers = std::move(values);
  return col;
}

RawColumn RawColumn::categorical(std::string name, std::vector<std::string> values) {
  RawColumn col;
  col.name = std::move(name);
  col.kind = ColumnKind::categorical;
  col.missing.assign(values.size(), 0);
  col.labels = std::move(values);
  return col;
}

const RawColumn& Dataset::attribute(std::string_view name) const {
  for (const auto& a : attributes) {
    if (a.name == name) return a;
  }
  throw DataError("unknown attribute '" + std::string(name) + "'");
}

bool Dataset::has_attribute(std::string_view name) const {
  return std::any_of(attributes.begin(), attributes.end(),
                     [&](const RawColumn& a) { return a.name == name; });
}

std::vector<std::string> Dataset::attribute_names() const {
  std::vector<std::string> out;
  for (const auto& a : attributes) out.push_back(a.name);
  return out;
}

void Dataset::validate() const {
  if (n_rows < 1) throw DataError("dataset has no rows");
  auto check = [&](const RawColumn& c) {
    const std::size_t payload = c.kind == ColumnKind::continuous ? c.numbers.size() : c.labels.size();
    if (c.size() != n_rows || payload != n_rows) {
      throw DataError("column '" + c.name + "' has " + std::to_string(c.size()) +
                      " entries, expected " + std::to_string(n_rows));
    }
  };
  for (const auto& c : raw_features) check(c);
  for (const auto& c : attributes) check(c);
  check(label);
  if (encoded) {
    if (static_cast<std::size_t>(features.rows()) != n_rows) {
      throw DataError("encoded feature matrix row count mismatch");
    }
    if (static_cast<std::size_t>(features.cols()) != feature_names.size()) {
      throw DataError("feature name count mismatch");
    }
    if (!features.allFinite()) throw DataError("encoded feature matrix has non-finite entries");
  }
}

// ---------------------------------------------------------------------------
// CSV ingestion

namespace {

constexpr std::string_view kMissingLevel = "(missing)";

double parse_double(const std::string& cell, std::size_t line, const std::string& column) {
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(*(end - 1)))) --end;
  if (begin < end && *begin == '+') ++begin;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || begin == end || !std::isfinite(value)) {
    throw DataError("unparseable numeric cell '" + cell + "' at line " + std::to_string(line) +
                    ", column '" + column + "'");
  }
  return value;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, std::span<const ColumnSchema> schema) {
  validate_schema(schema);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("file not found: " + path.string());

  CsvReader reader(in);
  CsvRecord header;
  if (!reader.next(header) || (header.size() == 1 && header[0].empty())) {
    throw DataError("empty file: " + path.string());
  }
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);

  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!position.emplace(header[i], i).second) {
      throw DataError("duplicate header name '" + header[i] + "'");
    }
  }
  for (const auto& col : schema) {
    if (!position.count(col.name)) throw DataError("header is missing schema column '" + col.name + "'");
  }
  if (header.size() != schema.size()) {
    for (const auto& h : header) {
      bool known = std::any_of(schema.begin(), schema.end(),
                               [&](const ColumnSchema& c) { return c.name == h; });
      if (!known) throw DataError("header column '" + h + "' is not in the schema");
    }
  }

  std::vector<RawColumn> columns(schema.size());
  for (std::size_t k = 0; k < schema.size(); ++k) {
    columns[k].name = schema[k].name;
    columns[k].kind = schema[k].kind;
  }

  CsvRecord record;
  std::size_t rows = 0;
  while (reader.next(record)) {
    if (record.size() == 1 && record[0].empty()) continue;  // blank line
    if (record.size() != header.size()) {
      throw DataError("line " + std::to_string(reader.line()) + " has " +
                      std::to_string(record.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    for (std::size_t k = 0; k < schema.size(); ++k) {
      const auto& cell = record[position[schema[k].name]];
      auto& col = columns[k];
      const bool absent = cell == schema[k].missing_token;
      col.missing.push_back(absent ? 1 : 0);
      if (col.kind == ColumnKind::continuous) {
        col.numbers.push_back(absent ? std::nan("") : parse_double(cell, reader.line(), col.name));
      } else {
        col.labels.push_back(absent ? std::string() : cell);
      }
    }
    ++rows;
  }
  if (rows == 0) throw DataError("file has a header but no data rows: " + path.string());

  Dataset ds;
  ds.n_rows = rows;
  for (std::size_t k = 0; k < schema.size(); ++k) {
    switch (schema[k].role) {
      case ColumnRole::feature: ds.raw_features.push_back(std::move(columns[k])); break;
      case ColumnRole::attribute: ds.attributes.push_back(std::move(columns[k])); break;
      case ColumnRole::label: ds.label = std::move(columns[k]); break;
      case ColumnRole::ignore: break;
    }
  }
  ds.validate();
  return ds;
}

// ---------------------------------------------------------------------------
// Encoding

Dataset encode_features(const Dataset& ds) {
  if (ds.encoded) return ds;
  ds.validate();

  struct Block {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    bool one_hot = false;
  };
  std::vector<Block> blocks;

  for (const auto& raw : ds.raw_features) {
    Block block;
    if (raw.kind == ColumnKind::continuous) {
      std::vector<double> values(ds.n_rows);
      std::vector<double> indicator(ds.n_rows, 0.0);
      bool any_missing = false;
      for (std::size_t i = 0; i < ds.n_rows; ++i) {
        if (raw.is_missing(i)) {
          values[i] = kMissingPlaceholder;
          indicator[i] = 1.0;
          any_missing = true;
        } else {
          values[i] = raw.numbers[i];
        }
      }
      block.names.push_back(raw.name);
      block.columns.push_back(std::move(values));
      if (any_missing) {
        block.names.push_back(raw.name + " missing");
        block.columns.push_back(std::move(indicator));
      }
    } else {
      std::vector<std::string> levels;
      levels.reserve(ds.n_rows);
      for (std::size_t i = 0; i < ds.n_rows; ++i) {
        levels.push_back(raw.is_missing(i) ? std::string(kMissingLevel) : raw.labels[i]);
      }
      const CategoricalSeries series = categorize(levels);
      if (series.names.size() > kMaxOneHotLevels) {
        throw DataError("categorical feature '" + raw.name + "' has " +
                        std::to_string(series.names.size()) + " distinct values (limit " +
                        std::to_string(kMaxOneHotLevels) + "); is it an identifier column?");
      }
      block.one_hot = true;
      for (std::size_t c = 0; c < series.names.size(); ++c) {
        const bool is_missing_level = series.names[c] == kMissingLevel && raw.missing_count() > 0;
        block.names.push_back(is_missing_level ? raw.name + " missing" : raw.name + "=" + series.names[c]);
        block.columns.emplace_back(ds.n_rows, 0.0);
      }
      for (std::size_t i = 0; i < ds.n_rows; ++i) {
        block.columns[static_cast<std::size_t>(series.codes[i])][i] = 1.0;
      }
    }
    blocks.push_back(std::move(block));
  }

  std::size_t width = 0;
  for (const auto& b : blocks) width += b.columns.size();

  Dataset out = ds;
  out.features.resize(static_cast<Eigen::Index>(ds.n_rows), static_cast<Eigen::Index>(width));
  out.feature_names.clear();
  out.one_hot_groups.clear();
  std::size_t col = 0;
  for (auto& b : blocks) {
    std::vector<std::size_t> group;
    for (std::size_t k = 0; k < b.columns.size(); ++k, ++col) {
      out.features.col(static_cast<Eigen::Index>(col)) =
          Eigen::Map<const Eigen::VectorXd>(b.columns[k].data(), static_cast<Eigen::Index>(ds.n_rows));
      out.feature_names.push_back(b.names[k]);
      group.push_back(col);
    }
    if (b.one_hot) out.one_hot_groups.push_back(std::move(group));
  }
  out.encoded = true;
  return out;
}

std::vector<std::size_t> rows_with_attribute(const Dataset& ds, std::string_view attr) {
  const RawColumn& column = ds.attribute(attr);
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (!column.is_missing(i)) rows.push_back(i);
  }
  return rows;
}

std::vector<std::size_t> rows_with_all_attributes(const Dataset& ds,
                                                  std::span<const std::string> attrs) {
  std::vector<const RawColumn*> columns;
  for (const auto& a : attrs) columns.push_back(&ds.attribute(a));
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < ds.n_rows; ++i) {
    bool present = std::none_of(columns.begin(), columns.end(),
                                [&](const RawColumn* c) { return c->is_missing(i); });
    if (present) rows.push_back(i);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::string cell_text(const RawColumn& c, std::size_t row, std::string_view missing_token) {
  if (c.is_missing(row)) return std::string(missing_token);
  return c.kind == ColumnKind::continuous ? format_number(c.numbers[row]) : c.labels[row];
}

}  // namespace

std::vector<ColumnSchema> schema_of(const Dataset& ds) {
  std::vector<ColumnSchema> schema;
  for (const auto& c : ds.raw_features) schema.push_back({c.name, ColumnRole::feature, c.kind, ""});
  for (const auto& c : ds.attributes) schema.push_back({c.name, ColumnRole::attribute, c.kind, ""});
  schema.push_back({ds.label.name, ColumnRole::label, ds.label.kind, ""});
  return schema;
}

void write_csv(const Dataset& ds, const std::filesystem::path& path, std::string_view missing_token) {
  std::vector<const RawColumn*> columns;
  for (const auto& c : ds.raw_features) columns.push_back(&c);
  for (const auto& c : ds.attributes) columns.push_back(&c);
  columns.push_back(&ds.label);

  std::ostringstream out;
  std::vector<std::string> fields;
  for (const auto* c : columns) fields.push_back(c->name);
  out << csv_join(fields) << '\n';
  for (std::size_t i = 0; i < ds.n_rows; ++i) {
    fields.clear();
    for (const auto* c : columns) fields.push_back(cell_text(*c, i, missing_token));
    out << csv_join(fields) << '\n';
  }
  write_file_atomic(path, out.str());
}

std::uint64_t fingerprint(const Dataset& ds) {
  Fnv1a h;
  h.update_value(static_cast<std::uint64_t>(ds.n_rows));
  auto add = [&](const RawColumn& c) {
    h.update(c.name);
    h.update(to_string(c.kind));
    for (std::size_t i = 0; i < c.size(); ++i) {
      h.update_value(c.missing[i]);
      if (c.is_missing(i)) continue;
      if (c.kind == ColumnKind::continuous) {
        h.update_value(c.numbers[i]);
      } else {
        h.update(c.labels[i]);
      }
    }
  };
  for (const auto& c : ds.raw_features) add(c);
  for (const auto& c : ds.attributes) add(c);
  add(ds.label);
  return h.digest();
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      out(static_cast<Eigen::Index>(r), j) = m(static_cast<Eigen::Index>(rows[r]), j);
    }
  }
  return out;
}

}  // namespace gaudit
