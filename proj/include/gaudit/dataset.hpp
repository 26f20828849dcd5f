#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gaudit {

enum class ColumnRole { feature, attribute, label, ignore };
enum class ColumnKind { continuous, categorical };

std::string_view to_string(ColumnRole role);
std::string_view to_string(ColumnKind kind);
ColumnRole parse_role(std::string_view text);
ColumnKind parse_kind(std::string_view text);

struct ColumnSchema {
  std::string name;
  ColumnRole role = ColumnRole::feature;
  ColumnKind kind = ColumnKind::continuous;
  std::string missing_token;
};

/// Throws DataError unless names are unique, exactly one label exists and at
/// least one feature column is declared.
void validate_schema(std::span<const ColumnSchema> schema);

/// Integer-coded categories with display names; codes are dense in [0, C).
struct CategoricalSeries {
  std::vector<int> codes;
  std::vector<std::string> names;

  std::size_t size() const { return codes.size(); }
  int category_count() const { return static_cast<int>(names.size()); }
  std::vector<std::int64_t> counts() const;
  void validate() const;
};

/// Categories named by the distinct input strings in lexicographic order.
CategoricalSeries categorize(std::span<const std::string> values);
CategoricalSeries subset(const CategoricalSeries& series, std::span<const std::size_t> rows);
/// Drops unused categories and renumbers codes in their original order.
CategoricalSeries densify(const CategoricalSeries& series);

/// One raw column as read from disk. Continuous columns use `numbers`,
/// categorical ones `labels`; `missing[i] != 0` marks an absent cell.
struct RawColumn {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  std::vector<double> numbers;
  std::vector<std::string> labels;
  std::vector<std::uint8_t> missing;

  std::size_t size() const { return missing.size(); }
  bool is_missing(std::size_t row) const { return missing[row] != 0; }
  std::size_t missing_count() const;

  static RawColumn continuous(std::string name, std::vector<double> values);
  static RawColumn categorical(std::string name, std::vector<std::string> values);
};

struct Dataset {
  std::size_t n_rows = 0;
  std::vector<RawColumn> raw_features;
  Eigen::MatrixXd features;  // n_rows x D after encode_features
  std::vector<std::string> feature_names;
  // Column indices of each one-hot expanded categorical feature.
  std::vector<std::vector<std::size_t>> one_hot_groups;
  std::vector<RawColumn> attributes;
  RawColumn label;
  bool encoded = false;

  const RawColumn& attribute(std::string_view name) const;
  bool has_attribute(std::string_view name) const;
  std::vector<std::string> attribute_names() const;
  /// Throws DataError when a column length disagrees with n_rows.
  void validate() const;
};

/// Fixed value written into continuous feature cells that are missing.
inline constexpr double kMissingPlaceholder = -1.0;
/// Categorical features with more distinct values than this are rejected.
inline constexpr std::size_t kMaxOneHotLevels = 1000;

Dataset load_csv(const std::filesystem::path& path, std::span<const ColumnSchema> schema);

/// Expands categorical features to one-hot columns and gives each continuous
/// feature with missing cells a "<name> missing" indicator. No-op when the
/// dataset is already encoded.
Dataset encode_features(const Dataset& ds);

/// Rows where `attr` is present.
std::vector<std::size_t> rows_with_attribute(const Dataset& ds, std::string_view attr);
/// Rows where every listed attribute is present (strict exclusion).
std::vector<std::size_t> rows_with_all_attributes(const Dataset& ds,
                                                  std::span<const std::string> attrs);

/// Writes the raw columns of `ds` (features, attributes, label, in that order)
/// as CSV with a header. Missing cells are written as `missing_token`.
void write_csv(const Dataset& ds, const std::filesystem::path& path,
               std::string_view missing_token = "");
std::vector<ColumnSchema> schema_of(const Dataset& ds);

/// Content hash over the raw columns, independent of encoding.
std::uint64_t fingerprint(const Dataset& ds);

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m, std::span<const std::size_t> rows);

}  // namespace gaudit
