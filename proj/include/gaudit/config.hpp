#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "gaudit/audit_engine.hpp"
#include "gaudit/calibration.hpp"
#include "gaudit/dataset.hpp"

namespace gaudit {

struct CalibrationSection {
  CalibrationConfig config;
  std::filesystem::path markers_from;  // prior report.json whose utilities become markers
};

struct SplitSection {
  PredictorSpec task_model{ModelFamily::mlp, {}, 0};
  int folds = 3;
  std::filesystem::path report;  // prior report.json for the rank correlation
};

struct AuditConfig {
  std::filesystem::path data_path;
  std::vector<ColumnSchema> schema;
  AuditOptions audit;
  std::filesystem::path output_dir = "gaudit_out";
  std::optional<CalibrationSection> calibration;
  std::optional<SplitSection> split;
};

/// Reads and validates a JSON run configuration. Relative paths resolve
/// against the config file's directory. Throws ConfigError listing every
/// missing required key, or naming the first invalid or unknown one.
AuditConfig parse_config(const std::filesystem::path& path);
AuditConfig parse_config_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

/// Normalized configuration with every default spelled out.
nlohmann::ordered_json config_to_json(const AuditConfig& cfg);

/// Checks that configured attributes and binning targets name real columns.
void check_columns(const AuditConfig& cfg);

}  // namespace gaudit
