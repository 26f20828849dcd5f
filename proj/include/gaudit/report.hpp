#pragma once

#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gaudit/audit_engine.hpp"
#include "gaudit/calibration.hpp"
#include "gaudit/split_probe.hpp"

namespace gaudit {

/// Full audit report; `config_echo` is embedded verbatim.
nlohmann::ordered_json audit_report_json(const AuditReport& report, const nlohmann::ordered_json& config_echo);
/// Pretty-printed JSON with a trailing newline (the on-disk form).
std::string dump_json(const nlohmann::ordered_json& doc);

/// report.csv columns: attribute, utility_ami, utility_mi_nats, utility_ci_low,
/// utility_ci_high, detectability_<family> for each family in order,
/// detectability_ensemble, n_used, mode, warnings.
std::vector<std::string> audit_csv_columns(const std::vector<ModelFamily>& families);
std::string audit_report_csv(const AuditReport& report, const std::vector<ModelFamily>& families);

/// Utility (x) against ensemble detectability (y), one labelled point per
/// attribute with CI whiskers. Points carry data-attribute, data-x, data-y.
std::string scatter_svg(const AuditReport& report);

/// Columns: flip_fraction, utility_ami, auc_correlated, auc_counterfactual,
/// auc_drop, ci_low_drop, ci_high_drop, error.
std::string calibration_csv(const CalibrationCurve& curve);
nlohmann::ordered_json calibration_json(const CalibrationCurve& curve);
/// auc_drop against realized utility; each marker becomes a vertical line.
std::string calibration_svg(const CalibrationCurve& curve, const std::vector<std::pair<std::string, double>>& markers);
/// (attribute, utility ami) pairs from a report.json written by the audit.
std::vector<std::pair<std::string, double>> read_utility_markers(const std::filesystem::path& report_json);

/// Columns: attribute, macro_f1, accuracy, chance_f1, majority_f1, n_used.
/// When `rho` is given a final "# spearman_rho,<value>" line is appended.
std::string split_csv(const std::vector<ProbeResult>& probes, std::optional<double> rho);

/// Reads back the ok attributes of a report.json as a minimal AuditReport
/// (name, detectability_ensemble, utility ami).
AuditReport read_audit_summary(const std::filesystem::path& report_json);

}  // namespace gaudit
