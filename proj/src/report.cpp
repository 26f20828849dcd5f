#include "gaudit/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "gaudit/csv.hpp"
#include "gaudit/errors.hpp"
#include "gaudit/seeding.hpp"
#include "gaudit/svg.hpp"

namespace gaudit {

using ojson = nlohmann::ordered_json;

namespace {

ojson score_json(const AmiScore& s) {
  ojson j;
  j["ami"] = s.ami;
  j["mi"] = s.mi;
  j["emi"] = s.emi;
  j["h_attribute"] = s.h_row;
  j["h_other"] = s.h_col;
  return j;
}

std::string join_warnings(const std::vector<std::string>& w) {
  std::string out;
  for (const auto& s : w) out += (out.empty() ? "" : "; ") + s;
  return out;
}

const FamilyDetectability* ensemble_entry(const AttributeAudit& a) {
  for (const auto& d : a.detectability) {
    if (std::string(to_string(d.family)) == a.ensemble_family) return &d;
  }
  return nullptr;
}

}  // namespace

ojson audit_report_json(const AuditReport& report, const ojson& config_echo) {
  ojson doc;
  doc["format"] = "gaudit-report";
  doc["version"] = 1;
  doc["seed"] = report.seed;
  doc["dataset"] = {{"rows", report.n_rows},
                    {"raw_feature_columns", report.raw_feature_columns},
                    {"encoded_feature_columns", report.encoded_feature_columns},
                    {"attribute_columns", report.attribute_columns},
                    {"content_hash", hex64(report.content_hash)}};
  doc["config"] = config_echo;
  doc["warnings"] = report.warnings;
  ojson attrs = ojson::array();
  for (const auto& a : report.attributes) {
    ojson j;
    j["attribute"] = a.name;
    j["ok"] = a.ok;
    if (!a.ok) j["error"] = a.error;
    j["mode"] = std::string(to_string(a.mode));
    j["n_used"] = a.n_used;
    j["categories"] = a.categories;
    if (a.ok) {
      ojson u = score_json(a.utility);
      u["ci_low"] = a.utility_ci_low;
      u["ci_high"] = a.utility_ci_high;
      j["utility"] = u;
      ojson d = ojson::object();
      for (const auto& f : a.detectability) {
        ojson s = score_json(f.score);
        s["ci_low"] = f.ci_low;
        s["ci_high"] = f.ci_high;
        d[std::string(to_string(f.family))] = s;
      }
      j["detectability"] = d;
      j["detectability_ensemble"] = a.detectability_ensemble;
      j["ensemble_family"] = a.ensemble_family;
      j["rank_score"] = a.rank_score;
    }
    j["warnings"] = a.warnings;
    attrs.push_back(std::move(j));
  }
  doc["attributes"] = attrs;
  return doc;
}

std::string dump_json(const ojson& doc) { return doc.dump(2) + "\n"; }

std::vector<std::string> audit_csv_columns(const std::vector<ModelFamily>& families) {
  std::vector<std::string> cols = {"attribute", "utility_ami", "utility_mi_nats", "utility_ci_low", "utility_ci_high"};
  for (auto f : families) cols.push_back("detectability_" + std::string(to_string(f)));
  for (const char* c : {"detectability_ensemble", "n_used", "mode", "warnings"}) cols.emplace_back(c);
  return cols;
}

std::string audit_report_csv(const AuditReport& report, const std::vector<ModelFamily>& families) {
  std::string out = csv_join(audit_csv_columns(families)) + "\n";
  for (const auto& a : report.attributes) {
    std::vector<std::string> row = {a.name};
    auto num = [&](double v) { row.push_back(a.ok ? format_number(v) : ""); };
    num(a.utility.ami);
    num(a.utility.mi);
    num(a.utility_ci_low);
    num(a.utility_ci_high);
    for (auto f : families) {
      auto it = std::find_if(a.detectability.begin(), a.detectability.end(),
                             [&](const FamilyDetectability& d) { return d.family == f; });
      row.push_back(it == a.detectability.end() ? "" : format_number(it->score.ami));
    }
    num(a.detectability_ensemble);
    row.push_back(std::to_string(a.n_used));
    row.emplace_back(to_string(a.mode));
    std::vector<std::string> w = a.warnings;
    if (!a.ok) w.insert(w.begin(), "error: " + a.error);
    row.push_back(join_warnings(w));
    out += csv_join(row) + "\n";
  }
  return out;
}

std::string scatter_svg(const AuditReport& report) {
  double lo_x = 0.0, hi_x = 1.0, lo_y = 0.0, hi_y = 1.0;
  for (const auto& a : report.attributes) {
    if (!a.ok) continue;
    lo_x = std::min({lo_x, a.utility_ci_low, a.utility.ami});
    hi_x = std::max({hi_x, a.utility_ci_high, a.utility.ami});
    const FamilyDetectability* e = ensemble_entry(a);
    lo_y = std::min(lo_y, e ? std::min(e->ci_low, a.detectability_ensemble) : a.detectability_ensemble);
    hi_y = std::max(hi_y, e ? std::max(e->ci_high, a.detectability_ensemble) : a.detectability_ensemble);
  }
  SvgPlot plot(640, 520, lo_x, hi_x, lo_y, hi_y);
  plot.title("Attribute detectability vs. utility");
  plot.axes("utility (AMI with label)", "detectability (max AMI over families)");
  for (const auto& a : report.attributes) {
    if (!a.ok) continue;
    const double x = a.utility.ami;
    const double y = a.detectability_ensemble;
    plot.line(a.utility_ci_low, y, a.utility_ci_high, y, "whisker");
    if (const FamilyDetectability* e = ensemble_entry(a)) plot.line(x, e->ci_low, x, e->ci_high, "whisker");
    plot.point(x, y, "point",
               "data-attribute=\"" + xml_escape(a.name) + "\" data-x=\"" + format_number(x) + "\" data-y=\"" +
                   format_number(y) + "\"");
    plot.label(x, y, a.name, "point-label");
  }
  return plot.str();
}

std::string calibration_csv(const CalibrationCurve& curve) {
  std::string out = "flip_fraction,utility_ami,auc_correlated,auc_counterfactual,auc_drop,ci_low_drop,ci_high_drop,error\n";
  for (const auto& r : curve.rows) {
    std::vector<std::string> row = {format_number(r.flip_fraction)};
    if (r.ok()) {
      for (double v : {r.utility.ami, r.auc_correlated, r.auc_counterfactual, r.auc_drop, r.ci_drop.low, r.ci_drop.high}) {
        row.push_back(format_number(v));
      }
    } else {
      row.resize(7);
    }
    row.push_back(r.error);
    out += csv_join(row) + "\n";
  }
  return out;
}

ojson calibration_json(const CalibrationCurve& curve) {
  ojson doc;
  doc["format"] = "gaudit-calibration";
  doc["folds"] = curve.folds;
  doc["task_model"] = curve.task_family;
  ojson rows = ojson::array();
  for (const auto& r : curve.rows) {
    ojson j;
    j["flip_fraction"] = r.flip_fraction;
    if (r.ok()) {
      j["n_flipped"] = r.n_flipped;
      j["utility_ami"] = r.utility.ami;
      j["utility_mi"] = r.utility.mi;
      j["auc_correlated"] = r.auc_correlated;
      j["auc_counterfactual"] = r.auc_counterfactual;
      j["auc_drop"] = r.auc_drop;
      j["ci_low_drop"] = r.ci_drop.low;
      j["ci_high_drop"] = r.ci_drop.high;
      j["ci_correlated"] = {r.ci_correlated.low, r.ci_correlated.high};
      j["ci_counterfactual"] = {r.ci_counterfactual.low, r.ci_counterfactual.high};
      j["fold_drops"] = r.fold_drops;
    } else {
      j["error"] = r.error;
    }
    rows.push_back(std::move(j));
  }
  doc["rows"] = rows;
  return doc;
}

std::string calibration_svg(const CalibrationCurve& curve, const std::vector<std::pair<std::string, double>>& markers) {
  double lo_y = 0.0, hi_y = 1.0, lo_x = 0.0, hi_x = 1.0;
  for (const auto& r : curve.rows) {
    if (!r.ok()) continue;
    lo_y = std::min(lo_y, r.ci_drop.low);
    hi_y = std::max(hi_y, r.ci_drop.high);
    lo_x = std::min(lo_x, r.utility.ami);
  }
  for (const auto& m : markers) {
    lo_x = std::min(lo_x, m.second);
    hi_x = std::max(hi_x, m.second);
  }
  SvgPlot plot(640, 480, lo_x, hi_x, lo_y, hi_y);
  plot.title("Worst-case AUC drop vs. utility of a planted artifact");
  plot.axes("utility (AMI of planted attribute with label)", "AUC drop (correlated - counterfactual)");
  plot.line(lo_x, 0.0, hi_x, 0.0, "zero");
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : curve.rows) {
    if (!r.ok()) continue;
    pts.emplace_back(r.utility.ami, r.auc_drop);
  }
  std::sort(pts.begin(), pts.end());
  plot.polyline(pts, "curve");
  for (const auto& r : curve.rows) {
    if (!r.ok()) continue;
    plot.line(r.utility.ami, r.ci_drop.low, r.utility.ami, r.ci_drop.high, "whisker");
    plot.point(r.utility.ami, r.auc_drop, "point",
               "data-flip-fraction=\"" + format_number(r.flip_fraction) + "\" data-x=\"" + format_number(r.utility.ami) +
                   "\" data-y=\"" + format_number(r.auc_drop) + "\"");
  }
  for (const auto& [name, u] : markers) {
    plot.line(u, lo_y, u, hi_y, "marker",
              "data-attribute=\"" + xml_escape(name) + "\" data-utility=\"" + format_number(u) + "\"");
    plot.label(u, hi_y, name, "marker-label");
  }
  return plot.str();
}

namespace {

ojson read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read report '" + path.string() + "'");
  try {
    return ojson::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError("report '" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

std::vector<std::pair<std::string, double>> read_utility_markers(const std::filesystem::path& report_json) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& a : read_audit_summary(report_json).attributes) out.emplace_back(a.name, a.utility.ami);
  return out;
}

AuditReport read_audit_summary(const std::filesystem::path& report_json) {
  const ojson doc = read_json(report_json);
  if (!doc.contains("attributes") || !doc["attributes"].is_array()) {
    throw ConfigError("report '" + report_json.string() + "' has no attribute list");
  }
  AuditReport out;
  for (const auto& j : doc["attributes"]) {
    if (!j.value("ok", false)) continue;
    AttributeAudit a;
    a.name = j.at("attribute").get<std::string>();
    a.utility.ami = j.at("utility").at("ami").get<double>();
    a.detectability_ensemble = j.at("detectability_ensemble").get<double>();
    out.attributes.push_back(std::move(a));
  }
  return out;
}

std::string split_csv(const std::vector<ProbeResult>& probes, std::optional<double> rho) {
  std::string out = "attribute,macro_f1,accuracy,chance_f1,majority_f1,n_used\n";
  for (const auto& p : probes) {
    out += csv_join({p.attribute, format_number(p.macro_f1), format_number(p.accuracy), format_number(p.chance_f1),
                     format_number(p.majority_f1), std::to_string(p.n_used)}) +
           "\n";
  }
  if (rho) out += "# spearman_rho," + format_number(*rho) + "\n";
  return out;
}

}  // namespace gaudit
