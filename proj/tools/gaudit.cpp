// gaudit: command-line front end for the attribute audit.
//
//   gaudit audit     --config run.json [--seed N] [--jobs N] [--out DIR]
//   gaudit calibrate --config run.json [--markers report.json]
//   gaudit split     --config run.json [--report report.json]
//   gaudit utility   --config run.json
//   gaudit generate  --kind chain --n 20000 --seed 1 --out data/chain.csv
//
// Exit codes: 0 success, 2 configuration or data error, 1 anything else.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "gaudit/audit_engine.hpp"
#include "gaudit/calibration.hpp"
#include "gaudit/config.hpp"
#include "gaudit/csv.hpp"
#include "gaudit/errors.hpp"
#include "gaudit/report.hpp"
#include "gaudit/seeding.hpp"
#include "gaudit/split_probe.hpp"
#include "gaudit/synthgen.hpp"

namespace fs = std::filesystem;
using namespace gaudit;

namespace {

constexpr const char* kOutputEnv = "GAUDIT_OUTPUT_DIR";

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags.seed, "master seed (overrides the config)");
  cmd->add_option("--jobs", flags.jobs, "worker threads (0 = all cores)");
  cmd->add_option("--out", flags.out, "output directory");
}

// --out, then $GAUDIT_OUTPUT_DIR, then output.dir from the config.
AuditConfig load_config(const CommonFlags& flags) {
  AuditConfig cfg = parse_config(flags.config);
  if (flags.seed) {
    cfg.audit.seed = *flags.seed;
    if (cfg.calibration) cfg.calibration->config.seed = *flags.seed;
  }
  if (flags.jobs) cfg.audit.jobs = *flags.jobs;
  if (!flags.out.empty()) {
    cfg.output_dir = flags.out;
  } else if (const char* env = std::getenv(kOutputEnv); env && *env) {
    cfg.output_dir = env;
  }
  return cfg;
}

Dataset load_data(const AuditConfig& cfg) {
  Dataset ds = load_csv(cfg.data_path, cfg.schema);
  std::cerr << "loaded " << ds.n_rows << " rows from " << cfg.data_path.string() << "\n";
  return encode_features(ds);
}

std::vector<ModelFamily> families_of(const AuditOptions& a) {
  std::vector<ModelFamily> out;
  for (const auto& m : a.models) out.push_back(m.family);
  return out;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int cmd_audit(const CommonFlags& flags) {
  const AuditConfig cfg = load_config(flags);
  const Dataset ds = load_data(cfg);
  Stopwatch clock;
  const AuditReport report = run_audit(ds, cfg.audit);
  const auto doc = audit_report_json(report, config_to_json(cfg));
  write_file_atomic(cfg.output_dir / "report.json", dump_json(doc));
  write_file_atomic(cfg.output_dir / "report.csv", audit_report_csv(report, families_of(cfg.audit)));
  write_file_atomic(cfg.output_dir / "scatter.svg", scatter_svg(report));
  for (const auto& a : report.attributes) {
    if (a.ok) {
      std::cerr << "  " << a.name << ": utility " << a.utility.ami << ", detectability " << a.detectability_ensemble
                << " (" << a.ensemble_family << ")\n";
    } else {
      std::cerr << "  " << a.name << ": failed: " << a.error << "\n";
    }
  }
  std::cerr << "audit finished in " << clock.seconds() << " s; wrote " << cfg.output_dir.string() << "\n";
  return 0;
}

int cmd_utility(const CommonFlags& flags) {
  const AuditConfig cfg = load_config(flags);
  const Dataset ds = load_data(cfg);
  const PreparedColumn label = prepare_label(ds, cfg.audit.prep);
  std::vector<int> label_by_row(ds.n_rows, -1);
  for (std::size_t j = 0; j < label.rows.size(); ++j) label_by_row[label.rows[j]] = label.series.codes[j];
  const auto names = cfg.audit.attributes.empty() ? ds.attribute_names() : cfg.audit.attributes;

  std::string csv = "attribute,utility_ami,utility_mi_nats,utility_ci_low,utility_ci_high,n_used,warnings\n";
  for (const auto& name : names) {
    std::vector<std::string> row = {name};
    try {
      const PreparedColumn a = prepare_attribute(ds, name, cfg.audit.prep, &label.rows);
      CategoricalSeries y;
      y.names = label.series.names;
      for (auto r : a.rows) y.codes.push_back(label_by_row[r]);
      const UtilityResult u =
          compute_utility(a.series, y, cfg.audit.bootstrap_replicates,
                          derive_seed(cfg.audit.seed, {std::string_view(name), std::string_view("utility")}),
                          cfg.audit.normalization, cfg.audit.jobs);
      auto warnings = a.warnings;
      warnings.insert(warnings.end(), u.warnings.begin(), u.warnings.end());
      std::string w;
      for (const auto& s : warnings) w += (w.empty() ? "" : "; ") + s;
      row.insert(row.end(), {format_number(u.score.ami), format_number(u.score.mi), format_number(u.ci_low),
                             format_number(u.ci_high), std::to_string(a.rows.size()), w});
    } catch (const InsufficientData& e) {
      row.insert(row.end(), {"", "", "", "", "0", std::string("error: ") + e.what()});
    }
    csv += csv_join(row) + "\n";
  }
  write_file_atomic(cfg.output_dir / "utility.csv", csv);
  std::cerr << "wrote " << (cfg.output_dir / "utility.csv").string() << "\n";
  return 0;
}

int cmd_calibrate(const CommonFlags& flags, const std::string& markers_flag) {
  AuditConfig cfg = load_config(flags);
  CalibrationSection section = cfg.calibration.value_or(CalibrationSection{});
  if (!cfg.calibration) {
    section.config.seed = cfg.audit.seed;
    section.config.folds = cfg.audit.folds;
  }
  section.config.jobs = cfg.audit.jobs;
  if (!markers_flag.empty()) section.markers_from = markers_flag;
  std::vector<std::pair<std::string, double>> markers;
  if (!section.markers_from.empty()) markers = read_utility_markers(section.markers_from);

  const Dataset ds = load_data(cfg);
  Stopwatch clock;
  const CalibrationCurve curve = run_calibration(ds, section.config);
  write_file_atomic(cfg.output_dir / "calibration.csv", calibration_csv(curve));
  write_file_atomic(cfg.output_dir / "calibration.json", dump_json(calibration_json(curve)));
  write_file_atomic(cfg.output_dir / "calibration.svg", calibration_svg(curve, markers));
  for (const auto& r : curve.rows) {
    if (r.ok()) {
      std::cerr << "  flip " << r.flip_fraction << ": utility " << r.utility.ami << ", auc drop " << r.auc_drop << "\n";
    } else {
      std::cerr << "  flip " << r.flip_fraction << ": failed: " << r.error << "\n";
    }
  }
  std::cerr << "calibration finished in " << clock.seconds() << " s\n";
  return 0;
}

int cmd_split(const CommonFlags& flags, const std::string& report_flag) {
  const AuditConfig cfg = load_config(flags);
  SplitSection section = cfg.split.value_or(SplitSection{SplitSection{}.task_model, cfg.audit.folds, {}});
  if (!report_flag.empty()) section.report = report_flag;
  PredictorSpec task = section.task_model;
  if (task.family != ModelFamily::mlp) {
    throw ConfigError("split.task_model: family '" + std::string(to_string(task.family)) +
                      "' has no hidden representation; use mlp");
  }
  const Dataset ds = load_data(cfg);
  task.seed = derive_seed(cfg.audit.seed, {std::string_view("split task model")});
  const FittedModel model = fit_task_model(ds, task);

  const auto names = cfg.audit.attributes.empty() ? ds.attribute_names() : cfg.audit.attributes;
  std::vector<ProbeResult> probes;
  for (const auto& name : names) {
    try {
      probes.push_back(split_probe(model, ds, name, section.folds, cfg.audit.seed, cfg.audit.prep, cfg.audit.jobs));
      std::cerr << "  " << name << ": probe macro-F1 " << probes.back().macro_f1 << " (chance "
                << probes.back().chance_f1 << ")\n";
    } catch (const InsufficientData& e) {
      std::cerr << "  " << name << ": skipped: " << e.what() << "\n";
    }
  }
  std::optional<double> rho;
  if (!section.report.empty()) {
    rho = correlate_detectability(read_audit_summary(section.report), probes);
    std::cerr << "  spearman rho (detectability vs probe F1): " << *rho << "\n";
  }
  write_file_atomic(cfg.output_dir / "split.csv", split_csv(probes, rho));
  return 0;
}

struct GenerateFlags {
  std::string kind;
  std::size_t n = 20000;
  std::uint64_t seed = 0;
  std::string out;
  double p = 0.1;
  int copies = 1;
  int distractors = 0;
  std::string joint = "0.4,0.1;0.1,0.4";
  std::size_t features = 40;
  std::size_t attributes = 10;
};

Eigen::MatrixXd parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream rows_in(text);
  std::string row;
  while (std::getline(rows_in, row, ';')) {
    std::vector<double> values;
    std::stringstream cells(row);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError("--joint: '" + cell + "' is not a number");
      }
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty() || rows[0].empty()) throw ConfigError("--joint: empty table");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ConfigError("--joint: rows have different lengths");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

int cmd_generate(const GenerateFlags& g) {
  SyntheticData data;
  std::string direction = "causal";
  if (g.kind == "chain") {
    data = chain_dataset(g.n, g.seed);
    direction = "anticausal";
  } else if (g.kind == "collider") {
    data = collider_dataset(g.n, g.seed);
  } else if (g.kind == "channel") {
    data = channel_dataset(g.n, ChannelSpec{g.p, g.copies, g.distractors}, g.seed);
  } else if (g.kind == "joint") {
    data = joint_dataset(JointSpec::from_probabilities(parse_matrix(g.joint)), g.n, g.seed);
  } else if (g.kind == "planted") {
    data = planted_suite(g.n, g.seed);
  } else if (g.kind == "shortcut") {
    data = shortcut_dataset(g.n, g.seed);
  } else if (g.kind == "weak_signal") {
    data = weak_signal_dataset(g.n, g.seed);
  } else if (g.kind == "ehr_like") {
    data = ehr_like_dataset(g.n, g.features, g.attributes, g.seed);
  } else {
    throw ConfigError("--kind: unknown generator '" + g.kind + "'");
  }
  const fs::path out = g.out;
  write_csv(data.dataset, out);

  nlohmann::ordered_json truth;
  truth["kind"] = data.kind;
  truth["rows"] = data.dataset.n_rows;
  truth["seed"] = g.seed;
  nlohmann::ordered_json values = nlohmann::ordered_json::object();
  for (const auto& [k, v] : data.truth) values[k] = v;
  truth["analytic"] = values;
  nlohmann::ordered_json notes = nlohmann::ordered_json::object();
  for (const auto& [k, v] : data.notes) notes[k] = v;
  truth["notes"] = notes;
  fs::path sidecar = out;
  sidecar.replace_extension(".truth.json");
  write_file_atomic(sidecar, dump_json(truth));

  // a ready-to-run config next to the data
  nlohmann::ordered_json cfg;
  nlohmann::ordered_json columns = nlohmann::ordered_json::array();
  for (const auto& c : schema_of(data.dataset)) {
    columns.push_back({{"name", c.name}, {"role", std::string(to_string(c.role))}, {"kind", std::string(to_string(c.kind))}});
  }
  cfg["data"] = {{"path", out.filename().string()}, {"schema", columns}};
  cfg["direction"] = direction;
  cfg["seed"] = g.seed;
  fs::path cfg_path = out;
  cfg_path.replace_extension(".config.json");
  write_file_atomic(cfg_path, dump_json(cfg));
  std::cerr << "wrote " << out.string() << ", " << sidecar.string() << " and " << cfg_path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gaudit: audit metadata attributes for shortcut risk"};
  app.require_subcommand(1);

  CommonFlags audit_flags, util_flags, cal_flags, split_flags;
  std::string markers, split_report;
  GenerateFlags gen;

  auto* audit = app.add_subcommand("audit", "utility and detectability of every configured attribute");
  add_common(audit, audit_flags);
  auto* utility = app.add_subcommand("utility", "attribute/label utility only (no model training)");
  add_common(utility, util_flags);
  auto* calibrate = app.add_subcommand("calibrate", "worst-case AUC drop of a planted artifact vs. its utility");
  add_common(calibrate, cal_flags);
  calibrate->add_option("--markers", markers, "report.json whose utilities are drawn as markers");
  auto* split = app.add_subcommand("split", "linear probes on a frozen task model's hidden layer");
  add_common(split, split_flags);
  split->add_option("--report", split_report, "report.json for the detectability rank correlation");
  auto* generate = app.add_subcommand("generate", "write a synthetic dataset with known ground truth");
  generate->add_option("--kind", gen.kind, "chain | collider | channel | joint | planted | shortcut | weak_signal | ehr_like")
      ->required();
  generate->add_option("--n", gen.n, "rows");
  generate->add_option("--seed", gen.seed, "seed");
  generate->add_option("--out", gen.out, "output CSV path")->required();
  generate->add_option("--p", gen.p, "channel flip probability");
  generate->add_option("--copies", gen.copies, "channel copies");
  generate->add_option("--distractors", gen.distractors, "channel noise columns");
  generate->add_option("--joint", gen.joint, "joint table, rows separated by ';'");
  generate->add_option("--features", gen.features, "ehr_like feature columns");
  generate->add_option("--attributes", gen.attributes, "ehr_like attribute columns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*audit) return cmd_audit(audit_flags);
    if (*utility) return cmd_utility(util_flags);
    if (*calibrate) return cmd_calibrate(cal_flags, markers);
    if (*split) return cmd_split(split_flags, split_report);
    if (*generate) return cmd_generate(gen);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const InsufficientData& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
