#include "gaudit/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "gaudit/errors.hpp"

namespace gaudit {

namespace {

using json = nlohmann::json;

// Rejects keys outside `allowed` in the object at `where`.
void only_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

std::string join_key(const std::string& where, std::string_view key) {
  return where.empty() ? std::string(key) : where + "." + std::string(key);
}

std::string get_string(const json& obj, const std::string& where, std::string_view key) {
  const json& v = obj.at(std::string(key));
  if (!v.is_string()) throw ConfigError(join_key(where, key) + ": expected a string");
  return v.get<std::string>();
}

std::int64_t get_int(const json& obj, const std::string& where, std::string_view key) {
  const json& v = obj.at(std::string(key));
  if (!v.is_number_integer()) throw ConfigError(join_key(where, key) + ": expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t get_seed(const json& obj, const std::string& where, std::string_view key) {
  const json& v = obj.at(std::string(key));
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError(join_key(where, key) + ": expected a non-negative integer");
}

double get_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  return v.get<double>();
}

bool get_bool(const json& obj, const std::string& where, std::string_view key) {
  const json& v = obj.at(std::string(key));
  if (!v.is_boolean()) throw ConfigError(join_key(where, key) + ": expected true or false");
  return v.get<bool>();
}

template <typename Parse>
auto parse_field(const json& obj, const std::string& where, std::string_view key, Parse parse) {
  const std::string text = get_string(obj, where, key);
  try {
    return parse(text);
  } catch (const std::exception&) {
    throw ConfigError(join_key(where, key) + ": invalid value '" + text + "'");
  }
}

int parse_folds(const json& obj, const std::string& where) {
  const std::int64_t k = get_int(obj, where, "folds");
  if (k < 2) throw ConfigError("K must be ≥ 2 (" + join_key(where, "folds") + " = " + std::to_string(k) + ")");
  return static_cast<int>(k);
}

PredictorSpec parse_model(const json& v, const std::string& where) {
  PredictorSpec spec;
  if (v.is_string()) {
    spec.family = parse_family(v.get<std::string>());
  } else {
    only_keys(v, where, {"family", "hyperparameters"});
    if (!v.contains("family")) throw ConfigError("missing required key '" + join_key(where, "family") + "'");
    spec.family = parse_family(get_string(v, where, "family"));
    if (v.contains("hyperparameters")) {
      const json& hp = v.at("hyperparameters");
      if (!hp.is_object()) throw ConfigError(where + ".hyperparameters: expected an object");
      for (const auto& [name, value] : hp.items()) {
        spec.hyperparameters[name] = get_number(value, where + ".hyperparameters." + name);
      }
    }
  }
  try {
    complete(spec);
  } catch (const std::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return spec;
}

BinningChoice parse_binning(const json& v, const std::string& where) {
  only_keys(v, where, {"strategy", "width", "edges"});
  BinningChoice choice;
  const std::string strategy = v.contains("strategy") ? get_string(v, where, "strategy") : "freedman_diaconis";
  if (strategy == "freedman_diaconis") {
    choice.strategy = BinningStrategy::freedman_diaconis;
  } else if (strategy == "fixed_width") {
    choice.strategy = BinningStrategy::fixed_width;
    if (!v.contains("width")) throw ConfigError("missing required key '" + join_key(where, "width") + "'");
    choice.width = get_number(v.at("width"), join_key(where, "width"));
    if (!(choice.width > 0.0)) throw ConfigError(join_key(where, "width") + " must be > 0");
  } else if (strategy == "explicit") {
    choice.strategy = BinningStrategy::explicit_edges;
    if (!v.contains("edges") || !v.at("edges").is_array()) {
      throw ConfigError(join_key(where, "edges") + ": expected an array of numbers");
    }
    for (const auto& e : v.at("edges")) choice.edges.push_back(get_number(e, join_key(where, "edges")));
    try {
      explicit_bins(choice.edges);
    } catch (const std::exception& e) {
      throw ConfigError(join_key(where, "edges") + ": " + e.what());
    }
  } else {
    throw ConfigError(join_key(where, "strategy") + ": expected freedman_diaconis, fixed_width or explicit");
  }
  return choice;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

AuditConfig parse_config_json(const json& doc, const std::filesystem::path& base_dir) {
  only_keys(doc, "", {"data", "direction", "attributes", "models", "folds", "seed", "jobs", "bootstrap",
                      "rare_merge", "binning", "normalization", "missing_policy", "conditioned_score", "output",
                      "calibration", "split"});
  std::vector<std::string> missing;
  if (!doc.contains("data")) {
    missing.push_back("data.path");
    missing.push_back("data.schema");
  } else {
    only_keys(doc.at("data"), "data", {"path", "schema"});
    if (!doc.at("data").contains("path")) missing.push_back("data.path");
    if (!doc.at("data").contains("schema")) missing.push_back("data.schema");
  }
  if (!doc.contains("direction")) missing.push_back("direction");
  if (!missing.empty()) {
    std::string msg = "missing required keys:";
    for (const auto& m : missing) msg += " " + m;
    throw ConfigError(msg);
  }

  AuditConfig cfg;
  cfg.audit = AuditOptions::with_all_families();
  const json& data = doc.at("data");
  cfg.data_path = resolve(base_dir, get_string(data, "data", "path"));
  if (!data.at("schema").is_array()) throw ConfigError("data.schema: expected an array");
  std::size_t index = 0;
  for (const auto& c : data.at("schema")) {
    const std::string where = "data.schema[" + std::to_string(index++) + "]";
    only_keys(c, where, {"name", "role", "kind", "missing"});
    if (!c.contains("name") || !c.contains("role")) throw ConfigError(where + ": 'name' and 'role' are required");
    ColumnSchema col;
    col.name = get_string(c, where, "name");
    col.role = parse_field(c, where, "role", parse_role);
    if (c.contains("kind")) col.kind = parse_field(c, where, "kind", parse_kind);
    if (c.contains("missing")) col.missing_token = get_string(c, where, "missing");
    cfg.schema.push_back(std::move(col));
  }
  try {
    validate_schema(cfg.schema);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("data.schema: ") + e.what());
  }

  AuditOptions& a = cfg.audit;
  a.direction = parse_field(doc, "", "direction", parse_direction);
  if (doc.contains("attributes")) {
    if (!doc.at("attributes").is_array()) throw ConfigError("attributes: expected an array of names");
    for (const auto& v : doc.at("attributes")) {
      if (!v.is_string()) throw ConfigError("attributes: expected an array of names");
      a.attributes.push_back(v.get<std::string>());
    }
  }
  if (doc.contains("models")) {
    const json& models = doc.at("models");
    if (!models.is_array() || models.empty()) throw ConfigError("models: expected a non-empty array");
    a.models.clear();
    for (std::size_t i = 0; i < models.size(); ++i) {
      a.models.push_back(parse_model(models[i], "models[" + std::to_string(i) + "]"));
    }
  }
  if (doc.contains("folds")) a.folds = parse_folds(doc, "");
  if (doc.contains("seed")) a.seed = get_seed(doc, "", "seed");
  if (doc.contains("jobs")) {
    const auto jobs = get_int(doc, "", "jobs");
    if (jobs < 0) throw ConfigError("jobs must be >= 0");
    a.jobs = static_cast<std::size_t>(jobs);
  } else {
    a.jobs = 0;
  }
  if (doc.contains("bootstrap")) {
    only_keys(doc.at("bootstrap"), "bootstrap", {"replicates"});
    if (doc.at("bootstrap").contains("replicates")) {
      const auto r = get_int(doc.at("bootstrap"), "bootstrap", "replicates");
      if (r < 0) throw ConfigError("bootstrap.replicates must be >= 0");
      a.bootstrap_replicates = static_cast<int>(r);
    }
  }
  if (doc.contains("rare_merge")) {
    only_keys(doc.at("rare_merge"), "rare_merge", {"min_count"});
    if (doc.at("rare_merge").contains("min_count")) {
      const auto m = get_int(doc.at("rare_merge"), "rare_merge", "min_count");
      if (m < 0) throw ConfigError("rare_merge.min_count must be >= 0");
      a.prep.min_count = m;
    }
  }
  if (doc.contains("binning")) {
    const json& b = doc.at("binning");
    if (!b.is_object()) throw ConfigError("binning: expected an object keyed by column name");
    for (const auto& [name, v] : b.items()) a.prep.binning[name] = parse_binning(v, "binning." + name);
  }
  if (doc.contains("normalization")) a.normalization = parse_field(doc, "", "normalization", parse_normalization);
  if (doc.contains("missing_policy")) a.missing_policy = parse_field(doc, "", "missing_policy", parse_missing_policy);
  if (doc.contains("conditioned_score")) {
    a.conditioned_score = parse_field(doc, "", "conditioned_score", parse_conditioned_score);
  }
  if (doc.contains("output")) {
    only_keys(doc.at("output"), "output", {"dir"});
    if (doc.at("output").contains("dir")) cfg.output_dir = resolve(base_dir, get_string(doc.at("output"), "output", "dir"));
  } else {
    cfg.output_dir = resolve(base_dir, cfg.output_dir.string());
  }

  if (doc.contains("calibration")) {
    const json& c = doc.at("calibration");
    only_keys(c, "calibration", {"flip_fractions", "task_model", "folds", "artifact_placement", "include_artifact",
                                 "markers_from"});
    CalibrationSection section;
    section.config.seed = a.seed;
    section.config.folds = a.folds;
    if (c.contains("flip_fractions")) {
      if (!c.at("flip_fractions").is_array()) throw ConfigError("calibration.flip_fractions: expected an array");
      section.config.flip_fractions.clear();
      for (const auto& f : c.at("flip_fractions")) {
        section.config.flip_fractions.push_back(get_number(f, "calibration.flip_fractions"));
      }
    }
    if (c.contains("task_model")) section.config.task_model = parse_model(c.at("task_model"), "calibration.task_model");
    if (c.contains("folds")) section.config.folds = parse_folds(c, "calibration");
    if (c.contains("artifact_placement")) {
      section.config.placement = parse_artifact_placement(get_string(c, "calibration", "artifact_placement"));
    }
    if (c.contains("include_artifact")) section.config.include_artifact = get_bool(c, "calibration", "include_artifact");
    if (c.contains("markers_from")) section.markers_from = resolve(base_dir, get_string(c, "calibration", "markers_from"));
    section.config.validate();
    cfg.calibration = std::move(section);
  }
  if (doc.contains("split")) {
    const json& s = doc.at("split");
    only_keys(s, "split", {"task_model", "folds", "report"});
    SplitSection section;
    section.folds = a.folds;
    if (s.contains("task_model")) section.task_model = parse_model(s.at("task_model"), "split.task_model");
    if (s.contains("folds")) section.folds = parse_folds(s, "split");
    if (s.contains("report")) section.report = resolve(base_dir, get_string(s, "split", "report"));
    cfg.split = std::move(section);
  }
  check_columns(cfg);
  return cfg;
}

AuditConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config_json(doc, path.parent_path());
}

void check_columns(const AuditConfig& cfg) {
  auto find = [&](const std::string& name) -> const ColumnSchema* {
    for (const auto& c : cfg.schema) {
      if (c.name == name) return &c;
    }
    return nullptr;
  };
  for (const auto& name : cfg.audit.attributes) {
    const ColumnSchema* c = find(name);
    if (c == nullptr) throw ConfigError("attributes: column '" + name + "' is not in data.schema");
    if (c->role != ColumnRole::attribute) throw ConfigError("attributes: column '" + name + "' does not have role attribute");
  }
  for (const auto& [name, choice] : cfg.audit.prep.binning) {
    const ColumnSchema* c = find(name);
    if (c == nullptr) throw ConfigError("binning: column '" + name + "' is not in data.schema");
    if (c->kind != ColumnKind::continuous) throw ConfigError("binning: column '" + name + "' is not continuous");
  }
}

nlohmann::ordered_json config_to_json(const AuditConfig& cfg) {
  using ojson = nlohmann::ordered_json;
  auto model_json = [](const PredictorSpec& raw) {
    const PredictorSpec spec = complete(raw);
    ojson m;
    m["family"] = std::string(to_string(spec.family));
    ojson hp = ojson::object();
    for (const auto& [k, v] : spec.hyperparameters) hp[k] = v;
    m["hyperparameters"] = hp;
    return m;
  };
  const AuditOptions& a = cfg.audit;
  ojson out;
  ojson data;
  data["path"] = cfg.data_path.string();
  ojson columns = ojson::array();
  for (const auto& c : cfg.schema) {
    columns.push_back({{"name", c.name},
                       {"role", std::string(to_string(c.role))},
                       {"kind", std::string(to_string(c.kind))},
                       {"missing", c.missing_token}});
  }
  data["schema"] = columns;
  out["data"] = data;
  out["direction"] = std::string(to_string(a.direction));
  out["attributes"] = a.attributes;
  ojson models = ojson::array();
  for (const auto& m : a.models) models.push_back(model_json(m));
  out["models"] = models;
  out["folds"] = a.folds;
  out["seed"] = a.seed;
  out["bootstrap"] = {{"replicates", a.bootstrap_replicates}};
  out["rare_merge"] = {{"min_count", a.prep.min_count}};
  ojson binning = ojson::object();
  for (const auto& [name, b] : a.prep.binning) {
    ojson entry;
    switch (b.strategy) {
      case BinningStrategy::freedman_diaconis: entry["strategy"] = "freedman_diaconis"; break;
      case BinningStrategy::fixed_width:
        entry["strategy"] = "fixed_width";
        entry["width"] = b.width;
        break;
      case BinningStrategy::explicit_edges:
        entry["strategy"] = "explicit";
        entry["edges"] = b.edges;
        break;
    }
    binning[name] = entry;
  }
  out["binning"] = binning;
  out["normalization"] = std::string(to_string(a.normalization));
  out["missing_policy"] = std::string(to_string(a.missing_policy));
  out["conditioned_score"] = std::string(to_string(a.conditioned_score));
  if (cfg.calibration) {
    const CalibrationConfig& c = cfg.calibration->config;
    ojson cal;
    cal["flip_fractions"] = c.flip_fractions;
    cal["task_model"] = model_json(c.task_model);
    cal["folds"] = c.folds;
    cal["artifact_placement"] = std::string(to_string(c.placement));
    cal["include_artifact"] = c.include_artifact;
    out["calibration"] = cal;
  }
  if (cfg.split) {
    out["split"] = {{"task_model", model_json(cfg.split->task_model)}, {"folds", cfg.split->folds}};
  }
  return out;
}

}  // namespace gaudit
