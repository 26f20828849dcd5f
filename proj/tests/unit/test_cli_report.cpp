#include <doctest.h>

#include <cstdlib>
#include <json.hpp>
#include <regex>

#include "gaudit/config.hpp"
#include "gaudit/errors.hpp"
#include "gaudit/report.hpp"
#include "gaudit/synthgen.hpp"
#include "support.hpp"

using namespace gaudit;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

json minimal_config() {
  return json::parse(R"({
    "data": {"path": "d.csv", "schema": [
      {"name": "x", "role": "feature"},
      {"name": "a", "role": "attribute", "kind": "categorical"},
      {"name": "y", "role": "label"}]},
    "direction": "causal"})");
}

std::string config_error(const json& doc) {
  try {
    parse_config_json(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const std::string kCli = GAUDIT_CLI_PATH;

std::string cli(const std::string& args) { return "\"" + kCli + "\" " + args; }

// Generates a dataset through the CLI and returns the path of its config
// after applying `edit`.
template <typename Edit>
fs::path generated_config(const fs::path& dir, const std::string& gen_args, Edit edit) {
  REQUIRE(testutil::run(cli("generate " + gen_args + " --out \"" + (dir / "data.csv").string() + "\"")) == 0);
  json cfg = json::parse(testutil::slurp(dir / "data.config.json"));
  edit(cfg);
  const fs::path path = dir / "run.json";
  testutil::spit(path, cfg.dump(2));
  return path;
}

void quick(json& cfg) {
  cfg["models"] = {"logistic_regression", "naive_bayes"};
  cfg["bootstrap"] = {{"replicates", 50}};
}

struct Point {
  double cx = 0, cy = 0;
};

Point point_of(const std::string& svg, const std::string& attribute) {
  const std::regex re("<circle class=\"point\" cx=\"([-0-9.]+)\" cy=\"([-0-9.]+)\"[^>]*data-attribute=\"" + attribute + "\"");
  std::smatch m;
  REQUIRE(std::regex_search(svg, m, re));
  return {std::stod(m[1]), std::stod(m[2])};
}

}  // namespace

TEST_SUITE("cli_report") {

TEST_CASE("minimal config gets the defaults") {
  const AuditConfig cfg = parse_config_json(minimal_config());
  CHECK(cfg.audit.folds == 3);
  CHECK(cfg.audit.bootstrap_replicates == 1000);
  CHECK(cfg.audit.prep.min_count == 100);
  REQUIRE(cfg.audit.models.size() == 4);
  CHECK(cfg.audit.models[0].family == ModelFamily::logistic_regression);
  CHECK(cfg.audit.models[3].family == ModelFamily::mlp);
  CHECK(cfg.audit.direction == DirectionMode::causal_x_to_y);
  CHECK(cfg.schema.size() == 3);
}

TEST_CASE("config validation errors") {
  json doc = minimal_config();
  doc["direction"] = "sideways";
  CHECK(config_error(doc).find("direction") != std::string::npos);

  doc = minimal_config();
  doc["folds"] = 1;
  CHECK(config_error(doc).find("K must be ≥ 2") != std::string::npos);

  doc = minimal_config();
  doc["fold"] = 3;
  CHECK(config_error(doc).find("unknown key 'fold'") != std::string::npos);

  doc = minimal_config();
  doc["bootstrap"] = {{"replicate", 10}};
  CHECK(config_error(doc).find("bootstrap.replicate") != std::string::npos);

  const std::string missing = config_error(json::object());
  CHECK(missing.find("data.path") != std::string::npos);
  CHECK(missing.find("data.schema") != std::string::npos);
  CHECK(missing.find("direction") != std::string::npos);

  doc = minimal_config();
  doc["attributes"] = {"b"};
  CHECK(config_error(doc).find("'b'") != std::string::npos);

  doc = minimal_config();
  doc["models"] = json::array();
  CHECK_FALSE(config_error(doc).empty());
}

TEST_CASE("normalized config parses back to itself") {
  json doc = minimal_config();
  doc["models"] = {"naive_bayes", {{"family", "decision_tree"}, {"hyperparameters", {{"max_depth", 4}}}}};
  doc["seed"] = 9;
  const auto once = config_to_json(parse_config_json(doc));
  const auto twice = config_to_json(parse_config_json(json::parse(once.dump())));
  CHECK(once.dump() == twice.dump());
}

TEST_CASE("report.csv column order") {
  const auto cols = audit_csv_columns({ModelFamily::logistic_regression, ModelFamily::decision_tree,
                                       ModelFamily::naive_bayes, ModelFamily::mlp});
  std::string joined;
  for (const auto& c : cols) joined += (joined.empty() ? "" : ",") + c;
  CHECK(joined ==
        "attribute,utility_ami,utility_mi_nats,utility_ci_low,utility_ci_high,detectability_logistic_regression,"
        "detectability_decision_tree,detectability_naive_bayes,detectability_mlp,detectability_ensemble,n_used,mode,"
        "warnings");
}

TEST_CASE("split.csv layout") {
  ProbeResult p;
  p.attribute = "a";
  p.macro_f1 = 0.5;
  p.accuracy = 0.5;
  p.chance_f1 = 0.5;
  p.majority_f1 = 1.0 / 3.0;
  p.n_used = 10;
  const auto lines = testutil::lines_of(split_csv({p}, 1.0));
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "attribute,macro_f1,accuracy,chance_f1,majority_f1,n_used");
  CHECK(lines[2] == "# spearman_rho,1");
  CHECK(testutil::lines_of(split_csv({p}, std::nullopt)).size() == 2);
}

TEST_CASE("report json round trip and scatter placement") {
  const auto data = shortcut_dataset(3000, 4);
  AuditOptions opts;
  opts.models = {PredictorSpec{ModelFamily::logistic_regression, {}, 0}};
  opts.bootstrap_replicates = 50;
  opts.seed = 2;
  const AuditReport report = run_audit(encode_features(data.dataset), opts);
  const std::string text = dump_json(audit_report_json(report, nlohmann::ordered_json::object()));
  CHECK(dump_json(nlohmann::ordered_json::parse(text)) == text);

  const std::string svg = scatter_svg(report);
  const Point shortcut = point_of(svg, "shortcut");
  const Point noise = point_of(svg, "noise");
  CHECK(shortcut.cx > noise.cx);
  CHECK(shortcut.cy < noise.cy);  // svg y grows downwards

  const auto lines = testutil::lines_of(audit_report_csv(report, {ModelFamily::logistic_regression}));
  CHECK(lines.size() == 3);
  CHECK(lines[1].rfind("shortcut,", 0) == 0);
}

TEST_CASE("cli audit end to end") {
  const fs::path dir = testutil::temp_dir("cli_audit");
  const fs::path cfg = generated_config(dir, "--kind planted --n 1500 --seed 2", quick);
  const std::string base = cli("audit --config \"" + cfg.string() + "\"");
  REQUIRE(testutil::run(base + " --out \"" + (dir / "o1").string() + "\"") == 0);
  REQUIRE(testutil::run(base + " --jobs 3 --out \"" + (dir / "o2").string() + "\"") == 0);
  const std::string report = testutil::slurp(dir / "o1" / "report.json");
  CHECK(report == testutil::slurp(dir / "o2" / "report.json"));
  CHECK(testutil::slurp(dir / "o1" / "report.csv") == testutil::slurp(dir / "o2" / "report.csv"));
  CHECK(testutil::lines_of(testutil::slurp(dir / "o1" / "report.csv")).size() == 7);
  CHECK(fs::exists(dir / "o1" / "scatter.svg"));
  CHECK(dump_json(nlohmann::ordered_json::parse(report)) == report);
  for (const auto& entry : fs::directory_iterator(dir / "o1")) CHECK(entry.path().extension() != ".tmp");

  REQUIRE(testutil::run(base + " --seed 5 --out \"" + (dir / "o3").string() + "\"") == 0);
  CHECK(testutil::slurp(dir / "o3" / "report.json") != report);

  ::setenv("GAUDIT_OUTPUT_DIR", (dir / "env").string().c_str(), 1);
  const int status = testutil::run(base);
  ::unsetenv("GAUDIT_OUTPUT_DIR");
  CHECK(status == 0);
  CHECK(fs::exists(dir / "env" / "report.json"));

  REQUIRE(testutil::run(cli("utility --config \"" + cfg.string() + "\" --out \"" + (dir / "u").string() + "\"")) == 0);
  CHECK(testutil::lines_of(testutil::slurp(dir / "u" / "utility.csv")).size() == 7);
}

TEST_CASE("cli exit codes") {
  const fs::path dir = testutil::temp_dir("cli_exit");
  testutil::spit(dir / "bad.json", R"({"data": {"path": "d.csv", "schema": []}, "direction": "sideways"})");
  CHECK(testutil::run(cli("audit --config \"" + (dir / "bad.json").string() + "\"")) == 2);
  testutil::spit(dir / "broken.json", "{ not json");
  CHECK(testutil::run(cli("audit --config \"" + (dir / "broken.json").string() + "\"")) == 2);
  const fs::path cfg = generated_config(dir, "--kind chain --n 300 --seed 1", [](json& c) {
    c["data"]["path"] = "absent.csv";
  });
  CHECK(testutil::run(cli("audit --config \"" + cfg.string() + "\"")) == 2);
  CHECK(testutil::run(cli("generate --kind nonsense --out \"" + (dir / "x.csv").string() + "\"")) == 2);
  CHECK(testutil::run(cli("frobnicate")) == 2);
}

TEST_CASE("cli calibrate with markers") {
  const fs::path dir = testutil::temp_dir("cli_cal");
  const fs::path cfg = generated_config(dir, "--kind weak_signal --n 1200 --seed 3", [](json& c) {
    quick(c);
    c["calibration"] = {{"task_model", "logistic_regression"}};
  });
  json report = json::parse(R"({"attributes": [
    {"attribute": "age", "ok": true, "utility": {"ami": 0.12}, "detectability_ensemble": 0.5},
    {"attribute": "site", "ok": true, "utility": {"ami": 0.4}, "detectability_ensemble": 0.9}]})");
  testutil::spit(dir / "prior.json", report.dump());
  REQUIRE(testutil::run(cli("calibrate --config \"" + cfg.string() + "\" --markers \"" + (dir / "prior.json").string() +
                            "\" --out \"" + (dir / "o").string() + "\"")) == 0);
  const auto lines = testutil::lines_of(testutil::slurp(dir / "o" / "calibration.csv"));
  CHECK(lines.size() == 9);
  const std::string svg = testutil::slurp(dir / "o" / "calibration.svg");
  CHECK(svg.find("<line class=\"marker\"") != std::string::npos);
  CHECK(svg.find("data-attribute=\"site\" data-utility=\"0.4\"") != std::string::npos);
  CHECK(fs::exists(dir / "o" / "calibration.json"));
}

TEST_CASE("cli split with rank correlation") {
  const fs::path dir = testutil::temp_dir("cli_split");
  const fs::path cfg = generated_config(dir, "--kind planted --n 1500 --seed 6", quick);
  const std::string out = "\"" + (dir / "o").string() + "\"";
  REQUIRE(testutil::run(cli("audit --config \"" + cfg.string() + "\" --out " + out)) == 0);
  REQUIRE(testutil::run(cli("split --config \"" + cfg.string() + "\" --report \"" + (dir / "o" / "report.json").string() +
                            "\" --out " + out)) == 0);
  const auto lines = testutil::lines_of(testutil::slurp(dir / "o" / "split.csv"));
  REQUIRE(lines.size() == 8);
  CHECK(lines.back().rfind("# spearman_rho,", 0) == 0);

  json c = json::parse(testutil::slurp(cfg));
  c["split"] = {{"task_model", "decision_tree"}};
  testutil::spit(dir / "tree.json", c.dump());
  CHECK(testutil::run(cli("split --config \"" + (dir / "tree.json").string() + "\" --out " + out)) == 2);
}

TEST_CASE("cli generate") {
  const fs::path dir = testutil::temp_dir("cli_gen");
  const auto gen = [&](const std::string& args, const std::string& name) {
    REQUIRE(testutil::run(cli("generate " + args + " --out \"" + (dir / name).string() + "\"")) == 0);
  };
  gen("--kind collider --n 2000 --seed 7", "c1.csv");
  gen("--kind collider --n 2000 --seed 7", "c2.csv");
  CHECK(testutil::slurp(dir / "c1.csv") == testutil::slurp(dir / "c2.csv"));
  CHECK(testutil::slurp(dir / "c1.truth.json") == testutil::slurp(dir / "c2.truth.json"));

  gen("--kind chain --n 20000 --seed 1", "chain.csv");
  CHECK(testutil::lines_of(testutil::slurp(dir / "chain.csv")).size() == 20001);
  const json chain = json::parse(testutil::slurp(dir / "chain.truth.json"));
  CHECK(chain["analytic"]["conditional_mi_a_x_given_y"].get<double>() == 0.0);

  gen("--kind joint --joint \"0.4,0.1;0.1,0.4\" --n 1000 --seed 1", "joint.csv");
  const json joint = json::parse(testutil::slurp(dir / "joint.truth.json"));
  CHECK(joint["analytic"]["analytic_mi"].get<double>() == doctest::Approx(0.192745).epsilon(1e-6));

  CHECK(testutil::run(cli("generate --kind joint --joint \"0.5,0.1;0.1,0.4\" --out \"" + (dir / "j.csv").string() + "\"")) == 2);
  CHECK(testutil::run(cli("generate --kind channel --p 0.7 --out \"" + (dir / "ch.csv").string() + "\"")) == 2);
}

}  // TEST_SUITE
