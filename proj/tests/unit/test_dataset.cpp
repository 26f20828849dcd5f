#include <doctest.h>

#include <random>

#include "gaudit/audit_engine.hpp"
#include "gaudit/dataset.hpp"
#include "gaudit/errors.hpp"
#include "gaudit/infotheory.hpp"
#include "support.hpp"

using namespace gaudit;

namespace {

std::vector<ColumnSchema> temp_schema() {
  return {{"temp", ColumnRole::feature, ColumnKind::continuous, ""},
          {"sex", ColumnRole::attribute, ColumnKind::categorical, ""},
          {"y", ColumnRole::label, ColumnKind::categorical, ""}};
}

std::filesystem::path write_temp_csv(const std::string& body) {
  const auto dir = testutil::temp_dir("dataset");
  const auto path = dir / "data.csv";
  testutil::spit(path, body);
  return path;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("three-row file with one feature, one attribute, one label") {
  const auto path = write_temp_csv("temp,sex,y\n36.6,F,0\n,M,1\n37.1,F,0\n");
  const Dataset ds = load_csv(path, temp_schema());
  CHECK(ds.n_rows == 3);
  REQUIRE(ds.raw_features.size() == 1);
  CHECK(ds.attributes.size() == 1);
  CHECK(ds.label.name == "y");
  CHECK(ds.raw_features[0].is_missing(1));
  CHECK_FALSE(ds.raw_features[0].is_missing(0));
}

TEST_CASE("continuous feature with a missing cell gets placeholder and indicator") {
  const auto path = write_temp_csv("temp,sex,y\n36.6,F,0\n,M,1\n37.1,F,0\n");
  const Dataset enc = encode_features(load_csv(path, temp_schema()));
  REQUIRE(enc.features.cols() == 2);
  CHECK(enc.feature_names[0] == "temp");
  CHECK(enc.feature_names[1] == "temp missing");
  CHECK(enc.features(0, 0) == doctest::Approx(36.6));
  CHECK(enc.features(1, 0) == kMissingPlaceholder);
  CHECK(enc.features(2, 0) == doctest::Approx(37.1));
  CHECK(enc.features(0, 1) == 0.0);
  CHECK(enc.features(1, 1) == 1.0);
  CHECK(enc.features(2, 1) == 0.0);
}

TEST_CASE("fully present continuous feature passes through without indicator") {
  const auto path = write_temp_csv("temp,sex,y\n1.5,F,0\n2.5,M,1\n");
  const Dataset enc = encode_features(load_csv(path, temp_schema()));
  CHECK(enc.features.cols() == 1);
  CHECK(enc.features(0, 0) == 1.5);
  CHECK(enc.features(1, 0) == 2.5);
}

TEST_CASE("categorical feature one-hot rows sum to one") {
  std::vector<ColumnSchema> schema = {{"color", ColumnRole::feature, ColumnKind::categorical, "NA"},
                                      {"a", ColumnRole::attribute, ColumnKind::categorical, ""},
                                      {"y", ColumnRole::label, ColumnKind::categorical, ""}};
  const auto path = write_temp_csv("color,a,y\nred,x,0\nblue,x,1\nNA,z,0\ngreen,z,1\nred,x,1\n");
  const Dataset enc = encode_features(load_csv(path, schema));
  CHECK(enc.features.cols() == 4);  // blue, green, red plus the missing level
  REQUIRE(enc.one_hot_groups.size() == 1);
  CHECK(enc.one_hot_groups[0].size() == 4);
  for (Eigen::Index i = 0; i < enc.features.rows(); ++i) CHECK(enc.features.row(i).sum() == 1.0);
  bool has_missing_level = false;
  for (const auto& n : enc.feature_names) has_missing_level |= n == "color missing";
  CHECK(has_missing_level);
}

TEST_CASE("encoding is idempotent") {
  const auto path = write_temp_csv("temp,sex,y\n36.6,F,0\n,M,1\n37.1,F,0\n");
  const Dataset once = encode_features(load_csv(path, temp_schema()));
  const Dataset twice = encode_features(once);
  CHECK(once.features == twice.features);
  CHECK(once.feature_names == twice.feature_names);
}

TEST_CASE("ingestion errors") {
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_csv("/nonexistent/nowhere.csv", temp_schema()), DataError);
  }
  SUBCASE("empty file") {
    CHECK_THROWS_AS(load_csv(write_temp_csv(""), temp_schema()), DataError);
  }
  SUBCASE("duplicate header") {
    CHECK_THROWS_WITH_AS(load_csv(write_temp_csv("temp,temp,sex,y\n1,2,F,0\n"), temp_schema()),
                         doctest::Contains("duplicate header"), DataError);
  }
  SUBCASE("header lacks a schema column") {
    CHECK_THROWS_AS(load_csv(write_temp_csv("temp,y\n1,0\n"), temp_schema()), DataError);
  }
  SUBCASE("ragged row") {
    CHECK_THROWS_AS(load_csv(write_temp_csv("temp,sex,y\n1,F\n"), temp_schema()), DataError);
  }
  SUBCASE("unparseable numeric names the line and column") {
    CHECK_THROWS_WITH_AS(load_csv(write_temp_csv("temp,sex,y\n1.0,F,0\nabc,M,1\n"), temp_schema()),
                         doctest::Contains("line 3, column 'temp'"), DataError);
  }
  SUBCASE("schema with two labels") {
    auto schema = temp_schema();
    schema[1].role = ColumnRole::label;
    CHECK_THROWS_AS(validate_schema(schema), DataError);
  }
  SUBCASE("schema with no feature") {
    auto schema = temp_schema();
    schema[0].role = ColumnRole::ignore;
    CHECK_THROWS_AS(validate_schema(schema), DataError);
  }
}

TEST_CASE("quoted fields may hold commas and newlines") {
  std::vector<ColumnSchema> schema = {{"note", ColumnRole::feature, ColumnKind::categorical, ""},
                                      {"a", ColumnRole::attribute, ColumnKind::categorical, ""},
                                      {"y", ColumnRole::label, ColumnKind::categorical, ""}};
  const Dataset ds = load_csv(write_temp_csv("note,a,y\n\"x, y\",p,0\n\"two\nlines\",q,1\n\"say \"\"hi\"\"\",p,0\n"),
                              schema);
  REQUIRE(ds.n_rows == 3);
  CHECK(ds.raw_features[0].labels[0] == "x, y");
  CHECK(ds.raw_features[0].labels[1] == "two\nlines");
  CHECK(ds.raw_features[0].labels[2] == "say \"hi\"");
}

TEST_CASE("categorical feature with too many levels is rejected") {
  std::string body = "id,a,y\n";
  for (std::size_t i = 0; i < kMaxOneHotLevels + 1; ++i) body += "id" + std::to_string(i) + ",p,0\n";
  std::vector<ColumnSchema> schema = {{"id", ColumnRole::feature, ColumnKind::categorical, ""},
                                      {"a", ColumnRole::attribute, ColumnKind::categorical, ""},
                                      {"y", ColumnRole::label, ColumnKind::categorical, ""}};
  const Dataset ds = load_csv(write_temp_csv(body), schema);
  CHECK_THROWS_AS(encode_features(ds), DataError);
}

TEST_CASE("rows_with_attribute") {
  std::vector<ColumnSchema> schema = {{"f", ColumnRole::feature, ColumnKind::continuous, ""},
                                      {"sex", ColumnRole::attribute, ColumnKind::categorical, ""},
                                      {"y", ColumnRole::label, ColumnKind::categorical, ""}};
  SUBCASE("one missing cell") {
    const Dataset ds = load_csv(write_temp_csv("f,sex,y\n1,F,0\n2,,1\n3,M,0\n"), schema);
    CHECK(rows_with_attribute(ds, "sex") == std::vector<std::size_t>{0, 2});
  }
  SUBCASE("all present") {
    const Dataset ds = load_csv(write_temp_csv("f,sex,y\n1,F,0\n2,M,1\n"), schema);
    CHECK(rows_with_attribute(ds, "sex") == std::vector<std::size_t>{0, 1});
  }
  SUBCASE("unknown attribute") {
    const Dataset ds = load_csv(write_temp_csv("f,sex,y\n1,F,0\n2,M,1\n"), schema);
    CHECK_THROWS_AS(rows_with_attribute(ds, "age"), DataError);
  }
}

TEST_CASE("one-hot rows sum to one for random categorical data") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    std::uniform_int_distribution<int> levels(1, 8);
    const int L = levels(rng);
    std::vector<std::string> cells(200);
    for (auto& c : cells) c = "v" + std::to_string(std::uniform_int_distribution<int>(0, L - 1)(rng));
    Dataset ds;
    ds.n_rows = cells.size();
    ds.raw_features.push_back(RawColumn::categorical("c", cells));
    ds.label = RawColumn::categorical("y", std::vector<std::string>(cells.size(), "0"));
    const Dataset enc = encode_features(ds);
    CHECK(enc.features.rowwise().sum().isOnes());
  }
}

TEST_CASE("write_csv round trip preserves content") {
  std::vector<ColumnSchema> schema = {{"temp", ColumnRole::feature, ColumnKind::continuous, "NA"},
                                      {"sex", ColumnRole::attribute, ColumnKind::categorical, "NA"},
                                      {"y", ColumnRole::label, ColumnKind::categorical, "NA"}};
  const Dataset ds = load_csv(write_temp_csv("temp,sex,y\n0.1,F,0\nNA,\"a,b\",1\n1e-300,NA,0\n"), schema);
  const auto out = testutil::temp_dir("roundtrip") / "copy.csv";
  write_csv(ds, out, "NA");
  const Dataset back = load_csv(out, schema);
  CHECK(fingerprint(back) == fingerprint(ds));
  CHECK(back.raw_features[0].numbers[2] == 1e-300);
}

TEST_CASE("row shuffling leaves utility statistics unchanged") {
  std::mt19937_64 rng(11);
  const std::size_t n = 500;
  std::vector<std::string> a(n);
  std::vector<std::string> y(n);
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int ai = std::uniform_int_distribution<int>(0, 2)(rng);
    a[i] = "a" + std::to_string(ai);
    y[i] = std::bernoulli_distribution(ai == 0 ? 0.8 : 0.3)(rng) ? "1" : "0";
    f[i] = std::normal_distribution<double>(0, 1)(rng);
  }
  auto build = [&](const std::vector<std::size_t>& order) {
    std::vector<std::string> a2;
    std::vector<std::string> y2;
    std::vector<double> f2;
    for (auto i : order) {
      a2.push_back(a[i]);
      y2.push_back(y[i]);
      f2.push_back(f[i]);
    }
    Dataset ds;
    ds.n_rows = n;
    ds.raw_features.push_back(RawColumn::continuous("f", f2));
    ds.attributes.push_back(RawColumn::categorical("a", a2));
    ds.label = RawColumn::categorical("y", y2);
    return ds;
  };
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const Dataset base = build(order);
  std::shuffle(order.begin(), order.end(), rng);
  const Dataset shuffled = build(order);

  PrepOptions prep;
  prep.min_count = 1;
  auto score = [&](const Dataset& ds) {
    const auto pa = prepare_attribute(ds, "a", prep);
    const auto py = prepare_label(ds, prep);
    return adjusted_mi(contingency(pa.series, py.series));
  };
  const AmiScore s1 = score(base);
  const AmiScore s2 = score(shuffled);
  CHECK(s1.mi == doctest::Approx(s2.mi).epsilon(1e-12));
  CHECK(s1.ami == doctest::Approx(s2.ami).epsilon(1e-12));
}

}  // TEST_SUITE
