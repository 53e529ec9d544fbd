#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace sensecf;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("load_csv reads the bundled heart sample") {
  const auto schema = testutil::heart_schema();
  const auto data = load_csv(testutil::heart_csv_path(), schema);
  CHECK(data.size() == 918);
  CHECK(data.count_label(0) + data.count_label(1) == 918);
  // extra columns (Sex, ExerciseAngina) in the file are ignored
  CHECK(data.schema.predictor_count() == 9);
}

TEST_CASE("load_csv handles header-only and malformed inputs") {
  const auto dir = testutil::temp_dir("load_csv");
  const auto schema = FeatureSchema::from_features(
      {testutil::continuous("x"), testutil::categorical("c", {"A", "B"}), testutil::binary_target()});

  SECTION("header only gives zero rows") {
    testutil::write_file(dir / "empty.csv", "x,c,label\n");
    const auto data = load_csv(dir / "empty.csv", schema);
    CHECK(data.size() == 0);
  }
  SECTION("unknown category names the row") {
    testutil::write_file(dir / "bad_cat.csv", "x,c,label\n1.0,A,0\n2.0,Q,1\n");
    try {
      load_csv(dir / "bad_cat.csv", schema);
      FAIL("expected UnknownCategory");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnknownCategory);
      CHECK_THAT(e.what(), ContainsSubstring("row 1"));
      CHECK_THAT(e.what(), ContainsSubstring("'Q'"));
    }
  }
  SECTION("missing column") {
    testutil::write_file(dir / "missing.csv", "x,label\n1.0,0\n");
    try {
      load_csv(dir / "missing.csv", schema);
      FAIL("expected MissingColumn");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::MissingColumn);
    }
  }
  SECTION("non-numeric continuous value") {
    testutil::write_file(dir / "nan.csv", "x,c,label\nabc,A,0\n");
    try {
      load_csv(dir / "nan.csv", schema);
      FAIL("expected NonNumericValue");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonNumericValue);
    }
  }
  SECTION("quoted fields parse") {
    testutil::write_file(dir / "quoted.csv", "x,c,label\n\"1.5\",\"A\",\"0\"\n");
    const auto data = load_csv(dir / "quoted.csv", schema);
    REQUIRE(data.size() == 1);
    CHECK(as_number(data.rows[0].values[0]) == 1.5);
  }
  SECTION("missing file") {
    CHECK_THROWS_AS(load_csv(dir / "nope.csv", schema), Error);
  }
}

TEST_CASE("csv round-trip reproduces the dataset exactly") {
  const auto dir = testutil::temp_dir("roundtrip");
  const auto schema = testutil::heart_schema();
  const auto data = load_csv(testutil::heart_csv_path(), schema);
  write_csv(data, dir / "copy.csv");
  const auto again = load_csv(dir / "copy.csv", schema);
  REQUIRE(again.size() == data.size());
  CHECK(again.rows == data.rows);
  CHECK(again.labels == data.labels);
  // and a second write is byte-identical
  write_csv(again, dir / "copy2.csv");
  CHECK(testutil::read_file(dir / "copy.csv") == testutil::read_file(dir / "copy2.csv"));
}

TEST_CASE("stratified split hits exact per-class counts") {
  // 60/40 class ratio over 100 rows at fraction 0.2 puts 12 + 8 in test
  std::vector<double> xs(100);
  std::vector<int> ys(100);
  for (int i = 0; i < 100; ++i) {
    xs[static_cast<std::size_t>(i)] = i;
    ys[static_cast<std::size_t>(i)] = i < 60 ? 0 : 1;
  }
  const auto data = testutil::one_d_dataset(xs, ys);
  const auto [train, test] = split(data, 0.2, 7, true);
  CHECK(train.size() == 80);
  CHECK(test.size() == 20);
  CHECK(test.count_label(0) == 12);
  CHECK(test.count_label(1) == 8);
}

TEST_CASE("split is deterministic and exhaustive") {
  const auto schema = testutil::heart_schema();
  const auto data = load_csv(testutil::heart_csv_path(), schema);
  for (bool stratified : {false, true}) {
    const auto [train_a, test_a] = split(data, 0.25, 42, stratified);
    const auto [train_b, test_b] = split(data, 0.25, 42, stratified);
    CHECK(train_a.rows == train_b.rows);
    CHECK(test_a.rows == test_b.rows);
    CHECK(train_a.labels == train_b.labels);
    CHECK(train_a.size() + test_a.size() == data.size());
    const auto [train_c, test_c] = split(data, 0.25, 43, stratified);
    CHECK(train_a.rows != train_c.rows);  // different seed, different partition
  }
}

TEST_CASE("split validates its fraction") {
  const auto data = testutil::separable_one_d();
  for (double bad : {0.0, 1.0, -0.3, 1.7}) {
    try {
      split(data, bad, 1, false);
      FAIL("expected FractionOutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::FractionOutOfRange);
    }
  }
}

TEST_CASE("stratified split refuses a one-row class") {
  const auto data = testutil::one_d_dataset({1, 2, 3, 4, 5}, {0, 0, 0, 0, 1});
  try {
    split(data, 0.4, 1, true);
    FAIL("expected ClassTooSmall");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ClassTooSmall);
  }
}

TEST_CASE("feature_bounds scans min, max, and category sets") {
  const auto schema = FeatureSchema::from_features(
      {testutil::continuous("age"), testutil::categorical("c", {"A", "B", "C"}), testutil::binary_target()});
  Dataset data;
  data.schema = schema;
  data.rows = {testutil::make_instance({Value{50.0}, Value{std::string("A")}}),
               testutil::make_instance({Value{28.0}, Value{std::string("A")}}),
               testutil::make_instance({Value{77.0}, Value{std::string("B")}})};
  data.labels = {0, 1, 0};
  const auto bounds = feature_bounds(data);
  CHECK(bounds.entries[0].lo == 28.0);
  CHECK(bounds.entries[0].hi == 77.0);
  CHECK(bounds.entries[1].tokens == std::vector<std::string>{"A", "B"});

  SECTION("single row degenerates to min == max") {
    Dataset one;
    one.schema = schema;
    one.rows = {data.rows[0]};
    one.labels = {0};
    const auto b = feature_bounds(one);
    CHECK(b.entries[0].lo == b.entries[0].hi);
  }
  SECTION("empty dataset is an error") {
    Dataset none;
    none.schema = schema;
    CHECK_THROWS_AS(feature_bounds(none), Error);
  }
}

TEST_CASE("bounds contain every value of their own dataset") {
  const auto schema = testutil::heart_schema();
  const auto data = load_csv(testutil::heart_csv_path(), schema);
  const auto bounds = feature_bounds(data);
  for (const auto& row : data.rows) CHECK(bounds.contains(schema, row));
}
