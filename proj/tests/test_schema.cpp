#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace sensecf;
using Catch::Matchers::ContainsSubstring;

namespace {

std::string feature_json(const std::string& name, const std::string& kind, const std::string& role = "predictor",
                         const std::string& categories = "") {
  std::string j = "{\"name\": \"" + name + "\", \"kind\": \"" + kind + "\", \"role\": \"" + role + "\"";
  if (!categories.empty()) j += ", \"categories\": " + categories;
  return j + "}";
}

}  // namespace

TEST_CASE("load_schema accepts the 5-continuous 4-categorical layout") {
  const auto schema = testutil::heart_schema();
  CHECK(schema.predictor_count() == 9);
  int continuous = 0, categorical = 0;
  for (const auto& f : schema.predictors()) (f.is_continuous() ? continuous : categorical) += 1;
  CHECK(continuous == 5);
  CHECK(categorical == 4);
  CHECK(schema.target().name == "HeartDisease");
  CHECK(schema.target().categories == std::vector<std::string>{"0", "1"});
  CHECK(schema.immutable_names() == std::vector<std::string>{"Age", "ChestPainType", "RestingECG", "MaxHR"});
}

TEST_CASE("load_schema rejects two targets") {
  const std::string config = "{\"features\": [" + feature_json("a", "continuous") + "," +
                             feature_json("t1", "categorical", "target", "[\"0\",\"1\"]") + "," +
                             feature_json("t2", "categorical", "target", "[\"0\",\"1\"]") + "]}";
  try {
    load_schema(config);
    FAIL("expected MultipleTargets");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MultipleTargets);
  }
}

TEST_CASE("load_schema rejects duplicated feature names") {
  const std::string config = "{\"features\": [" + feature_json("a", "continuous") + "," +
                             feature_json("a", "continuous") + "," +
                             feature_json("t", "categorical", "target", "[\"0\",\"1\"]") + "]}";
  try {
    load_schema(config);
    FAIL("expected DuplicateName");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicateName);
    CHECK_THAT(e.what(), ContainsSubstring("'a'"));
  }
}

TEST_CASE("load_schema rejects missing and unknown pieces") {
  SECTION("no target") {
    const std::string config = "{\"features\": [" + feature_json("a", "continuous") + "]}";
    CHECK_THROWS_AS(load_schema(config), Error);
  }
  SECTION("unknown kind token") {
    const std::string config = "{\"features\": [" + feature_json("a", "ordinal") + "," +
                               feature_json("t", "categorical", "target", "[\"0\",\"1\"]") + "]}";
    try {
      load_schema(config);
      FAIL("expected UnknownKind");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnknownKind);
    }
  }
  SECTION("non-binary target") {
    const std::string config = "{\"features\": [" + feature_json("a", "continuous") + "," +
                               feature_json("t", "categorical", "target", "[\"x\",\"y\",\"z\"]") + "]}";
    try {
      load_schema(config);
      FAIL("expected InvalidTarget");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidTarget);
    }
  }
  SECTION("not json at all") {
    CHECK_THROWS_AS(load_schema("feature Age continuous"), Error);
  }
}

TEST_CASE("schema round-trips through its json form") {
  const auto schema = testutil::heart_schema();
  const auto again = load_schema(schema.to_json().dump());
  CHECK(schema == again);
}
