#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace sensecf;

TEST_CASE("encode scales, one-hots, and guards degenerate bounds") {
  const auto schema = FeatureSchema::from_features(
      {testutil::continuous("a"), testutil::continuous("flat"), testutil::categorical("c", {"A", "B", "C"}),
       testutil::binary_target()});
  Bounds bounds;
  bounds.entries.resize(3);
  bounds.entries[0] = {0.0, 10.0, {}};
  bounds.entries[1] = {4.0, 4.0, {}};  // min == max
  bounds.entries[2] = {0.0, 0.0, {"A", "B", "C"}};
  const auto spec = EncodingSpec::from_bounds(schema, bounds);
  CHECK(spec.dim == 5);

  const auto v = encode(testutil::make_instance({Value{5.0}, Value{4.0}, Value{std::string("B")}}), spec);
  CHECK(v == std::vector<double>{0.5, 0.0, 0.0, 1.0, 0.0});

  SECTION("values are clamped to the training range at inference") {
    const auto clamped = encode(testutil::make_instance({Value{25.0}, Value{4.0}, Value{std::string("C")}}), spec);
    CHECK(clamped[0] == 1.0);
    const auto low = encode(testutil::make_instance({Value{-3.0}, Value{4.0}, Value{std::string("C")}}), spec);
    CHECK(low[0] == 0.0);
  }
  SECTION("token outside the declared domain encodes as an all-zero block") {
    const auto zeroed = encode(testutil::make_instance({Value{5.0}, Value{4.0}, Value{std::string("Q")}}), spec);
    CHECK(zeroed[2] == 0.0);
    CHECK(zeroed[3] == 0.0);
    CHECK(zeroed[4] == 0.0);
  }
  SECTION("arity mismatch is rejected") {
    CHECK_THROWS_AS(encode(testutil::make_instance({Value{5.0}}), spec), Error);
  }
}
