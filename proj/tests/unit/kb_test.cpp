#include <algorithm>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "vso/json_codec.hpp"
#include "vso/kb_io.hpp"

using namespace vso;
using vso::test::Rng;

namespace {

ErrorCode parse_error(const std::string& text) {
  try {
    parse_vso_class(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("document parsed");
  return ErrorCode::Io;
}

bool has_code(const std::vector<Violation>& v, const std::string& code) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.code == code; });
}

codec::json sea_doc() { return codec::parse_text(test::read_source("kb/sea.json")); }

}  // namespace

TEST_CASE("sea fixture parses with its declared counts") {
  const VSOClass sea = test::sea_class();
  CHECK(sea.name == "Sea");
  CHECK(sea.bases.size() == 2);
  CHECK(sea.values.size() == 6);
  CHECK(sea.models.size() == 3);
  CHECK(validate_vso(sea).empty());
  CHECK(validate_vso(test::ship_class()).empty());
}

TEST_CASE("edge whose data is not an output of its source is rejected") {
  const std::string text = test::read_source("tests/fixtures/corrupt_edge.json");
  CHECK(parse_error(text) == ErrorCode::Invariant);
  const auto v = validate_vso(parse_vso_class_unchecked(text));
  REQUIRE(v.size() == 1);
  CHECK(v[0].code == "EDGE_CONDITION");
  CHECK(v[0].path.find("recommendation->ship_behavior") != std::string::npos);
}

TEST_CASE("empty class is valid") {
  const VSOClass c = parse_vso_class(
      R"({"vso_class": "Empty", "version": 1, "bases": [], "values": [], "models": [], "edges": []})");
  CHECK(c.name == "Empty");
  CHECK(c.models.empty());
  CHECK(validate_vso(c).empty());
}

TEST_CASE("malformed documents raise the matching category") {
  CHECK(parse_error("{not json") == ErrorCode::Syntax);
  CHECK(parse_error(R"({"version": 1})") == ErrorCode::Syntax);
  codec::json doc = sea_doc();
  doc["models"][0]["inputs"][0]["value"] = "no_such_value";
  CHECK(parse_error(doc.dump()) == ErrorCode::Reference);
}

TEST_CASE("serialization is canonical and round-trips") {
  const VSOClass sea = test::sea_class();
  const std::string text = serialize_vso_class(sea);
  CHECK(parse_vso_class(text) == sea);
  CHECK(serialize_vso_class(parse_vso_class(text)) == text);

  codec::json shuffled = sea_doc();
  auto& models = shuffled["models"];
  std::reverse(models.begin(), models.end());
  auto& values = shuffled["values"];
  std::reverse(values.begin(), values.end());
  CHECK(serialize_vso_class(parse_vso_class(shuffled.dump())) == text);

  const codec::json out = codec::parse_text(text);
  CHECK(out["edges"].size() == sea_doc()["edges"].size());
  CHECK(out["edges"].size() == sea.edges.size());
}

TEST_CASE("committed fixtures are stored in canonical form") {
  for (const char* path : {"kb/sea.json", "kb/ship.json"}) {
    const std::string text = test::read_source(path);
    CHECK_MESSAGE(serialize_vso_class(parse_vso_class(text)) == text, path);
  }
}

TEST_CASE("overlapping inputs and outputs are reported") {
  VSOClass sea = test::sea_class();
  Model& m = sea.models.at("sea_waves");
  m.outputs[{"near_water_wind", std::nullopt}] = m.inputs.at({"near_water_wind", std::nullopt});
  CHECK(has_code(validate_vso(sea), "IN_OUT_OVERLAP"));
}

TEST_CASE("scenario naming an undeclared package is reported") {
  VSOClass sea = test::sea_class();
  sea.models.at("sea_waves").scenarios.at("swan").package_seq.push_back("ghost");
  const auto v = validate_vso(sea);
  CHECK(has_code(v, "DANGLING_PACKAGE"));
  CHECK(violation_error_code("DANGLING_PACKAGE") == ErrorCode::Reference);
}

TEST_CASE("quality points must cover the space within domains") {
  VSOClass sea = test::sea_class();
  sea.models.at("sea_waves").inputs.begin()->second.erase(kExpertAxis);
  CHECK(has_code(validate_vso(sea), "QUALITY_INCOMPLETE"));
  sea = test::sea_class();
  sea.models.at("sea_waves").inputs.begin()->second[kMeasuredAxis] = 0.5;
  CHECK(has_code(validate_vso(sea), "QUALITY_OUT_OF_DOMAIN"));
}

TEST_CASE("instantiate binds const parameters") {
  auto ship = std::make_shared<const VSOClass>(test::ship_class());
  const VSOInstance inst = instantiate(ship, {{{"ship_params", std::nullopt}, {150.0}}});
  CHECK(inst.param_values.size() == 1);
  CHECK(inst.needed.empty());

  const VSOInstance bare = instantiate(ship, {});
  CHECK(bare.needed == std::set<DataKey>{{"ship_params", std::nullopt}});

  auto empty = std::make_shared<const VSOClass>(VSOClass{});
  CHECK(instantiate(empty, {}).param_values.empty());

  auto sea = std::make_shared<const VSOClass>(test::sea_class());
  CHECK_THROWS_WITH_AS(instantiate(sea, {{{"wave_spectrum", "sea_grid"}, {1.0}}}), doctest::Contains("wave_spectrum"),
                       Error);
  try {
    instantiate(sea, {{{"wave_spectrum", "sea_grid"}, {1.0}}});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownParam);
  }
  try {
    instantiate(sea, {{{"bathymetry", "sea_grid"}, {1.0, 2.0, 3.0}}});
    FAIL("size mismatch accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TypeMismatch);
  }
  CHECK(instantiate(sea, {{{"bathymetry", "sea_grid"}, Payload(66, 1.0)}}).param_values.size() == 1);
}

TEST_CASE("random classes are valid, satisfy the edge condition and round-trip") {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const VSOClass c = test::random_class(rng, "R" + std::to_string(i), "m");
    CHECK(validate_vso(c).empty());
    for (const auto& [key, q] : c.edges) {
      CHECK(c.models.at(key.from_model).outputs.count(key.data) == 1);
      CHECK(c.models.at(key.to_model).inputs.count(key.data) == 1);
    }
    const std::string text = serialize_vso_class(c);
    CHECK(parse_vso_class(text) == c);
    CHECK(serialize_vso_class(parse_vso_class(text)) == text);
  }
}
