#include "doctest.h"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "vso/composer.hpp"
#include "vso/kb_io.hpp"

using namespace vso;

namespace {

ErrorCode compose_error(const VSOClass& a, const VSOClass& b) {
  try {
    compose(a, b);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("composed");
  return ErrorCode::Io;
}

Model simple_model(const std::string& id, DataRefSet in, DataRefSet out) {
  Model m;
  m.id = id;
  m.inputs = std::move(in);
  m.outputs = std::move(out);
  Scenario s{"s", {"pkg"}, {}, {}};
  m.scenarios["s"] = s;
  m.selected_scenario = "s";
  m.packages = {"pkg"};
  return m;
}

const QualityPoint kQ{{kMeasuredAxis, 0.0}, {kExpertAxis, 0.5}};

}  // namespace

TEST_CASE("quality spaces merge by axis id") {
  const QualitySpace both = default_quality_space();
  const auto same = merge_quality(both, both);
  CHECK(same.merged == both);
  CHECK(same.map_left == std::map<std::string, std::string>{{"expert", "expert"}, {"measured", "measured"}});
  CHECK(same.map_right == same.map_left);

  const QualitySpace measured{{"measured", AxisDomain::binary}};
  const auto grown = merge_quality(measured, both);
  CHECK(grown.merged == both);
  CHECK(grown.map_left.size() == 1);

  CHECK_THROWS_AS(merge_quality(measured, {{"measured", AxisDomain::real}}), Error);
}

TEST_CASE("axis maps are injective and total over every small axis set") {
  const std::vector<QualityAxis> pool{{"measured", AxisDomain::binary}, {"expert", AxisDomain::real}, {"cost", AxisDomain::real}};
  for (unsigned l = 0; l < 8; ++l) {
    for (unsigned r = 0; r < 8; ++r) {
      QualitySpace left;
      QualitySpace right;
      for (unsigned i = 0; i < 3; ++i) {
        if (l & (1u << i)) left.push_back(pool[i]);
        if (r & (1u << i)) right.push_back(pool[i]);
      }
      const auto m = merge_quality(left, right);
      for (const auto* side : {&left, &right}) {
        const auto& map = side == &left ? m.map_left : m.map_right;
        CHECK(map.size() == side->size());
        std::set<std::string> images;
        for (const auto& axis : *side) {
          const std::string& image = map.at(axis.id);
          images.insert(image);
          bool found = false;
          for (const auto& merged : m.merged) found = found || (merged.id == image && merged.domain == axis.domain);
          CHECK(found);
          // Inverse image of the merged axis is the axis itself.
          CHECK(image == axis.id);
        }
        CHECK(images.size() == side->size());
      }
      CHECK(m.merged.size() == static_cast<std::size_t>(__builtin_popcount(l | r)));
    }
  }
}

TEST_CASE("sea and ship share one selection transition") {
  const auto t = infer_transition_models(test::sea_class(), test::ship_class());
  REQUIRE(t.size() == 1);
  CHECK(t[0].id == test::kTransitionId);
  CHECK(t[0].selected_scenario == "select");
  CHECK(t[0].scenarios.at("select").package_seq.empty());
  CHECK(t[0].transition->script == "select space sea_grid -> location");
}

TEST_CASE("classes without shared values need no transitions") {
  VSOClass other;
  other.name = "Other";
  other.values["x"] = {"x", Variability::variable, "1", {}};
  other.models["reader"] = simple_model("reader", {{{"x", std::nullopt}, kQ}}, {});
  CHECK(infer_transition_models(test::sea_class(), other).empty());
}

TEST_CASE("two shared values crossing one basis pair each give two transitions") {
  VSOClass a;
  a.name = "A";
  a.bases["g"] = {"g", BasisKind::space, {{"x_min", 0.0}, {"x_max", 10.0}, {"x_n", 3.0}}};
  a.values["u"] = {"u", Variability::variable, "1", {}};
  a.values["w"] = {"w", Variability::variable, "1", {}};
  a.models["p"] = simple_model("p", {}, {{{"u", "g"}, kQ}, {{"w", "g"}, kQ}});
  VSOClass b;
  b.name = "B";
  b.bases["pt"] = {"pt", BasisKind::space, {{"x", 5.0}}};
  b.values = a.values;
  b.models["c"] = simple_model("c", {{{"u", "pt"}, kQ}, {{"w", "pt"}, kQ}}, {});

  std::set<std::string> expected;
  for (const auto& [pid, p] : a.models) {
    for (const auto& [ok, q] : p.outputs) {
      for (const auto& [cid, c] : b.models) {
        for (const auto& [ik, iq] : c.inputs) {
          if (ik.value == ok.value && ik.basis != ok.basis) expected.insert(transition_model_id(ok.value, ok.basis, ik.basis));
        }
      }
    }
  }
  std::set<std::string> got;
  for (const auto& m : infer_transition_models(a, b)) got.insert(m.id);
  CHECK(got.size() == 2);
  CHECK(got == expected);
}

TEST_CASE("sea composed with ship") {
  const CompositeVSO c = compose(test::sea_class(), test::ship_class());
  CHECK(c.cls.bases.size() == 4);
  CHECK(c.cls.models.size() == 6);
  const std::string t = test::kTransitionId;
  CHECK(c.cls.edges.count({"sea_waves", t, {"wave_spectrum", "sea_grid"}}) == 1);
  CHECK(c.cls.edges.count({t, "ship_behavior", {"wave_spectrum", "location"}}) == 1);
  CHECK(c.provenance.at(model_element(t)) == std::vector<std::string>{kTransitionOrigin});
  CHECK(c.provenance.at(model_element("sea_waves")) == std::vector<std::string>{"Sea"});
  CHECK(c.provenance.at(value_element("wave_spectrum")) == std::vector<std::string>{"Sea", "Ship"});
  CHECK(validate_vso(c.cls).empty());
  CHECK(parse_composite(serialize_composite(c)) == c);
  CHECK(test::composition_failures(test::sea_class(), test::ship_class()).empty());
}

TEST_CASE("empty class is the identity of composition") {
  const VSOClass sea = test::sea_class();
  CompositeVSO c = canonical_form(compose(sea, VSOClass{}));
  VSOClass expected = sea;
  expected.name.clear();
  expected.quality = c.cls.quality;
  CHECK(c.cls == expected);
  CHECK(c.cls.mode == TaskMode::forecast);
  CHECK(canonical_form(compose(VSOClass{}, sea)).cls == expected);
}

TEST_CASE("composition is symmetric up to canonical form") {
  CHECK(canonical_form(compose(test::sea_class(), test::ship_class())) ==
        canonical_form(compose(test::ship_class(), test::sea_class())));
}

TEST_CASE("transition edges connect producers and consumers") {
  const CompositeVSO c = compose(test::sea_class(), test::ship_class());
  const Model& t = c.cls.models.at(test::kTransitionId);
  std::map<std::string, Model> regular;
  for (const auto& [id, m] : c.cls.models) {
    if (!m.is_transition()) regular.emplace(id, m);
  }
  const auto edges = make_transition_edges(t, regular);
  REQUIRE(edges.size() == 2);
  CHECK(edges[0].from_model == "sea_waves");
  CHECK(edges[1].to_model == "ship_behavior");

  regular.erase("ship_behavior");
  const auto inbound = make_transition_edges(t, regular);
  REQUIRE(inbound.size() == 1);
  CHECK(inbound[0].to_model == t.id);

  regular["sea_waves_twin"] = regular.at("sea_waves");
  regular["sea_waves_twin"].id = "sea_waves_twin";
  std::size_t expected = 0;
  for (const auto& [id, m] : regular) {
    for (const auto& [key, q] : t.inputs) expected += m.outputs.count(key);
  }
  CHECK(expected == 2);
  CHECK(make_transition_edges(t, regular).size() == expected);
}

TEST_CASE("composition errors") {
  CHECK(compose_error(test::sea_class(), test::load_class("tests/fixtures/ship_feet.json")) == ErrorCode::UnitConflict);

  VSOClass ship = test::ship_class();
  for (auto& axis : ship.quality) {
    if (axis.id == kMeasuredAxis) axis.domain = AxisDomain::real;
  }
  CHECK(compose_error(test::sea_class(), ship) == ErrorCode::AxisConflict);

  ship = test::ship_class();
  Basis clash = test::sea_class().bases.at("sea_grid");
  clash.params["x_max"] = 5.0;
  ship.bases["sea_grid"] = clash;
  CHECK(compose_error(test::sea_class(), ship) == ErrorCode::BasisIdCollision);

  ship = test::ship_class();
  Model twin = ship.models.at("recommendation");
  twin.id = "sea_waves";
  ship.models.erase("recommendation");
  ship.edges.clear();
  ship.models["sea_waves"] = twin;
  CHECK(compose_error(test::sea_class(), ship) == ErrorCode::ModelIdCollision);
}

TEST_CASE("composition properties hold on random class pairs") {
  test::Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const VSOClass a = test::random_class(rng, "A", "a");
    const VSOClass b = test::random_class(rng, "B", "b");
    const auto failures = test::composition_failures(a, b);
    CHECK_MESSAGE(failures.empty(), "pair " << i << ": " << (failures.empty() ? "" : failures.front()));
  }
}
