#include <algorithm>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "vso/awf.hpp"
#include "vso/error.hpp"
#include "vso/pipeline.hpp"

using namespace vso;

namespace {

CompiledTask golden() { return compile_task(test::sea_ship(), test::golden_request(), std::nullopt); }

// A single model running three packages in sequence.
std::shared_ptr<const CompositeVSO> staged() {
  VSOClass c;
  c.name = "Staged";
  c.values["x"] = {"x", Variability::variable, "1", {}};
  c.values["y"] = {"y", Variability::variable, "1", {}};
  Model m;
  m.id = "chain";
  m.inputs[{"x", std::nullopt}] = {{kMeasuredAxis, 1.0}, {kExpertAxis, 0.9}};
  m.outputs[{"y", std::nullopt}] = {{kMeasuredAxis, 0.0}, {kExpertAxis, 0.5}};
  m.scenarios["s"] = Scenario{"s", {"prep", "solve", "post"}, {}, {}};
  m.packages = {"prep", "solve", "post"};
  m.selected_scenario = "s";
  c.models["chain"] = m;
  return std::make_shared<const CompositeVSO>(as_composite(c));
}

}  // namespace

TEST_CASE("golden plan compiles to four blocks") {
  const CompiledTask t = golden();
  const AWF& awf = t.awf;
  REQUIRE(awf.blocks.size() == 4);
  CHECK(awf.links.size() == 3);
  CHECK(topo_order(awf) ==
        std::vector<std::string>{"sea_waves", test::kTransitionId, "ship_behavior", "recommendation"});

  const AWFBlock* transition = awf.find_block(test::kTransitionId);
  REQUIRE(transition);
  CHECK(transition->kind == BlockKind::inline_script);
  CHECK_FALSE(transition->package);
  CHECK(std::get<std::string>(transition->params.at(kScriptParam)) == "select space sea_grid -> location");

  const AWFBlock* waves = awf.find_block("sea_waves");
  CHECK(waves->kind == BlockKind::package_call);
  CHECK(waves->package == std::optional<std::string>("swan_stub"));
  CHECK(std::get<double>(waves->params.at("directions")) == 36.0);
  CHECK(std::get<std::string>(waves->params.at(option_param("physics"))) == "deep_water");
  CHECK(std::get<double>(waves->params.at(basis_param("sea_grid", "x_n"))) == 11.0);

  const AWFBlock* ship = awf.find_block("ship_behavior");
  CHECK(std::get<double>(ship->params.at("hull_length")) == 150.0);
  CHECK(std::get<std::string>(ship->params.at("method")) == "strip_theory");
  CHECK(std::get<double>(awf.find_block("recommendation")->params.at("roll_limit")) == 20.0);

  const DataKey wind{"near_water_wind", std::nullopt};
  REQUIRE(awf.external_inputs.count(wind));
  CHECK(awf.external_inputs.at(wind).at(kExpertAxis) == 0.9);
  CHECK(awf.external_inputs.size() == 2);
}

TEST_CASE("every block param is a literal") {
  for (const auto& b : golden().awf.blocks) {
    CHECK((b.kind == BlockKind::inline_script) == !b.package.has_value());
    for (const auto& [name, v] : b.params) CHECK_FALSE(name.empty());
  }
}

TEST_CASE("empty plan compiles to an empty workflow") {
  const AWF awf = compile_awf(Plan{}, *test::sea_ship(), test::golden_request());
  CHECK(awf.blocks.empty());
  CHECK(awf.links.empty());
  CHECK(topo_order(awf).empty());
}

TEST_CASE("value binding without a payload is unresolved") {
  const CompiledTask t = golden();
  TaskRequest bare = t.request;
  bare.parameters.clear();
  try {
    compile_awf(t.plan, *test::sea_ship(), bare);
    FAIL("compiled");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnresolvedParam);
    CHECK(e.path() == "ship_params");
  }
}

TEST_CASE("package sequences become chained stages") {
  TaskRequest r;
  r.provided[{"x", std::nullopt}] = ProvidedData{{{kMeasuredAxis, 1.0}, {kExpertAxis, 0.9}}, DataSource::user, Payload{2.0}};
  r.requested = {{"y", std::nullopt}};
  const CompiledTask t = compile_task(staged(), r, std::nullopt);
  REQUIRE(t.awf.blocks.size() == 3);
  CHECK(topo_order(t.awf) == std::vector<std::string>{"chain.1", "chain.2", "chain.3"});
  const AWFBlock& second = t.awf.blocks[1];
  CHECK(second.consumes.count(stage_token("chain", 1)));
  CHECK(second.consumes.count({"x", std::nullopt}));
  CHECK(second.produces.count(stage_token("chain", 2)));
  CHECK(t.awf.blocks[2].produces.count({"y", std::nullopt}));
  CHECK(t.awf.links.size() == 2);
}

TEST_CASE("cyclic links are detected") {
  AWF awf;
  for (const char* id : {"a", "b", "c"}) awf.blocks.push_back({id, BlockKind::package_call, id, "s", "p", {}, {}, {}});
  const DataRef d{{"d", std::nullopt}, {}};
  awf.links = {{"a", "b", d}, {"b", "c", d}, {"c", "b", d}};
  try {
    topo_order(awf);
    FAIL("ordered a cycle");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CycleDetected);
    CHECK(e.path() == "b,c");
    CHECK(std::string(e.what()).find("b -> c -> b") != std::string::npos);
  }
}

TEST_CASE("topological order respects every link on random plans") {
  test::Rng rng(5);
  int compiled = 0;
  for (int i = 0; i < 150; ++i) {
    auto c = std::make_shared<const CompositeVSO>(test::random_composite(rng));
    const TaskRequest r = test::random_request(rng, c->cls);
    PlanList plans;
    try {
      plans = plan_task(c, r);
    } catch (const Error&) {
      continue;
    }
    for (const auto& p : plans.plans) {
      const AWF awf = compile_awf(p, *c, r);
      const auto order = topo_order(awf);
      CHECK(order.size() == awf.blocks.size());
      auto pos = [&](const std::string& id) { return std::find(order.begin(), order.end(), id) - order.begin(); };
      for (const auto& l : awf.links) CHECK(pos(l.from_block) < pos(l.to_block));
      // Every consumed dataset is linked or a workflow input.
      for (const auto& b : awf.blocks) {
        for (const auto& [key, q] : b.consumes) {
          const bool linked = std::any_of(awf.links.begin(), awf.links.end(),
                                          [&](const AWFLink& l) { return l.to_block == b.id && l.data.key == key; });
          CHECK((linked || awf.external_inputs.count(key)));
        }
      }
      ++compiled;
    }
  }
  CHECK(compiled > 20);
}
