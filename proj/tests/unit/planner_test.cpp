#include <algorithm>
#include <functional>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "vso/awf.hpp"
#include "vso/composer.hpp"
#include "vso/documents.hpp"
#include "vso/error.hpp"
#include "vso/pipeline.hpp"

using namespace vso;

namespace {

const DataKey kWind{"near_water_wind", std::nullopt};
const DataKey kLevel{"level_obs", "forecast_time"};
const DataKey kBathy{"bathymetry", "sea_grid"};
const DataKey kShipParams{"ship_params", std::nullopt};
const DataKey kRecommendation{"recommendation", std::nullopt};

FilteredGraph golden_graph() { return select_enabled(test::sea_ship(), {"spectrum_parameterization"}); }

DatasetStatus state_of(const std::vector<DatasetState>& states, const DataKey& key) {
  for (const auto& s : states) {
    if (s.ref.key == key) return s.state;
  }
  FAIL("no state for " << key.str());
  return DatasetStatus::ok;
}

ErrorCode error_of(const std::function<void()>& fn, std::string* path = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (path) *path = e.path();
    return e.code();
  }
  FAIL("no error");
  return ErrorCode::Io;
}

std::shared_ptr<const CompositeVSO> alternatives(double first_expert, double second_expert) {
  VSOClass c = test::load_class("tests/fixtures/two_plans.json");
  c.models.at("route_one").outputs.begin()->second = {{kMeasuredAxis, 1.0}, {kExpertAxis, first_expert}};
  c.models.at("route_two").outputs.begin()->second = {{kMeasuredAxis, 1.0}, {kExpertAxis, second_expert}};
  return std::make_shared<const CompositeVSO>(as_composite(c));
}

TaskRequest alternatives_request() { return parse_task_request(test::read_source("tests/fixtures/two_plans_request.json")); }

}  // namespace

TEST_CASE("structure selection keeps enabled models and their edges") {
  auto c = test::sea_ship();
  const std::set<std::string> fig1{"level_and_currents", "sea_waves", "ship_behavior", "recommendation", test::kTransitionId};
  const FilteredGraph g = select_structure(c, fig1);
  CHECK(g.enabled_models.size() == 5);
  for (const auto& [key, q] : g.active_edges) {
    CHECK(fig1.count(key.from_model));
    CHECK(fig1.count(key.to_model));
  }

  std::set<std::string> all;
  for (const auto& [id, m] : c->cls.models) all.insert(id);
  CHECK(select_structure(c, all).active_edges == c->cls.edges);

  const FilteredGraph none = select_structure(c, {});
  CHECK(none.enabled_models.empty());
  CHECK(none.active_edges.empty());

  CHECK(error_of([&] { select_structure(c, {"ghost"}); }) == ErrorCode::UnknownModel);
}

TEST_CASE("dataset marking follows the figure") {
  const auto states = mark_dataset_states(golden_graph(), {kWind, kLevel, kBathy, kShipParams});
  CHECK(state_of(states, {"wave_parameters", std::nullopt}) == DatasetStatus::unavailable);
  CHECK(state_of(states, kWind) == DatasetStatus::ok);
  CHECK(state_of(states, kRecommendation) == DatasetStatus::ok);
  CHECK(state_of(states, {"wave_spectrum", "location"}) == DatasetStatus::ok);

  const auto partial = mark_dataset_states(golden_graph(), {kWind});
  CHECK(state_of(partial, kBathy) == DatasetStatus::needed);
  CHECK(state_of(partial, kWind) == DatasetStatus::ok);
  CHECK(state_of(partial, kShipParams) == DatasetStatus::needed);

  const auto enabled = mark_dataset_states(select_enabled(test::sea_ship()), {kWind, kLevel, kBathy, kShipParams});
  CHECK(state_of(enabled, {"wave_parameters", std::nullopt}) == DatasetStatus::ok);
}

TEST_CASE("golden request has exactly one plan") {
  const TaskRequest r = test::golden_request();
  const PlanList plans = enumerate_plans(golden_graph(), r);
  REQUIRE(plans.plans.size() == 1);
  CHECK_FALSE(plans.truncated);
  const Plan& p = plans.plans[0];
  std::vector<std::string> order;
  for (const auto& s : p.models) order.push_back(s.model);
  CHECK(order == std::vector<std::string>{"sea_waves", test::kTransitionId, "ship_behavior", "recommendation"});
  CHECK(p.models[1].scenario == "select");
  CHECK(p.edges.size() == 3);
  CHECK(p.provided == std::set<DataKey>{kWind, kBathy, kShipParams});
  CHECK(p.produced.count(kRecommendation));

  const auto oracle = test::oracle_plans(*test::sea_ship(), r);
  REQUIRE(oracle.size() == 1);
  CHECK(oracle[0] == p.model_ids());
}

TEST_CASE("nothing provided blocks the plan") {
  TaskRequest r = test::golden_request();
  r.provided.clear();
  std::string path;
  CHECK(error_of([&] { enumerate_plans(golden_graph(), r); }, &path) == ErrorCode::NoPlan);
  CHECK(path.find("near_water_wind") != std::string::npos);
  const auto blockers = plan_blockers(golden_graph(), r);
  CHECK(std::find(blockers.begin(), blockers.end(), kWind) != blockers.end());
}

TEST_CASE("requested data already provided needs an empty plan") {
  TaskRequest r = test::golden_request();
  r.requested = {kWind};
  const PlanList plans = enumerate_plans(golden_graph(), r);
  REQUIRE(plans.plans.size() == 1);
  CHECK(plans.plans[0].models.empty());
}

TEST_CASE("cap truncates in lexicographic order") {
  const auto c = alternatives(0.5, 0.5);
  const PlanList all = enumerate_plans(select_enabled(c), alternatives_request());
  REQUIRE(all.plans.size() == 2);
  CHECK(all.plans[0].model_ids() == std::vector<std::string>{"route_one"});
  const PlanList one = enumerate_plans(select_enabled(c), alternatives_request(), 1);
  CHECK(one.plans.size() == 1);
  CHECK(one.truncated);
  CHECK(one.cap == 1);
}

TEST_CASE("scores follow the documented aggregate") {
  const auto c = alternatives(0.4, 0.9);
  const FilteredGraph g = select_enabled(c);
  const TaskRequest r = alternatives_request();
  const PlanList plans = enumerate_plans(g, r);
  REQUIRE(plans.plans.size() == 2);
  CHECK(plans.plans[0].score == doctest::Approx(0.4));
  CHECK(plans.plans[1].score == doctest::Approx(0.9));
  const auto ranked = rank_plans(plans.plans);
  CHECK(ranked[0].model_ids() == std::vector<std::string>{"route_two"});

  const auto simulated = alternatives(0.4, 0.9);
  VSOClass cls = simulated->cls;
  cls.models.at("route_two").outputs.begin()->second[kMeasuredAxis] = 0.0;
  const auto penalized = std::make_shared<const CompositeVSO>(as_composite(cls));
  const PlanList p2 = enumerate_plans(select_enabled(penalized), r);
  CHECK(p2.plans[1].score == doctest::Approx(0.9 * 0.5));
  CHECK(rank_plans(p2.plans)[0].model_ids() == std::vector<std::string>{"route_two"});
}

TEST_CASE("ranking ties break by size then ids") {
  auto plan = [](std::vector<std::string> ids, double score) {
    Plan p;
    for (auto& id : ids) p.models.push_back({id, "s"});
    p.score = score;
    return p;
  };
  auto ranked = rank_plans({plan({"a", "b", "c"}, 0.5), plan({"x", "y"}, 0.5)});
  CHECK(ranked[0].models.size() == 2);
  ranked = rank_plans({plan({"b"}, 0.5), plan({"a"}, 0.5)});
  CHECK(ranked[0].models[0].model == "a");
  ranked = rank_plans({plan({"only"}, 0.1)});
  CHECK(ranked.size() == 1);
}

TEST_CASE("task modes derive requests") {
  const FilteredGraph g = golden_graph();
  const TaskRequest analysis = test::golden_request();
  const auto same = apply_mode(analysis, g);
  REQUIRE(same.size() == 1);
  CHECK(same[0] == analysis);

  TaskRequest opt = analysis;
  opt.mode = TaskMode::optimization;
  opt.optimization = OptimizationSpec{kRecommendation, Goal::minimize, {{kShipParams, {{100.0}, {150.0}, {200.0}}}}};
  const auto sweep = apply_mode(opt, g);
  REQUIRE(sweep.size() == 3);
  CHECK(sweep[2].parameters.at(kShipParams) == Payload{200.0});
  CHECK(sweep[0].mode == TaskMode::analysis);

  TaskRequest grid2 = opt;
  grid2.optimization->grid.push_back({{"bathymetry", "sea_grid"}, {{20.0}, {30.0}}});
  const auto product = apply_mode(grid2, g);
  REQUIRE(product.size() == 6);
  CHECK(product[1].parameters.at({"bathymetry", "sea_grid"}) == Payload{30.0});
  CHECK(product[1].parameters.at(kShipParams) == Payload{100.0});

  TaskRequest forecast = analysis;
  forecast.mode = TaskMode::forecast;
  forecast.forecast = ForecastSpec{"sim_time", {{"t_end", 48.0}}};
  const auto fc = apply_mode(forecast, g);
  REQUIRE(fc.size() == 1);
  CHECK(std::get<double>(fc[0].basis_overrides.at("sim_time").at("t_end")) == 48.0);
  const CompiledTask compiled = compile_task(test::sea_ship(), fc[0], std::nullopt);
  const AWFBlock* ship = compiled.awf.find_block("ship_behavior");
  REQUIRE(ship);
  CHECK(std::get<double>(ship->params.at(basis_param("sim_time", "t_end"))) == 48.0);
  CHECK(std::get<double>(ship->params.at(basis_param("sim_time", "t_start"))) == 0.0);
}

TEST_CASE("malformed mode specs are rejected") {
  const FilteredGraph g = golden_graph();
  TaskRequest r = test::golden_request();
  r.mode = TaskMode::forecast;
  CHECK(error_of([&] { apply_mode(r, g); }) == ErrorCode::ModeSpecMissing);
  r.forecast = ForecastSpec{"nowhere", {}};
  CHECK(error_of([&] { apply_mode(r, g); }) == ErrorCode::UnknownBasis);
  r.forecast = ForecastSpec{"sea_grid", {}};
  CHECK(error_of([&] { apply_mode(r, g); }) == ErrorCode::InvalidRequest);

  r = test::golden_request();
  r.mode = TaskMode::optimization;
  CHECK(error_of([&] { apply_mode(r, g); }) == ErrorCode::ModeSpecMissing);
  r.optimization = OptimizationSpec{kRecommendation, Goal::minimize, {}};
  CHECK(error_of([&] { apply_mode(r, g); }) == ErrorCode::ModeSpecMissing);
  r.optimization->grid.push_back({{"rocking", "sim_time"}, {{1.0}}});
  CHECK(error_of([&] { apply_mode(r, g); }) == ErrorCode::UnknownParam);
}

TEST_CASE("plans are sound, acyclic and match the oracle on random graphs") {
  test::Rng rng(3);
  int with_plans = 0;
  for (int i = 0; i < 60; ++i) {
    auto c = std::make_shared<const CompositeVSO>(test::random_composite(rng));
    const TaskRequest r = test::random_request(rng, c->cls);
    const auto expected = test::oracle_plans(*c, r);
    const FilteredGraph g = select_enabled(c);
    std::vector<test::ModelSet> got;
    try {
      for (const auto& p : enumerate_plans(g, r).plans) {
        const auto ids = p.model_ids();
        got.push_back(ids);
        const std::set<std::string> chosen(ids.begin(), ids.end());
        CHECK(test::oracle_valid(*c, r, chosen));

        // Replaying in plan order satisfies every input before its model.
        std::set<DataKey> ready = r.available();
        std::set<std::string> done;
        for (const auto& step : p.models) {
          const Model& m = c->cls.models.at(step.model);
          for (const auto& [key, q] : m.inputs) {
            bool fed = ready.count(key) > 0;
            for (const auto& e : p.edges) {
              fed = fed || (e.to_model == step.model && e.data.key == key && done.count(e.from_model));
            }
            CHECK_MESSAGE(fed, step.model << " lacks " << key.str());
          }
          done.insert(step.model);
        }
        for (const auto& e : p.edges) {
          auto pos = [&](const std::string& id) {
            return std::find_if(p.models.begin(), p.models.end(), [&](const PlanStep& s) { return s.model == id; });
          };
          CHECK(pos(e.from_model) < pos(e.to_model));
        }
      }
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoPlan);
    }
    with_plans += !got.empty();
    CHECK_MESSAGE(got == expected, "case " << i);
  }
  CHECK(with_plans > 10);
}
