#include "doctest.h"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "vso/documents.hpp"
#include "vso/error.hpp"
#include "vso/pipeline.hpp"
#include "vso/stubs.hpp"

using namespace vso;

namespace {

const DataKey kRecommendation{"recommendation", std::nullopt};

CompiledTask golden() { return compile_task(test::sea_ship(), test::golden_request(), std::nullopt); }

RunResult run(const CompiledTask& t, const PackageRegistry& reg) {
  LogicalClock clock;
  return run_compiled(t, reg, "r1", clock);
}

ErrorCode bind_error(const AWF& awf, const PackageRegistry& reg, std::string* path = nullptr) {
  try {
    bind_packages(awf, reg);
  } catch (const Error& e) {
    if (path) *path = e.path();
    return e.code();
  }
  FAIL("bound");
  return ErrorCode::Io;
}

PackageStub stub(const std::string& id, std::vector<std::string> in, std::vector<std::string> out) {
  return {id, std::move(in), std::move(out), [](const PackageData&, const ParamMap&) { return PackageData{}; }};
}

}  // namespace

TEST_CASE("registry rejects duplicate ids") {
  PackageRegistry reg;
  reg.add(stub("swan_stub", {}, {}));
  CHECK(reg.size() == 1);
  try {
    reg.add(stub("swan_stub", {}, {}));
    FAIL("added twice");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicatePackage);
  }
  CHECK(demo_registry().size() == 5);
}

TEST_CASE("golden workflow binds three stubs and one selection") {
  const CWF cwf = bind_packages(golden().awf, demo_registry());
  CHECK(cwf.bound.size() == 3);
  CHECK(cwf.builtin_blocks == 1);
  CHECK(cwf.order.front() == "sea_waves");
}

TEST_CASE("missing packages are all listed") {
  std::string path;
  CHECK(bind_error(golden().awf, demo_registry_without({"swan_stub"}), &path) == ErrorCode::MissingPackage);
  CHECK(path == "swan_stub");
  CHECK(bind_error(golden().awf, PackageRegistry{}, &path) == ErrorCode::MissingPackage);
  CHECK(path == "expert_stub,shipx_stub,swan_stub");
}

TEST_CASE("workflow without package blocks needs no registry") {
  TaskRequest r;
  r.provided[{"wave_spectrum", "sea_grid"}] =
      ProvidedData{{{kMeasuredAxis, 1.0}, {kExpertAxis, 0.7}}, DataSource::storage, Payload(66, 2.0)};
  r.requested = {{"wave_spectrum", "location"}};
  const CompiledTask t = compile_task(test::sea_ship(), r, std::nullopt);
  REQUIRE(t.awf.blocks.size() == 1);
  const CWF cwf = bind_packages(t.awf, PackageRegistry{});
  CHECK(cwf.bound.empty());
  CHECK(cwf.builtin_blocks == 1);
  const RunResult result = run(t, PackageRegistry{});
  CHECK(result.status == RunStatus::succeeded);
  const RunValue& v = result.values.at({"wave_spectrum", "location"});
  CHECK(v.payload == Payload{2.0});
  // Selection alone keeps measured data measured.
  CHECK(v.quality.at(kMeasuredAxis) == 1.0);
  CHECK(v.quality.at(kExpertAxis) == 0.7);
}

TEST_CASE("stub signatures are checked at bind time") {
  const AWF awf = golden().awf;
  PackageRegistry reg = demo_registry_without({"swan_stub"});
  reg.add(stub("swan_stub", {"near_water_wind", "bathymetry", "tide"}, {"wave_spectrum"}));
  CHECK(bind_error(awf, reg) == ErrorCode::SignatureMismatch);
  reg = demo_registry_without({"swan_stub"});
  reg.add(stub("swan_stub", {"near_water_wind"}, {}));
  CHECK(bind_error(awf, reg) == ErrorCode::SignatureMismatch);
  reg = demo_registry_without({"swan_stub"});
  reg.add(stub("swan_stub", {"near_water_wind"}, {"wave_spectrum"}));
  CHECK(bind_packages(awf, reg).bound.size() == 3);
}

TEST_CASE("golden run follows the stub laws") {
  const RunResult r = run(golden(), demo_registry());
  REQUIRE(r.status == RunStatus::succeeded);
  CHECK(r.values.at({"wave_spectrum", "sea_grid"}).payload == Payload{3.0});
  CHECK(r.values.at({"wave_spectrum", "location"}).payload == Payload{3.0});
  // rocking = 4 * 3 * 100 / 150; recommendation = 8 / 20
  CHECK(r.values.at({"rocking", "sim_time"}).payload[0] == doctest::Approx(8.0));
  CHECK(r.values.at(kRecommendation).payload[0] == doctest::Approx(0.4));
  for (const auto& key : golden().plan.produced) {
    REQUIRE(r.values.count(key));
    CHECK(r.values.at(key).quality.at(kMeasuredAxis) == 0.0);
    CHECK(r.values.at(key).quality.at(kExpertAxis) == doctest::Approx(0.9));
  }
  CHECK(r.trace.size() == 4);
  CHECK(r.trace[0].started == "1970-01-01T00:00:00Z");
  CHECK(r.trace[3].finished == "1970-01-01T00:00:07Z");
}

TEST_CASE("expert quality is the minimum over the inputs") {
  TaskRequest req = test::golden_request();
  req.provided.at({"bathymetry", "sea_grid"}).quality[kExpertAxis] = 0.3;
  const RunResult r = run(compile_task(test::sea_ship(), req, std::nullopt), demo_registry());
  CHECK(r.values.at(kRecommendation).quality.at(kExpertAxis) == doctest::Approx(0.3));
}

TEST_CASE("a throwing stub fails the run and keeps the trace") {
  TaskRequest req = test::golden_request();
  req.provided.at({"near_water_wind", std::nullopt}).payload = Payload{-5.0};
  const RunResult r = run(compile_task(test::sea_ship(), req, std::nullopt), demo_registry());
  CHECK(r.status == RunStatus::failed);
  REQUIRE(r.failure);
  CHECK(r.failure->block == "sea_waves");
  REQUIRE(r.trace.size() == 1);
  CHECK(r.trace[0].status == RunStatus::failed);
  CHECK_FALSE(r.values.count(kRecommendation));
}

TEST_CASE("execution is deterministic") {
  const CompiledTask t = golden();
  CHECK(serialize_run_result(run(t, demo_registry())) == serialize_run_result(run(t, demo_registry())));
}

TEST_CASE("wall clock timestamps are ISO-8601 UTC") {
  WallClock clock;
  const std::string now = clock.now();
  CHECK(now.size() == 20);
  CHECK(now[10] == 'T');
  CHECK(now.back() == 'Z');
}

TEST_CASE("staged models share scratch data across stages") {
  VSOClass c;
  c.name = "Staged";
  c.values["x"] = {"x", Variability::variable, "1", {}};
  c.values["y"] = {"y", Variability::variable, "1", {}};
  Model m;
  m.id = "chain";
  m.outputs[{"y", std::nullopt}] = {{kMeasuredAxis, 0.0}, {kExpertAxis, 0.5}};
  m.scenarios["s"] = Scenario{"s", {"make", "finish"}, {}, {}};
  m.packages = {"make", "finish"};
  m.selected_scenario = "s";
  c.models["chain"] = m;
  auto composite = std::make_shared<const CompositeVSO>(as_composite(c));
  TaskRequest r;
  r.requested = {{"y", std::nullopt}};

  PackageRegistry reg;
  reg.add({"make", {}, {"x"}, [](const PackageData&, const ParamMap&) { return PackageData{{"x", {4.0}}}; }});
  reg.add({"finish", {"x"}, {"y"}, [](const PackageData& in, const ParamMap&) {
             return PackageData{{"y", {in.at("x")[0] * 2}}};
           }});
  const RunResult result = run(compile_task(composite, r, std::nullopt), reg);
  REQUIRE(result.status == RunStatus::succeeded);
  const RunValue& y = result.values.at({"y", std::nullopt});
  CHECK(y.payload == Payload{8.0});
  // No data inputs: the declared quality stands, tagged simulated.
  CHECK(y.quality.at(kExpertAxis) == 0.5);
  CHECK(y.quality.at(kMeasuredAxis) == 0.0);
}

TEST_CASE("propagated quality matches an independent recomputation") {
  test::Rng rng(21);
  int runs = 0;
  for (int i = 0; i < 120 && runs < 40; ++i) {
    auto c = std::make_shared<const CompositeVSO>(test::random_composite(rng));
    const TaskRequest r = test::random_request(rng, c->cls);
    CompiledTask t;
    try {
      t = compile_task(c, r, std::nullopt);
    } catch (const Error&) {
      continue;
    }
    const RunResult result = run(t, test::random_registry(c->cls));
    REQUIRE(result.status == RunStatus::succeeded);
    const auto expected = test::oracle_block_quality(t.awf, r);
    const CWF cwf = bind_packages(t.awf, test::random_registry(c->cls));
    std::set<DataKey> seen;
    for (const auto& id : cwf.order) {
      for (const auto& [key, q] : t.awf.find_block(id)->produces) {
        if (!seen.insert(key).second || t.awf.external_inputs.count(key)) continue;
        CHECK(result.values.at(key).quality == expected.at(id).at(key));
      }
    }
    ++runs;
  }
  CHECK(runs >= 20);
}
