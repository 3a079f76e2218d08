#include "vso/pipeline.hpp"

#include <numeric>

#include "vso/basis.hpp"
#include "vso/error.hpp"
#include "vso/kb_io.hpp"

namespace vso {

namespace {

void check_payload_size(const VSOClass& cls, const DataKey& key, const Payload& payload, const std::string& path) {
  if (!key.basis) {
    if (payload.size() != 1) throw Error(ErrorCode::TypeMismatch, path, key.str() + " takes a single sample");
    return;
  }
  const Basis* b = cls.find_basis(*key.basis);
  if (!b) throw Error(ErrorCode::UnknownBasis, path, "unknown basis '" + *key.basis + "'");
  const std::size_t n = basis::position_count(*b);
  if (payload.size() != 1 && payload.size() != n) {
    throw Error(ErrorCode::TypeMismatch, path,
                key.str() + " takes 1 or " + std::to_string(n) + " samples, got " + std::to_string(payload.size()));
  }
}

double objective_value(const RunResult& run, const DataKey& objective) {
  const Payload& p = run.values.at(objective).payload;
  return std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
}

}  // namespace

void validate_request(const CompositeVSO& composite, const TaskRequest& request) {
  request.check();
  const VSOClass& cls = composite.cls;
  const std::set<DataKey> known = cls.referenced_keys();
  for (const auto& key : request.requested) {
    if (!known.count(key)) throw Error(ErrorCode::InvalidRequest, "requested[" + key.str() + "]", "unknown dataset " + key.str());
  }
  for (const auto& [key, p] : request.provided) {
    const std::string path = "provided[" + key.str() + "]";
    if (!known.count(key)) throw Error(ErrorCode::InvalidRequest, path, "unknown dataset " + key.str());
    if (p.payload) check_payload_size(cls, key, *p.payload, path);
  }
  instantiate(std::make_shared<const VSOClass>(cls), request.parameters);
  for (const auto& id : request.disabled_models) {
    if (!cls.find_model(id)) throw Error(ErrorCode::UnknownModel, "disabled_models[" + id + "]", "unknown model '" + id + "'");
  }
  for (const auto& [id, params] : request.basis_overrides) {
    if (!cls.find_basis(id)) throw Error(ErrorCode::UnknownBasis, "basis_overrides." + id, "unknown basis '" + id + "'");
  }
  if (request.optimization && request.optimization->objective &&
      !known.count(*request.optimization->objective)) {
    throw Error(ErrorCode::InvalidRequest, "optimization.objective", "unknown dataset " + request.optimization->objective->str());
  }
}

FilteredGraph task_graph(std::shared_ptr<const CompositeVSO> composite, const TaskRequest& request) {
  return select_enabled(std::move(composite), request.disabled_models);
}

PlanList plan_task(std::shared_ptr<const CompositeVSO> composite, const TaskRequest& request, std::size_t cap) {
  validate_request(*composite, request);
  const FilteredGraph graph = task_graph(std::move(composite), request);
  const std::vector<TaskRequest> derived = apply_mode(request, graph);
  PlanList list = enumerate_plans(graph, derived.front(), cap);
  list.plans = rank_plans(std::move(list.plans));
  return list;
}

CompiledTask compile_task(std::shared_ptr<const CompositeVSO> composite, const TaskRequest& request, PlanChoice choice,
                          std::size_t cap) {
  validate_request(*composite, request);
  const FilteredGraph graph = task_graph(composite, request);
  PlanList list = enumerate_plans(graph, request, cap);
  list.plans = rank_plans(std::move(list.plans));
  const std::size_t index = choice.value_or(0);
  if (index >= list.plans.size()) {
    throw Error(ErrorCode::InvalidRequest, "plan",
                "plan index " + std::to_string(index) + " out of range (" + std::to_string(list.plans.size()) + " plans)");
  }
  CompiledTask task{request, list.plans[index], {}};
  task.awf = compile_awf(task.plan, *composite, request);
  return task;
}

RunResult run_compiled(const CompiledTask& task, const PackageRegistry& registry, const std::string& run_id,
                       Clock& clock) {
  const CWF cwf = bind_packages(task.awf, registry);
  std::map<DataKey, Payload> inputs = task.request.parameters;
  std::map<DataKey, QualityPoint> quality;
  for (const auto& [key, p] : task.request.provided) {
    if (p.payload) inputs[key] = *p.payload;
    quality[key] = p.quality;
  }
  return execute(cwf, inputs, quality, run_id, clock);
}

TaskRun run_task(std::shared_ptr<const CompositeVSO> composite, const PackageRegistry& registry,
                 const TaskRequest& request, PlanChoice choice, const std::string& run_id, Clock& clock,
                 std::size_t cap) {
  validate_request(*composite, request);
  const FilteredGraph graph = task_graph(composite, request);
  const std::vector<TaskRequest> derived = apply_mode(request, graph);

  TaskRun out;
  if (request.mode != TaskMode::optimization) {
    out.compiled.push_back(compile_task(composite, derived.front(), choice, cap));
    out.result = run_compiled(out.compiled.back(), registry, run_id, clock);
    return out;
  }

  const OptimizationSpec& spec = *request.optimization;
  SweepSummary sweep{*spec.objective, spec.goal, {}, std::nullopt};
  for (std::size_t i = 0; i < derived.size(); ++i) {
    out.compiled.push_back(compile_task(composite, derived[i], choice, cap));
    RunResult child = run_compiled(out.compiled.back(), registry, run_id + "." + std::to_string(i + 1), clock);
    SweepPoint pt{child.run_id, {}, child.status, std::nullopt};
    for (const auto& axis : spec.grid) pt.parameters[axis.param] = derived[i].parameters.at(axis.param);
    if (child.status == RunStatus::succeeded && child.values.count(*spec.objective)) {
      pt.objective = objective_value(child, *spec.objective);
    }
    sweep.points.push_back(std::move(pt));
    out.children.push_back(std::move(child));
  }
  for (std::size_t i = 0; i < sweep.points.size(); ++i) {
    if (!sweep.points[i].objective) continue;
    if (!sweep.best) {
      sweep.best = i;
      continue;
    }
    const double cur = *sweep.points[*sweep.best].objective;
    const double x = *sweep.points[i].objective;
    if (spec.goal == Goal::minimize ? x < cur : x > cur) sweep.best = i;
  }
  out.result.run_id = run_id;
  out.result.status = RunStatus::succeeded;
  for (const auto& c : out.children) {
    if (c.status == RunStatus::failed) out.result.status = RunStatus::failed;
  }
  out.result.sweep = std::move(sweep);
  return out;
}

}  // namespace vso
