#pragma once

// Request -> plans -> AWF -> run, shared by the C API, the CLI and the
// service so every front end produces the same documents.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vso/awf.hpp"
#include "vso/planner.hpp"
#include "vso/runtime.hpp"

namespace vso {

/// Requested, provided and parameter datasets must be known to the
/// composite; parameters must be const; payload sizes must fit the basis.
/// InvalidRequest / UnknownParam / TypeMismatch / UnknownModel.
void validate_request(const CompositeVSO& composite, const TaskRequest& request);

/// Enabled models of the composite minus the request's disabled models.
FilteredGraph task_graph(std::shared_ptr<const CompositeVSO> composite, const TaskRequest& request);

/// Mode applied, then plans enumerated and ranked for the first derived
/// request (sweeps change parameter values, never which datasets exist).
PlanList plan_task(std::shared_ptr<const CompositeVSO> composite, const TaskRequest& request,
                   std::size_t cap = kDefaultPlanCap);

/// nullopt picks the top-ranked plan.
using PlanChoice = std::optional<std::size_t>;

struct CompiledTask {
  TaskRequest request;  // analysis or forecast request actually run
  Plan plan;
  AWF awf;
};

/// For a single derived request.
CompiledTask compile_task(std::shared_ptr<const CompositeVSO> composite, const TaskRequest& request, PlanChoice choice,
                          std::size_t cap = kDefaultPlanCap);

RunResult run_compiled(const CompiledTask& task, const PackageRegistry& registry, const std::string& run_id,
                       Clock& clock);

struct TaskRun {
  RunResult result;
  /// Optimization only: one run per grid point, ids "<run_id>.<n>".
  std::vector<RunResult> children;
  std::vector<CompiledTask> compiled;
};

/// Full pipeline. Optimization requests run every grid point and summarize
/// the objective (mean of its payload) with the best point by the goal.
TaskRun run_task(std::shared_ptr<const CompositeVSO> composite, const PackageRegistry& registry,
                 const TaskRequest& request, PlanChoice choice, const std::string& run_id, Clock& clock,
                 std::size_t cap = kDefaultPlanCap);

}  // namespace vso
