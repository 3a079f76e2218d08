#pragma once

// Interpretation of a composite structure for a task: structure filtering,
// dataset marking, plan (sub-graph) enumeration, ranking and task modes.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vso/kb.hpp"

namespace vso {

struct FilteredGraph {
  std::shared_ptr<const CompositeVSO> base;
  std::set<std::string> enabled_models;
  EdgeSet active_edges;  // both endpoints enabled
};

/// Restricts the composite to `enabled` (UnknownModel for ids it lacks).
FilteredGraph select_structure(std::shared_ptr<const CompositeVSO> composite, const std::set<std::string>& enabled);

/// Models whose `enabled` flag is set, minus `disabled`.
FilteredGraph select_enabled(std::shared_ptr<const CompositeVSO> composite,
                             const std::set<std::string>& disabled = {});

enum class DatasetStatus { ok, needed, unavailable };
std::string to_string(DatasetStatus s);
DatasetStatus parse_dataset_status(const std::string& s);

struct DatasetState {
  DataRef ref;
  DatasetStatus state = DatasetStatus::needed;
  std::string reason;

  bool operator==(const DatasetState&) const = default;
};

/// OK when provided or producible by enabled models from the provided data;
/// UNAVAILABLE when every producer is disabled (or cannot run), or nothing
/// enabled needs it; NEEDED when an enabled model requires it and the user
/// could still supply it. Ordered by key.
std::vector<DatasetState> mark_dataset_states(const FilteredGraph& graph, const std::set<DataKey>& provided);

struct ProvidedData {
  QualityPoint quality;
  DataSource source = DataSource::user;
  std::optional<Payload> payload;

  bool operator==(const ProvidedData&) const = default;
};

struct ForecastSpec {
  std::string basis;
  ParamMap params;  // overrides, e.g. {"t_end": 48}

  bool operator==(const ForecastSpec&) const = default;
};

enum class Goal { minimize, maximize };

struct SweepAxis {
  DataKey param;
  std::vector<Payload> values;

  bool operator==(const SweepAxis&) const = default;
};

struct OptimizationSpec {
  std::optional<DataKey> objective;
  Goal goal = Goal::minimize;
  std::vector<SweepAxis> grid;

  bool operator==(const OptimizationSpec&) const = default;
};

struct TaskRequest {
  TaskMode mode = TaskMode::analysis;
  std::map<DataKey, ProvidedData> provided;
  std::set<DataKey> requested;
  /// Values of const parameters (instance parameters).
  std::map<DataKey, Payload> parameters;
  std::set<std::string> disabled_models;
  std::map<std::string, ParamMap> basis_overrides;
  std::optional<ForecastSpec> forecast;
  std::optional<OptimizationSpec> optimization;

  /// Keys of provided data and parameters.
  std::set<DataKey> available() const;
  /// InvalidRequest when nothing is requested or the mode spec is malformed.
  void check() const;

  bool operator==(const TaskRequest&) const = default;
};

struct PlanStep {
  std::string model;
  std::string scenario;

  bool operator==(const PlanStep&) const = default;
};

struct Plan {
  std::vector<PlanStep> models;  // topological, ties by id
  std::vector<Edge> edges;       // data actually flowing between plan models
  std::set<DataKey> provided;    // available data the plan consumes or returns
  std::set<DataKey> produced;
  double score = 0.0;

  std::vector<std::string> model_ids() const;  // sorted
  bool operator==(const Plan&) const = default;
};

struct PlanList {
  std::vector<Plan> plans;
  bool truncated = false;
  std::size_t cap = 0;

  bool operator==(const PlanList&) const = default;
};

struct ScoreConfig {
  /// Factor applied to the expert score of data that is not measured.
  double simulated_penalty = 0.5;
};

inline constexpr std::size_t kDefaultPlanCap = 64;

/// A model can take part in a plan when it is enabled, its selected
/// scenario runs something (a package sequence or an inline script) and
/// its value bindings are available up front.
bool model_executable(const Model& m, const std::set<DataKey>& available);

/// Every minimal plan deriving the requested data from the available data,
/// in lexicographic order of model ids, at most `cap` of them. Search is
/// backward chaining from the requested datasets over producer models and
/// active edges with memoization; a model never repeats on one derivation
/// path. Throws NoPlan (path lists the blocking datasets).
PlanList enumerate_plans(const FilteredGraph& graph, const TaskRequest& request, std::size_t cap = kDefaultPlanCap,
                         const ScoreConfig& score = {});

/// Score descending, then fewer models, then model ids. Stable.
std::vector<Plan> rank_plans(std::vector<Plan> plans);

/// Mean over requested datasets of expert quality, scaled by the simulated
/// penalty when the measured axis is not set.
double plan_score(const Plan& plan, const FilteredGraph& graph, const TaskRequest& request, const ScoreConfig& cfg);

/// Analysis: unchanged. Forecast: horizon override applied to the basis.
/// Optimization: one analysis request per point of the swept grid.
/// Throws ModeSpecMissing.
std::vector<TaskRequest> apply_mode(const TaskRequest& request, const FilteredGraph& graph);

/// Datasets that block the requested data (missing leaves of the backward
/// cone); empty when everything is derivable.
std::vector<DataKey> plan_blockers(const FilteredGraph& graph, const TaskRequest& request);

}  // namespace vso
