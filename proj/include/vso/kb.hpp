#pragma once

// Domain types of a virtual simulation object class: bases, values, quality
// space, models with their scenarios, and the edges between models.

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace vso {

/// Numeric samples of a dataset. One sample is a uniform (or basis-less)
/// value; otherwise one sample per position of the dataset's basis.
using Payload = std::vector<double>;

/// Scalar, string or sample-vector parameter (basis params, options,
/// resolved block params).
using ParamValue = std::variant<double, std::string, std::vector<double>>;
using ParamMap = std::map<std::string, ParamValue>;

enum class BasisKind { space, time, group };
enum class BasisReference { absolute, relative };
enum class Variability { constant, variable };
enum class AxisDomain { binary, real };
enum class TaskMode { analysis, forecast, optimization };

struct Basis {
  std::string id;
  BasisKind kind = BasisKind::space;
  ParamMap params;
  BasisReference reference = BasisReference::absolute;

  bool operator==(const Basis&) const = default;
};

struct Value {
  std::string id;
  Variability variability = Variability::variable;
  std::string unit;
  std::vector<std::string> ontology_tags;  // sorted, unique

  bool operator==(const Value&) const = default;
};

struct QualityAxis {
  std::string id;
  AxisDomain domain = AxisDomain::real;

  bool operator==(const QualityAxis&) const = default;
};

/// Ordered product of quality axes.
using QualitySpace = std::vector<QualityAxis>;

/// [measured:binary, expert:real]
QualitySpace default_quality_space();

inline constexpr const char* kMeasuredAxis = "measured";
inline constexpr const char* kExpertAxis = "expert";

/// Per-axis coordinates of a quality point.
using QualityPoint = std::map<std::string, double>;

/// Identity of a dataset: a value on an optional basis. Quality is carried
/// alongside the key, not part of it.
struct DataKey {
  std::string value;
  std::optional<std::string> basis;

  auto operator<=>(const DataKey&) const = default;
  bool operator==(const DataKey&) const = default;

  /// "value@basis" or "value" when basis-less.
  std::string str() const;
};

struct DataRef {
  DataKey key;
  QualityPoint quality;

  bool operator==(const DataRef&) const = default;
};

/// A set of DataRefs keyed by identity.
using DataRefSet = std::map<DataKey, QualityPoint>;

struct OptionBinding {
  std::string key;
  bool operator==(const OptionBinding&) const = default;
};

/// Literal value, model option, or dataset of the owning object.
using Binding = std::variant<ParamValue, OptionBinding, DataKey>;

enum class BindingSource { literal, model_option, vso_value };

struct ExtraParam {
  std::string name;
  Binding binding;

  BindingSource source() const { return static_cast<BindingSource>(binding.index()); }
  bool operator==(const ExtraParam&) const = default;
};

struct Scenario {
  std::string id;
  std::vector<std::string> package_seq;  // ordered, may be empty
  std::vector<ExtraParam> extra_params;  // sorted by name
  ParamMap options;

  bool operator==(const Scenario&) const = default;
};

/// Present on inferred transition models only.
struct TransitionInfo {
  std::string shared_value;
  std::optional<std::string> from_basis;
  std::optional<std::string> to_basis;
  std::string script;  // empty when a package is still needed

  bool needs_package() const { return script.empty(); }
  bool operator==(const TransitionInfo&) const = default;
};

struct Model {
  std::string id;
  DataRefSet inputs;
  DataRefSet outputs;
  std::map<std::string, Scenario> scenarios;
  std::set<std::string> packages;
  ParamMap options;
  bool enabled = true;
  std::string selected_scenario;
  std::optional<TransitionInfo> transition;

  /// The selected scenario, or nullptr when it does not resolve.
  const Scenario* active_scenario() const;
  bool is_transition() const { return transition.has_value(); }

  bool operator==(const Model&) const = default;
};

struct EdgeKey {
  std::string from_model;
  std::string to_model;
  DataKey data;

  auto operator<=>(const EdgeKey&) const = default;
  bool operator==(const EdgeKey&) const = default;
};

struct Edge {
  std::string from_model;
  std::string to_model;
  DataRef data;

  EdgeKey key() const { return {from_model, to_model, data.key}; }
  bool operator==(const Edge&) const = default;
};

using EdgeSet = std::map<EdgeKey, QualityPoint>;

struct VSOClass {
  std::string name;
  int version = 1;
  TaskMode mode = TaskMode::analysis;
  std::map<std::string, Basis> bases;
  std::map<std::string, Value> values;
  QualitySpace quality = default_quality_space();
  std::map<std::string, Model> models;
  EdgeSet edges;

  const Value* find_value(const std::string& id) const;
  const Basis* find_basis(const std::string& id) const;
  const Model* find_model(const std::string& id) const;

  /// Every DataKey referenced by model inputs/outputs, edges or value
  /// bindings.
  std::set<DataKey> referenced_keys() const;

  void add_edge(const Edge& edge) { edges[edge.key()] = edge.data.quality; }
  std::vector<Edge> edge_list() const;

  bool operator==(const VSOClass&) const = default;
};

/// Origin of a composite element: class names of the objects it came from,
/// or "transition" for inferred elements.
inline constexpr const char* kTransitionOrigin = "transition";

struct QualityMergeResult {
  QualitySpace merged;
  std::map<std::string, std::string> map_left;   // left axis id -> merged axis id
  std::map<std::string, std::string> map_right;  // right axis id -> merged axis id

  bool operator==(const QualityMergeResult&) const = default;
};

struct CompositeVSO {
  VSOClass cls;
  QualityMergeResult quality_maps;
  /// "basis:<id>", "value:<id>", "model:<id>", "edge:<from>-><to>:<data>",
  /// "axis:<id>" -> sorted origin names.
  std::map<std::string, std::vector<std::string>> provenance;

  bool operator==(const CompositeVSO&) const = default;
};

enum class DataSource { user, storage, simulation };

struct VSOInstance {
  std::shared_ptr<const VSOClass> cls;
  std::map<DataKey, Payload> param_values;
  std::set<DataKey> needed;  // const datasets still without a value
  std::map<DataKey, DataSource> provided_data;
};

// Enum <-> text used by every document format.
std::string to_string(BasisKind v);
std::string to_string(BasisReference v);
std::string to_string(Variability v);
std::string to_string(AxisDomain v);
std::string to_string(TaskMode v);
std::string to_string(BindingSource v);
std::string to_string(DataSource v);
BasisKind parse_basis_kind(const std::string& s);
BasisReference parse_basis_reference(const std::string& s);
Variability parse_variability(const std::string& s);
AxisDomain parse_axis_domain(const std::string& s);
TaskMode parse_task_mode(const std::string& s);
BindingSource parse_binding_source(const std::string& s);
DataSource parse_data_source(const std::string& s);

/// Quality point with every axis of `space` at 0.
QualityPoint zero_quality(const QualitySpace& space);

/// Provenance element keys.
std::string basis_element(const std::string& id);
std::string value_element(const std::string& id);
std::string model_element(const std::string& id);
std::string axis_element(const std::string& id);
std::string edge_element(const EdgeKey& key);

/// Wraps a plain class as a single-origin composite.
CompositeVSO as_composite(VSOClass cls);

}  // namespace vso
