#include "vso/kb.hpp"

#include "vso/error.hpp"

namespace vso {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax: return "SyntaxError";
    case ErrorCode::Reference: return "ReferenceError";
    case ErrorCode::Invariant: return "InvariantError";
    case ErrorCode::TypeMismatch: return "TypeMismatch";
    case ErrorCode::UnknownParam: return "UnknownParam";
    case ErrorCode::AxisConflict: return "AxisConflict";
    case ErrorCode::UnitConflict: return "UnitConflict";
    case ErrorCode::BasisIdCollision: return "BasisIdCollision";
    case ErrorCode::ModelIdCollision: return "ModelIdCollision";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::UnknownBasis: return "UnknownBasis";
    case ErrorCode::NoPlan: return "NoPlan";
    case ErrorCode::ModeSpecMissing: return "ModeSpecMissing";
    case ErrorCode::InvalidRequest: return "InvalidRequest";
    case ErrorCode::UnresolvedParam: return "UnresolvedParam";
    case ErrorCode::MissingPackage: return "MissingPackage";
    case ErrorCode::SignatureMismatch: return "SignatureMismatch";
    case ErrorCode::DuplicatePackage: return "DuplicatePackage";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::BlockFailed: return "BlockFailed";
    case ErrorCode::NoComposite: return "NoComposite";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::UnknownRun: return "UnknownRun";
    case ErrorCode::UnknownClass: return "UnknownClass";
    case ErrorCode::UnknownCommand: return "UnknownCommand";
    case ErrorCode::Io: return "IoError";
  }
  return "Unknown";
}

QualitySpace default_quality_space() {
  return {{kMeasuredAxis, AxisDomain::binary}, {kExpertAxis, AxisDomain::real}};
}

std::string DataKey::str() const { return basis ? value + "@" + *basis : value; }

const Scenario* Model::active_scenario() const {
  auto it = scenarios.find(selected_scenario);
  return it == scenarios.end() ? nullptr : &it->second;
}

const Value* VSOClass::find_value(const std::string& id) const {
  auto it = values.find(id);
  return it == values.end() ? nullptr : &it->second;
}

const Basis* VSOClass::find_basis(const std::string& id) const {
  auto it = bases.find(id);
  return it == bases.end() ? nullptr : &it->second;
}

const Model* VSOClass::find_model(const std::string& id) const {
  auto it = models.find(id);
  return it == models.end() ? nullptr : &it->second;
}

std::set<DataKey> VSOClass::referenced_keys() const {
  std::set<DataKey> keys;
  for (const auto& [id, model] : models) {
    for (const auto& [key, q] : model.inputs) keys.insert(key);
    for (const auto& [key, q] : model.outputs) keys.insert(key);
    for (const auto& [sid, scenario] : model.scenarios) {
      for (const auto& param : scenario.extra_params) {
        if (const auto* key = std::get_if<DataKey>(&param.binding)) keys.insert(*key);
      }
    }
  }
  for (const auto& [key, q] : edges) keys.insert(key.data);
  return keys;
}

std::vector<Edge> VSOClass::edge_list() const {
  std::vector<Edge> out;
  out.reserve(edges.size());
  for (const auto& [key, q] : edges) out.push_back({key.from_model, key.to_model, {key.data, q}});
  return out;
}

namespace {

template <typename E, std::size_t N>
E parse_enum(const std::string& s, const std::pair<E, const char*> (&table)[N], const char* what) {
  for (const auto& [v, name] : table) {
    if (s == name) return v;
  }
  throw Error(ErrorCode::Syntax, "", "unknown " + std::string(what) + " '" + s + "'");
}

template <typename E, std::size_t N>
std::string enum_name(E v, const std::pair<E, const char*> (&table)[N]) {
  for (const auto& [e, name] : table) {
    if (e == v) return name;
  }
  return "?";
}

constexpr std::pair<BasisKind, const char*> kBasisKinds[] = {
    {BasisKind::space, "space"}, {BasisKind::time, "time"}, {BasisKind::group, "group"}};
constexpr std::pair<BasisReference, const char*> kReferences[] = {
    {BasisReference::absolute, "absolute"}, {BasisReference::relative, "relative"}};
constexpr std::pair<Variability, const char*> kVariability[] = {
    {Variability::constant, "const"}, {Variability::variable, "var"}};
constexpr std::pair<AxisDomain, const char*> kDomains[] = {
    {AxisDomain::binary, "binary"}, {AxisDomain::real, "real"}};
constexpr std::pair<TaskMode, const char*> kModes[] = {{TaskMode::analysis, "analysis"},
                                                       {TaskMode::forecast, "forecast"},
                                                       {TaskMode::optimization, "optimization"}};
constexpr std::pair<BindingSource, const char*> kSources[] = {
    {BindingSource::literal, "literal"},
    {BindingSource::model_option, "model_option"},
    {BindingSource::vso_value, "vso_value"}};
constexpr std::pair<DataSource, const char*> kDataSources[] = {
    {DataSource::user, "user"}, {DataSource::storage, "storage"}, {DataSource::simulation, "simulation"}};

}  // namespace

std::string to_string(BasisKind v) { return enum_name(v, kBasisKinds); }
std::string to_string(BasisReference v) { return enum_name(v, kReferences); }
std::string to_string(Variability v) { return enum_name(v, kVariability); }
std::string to_string(AxisDomain v) { return enum_name(v, kDomains); }
std::string to_string(TaskMode v) { return enum_name(v, kModes); }
std::string to_string(BindingSource v) { return enum_name(v, kSources); }
std::string to_string(DataSource v) { return enum_name(v, kDataSources); }

BasisKind parse_basis_kind(const std::string& s) { return parse_enum(s, kBasisKinds, "basis kind"); }
BasisReference parse_basis_reference(const std::string& s) {
  return parse_enum(s, kReferences, "basis reference");
}
Variability parse_variability(const std::string& s) { return parse_enum(s, kVariability, "variability"); }
AxisDomain parse_axis_domain(const std::string& s) { return parse_enum(s, kDomains, "axis domain"); }
TaskMode parse_task_mode(const std::string& s) { return parse_enum(s, kModes, "mode"); }
BindingSource parse_binding_source(const std::string& s) {
  return parse_enum(s, kSources, "binding source");
}
DataSource parse_data_source(const std::string& s) { return parse_enum(s, kDataSources, "data source"); }

QualityPoint zero_quality(const QualitySpace& space) {
  QualityPoint q;
  for (const auto& axis : space) q[axis.id] = 0.0;
  return q;
}

std::string basis_element(const std::string& id) { return "basis:" + id; }
std::string value_element(const std::string& id) { return "value:" + id; }
std::string model_element(const std::string& id) { return "model:" + id; }
std::string axis_element(const std::string& id) { return "axis:" + id; }
std::string edge_element(const EdgeKey& key) {
  return "edge:" + key.from_model + "->" + key.to_model + ":" + key.data.str();
}

CompositeVSO as_composite(VSOClass cls) {
  CompositeVSO out;
  const std::vector<std::string> origin{cls.name};
  for (const auto& axis : cls.quality) {
    out.quality_maps.map_left[axis.id] = axis.id;
    out.provenance[axis_element(axis.id)] = origin;
  }
  out.quality_maps.merged = cls.quality;
  for (const auto& [id, b] : cls.bases) out.provenance[basis_element(id)] = origin;
  for (const auto& [id, v] : cls.values) out.provenance[value_element(id)] = origin;
  for (const auto& [id, m] : cls.models) {
    out.provenance[model_element(id)] =
        m.is_transition() ? std::vector<std::string>{kTransitionOrigin} : origin;
  }
  for (const auto& [key, q] : cls.edges) out.provenance[edge_element(key)] = origin;
  out.cls = std::move(cls);
  return out;
}

}  // namespace vso
