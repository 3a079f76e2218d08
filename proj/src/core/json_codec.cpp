#include "vso/json_codec.hpp"

#include <algorithm>

#include "vso/error.hpp"

namespace vso::codec {

json parse_text(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Syntax, "", std::string("malformed document: ") + e.what());
  }
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw Error(ErrorCode::Syntax, path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(ErrorCode::Syntax, path + "." + key, std::string("missing key '") + key + "'");
  return *it;
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw Error(ErrorCode::Syntax, path, "expected a string");
  return v.get<std::string>();
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw Error(ErrorCode::Syntax, path, "expected a number");
  return v.get<double>();
}

std::string require_string(const json& obj, const char* key, const std::string& path) {
  return as_string(require(obj, key, path), path + "." + key);
}

double require_number(const json& obj, const char* key, const std::string& path) {
  return as_number(require(obj, key, path), path + "." + key);
}

const json& require_array(const json& obj, const char* key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_array()) throw Error(ErrorCode::Syntax, path + "." + key, "expected an array");
  return v;
}

const json* optional_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

namespace {

template <typename T, typename Fn>
T with_path(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (!e.path().empty()) throw;
    throw Error(e.code(), path, e.what());
  }
}

}  // namespace

json encode(const DataKey& key) {
  return {{"value", key.value}, {"basis", key.basis ? json(*key.basis) : json(nullptr)}};
}

DataKey decode_key(const json& v, const std::string& path) {
  DataKey key;
  key.value = require_string(v, "value", path);
  if (const json* b = optional_field(v, "basis")) key.basis = as_string(*b, path + ".basis");
  return key;
}

json encode(const QualityPoint& q) {
  json out = json::object();
  for (const auto& [axis, value] : q) out[axis] = value;
  return out;
}

QualityPoint decode_quality(const json& v, const std::string& path) {
  if (!v.is_object()) throw Error(ErrorCode::Syntax, path, "expected a quality object");
  QualityPoint q;
  for (const auto& [axis, value] : v.items()) q[axis] = as_number(value, path + "." + axis);
  return q;
}

json encode(const DataRef& ref) {
  json out = encode(ref.key);
  out["quality"] = encode(ref.quality);
  return out;
}

DataRef decode_ref(const json& v, const QualitySpace& space, const std::string& path) {
  DataRef ref{decode_key(v, path), {}};
  if (const json* q = optional_field(v, "quality")) ref.quality = decode_quality(*q, path + ".quality");
  for (const auto& axis : space) ref.quality.try_emplace(axis.id, 0.0);
  return ref;
}

json encode_payload(const Payload& p) {
  if (p.size() == 1) return p.front();
  return p;
}

Payload decode_payload(const json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw Error(ErrorCode::TypeMismatch, path, "payload must be a number or an array of numbers");
  Payload out;
  for (const auto& x : v) {
    if (!x.is_number()) throw Error(ErrorCode::TypeMismatch, path, "payload must be a number or an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

json encode(const ParamValue& v) {
  return std::visit([](const auto& x) { return json(x); }, v);
}

ParamValue decode_param(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? 1.0 : 0.0;
  if (v.is_array()) return decode_payload(v, path);
  throw Error(ErrorCode::Syntax, path, "parameter must be a number, string or number array");
}

json encode(const ParamMap& m) {
  json out = json::object();
  for (const auto& [k, v] : m) out[k] = encode(v);
  return out;
}

ParamMap decode_params(const json& v, const std::string& path) {
  if (!v.is_object()) throw Error(ErrorCode::Syntax, path, "expected an object");
  ParamMap out;
  for (const auto& [k, x] : v.items()) out[k] = decode_param(x, path + "." + k);
  return out;
}

json encode(const QualitySpace& q) {
  json axes = json::array();
  for (const auto& a : q) axes.push_back({{"id", a.id}, {"domain", to_string(a.domain)}});
  return {{"axes", axes}};
}

QualitySpace decode_quality_space(const json& v, const std::string& path) {
  QualitySpace out;
  const json& axes = require_array(v, "axes", path);
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const std::string p = path + ".axes[" + std::to_string(i) + "]";
    QualityAxis axis;
    axis.id = require_string(axes[i], "id", p);
    axis.domain = with_path<AxisDomain>(p + ".domain", [&] { return parse_axis_domain(require_string(axes[i], "domain", p)); });
    out.push_back(axis);
  }
  return out;
}

json encode_refs(const DataRefSet& refs) {
  json out = json::array();
  for (const auto& [key, q] : refs) out.push_back(encode(DataRef{key, q}));
  return out;
}

DataRefSet decode_refs(const json& arr, const QualitySpace& space, const std::string& path) {
  DataRefSet out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    DataRef ref = decode_ref(arr[i], space, path + "[" + std::to_string(i) + "]");
    if (!out.emplace(ref.key, ref.quality).second) {
      throw Error(ErrorCode::Invariant, path + "[" + ref.key.str() + "]", "DUPLICATE_ID: dataset listed twice");
    }
  }
  return out;
}

namespace {

json encode_binding(const ExtraParam& p) {
  json out = {{"name", p.name}, {"source", to_string(p.source())}};
  if (const auto* lit = std::get_if<ParamValue>(&p.binding)) out["binding"] = encode(*lit);
  if (const auto* opt = std::get_if<OptionBinding>(&p.binding)) out["binding"] = opt->key;
  if (const auto* key = std::get_if<DataKey>(&p.binding)) out["binding"] = encode(*key);
  return out;
}

ExtraParam decode_binding(const json& v, const std::string& path) {
  ExtraParam p;
  p.name = require_string(v, "name", path);
  const std::string p_path = path + "[" + p.name + "]";
  const auto source =
      with_path<BindingSource>(p_path + ".source", [&] { return parse_binding_source(require_string(v, "source", path)); });
  const json* binding = optional_field(v, "binding");
  if (!binding) {
    if (source == BindingSource::literal) {
      throw Error(ErrorCode::Invariant, p_path + ".binding", "MISSING_LITERAL: literal parameter carries no value");
    }
    throw Error(ErrorCode::Syntax, p_path + ".binding", "missing binding");
  }
  switch (source) {
    case BindingSource::literal: p.binding = decode_param(*binding, p_path + ".binding"); break;
    case BindingSource::model_option: p.binding = OptionBinding{as_string(*binding, p_path + ".binding")}; break;
    case BindingSource::vso_value: p.binding = decode_key(*binding, p_path + ".binding"); break;
  }
  return p;
}

json encode_model(const Model& m) {
  json scenarios = json::array();
  for (const auto& [id, s] : m.scenarios) {
    json params = json::array();
    for (const auto& p : s.extra_params) params.push_back(encode_binding(p));
    scenarios.push_back({{"id", s.id},
                         {"package_seq", s.package_seq},
                         {"extra_params", params},
                         {"options", encode(s.options)}});
  }
  json out = {{"id", m.id},
              {"enabled", m.enabled},
              {"inputs", encode_refs(m.inputs)},
              {"outputs", encode_refs(m.outputs)},
              {"packages", json(std::vector<std::string>(m.packages.begin(), m.packages.end()))},
              {"options", encode(m.options)},
              {"scenarios", scenarios},
              {"selected_scenario", m.selected_scenario}};
  if (m.transition) {
    const auto& t = *m.transition;
    out["transition"] = {{"shared_value", t.shared_value},
                         {"from_basis", t.from_basis ? json(*t.from_basis) : json(nullptr)},
                         {"to_basis", t.to_basis ? json(*t.to_basis) : json(nullptr)},
                         {"script", t.script.empty() ? json(nullptr) : json(t.script)}};
  }
  return out;
}

Model decode_model(const json& v, const QualitySpace& space, const std::string& path) {
  Model m;
  m.id = require_string(v, "id", path);
  const std::string base = "models[" + m.id + "]";
  if (const json* e = optional_field(v, "enabled")) {
    if (!e->is_boolean()) throw Error(ErrorCode::Syntax, base + ".enabled", "expected a boolean");
    m.enabled = e->get<bool>();
  }
  m.inputs = decode_refs(require_array(v, "inputs", base), space, base + ".inputs");
  m.outputs = decode_refs(require_array(v, "outputs", base), space, base + ".outputs");
  if (const json* pk = optional_field(v, "packages")) {
    if (!pk->is_array()) throw Error(ErrorCode::Syntax, base + ".packages", "expected an array");
    for (const auto& p : *pk) m.packages.insert(as_string(p, base + ".packages"));
  }
  if (const json* o = optional_field(v, "options")) m.options = decode_params(*o, base + ".options");
  const json& scenarios = require_array(v, "scenarios", base);
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const json& sv = scenarios[i];
    Scenario s;
    s.id = require_string(sv, "id", base + ".scenarios[" + std::to_string(i) + "]");
    const std::string sp = base + ".scenarios[" + s.id + "]";
    if (const json* seq = optional_field(sv, "package_seq")) {
      if (!seq->is_array()) throw Error(ErrorCode::Syntax, sp + ".package_seq", "expected an array");
      for (const auto& p : *seq) s.package_seq.push_back(as_string(p, sp + ".package_seq"));
    }
    if (const json* ep = optional_field(sv, "extra_params")) {
      if (!ep->is_array()) throw Error(ErrorCode::Syntax, sp + ".extra_params", "expected an array");
      for (const auto& p : *ep) s.extra_params.push_back(decode_binding(p, sp + ".extra_params"));
      std::sort(s.extra_params.begin(), s.extra_params.end(),
                [](const ExtraParam& a, const ExtraParam& b) { return a.name < b.name; });
      for (std::size_t k = 1; k < s.extra_params.size(); ++k) {
        if (s.extra_params[k].name == s.extra_params[k - 1].name) {
          throw Error(ErrorCode::Invariant, sp + ".extra_params[" + s.extra_params[k].name + "]",
                      "DUPLICATE_ID: parameter declared twice");
        }
      }
    }
    if (const json* o = optional_field(sv, "options")) s.options = decode_params(*o, sp + ".options");
    if (!m.scenarios.emplace(s.id, s).second) {
      throw Error(ErrorCode::Invariant, sp, "DUPLICATE_ID: scenario declared twice");
    }
  }
  if (const json* sel = optional_field(v, "selected_scenario")) {
    m.selected_scenario = as_string(*sel, base + ".selected_scenario");
  } else if (m.scenarios.size() == 1) {
    m.selected_scenario = m.scenarios.begin()->first;
  }
  if (const json* t = optional_field(v, "transition")) {
    const std::string tp = base + ".transition";
    TransitionInfo info;
    info.shared_value = require_string(*t, "shared_value", tp);
    if (const json* b = optional_field(*t, "from_basis")) info.from_basis = as_string(*b, tp + ".from_basis");
    if (const json* b = optional_field(*t, "to_basis")) info.to_basis = as_string(*b, tp + ".to_basis");
    if (const json* s = optional_field(*t, "script")) info.script = as_string(*s, tp + ".script");
    m.transition = info;
  }
  return m;
}

}  // namespace

json encode(const VSOClass& cls) {
  json bases = json::array();
  for (const auto& [id, b] : cls.bases) {
    bases.push_back({{"id", b.id},
                     {"kind", to_string(b.kind)},
                     {"reference", to_string(b.reference)},
                     {"params", encode(b.params)}});
  }
  json values = json::array();
  for (const auto& [id, v] : cls.values) {
    values.push_back({{"id", v.id},
                      {"variability", to_string(v.variability)},
                      {"unit", v.unit},
                      {"ontology_tags", v.ontology_tags}});
  }
  json models = json::array();
  for (const auto& [id, m] : cls.models) models.push_back(encode_model(m));
  json edges = json::array();
  for (const auto& [key, q] : cls.edges) {
    edges.push_back({{"from_model", key.from_model}, {"to_model", key.to_model}, {"data", encode(DataRef{key.data, q})}});
  }
  return {{"vso_class", cls.name},
          {"version", cls.version},
          {"mode", to_string(cls.mode)},
          {"bases", bases},
          {"values", values},
          {"quality", encode(cls.quality)},
          {"models", models},
          {"edges", edges}};
}

VSOClass decode_class(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::Syntax, "", "document must be an object");
  VSOClass cls;
  cls.name = require_string(doc, "vso_class", "");
  const json& version = require(doc, "version", "");
  if (!version.is_number_integer()) throw Error(ErrorCode::Syntax, "version", "expected an integer");
  cls.version = version.get<int>();
  if (const json* mode = optional_field(doc, "mode")) {
    cls.mode = with_path<TaskMode>("mode", [&] { return parse_task_mode(as_string(*mode, "mode")); });
  }
  if (const json* q = optional_field(doc, "quality")) cls.quality = decode_quality_space(*q, "quality");

  auto array_or_empty = [&](const char* key) -> json {
    const json* a = optional_field(doc, key);
    if (!a) return json::array();
    if (!a->is_array()) throw Error(ErrorCode::Syntax, key, "expected an array");
    return *a;
  };

  const json bases = array_or_empty("bases");
  for (std::size_t i = 0; i < bases.size(); ++i) {
    Basis b;
    b.id = require_string(bases[i], "id", "bases[" + std::to_string(i) + "]");
    const std::string p = "bases[" + b.id + "]";
    b.kind = with_path<BasisKind>(p + ".kind", [&] { return parse_basis_kind(require_string(bases[i], "kind", p)); });
    if (const json* r = optional_field(bases[i], "reference")) {
      b.reference = with_path<BasisReference>(p + ".reference", [&] { return parse_basis_reference(as_string(*r, p)); });
    }
    if (const json* params = optional_field(bases[i], "params")) b.params = decode_params(*params, p + ".params");
    if (!cls.bases.emplace(b.id, b).second) throw Error(ErrorCode::Invariant, p, "DUPLICATE_ID: basis declared twice");
  }

  const json values = array_or_empty("values");
  for (std::size_t i = 0; i < values.size(); ++i) {
    Value v;
    v.id = require_string(values[i], "id", "values[" + std::to_string(i) + "]");
    const std::string p = "values[" + v.id + "]";
    v.variability = with_path<Variability>(
        p + ".variability", [&] { return parse_variability(require_string(values[i], "variability", p)); });
    if (const json* u = optional_field(values[i], "unit")) v.unit = as_string(*u, p + ".unit");
    if (const json* tags = optional_field(values[i], "ontology_tags")) {
      if (!tags->is_array()) throw Error(ErrorCode::Syntax, p + ".ontology_tags", "expected an array");
      for (const auto& t : *tags) v.ontology_tags.push_back(as_string(t, p + ".ontology_tags"));
      std::sort(v.ontology_tags.begin(), v.ontology_tags.end());
      v.ontology_tags.erase(std::unique(v.ontology_tags.begin(), v.ontology_tags.end()), v.ontology_tags.end());
    }
    if (!cls.values.emplace(v.id, v).second) throw Error(ErrorCode::Invariant, p, "DUPLICATE_ID: value declared twice");
  }

  const json models = array_or_empty("models");
  for (std::size_t i = 0; i < models.size(); ++i) {
    Model m = decode_model(models[i], cls.quality, "models[" + std::to_string(i) + "]");
    const std::string id = m.id;
    if (!cls.models.emplace(id, std::move(m)).second) {
      throw Error(ErrorCode::Invariant, "models[" + id + "]", "DUPLICATE_ID: model declared twice");
    }
  }

  const json edges = array_or_empty("edges");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string p = "edges[" + std::to_string(i) + "]";
    Edge e;
    e.from_model = require_string(edges[i], "from_model", p);
    e.to_model = require_string(edges[i], "to_model", p);
    e.data = decode_ref(require(edges[i], "data", p), cls.quality, p + ".data");
    if (cls.edges.count(e.key())) throw Error(ErrorCode::Invariant, p, "DUPLICATE_ID: edge declared twice");
    cls.add_edge(e);
  }
  return cls;
}

json encode(const CompositeVSO& c) {
  json doc = encode(c.cls);
  json prov = json::object();
  for (const auto& [element, origins] : c.provenance) prov[element] = origins;
  doc["provenance"] = prov;
  doc["quality_maps"] = {{"merged", encode(c.quality_maps.merged)["axes"]},
                         {"left", c.quality_maps.map_left},
                         {"right", c.quality_maps.map_right}};
  return doc;
}

CompositeVSO decode_composite(const json& doc) {
  VSOClass cls = decode_class(doc);
  const json* prov = optional_field(doc, "provenance");
  if (!prov) return as_composite(std::move(cls));
  CompositeVSO out;
  out.cls = std::move(cls);
  if (!prov->is_object()) throw Error(ErrorCode::Syntax, "provenance", "expected an object");
  for (const auto& [element, origins] : prov->items()) {
    if (!origins.is_array()) throw Error(ErrorCode::Syntax, "provenance." + element, "expected an array");
    std::vector<std::string> names;
    for (const auto& o : origins) names.push_back(as_string(o, "provenance." + element));
    out.provenance[element] = names;
  }
  const json& maps = require(doc, "quality_maps", "");
  out.quality_maps.merged = decode_quality_space({{"axes", require_array(maps, "merged", "quality_maps")}}, "quality_maps.merged");
  auto decode_map = [&](const char* key) {
    std::map<std::string, std::string> m;
    const json& obj = require(maps, key, "quality_maps");
    if (!obj.is_object()) throw Error(ErrorCode::Syntax, std::string("quality_maps.") + key, "expected an object");
    for (const auto& [from, to] : obj.items()) m[from] = as_string(to, std::string("quality_maps.") + key + "." + from);
    return m;
  };
  out.quality_maps.map_left = decode_map("left");
  out.quality_maps.map_right = decode_map("right");
  return out;
}

}  // namespace vso::codec
