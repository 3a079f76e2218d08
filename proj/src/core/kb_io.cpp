#include "vso/kb_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "vso/basis.hpp"
#include "vso/error.hpp"
#include "vso/json_codec.hpp"

namespace vso {

namespace {

class Checker {
 public:
  explicit Checker(const VSOClass& cls) : cls_(cls) {}

  std::vector<Violation> run() {
    check_quality_space();
    for (const auto& [id, b] : cls_.bases) check_basis(b);
    for (const auto& [id, m] : cls_.models) check_model(m);
    for (const auto& [key, q] : cls_.edges) check_edge(key, q);
    std::stable_sort(out_.begin(), out_.end(),
                     [](const Violation& a, const Violation& b) { return a.path < b.path; });
    return std::move(out_);
  }

 private:
  void add(std::string code, std::string path, std::string message) {
    out_.push_back({std::move(code), std::move(path), std::move(message)});
  }

  void check_quality_space() {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < cls_.quality.size(); ++i) {
      if (!seen.insert(cls_.quality[i].id).second) {
        add("DUPLICATE_AXIS", "quality.axes[" + cls_.quality[i].id + "]", "quality axis declared twice");
      }
    }
  }

  void check_basis(const Basis& b) {
    const std::string path = "bases[" + b.id + "]";
    if (b.kind != BasisKind::group && b.params.empty()) {
      add("EMPTY_BASIS_PARAMS", path + ".params", to_string(b.kind) + " basis needs parameters");
    }
  }

  void check_key(const DataKey& key, const std::string& path) {
    if (!cls_.find_value(key.value)) add("DANGLING_VALUE", path, "unknown value '" + key.value + "'");
    if (key.basis && !cls_.find_basis(*key.basis)) add("DANGLING_BASIS", path, "unknown basis '" + *key.basis + "'");
  }

  void check_quality(const QualityPoint& q, const std::string& path) {
    for (const auto& axis : cls_.quality) {
      auto it = q.find(axis.id);
      if (it == q.end()) {
        add("QUALITY_INCOMPLETE", path + ".quality", "axis '" + axis.id + "' unassigned");
      } else if (axis.domain == AxisDomain::binary && it->second != 0.0 && it->second != 1.0) {
        add("QUALITY_OUT_OF_DOMAIN", path + ".quality." + axis.id, "binary axis must be 0 or 1");
      }
    }
    for (const auto& [axis, v] : q) {
      bool known = std::any_of(cls_.quality.begin(), cls_.quality.end(),
                               [&](const QualityAxis& a) { return a.id == axis; });
      if (!known) add("QUALITY_UNKNOWN_AXIS", path + ".quality." + axis, "axis not in the quality space");
    }
  }

  void check_ref_set(const DataRefSet& refs, const std::string& path) {
    std::set<std::string> value_ids;
    for (const auto& [key, q] : refs) {
      const std::string p = path + "[" + key.str() + "]";
      check_key(key, p);
      check_quality(q, p);
      if (!value_ids.insert(key.value).second) {
        add("DUPLICATE_VALUE_IN_SET", p, "value '" + key.value + "' appears on two bases in one set");
      }
    }
  }

  void check_model(const Model& m) {
    const std::string path = "models[" + m.id + "]";
    check_ref_set(m.inputs, path + ".inputs");
    check_ref_set(m.outputs, path + ".outputs");
    for (const auto& [key, q] : m.inputs) {
      if (m.outputs.count(key)) {
        add("IN_OUT_OVERLAP", path + ".inputs[" + key.str() + "]", "dataset is both input and output");
      }
    }
    if (!m.active_scenario()) {
      add("UNKNOWN_SELECTED_SCENARIO", path + ".selected_scenario",
          "selected scenario '" + m.selected_scenario + "' is not declared");
    }
    for (const auto& [sid, s] : m.scenarios) {
      const std::string sp = path + ".scenarios[" + sid + "]";
      for (std::size_t i = 0; i < s.package_seq.size(); ++i) {
        if (!m.packages.count(s.package_seq[i])) {
          add("DANGLING_PACKAGE", sp + ".package_seq[" + std::to_string(i) + "]",
              "package '" + s.package_seq[i] + "' is not among the model's packages");
        }
      }
      for (const auto& p : s.extra_params) {
        const std::string pp = sp + ".extra_params[" + p.name + "]";
        if (const auto* key = std::get_if<DataKey>(&p.binding)) {
          if (!cls_.find_value(key->value) || (key->basis && !cls_.find_basis(*key->basis))) {
            add("DANGLING_BINDING", pp, "binding '" + key->str() + "' does not resolve");
          }
        } else if (const auto* opt = std::get_if<OptionBinding>(&p.binding)) {
          if (!m.options.count(opt->key)) add("DANGLING_OPTION", pp, "model option '" + opt->key + "' is not declared");
        }
      }
    }
    if (m.transition) check_transition(m, path);
  }

  void check_transition(const Model& m, const std::string& path) {
    const auto& t = *m.transition;
    const DataKey in{t.shared_value, t.from_basis};
    const DataKey out{t.shared_value, t.to_basis};
    if (m.inputs.size() != 1 || !m.inputs.count(in) || m.outputs.size() != 1 || !m.outputs.count(out)) {
      add("TRANSITION_SHAPE", path + ".transition", "transition must map " + in.str() + " to " + out.str());
    }
    if (!t.script.empty()) {
      try {
        basis::parse_selection_script(t.script);
      } catch (const Error& e) {
        add("TRANSITION_SHAPE", path + ".transition.script", e.what());
      }
    }
  }

  void check_edge(const EdgeKey& key, const QualityPoint& q) {
    const std::string path = "edges[" + key.from_model + "->" + key.to_model + ":" + key.data.str() + "]";
    check_key(key.data, path + ".data");
    check_quality(q, path + ".data");
    const Model* from = cls_.find_model(key.from_model);
    const Model* to = cls_.find_model(key.to_model);
    if (!from) add("EDGE_UNKNOWN_MODEL", path + ".from_model", "unknown model '" + key.from_model + "'");
    if (!to) add("EDGE_UNKNOWN_MODEL", path + ".to_model", "unknown model '" + key.to_model + "'");
    if (from && to && (!from->outputs.count(key.data) || !to->inputs.count(key.data))) {
      add("EDGE_CONDITION", path,
          "edge data must be an output of '" + key.from_model + "' and an input of '" + key.to_model + "'");
    }
  }

  const VSOClass& cls_;
  std::vector<Violation> out_;
};

void raise_first(const std::vector<Violation>& violations) {
  if (violations.empty()) return;
  const Violation& v = violations.front();
  throw Error(violation_error_code(v.code), v.path, v.code + ": " + v.message);
}

void validate_provenance(const CompositeVSO& c) {
  const auto check = [&](const std::string& element) {
    if (!c.provenance.count(element)) {
      throw Error(ErrorCode::Invariant, "provenance", "PROVENANCE_INCOMPLETE: no origin for " + element);
    }
  };
  for (const auto& [id, b] : c.cls.bases) check(basis_element(id));
  for (const auto& [id, v] : c.cls.values) check(value_element(id));
  for (const auto& [id, m] : c.cls.models) check(model_element(id));
  for (const auto& [key, q] : c.cls.edges) check(edge_element(key));
}

}  // namespace

ErrorCode violation_error_code(const std::string& code) {
  if (code.rfind("DANGLING_", 0) == 0 || code == "EDGE_UNKNOWN_MODEL" || code == "QUALITY_UNKNOWN_AXIS") {
    return ErrorCode::Reference;
  }
  return ErrorCode::Invariant;
}

std::vector<Violation> validate_vso(const VSOClass& cls) { return Checker(cls).run(); }

VSOClass parse_vso_class_unchecked(std::string_view document) {
  return codec::decode_class(codec::parse_text(document));
}

VSOClass parse_vso_class(std::string_view document) {
  VSOClass cls = parse_vso_class_unchecked(document);
  raise_first(validate_vso(cls));
  return cls;
}

std::string serialize_vso_class(const VSOClass& cls) { return codec::dump(codec::encode(cls)); }

CompositeVSO parse_composite(std::string_view document) {
  CompositeVSO c = codec::decode_composite(codec::parse_text(document));
  raise_first(validate_vso(c.cls));
  validate_provenance(c);
  return c;
}

std::string serialize_composite(const CompositeVSO& composite) { return codec::dump(codec::encode(composite)); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, path, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, path, "cannot write '" + path + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::Io, path, "short write to '" + path + "'");
}

VSOInstance instantiate(std::shared_ptr<const VSOClass> cls, const std::map<DataKey, Payload>& params) {
  VSOInstance inst;
  for (const auto& [key, payload] : params) {
    const Value* value = cls->find_value(key.value);
    if (!value || value->variability != Variability::constant) {
      throw Error(ErrorCode::UnknownParam, key.str(), "'" + key.value + "' is not a const value of " + cls->name);
    }
    const Basis* b = nullptr;
    if (key.basis) {
      b = cls->find_basis(*key.basis);
      if (!b) throw Error(ErrorCode::UnknownParam, key.str(), "unknown basis '" + *key.basis + "'");
    }
    const std::size_t positions = b ? basis::position_count(*b) : 1;
    if (payload.empty() || (payload.size() != 1 && payload.size() != positions)) {
      throw Error(ErrorCode::TypeMismatch, key.str(),
                  "payload of " + std::to_string(payload.size()) + " samples does not fit " +
                      std::to_string(positions) + " positions");
    }
    inst.param_values[key] = payload;
  }
  // Const datasets the class refers to but which have no value yet.
  for (const auto& key : cls->referenced_keys()) {
    const Value* value = cls->find_value(key.value);
    if (value && value->variability == Variability::constant && !inst.param_values.count(key)) {
      inst.needed.insert(key);
    }
  }
  for (const auto& [id, value] : cls->values) {
    if (value.variability != Variability::constant) continue;
    const DataKey bare{id, std::nullopt};
    bool referenced = false;
    for (const auto& [k, p] : inst.param_values) referenced |= k.value == id;
    for (const auto& k : inst.needed) referenced |= k.value == id;
    if (!referenced) inst.needed.insert(bare);
  }
  inst.cls = std::move(cls);
  return inst;
}

}  // namespace vso
