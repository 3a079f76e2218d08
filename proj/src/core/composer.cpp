#include "vso/composer.hpp"

#include <algorithm>

#include "vso/basis.hpp"
#include "vso/error.hpp"

namespace vso {

namespace {

std::vector<std::string> merge_origins(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::string> out = a;
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

const std::vector<std::string>& origins_of(const CompositeVSO& c, const std::string& element) {
  static const std::vector<std::string> none;
  auto it = c.provenance.find(element);
  return it == c.provenance.end() ? none : it->second;
}

QualityPoint remap(const QualityPoint& q, const std::map<std::string, std::string>& axis_map,
                   const QualitySpace& merged) {
  QualityPoint out;
  for (const auto& [axis, v] : q) {
    auto it = axis_map.find(axis);
    out[it == axis_map.end() ? axis : it->second] = v;
  }
  for (const auto& axis : merged) out.try_emplace(axis.id, 0.0);
  return out;
}

DataRefSet remap(const DataRefSet& refs, const std::map<std::string, std::string>& axis_map,
                 const QualitySpace& merged) {
  DataRefSet out;
  for (const auto& [key, q] : refs) out[key] = remap(q, axis_map, merged);
  return out;
}

// A class whose quality points are expressed in the merged space.
VSOClass lift(const VSOClass& cls, const std::map<std::string, std::string>& axis_map, const QualitySpace& merged) {
  VSOClass out = cls;
  out.quality = merged;
  for (auto& [id, m] : out.models) {
    m.inputs = remap(m.inputs, axis_map, merged);
    m.outputs = remap(m.outputs, axis_map, merged);
  }
  for (auto& [key, q] : out.edges) q = remap(q, axis_map, merged);
  return out;
}

bool is_empty(const VSOClass& c) { return c.bases.empty() && c.values.empty() && c.models.empty(); }

struct Triple {
  std::string value;
  std::optional<std::string> from;
  std::optional<std::string> to;
  QualityPoint from_quality;
  QualityPoint to_quality;
  const Basis* from_basis = nullptr;
  const Basis* to_basis = nullptr;
  std::pair<std::string, std::string> witness;  // (producer, consumer)
};

void collect_triples(const VSOClass& src, const VSOClass& dst, std::map<std::string, Triple>& out) {
  for (const auto& [pid, producer] : src.models) {
    if (producer.is_transition()) continue;
    for (const auto& [out_key, out_q] : producer.outputs) {
      if (!dst.find_value(out_key.value)) continue;
      for (const auto& [cid, consumer] : dst.models) {
        if (consumer.is_transition()) continue;
        for (const auto& [in_key, in_q] : consumer.inputs) {
          if (in_key.value != out_key.value || in_key.basis == out_key.basis) continue;
          const std::string id = transition_model_id(out_key.value, out_key.basis, in_key.basis);
          Triple t{out_key.value, out_key.basis, in_key.basis, out_q, in_q,
                   out_key.basis ? src.find_basis(*out_key.basis) : nullptr,
                   in_key.basis ? dst.find_basis(*in_key.basis) : nullptr, {pid, cid}};
          // Smallest (producer, consumer) pair wins whichever side it is on.
          auto it = out.find(id);
          if (it == out.end()) {
            out.emplace(id, std::move(t));
          } else if (t.witness < it->second.witness) {
            it->second = std::move(t);
          }
        }
      }
    }
  }
}

}  // namespace

QualityMergeResult merge_quality(const QualitySpace& left, const QualitySpace& right) {
  QualityMergeResult r;
  for (const auto& axis : left) {
    r.merged.push_back(axis);
    r.map_left[axis.id] = axis.id;
  }
  for (const auto& axis : right) {
    auto it = std::find_if(r.merged.begin(), r.merged.end(), [&](const QualityAxis& a) { return a.id == axis.id; });
    if (it == r.merged.end()) {
      r.merged.push_back(axis);
    } else if (it->domain != axis.domain) {
      throw Error(ErrorCode::AxisConflict, "quality.axes[" + axis.id + "]",
                  "axis '" + axis.id + "' is " + to_string(it->domain) + " on the left and " +
                      to_string(axis.domain) + " on the right");
    }
    r.map_right[axis.id] = axis.id;
  }
  return r;
}

std::string transition_model_id(const std::string& value, const std::optional<std::string>& from,
                                const std::optional<std::string>& to) {
  return "T:" + value + ":" + from.value_or("_") + "->" + to.value_or("_");
}

std::vector<Model> infer_transition_models(const VSOClass& left, const VSOClass& right) {
  std::map<std::string, Triple> triples;
  collect_triples(left, right, triples);
  collect_triples(right, left, triples);

  std::vector<Model> out;
  for (const auto& [id, t] : triples) {
    Model m;
    m.id = id;
    m.inputs[{t.value, t.from}] = t.from_quality;
    m.outputs[{t.value, t.to}] = t.to_quality;
    TransitionInfo info{t.value, t.from, t.to, ""};
    Scenario s;
    if (t.from_basis && t.to_basis && basis::covers(*t.from_basis, *t.to_basis)) {
      s.id = "select";
      info.script = basis::selection_script(t.from_basis->kind, *t.from, *t.to);
    } else {
      s.id = "needs_package";
      s.options["status"] = std::string("NEEDS_PACKAGE");
    }
    m.selected_scenario = s.id;
    m.scenarios[s.id] = s;
    m.transition = info;
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<Edge> make_transition_edges(const Model& transition, const std::map<std::string, Model>& models) {
  std::vector<Edge> out;
  for (const auto& [id, m] : models) {
    if (id == transition.id) continue;
    for (const auto& [key, q] : transition.inputs) {
      if (m.outputs.count(key)) out.push_back({id, transition.id, {key, q}});
    }
    for (const auto& [key, q] : transition.outputs) {
      if (m.inputs.count(key)) out.push_back({transition.id, id, {key, q}});
    }
  }
  return out;
}

CompositeVSO compose(const CompositeVSO& left_in, const CompositeVSO& right_in) {
  CompositeVSO out;
  out.quality_maps = merge_quality(left_in.cls.quality, right_in.cls.quality);
  const QualitySpace& merged = out.quality_maps.merged;
  const VSOClass left = lift(left_in.cls, out.quality_maps.map_left, merged);
  const VSOClass right = lift(right_in.cls, out.quality_maps.map_right, merged);

  VSOClass& c = out.cls;
  c.name = left.name + "+" + right.name;
  c.version = 1;
  if (left.mode == right.mode || is_empty(right)) {
    c.mode = left.mode;
  } else {
    c.mode = is_empty(left) ? right.mode : TaskMode::analysis;
  }
  c.quality = merged;

  for (const auto& axis : merged) {
    out.provenance[axis_element(axis.id)] =
        merge_origins(origins_of(left_in, axis_element(axis.id)), origins_of(right_in, axis_element(axis.id)));
  }

  c.bases = left.bases;
  for (const auto& [id, b] : right.bases) {
    auto [it, inserted] = c.bases.emplace(id, b);
    if (!inserted && !(it->second == b)) {
      throw Error(ErrorCode::BasisIdCollision, "bases[" + id + "]",
                  "basis '" + id + "' differs between " + left.name + " and " + right.name + "; rename one");
    }
  }
  for (const auto& [id, b] : c.bases) {
    out.provenance[basis_element(id)] =
        merge_origins(origins_of(left_in, basis_element(id)), origins_of(right_in, basis_element(id)));
  }

  c.values = left.values;
  for (const auto& [id, v] : right.values) {
    auto [it, inserted] = c.values.emplace(id, v);
    if (inserted) continue;
    Value& shared = it->second;
    if (shared.unit != v.unit || shared.variability != v.variability) {
      throw Error(ErrorCode::UnitConflict, "values[" + id + "]",
                  "shared value '" + id + "' is '" + shared.unit + "' (" + to_string(shared.variability) + ") in " +
                      left.name + " but '" + v.unit + "' (" + to_string(v.variability) + ") in " + right.name);
    }
    shared.ontology_tags = merge_origins(shared.ontology_tags, v.ontology_tags);
  }
  for (const auto& [id, v] : c.values) {
    out.provenance[value_element(id)] =
        merge_origins(origins_of(left_in, value_element(id)), origins_of(right_in, value_element(id)));
  }

  c.models = left.models;
  for (const auto& [id, m] : right.models) {
    auto [it, inserted] = c.models.emplace(id, m);
    if (!inserted && !(it->second == m)) {
      throw Error(ErrorCode::ModelIdCollision, "models[" + id + "]",
                  "model '" + id + "' differs between " + left.name + " and " + right.name);
    }
  }
  for (const auto& [id, m] : c.models) {
    out.provenance[model_element(id)] =
        merge_origins(origins_of(left_in, model_element(id)), origins_of(right_in, model_element(id)));
  }

  c.edges = left.edges;
  for (const auto& [key, q] : right.edges) c.edges.emplace(key, q);
  for (const auto& [key, q] : c.edges) {
    out.provenance[edge_element(key)] =
        merge_origins(origins_of(left_in, edge_element(key)), origins_of(right_in, edge_element(key)));
  }

  const std::vector<std::string> transition_origin{kTransitionOrigin};
  for (auto& m : infer_transition_models(left, right)) {
    const std::string id = m.id;
    if (c.models.emplace(id, std::move(m)).second) out.provenance[model_element(id)] = transition_origin;
  }

  auto add_inferred_edge = [&](const Edge& e) {
    if (c.edges.emplace(e.key(), e.data.quality).second) out.provenance[edge_element(e.key())] = transition_origin;
  };

  std::map<std::string, Model> regular;
  for (const auto& [id, m] : c.models) {
    if (!m.is_transition()) regular.emplace(id, m);
  }
  for (const auto& [id, m] : c.models) {
    if (!m.is_transition()) continue;
    for (const auto& e : make_transition_edges(m, regular)) add_inferred_edge(e);
  }

  // Identical datasets across the two objects flow without a transition.
  auto pass_through = [&](const VSOClass& src, const VSOClass& dst) {
    for (const auto& [pid, producer] : src.models) {
      if (producer.is_transition()) continue;
      for (const auto& [cid, consumer] : dst.models) {
        if (consumer.is_transition() || cid == pid) continue;
        for (const auto& [key, q] : producer.outputs) {
          if (consumer.inputs.count(key)) add_inferred_edge({pid, cid, {key, q}});
        }
      }
    }
  };
  pass_through(left, right);
  pass_through(right, left);

  return out;
}

CompositeVSO compose(const VSOClass& left, const VSOClass& right) {
  return compose(as_composite(left), as_composite(right));
}

CompositeVSO compose_all(const std::vector<VSOClass>& classes) {
  if (classes.empty()) throw Error(ErrorCode::InvalidRequest, "", "nothing to compose");
  CompositeVSO acc = as_composite(classes.front());
  for (std::size_t i = 1; i < classes.size(); ++i) acc = compose(acc, as_composite(classes[i]));
  return acc;
}

CompositeVSO canonical_form(CompositeVSO c) {
  c.cls.name.clear();
  auto by_id = [](const QualityAxis& a, const QualityAxis& b) { return a.id < b.id; };
  std::sort(c.cls.quality.begin(), c.cls.quality.end(), by_id);
  std::sort(c.quality_maps.merged.begin(), c.quality_maps.merged.end(), by_id);
  for (const auto& [from, to] : c.quality_maps.map_right) c.quality_maps.map_left[from] = to;
  c.quality_maps.map_right.clear();
  return c;
}

}  // namespace vso
