#include "vso/planner.hpp"

#include <algorithm>
#include <functional>

#include "vso/error.hpp"

namespace vso {

namespace {

using ModelSet = std::vector<int>;  // sorted model indices
using Family = std::vector<ModelSet>;

ModelSet set_union(const ModelSet& a, const ModelSet& b) {
  ModelSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool is_subset(const ModelSet& small, const ModelSet& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

// Keeps the inclusion-minimal members, without duplicates, sorted.
Family minimize(Family f) {
  std::sort(f.begin(), f.end(), [](const ModelSet& a, const ModelSet& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  f.erase(std::unique(f.begin(), f.end()), f.end());
  Family out;
  for (const auto& s : f) {
    bool dominated = std::any_of(out.begin(), out.end(), [&](const ModelSet& kept) { return is_subset(kept, s); });
    if (!dominated) out.push_back(s);
  }
  return out;
}

Family cross(const Family& a, const Family& b) {
  Family out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a) {
    for (const auto& y : b) out.push_back(set_union(x, y));
  }
  return minimize(std::move(out));
}

std::set<DataKey> binding_keys(const Model& m) {
  std::set<DataKey> keys;
  if (const Scenario* s = m.active_scenario()) {
    for (const auto& p : s->extra_params) {
      if (const auto* key = std::get_if<DataKey>(&p.binding)) keys.insert(*key);
    }
  }
  return keys;
}

// Executable enabled models and the edges that can feed them.
class Search {
 public:
  Search(const FilteredGraph& graph, const std::set<DataKey>& available) : graph_(graph), available_(available) {
    const VSOClass& cls = graph.base->cls;
    for (const auto& id : graph.enabled_models) {
      const Model* m = cls.find_model(id);
      if (m && model_executable(*m, available)) {
        index_[id] = static_cast<int>(models_.size());
        models_.push_back(m);
      }
    }
    suppliers_.resize(models_.size());
    for (std::size_t i = 0; i < models_.size(); ++i) {
      for (const auto& [key, q] : models_[i]->inputs) {
        if (available_.count(key)) continue;
        auto& list = suppliers_[i][key];
        for (const auto& [edge, eq] : graph.active_edges) {
          if (edge.to_model != models_[i]->id || edge.data != key) continue;
          auto it = index_.find(edge.from_model);
          if (it != index_.end()) list.push_back(it->second);
        }
        std::sort(list.begin(), list.end());
      }
    }
  }

  const std::vector<const Model*>& models() const { return models_; }
  const std::map<DataKey, std::vector<int>>& suppliers(int i) const { return suppliers_[static_cast<std::size_t>(i)]; }

  std::vector<int> producers(const DataKey& key) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < models_.size(); ++i) {
      if (models_[i]->outputs.count(key)) out.push_back(static_cast<int>(i));
    }
    return out;
  }

  // Minimal model sets containing `m` in which `m` can fire, never using a
  // model already on the derivation path.
  const Family& supports(int m, const ModelSet& path) {
    auto memo_key = std::make_pair(m, path);
    if (auto it = memo_.find(memo_key); it != memo_.end()) return it->second;
    ModelSet inner = set_union(path, {m});
    Family fam{{m}};
    for (const auto& [key, list] : suppliers(m)) {
      Family options;
      for (int p : list) {
        if (std::binary_search(inner.begin(), inner.end(), p)) continue;
        const Family& sub = supports(p, inner);
        options.insert(options.end(), sub.begin(), sub.end());
      }
      if (options.empty()) {
        fam.clear();
        break;
      }
      fam = cross(fam, minimize(std::move(options)));
    }
    return memo_[memo_key] = std::move(fam);
  }

  // Firing round of every model of `set` (models fire once all inputs are
  // available or fed over an edge by a model of an earlier round); -1 when a
  // model never fires.
  std::map<int, int> rounds(const ModelSet& set) const {
    std::map<int, int> round;
    for (int m : set) round[m] = -1;
    for (int r = 0;; ++r) {
      std::vector<int> ready;
      for (int m : set) {
        if (round[m] >= 0) continue;
        bool ok = true;
        for (const auto& [key, list] : suppliers(m)) {
          ok = std::any_of(list.begin(), list.end(), [&](int p) { return round.count(p) && round[p] >= 0; });
          if (!ok) break;
        }
        if (ok) ready.push_back(m);
      }
      if (ready.empty()) break;
      for (int m : ready) round[m] = r;
    }
    return round;
  }

 private:
  const FilteredGraph& graph_;
  const std::set<DataKey>& available_;
  std::vector<const Model*> models_;
  std::map<std::string, int> index_;
  std::vector<std::map<DataKey, std::vector<int>>> suppliers_;
  std::map<std::pair<int, ModelSet>, Family> memo_;
};

std::string join_keys(const std::vector<DataKey>& keys) {
  std::string out;
  for (const auto& k : keys) out += (out.empty() ? "" : ",") + k.str();
  return out;
}

std::set<DataKey> derivable(const FilteredGraph& graph, const std::set<DataKey>& available,
                            std::set<std::string>* fired_out = nullptr) {
  Search search(graph, available);
  ModelSet all(search.models().size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
  std::set<DataKey> out = available;
  for (const auto& [m, r] : search.rounds(all)) {
    if (r < 0) continue;
    const Model* model = search.models()[static_cast<std::size_t>(m)];
    for (const auto& [key, q] : model->outputs) out.insert(key);
    if (fired_out) fired_out->insert(model->id);
  }
  return out;
}

Plan build_plan(const Search& search, const ModelSet& set, const std::set<DataKey>& available,
                const TaskRequest& request, const FilteredGraph& graph) {
  const auto round = search.rounds(set);
  Plan plan;
  std::map<std::string, std::set<std::string>> preds;
  for (int m : set) {
    const Model* model = search.models()[static_cast<std::size_t>(m)];
    preds[model->id];
    for (const auto& [key, list] : search.suppliers(m)) {
      for (int p : list) {
        if (!round.count(p) || round.at(p) < 0 || round.at(p) >= round.at(m)) continue;
        const Model* producer = search.models()[static_cast<std::size_t>(p)];
        EdgeKey ek{producer->id, model->id, key};
        plan.edges.push_back({producer->id, model->id, {key, graph.active_edges.at(ek)}});
        preds[model->id].insert(producer->id);
      }
    }
    for (const auto& [key, q] : model->inputs) {
      if (available.count(key)) plan.provided.insert(key);
    }
    for (const auto& key : binding_keys(*model)) plan.provided.insert(key);
    for (const auto& [key, q] : model->outputs) plan.produced.insert(key);
  }
  for (const auto& key : request.requested) {
    if (available.count(key)) plan.provided.insert(key);
  }
  std::sort(plan.edges.begin(), plan.edges.end(), [](const Edge& a, const Edge& b) { return a.key() < b.key(); });

  // Kahn order, smallest ready id first.
  std::set<std::string> done;
  while (done.size() < preds.size()) {
    for (const auto& [id, ps] : preds) {
      if (done.count(id)) continue;
      if (std::includes(done.begin(), done.end(), ps.begin(), ps.end())) {
        const Model* model = graph.base->cls.find_model(id);
        plan.models.push_back({id, model->selected_scenario});
        done.insert(id);
        break;
      }
    }
  }
  return plan;
}

double contribution(const QualityPoint& q, const ScoreConfig& cfg) {
  auto expert = q.find(kExpertAxis);
  auto measured = q.find(kMeasuredAxis);
  const double e = expert == q.end() ? 0.0 : expert->second;
  const bool is_measured = measured != q.end() && measured->second >= 1.0;
  return is_measured ? e : e * cfg.simulated_penalty;
}

}  // namespace

std::string to_string(DatasetStatus s) {
  switch (s) {
    case DatasetStatus::ok: return "OK";
    case DatasetStatus::needed: return "NEEDED";
    case DatasetStatus::unavailable: return "UNAVAILABLE";
  }
  return "?";
}

DatasetStatus parse_dataset_status(const std::string& s) {
  if (s == "OK") return DatasetStatus::ok;
  if (s == "NEEDED") return DatasetStatus::needed;
  if (s == "UNAVAILABLE") return DatasetStatus::unavailable;
  throw Error(ErrorCode::Syntax, "state", "unknown dataset state '" + s + "'");
}

FilteredGraph select_structure(std::shared_ptr<const CompositeVSO> composite, const std::set<std::string>& enabled) {
  FilteredGraph g;
  for (const auto& id : enabled) {
    if (!composite->cls.find_model(id)) throw Error(ErrorCode::UnknownModel, id, "unknown model '" + id + "'");
  }
  g.enabled_models = enabled;
  for (const auto& [key, q] : composite->cls.edges) {
    if (enabled.count(key.from_model) && enabled.count(key.to_model)) g.active_edges.emplace(key, q);
  }
  g.base = std::move(composite);
  return g;
}

FilteredGraph select_enabled(std::shared_ptr<const CompositeVSO> composite, const std::set<std::string>& disabled) {
  std::set<std::string> enabled;
  for (const auto& id : disabled) {
    if (!composite->cls.find_model(id)) throw Error(ErrorCode::UnknownModel, id, "unknown model '" + id + "'");
  }
  for (const auto& [id, m] : composite->cls.models) {
    if (m.enabled && !disabled.count(id)) enabled.insert(id);
  }
  return select_structure(std::move(composite), enabled);
}

bool model_executable(const Model& m, const std::set<DataKey>& available) {
  if (!m.enabled) return false;
  const Scenario* s = m.active_scenario();
  if (!s) return false;
  const bool runs = m.transition ? !m.transition->script.empty() : !s->package_seq.empty();
  if (!runs) return false;
  for (const auto& key : binding_keys(m)) {
    if (!available.count(key)) return false;
  }
  return true;
}

std::vector<DatasetState> mark_dataset_states(const FilteredGraph& graph, const std::set<DataKey>& provided) {
  const VSOClass& cls = graph.base->cls;
  std::set<std::string> fired;
  const std::set<DataKey> reachable = derivable(graph, provided, &fired);

  // Declared quality of each dataset: first producer's output, else first
  // consumer's input, else the quality space origin.
  std::map<DataKey, QualityPoint> quality;
  for (const auto& [id, m] : cls.models) {
    for (const auto& [key, q] : m.outputs) quality.try_emplace(key, q);
  }
  for (const auto& [id, m] : cls.models) {
    for (const auto& [key, q] : m.inputs) quality.try_emplace(key, q);
  }
  std::set<DataKey> keys = cls.referenced_keys();
  keys.insert(provided.begin(), provided.end());

  std::vector<DatasetState> out;
  for (const auto& key : keys) {
    DatasetState st;
    st.ref.key = key;
    auto qi = quality.find(key);
    st.ref.quality = qi == quality.end() ? zero_quality(cls.quality) : qi->second;

    std::vector<const Model*> producers;
    std::vector<std::string> consumers;
    for (const auto& [id, m] : cls.models) {
      if (m.outputs.count(key)) producers.push_back(&m);
      if (graph.enabled_models.count(id) && (m.inputs.count(key) || binding_keys(m).count(key))) {
        consumers.push_back(id);
      }
    }
    const bool any_runnable = std::any_of(producers.begin(), producers.end(), [&](const Model* m) {
      return graph.enabled_models.count(m->id) && model_executable(*m, provided);
    });

    if (provided.count(key)) {
      st.state = DatasetStatus::ok;
      st.reason = "provided";
    } else if (reachable.count(key)) {
      st.state = DatasetStatus::ok;
      for (const Model* m : producers) {
        if (fired.count(m->id)) {
          st.reason = "produced by " + m->id;
          break;
        }
      }
    } else if (!producers.empty() && !any_runnable) {
      st.state = DatasetStatus::unavailable;
      std::string names;
      for (const Model* m : producers) names += (names.empty() ? "" : ", ") + m->id;
      st.reason = "producers disabled or not runnable: " + names;
    } else if (!consumers.empty()) {
      st.state = DatasetStatus::needed;
      std::string names;
      for (const auto& c : consumers) names += (names.empty() ? "" : ", ") + c;
      st.reason = "required by " + names;
    } else if (!producers.empty()) {
      st.state = DatasetStatus::unavailable;
      st.reason = "producers lack inputs";
    } else {
      st.state = DatasetStatus::unavailable;
      st.reason = "not provided and no enabled model uses it";
    }
    out.push_back(std::move(st));
  }
  return out;
}

std::set<DataKey> TaskRequest::available() const {
  std::set<DataKey> out;
  for (const auto& [key, p] : provided) out.insert(key);
  for (const auto& [key, p] : parameters) out.insert(key);
  return out;
}

void TaskRequest::check() const {
  if (requested.empty()) throw Error(ErrorCode::InvalidRequest, "requested", "a task must request at least one dataset");
  if (mode == TaskMode::optimization && optimization && !optimization->objective) {
    throw Error(ErrorCode::ModeSpecMissing, "optimization.objective", "optimization needs exactly one objective");
  }
}

std::vector<std::string> Plan::model_ids() const {
  std::vector<std::string> ids;
  for (const auto& s : models) ids.push_back(s.model);
  std::sort(ids.begin(), ids.end());
  return ids;
}

double plan_score(const Plan& plan, const FilteredGraph& graph, const TaskRequest& request, const ScoreConfig& cfg) {
  if (request.requested.empty()) return 0.0;
  const VSOClass& cls = graph.base->cls;
  double total = 0.0;
  for (const auto& key : request.requested) {
    double best = 0.0;
    if (auto it = request.provided.find(key); it != request.provided.end()) {
      best = contribution(it->second.quality, cfg);
    } else {
      for (const auto& step : plan.models) {
        const Model* m = cls.find_model(step.model);
        if (auto out = m->outputs.find(key); out != m->outputs.end()) {
          best = std::max(best, contribution(out->second, cfg));
        }
      }
    }
    total += best;
  }
  return total / static_cast<double>(request.requested.size());
}

std::vector<DataKey> plan_blockers(const FilteredGraph& graph, const TaskRequest& request) {
  const std::set<DataKey> available = request.available();
  std::set<std::string> fired;
  const std::set<DataKey> reachable = derivable(graph, available, &fired);
  Search search(graph, available);
  const VSOClass& cls = graph.base->cls;
  std::set<DataKey> blockers;
  std::set<int> expanded;

  std::function<void(int)> expand_model = [&](int m) {
    if (!expanded.insert(m).second) return;
    for (const auto& [key, list] : search.suppliers(m)) {
      const bool fed = std::any_of(list.begin(), list.end(), [&](int p) {
        return fired.count(search.models()[static_cast<std::size_t>(p)]->id) > 0;
      });
      if (fed) continue;
      if (list.empty()) blockers.insert(key);
      for (int p : list) expand_model(p);
    }
  };

  for (const auto& key : request.requested) {
    if (reachable.count(key)) continue;
    const auto producers = search.producers(key);
    if (!producers.empty()) {
      for (int p : producers) expand_model(p);
      continue;
    }
    blockers.insert(key);
    // Missing bindings keep otherwise enabled producers from running.
    for (const auto& id : graph.enabled_models) {
      const Model* m = cls.find_model(id);
      if (!m || !m->outputs.count(key)) continue;
      for (const auto& b : binding_keys(*m)) {
        if (!available.count(b)) blockers.insert(b);
      }
    }
  }
  return {blockers.begin(), blockers.end()};
}

PlanList enumerate_plans(const FilteredGraph& graph, const TaskRequest& request, std::size_t cap,
                         const ScoreConfig& score) {
  if (cap < 1) throw Error(ErrorCode::InvalidRequest, "cap", "cap must be at least 1");
  request.check();
  const std::set<DataKey> available = request.available();
  Search search(graph, available);

  Family plans{{}};
  for (const auto& key : request.requested) {
    if (available.count(key)) continue;
    Family cover;
    for (int p : search.producers(key)) {
      const Family& sub = search.supports(p, {});
      cover.insert(cover.end(), sub.begin(), sub.end());
    }
    if (cover.empty()) {
      plans.clear();
      break;
    }
    plans = cross(plans, minimize(std::move(cover)));
  }
  if (plans.empty()) {
    const auto blockers = plan_blockers(graph, request);
    throw Error(ErrorCode::NoPlan, join_keys(blockers),
                "requested data is unreachable from the provided data; blocked by: " + join_keys(blockers));
  }

  std::vector<std::pair<std::vector<std::string>, ModelSet>> ordered;
  for (const auto& set : plans) {
    std::vector<std::string> ids;
    for (int m : set) ids.push_back(search.models()[static_cast<std::size_t>(m)]->id);
    std::sort(ids.begin(), ids.end());
    ordered.emplace_back(std::move(ids), set);
  }
  std::sort(ordered.begin(), ordered.end());

  PlanList out;
  out.cap = cap;
  out.truncated = ordered.size() > cap;
  for (std::size_t i = 0; i < ordered.size() && i < cap; ++i) {
    Plan plan = build_plan(search, ordered[i].second, available, request, graph);
    plan.score = plan_score(plan, graph, request, score);
    out.plans.push_back(std::move(plan));
  }
  return out;
}

std::vector<Plan> rank_plans(std::vector<Plan> plans) {
  std::stable_sort(plans.begin(), plans.end(), [](const Plan& a, const Plan& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.models.size() != b.models.size()) return a.models.size() < b.models.size();
    return a.model_ids() < b.model_ids();
  });
  return plans;
}

std::vector<TaskRequest> apply_mode(const TaskRequest& request, const FilteredGraph& graph) {
  request.check();
  const VSOClass& cls = graph.base->cls;
  switch (request.mode) {
    case TaskMode::analysis:
      return {request};
    case TaskMode::forecast: {
      if (!request.forecast) throw Error(ErrorCode::ModeSpecMissing, "forecast", "forecast needs a horizon");
      const Basis* b = cls.find_basis(request.forecast->basis);
      if (!b) {
        throw Error(ErrorCode::UnknownBasis, "forecast.basis", "unknown basis '" + request.forecast->basis + "'");
      }
      if (b->kind != BasisKind::time) {
        throw Error(ErrorCode::InvalidRequest, "forecast.basis", "horizon basis '" + b->id + "' is not a time basis");
      }
      TaskRequest derived = request;
      for (const auto& [k, v] : request.forecast->params) derived.basis_overrides[b->id][k] = v;
      return {derived};
    }
    case TaskMode::optimization: {
      const auto& spec = request.optimization;
      if (!spec || !spec->objective || spec->grid.empty()) {
        throw Error(ErrorCode::ModeSpecMissing, "optimization", "optimization needs an objective and a parameter grid");
      }
      for (const auto& axis : spec->grid) {
        if (axis.values.empty()) {
          throw Error(ErrorCode::ModeSpecMissing, "optimization.grid[" + axis.param.str() + "]", "empty sweep");
        }
        const Value* v = cls.find_value(axis.param.value);
        if (!v || v->variability != Variability::constant) {
          throw Error(ErrorCode::UnknownParam, axis.param.str(), "swept parameter must be a const value");
        }
      }
      std::vector<TaskRequest> out;
      std::vector<std::size_t> idx(spec->grid.size(), 0);
      while (true) {
        TaskRequest derived = request;
        derived.mode = TaskMode::analysis;
        derived.optimization.reset();
        derived.requested.insert(*spec->objective);
        for (std::size_t a = 0; a < idx.size(); ++a) derived.parameters[spec->grid[a].param] = spec->grid[a].values[idx[a]];
        out.push_back(std::move(derived));
        // Odometer over the grid, last axis fastest.
        std::size_t a = idx.size();
        while (a > 0) {
          --a;
          if (++idx[a] < spec->grid[a].values.size()) break;
          idx[a] = 0;
          if (a == 0) return out;
        }
        if (idx.empty()) return out;
      }
    }
  }
  return {request};
}

}  // namespace vso
