#include "vso/awf.hpp"

#include <algorithm>

#include "vso/error.hpp"

namespace vso {

namespace {

ParamValue payload_param(const Payload& p) {
  if (p.size() == 1) return p.front();
  return p;
}

ParamValue resolve_binding(const ExtraParam& param, const Model& m, const TaskRequest& request) {
  switch (param.source()) {
    case BindingSource::literal:
      return std::get<ParamValue>(param.binding);
    case BindingSource::model_option: {
      const auto& key = std::get<OptionBinding>(param.binding).key;
      auto it = m.options.find(key);
      if (it == m.options.end()) {
        throw Error(ErrorCode::UnresolvedParam, m.id + "." + param.name,
                    "model '" + m.id + "' has no option '" + key + "'");
      }
      return it->second;
    }
    case BindingSource::vso_value: {
      const auto& key = std::get<DataKey>(param.binding);
      if (auto it = request.parameters.find(key); it != request.parameters.end()) return payload_param(it->second);
      if (auto it = request.provided.find(key); it != request.provided.end() && it->second.payload) {
        return payload_param(*it->second.payload);
      }
      throw Error(ErrorCode::UnresolvedParam, key.str(),
                  "parameter '" + param.name + "' of model '" + m.id + "' needs a value for " + key.str());
    }
  }
  return 0.0;
}

ParamMap model_params(const Model& m, const Scenario& s, const CompositeVSO& composite, const TaskRequest& request) {
  ParamMap params;
  for (const auto& p : s.extra_params) params[p.name] = resolve_binding(p, m, request);
  for (const auto& [k, v] : s.options) params[option_param(k)] = v;
  std::set<std::string> bases;
  for (const auto* refs : {&m.inputs, &m.outputs}) {
    for (const auto& [key, q] : *refs) {
      if (key.basis) bases.insert(*key.basis);
    }
  }
  for (const auto& id : bases) {
    const Basis* b = composite.cls.find_basis(id);
    if (!b) throw Error(ErrorCode::UnknownBasis, id, "unknown basis '" + id + "'");
    ParamMap effective = b->params;
    if (auto it = request.basis_overrides.find(id); it != request.basis_overrides.end()) {
      for (const auto& [k, v] : it->second) effective[k] = v;
    }
    for (const auto& [k, v] : effective) params[basis_param(id, k)] = v;
  }
  return params;
}

}  // namespace

std::string to_string(BlockKind k) { return k == BlockKind::package_call ? "package_call" : "inline_script"; }

BlockKind parse_block_kind(const std::string& s) {
  if (s == "package_call") return BlockKind::package_call;
  if (s == "inline_script") return BlockKind::inline_script;
  throw Error(ErrorCode::Syntax, "kind", "unknown block kind '" + s + "'");
}

const AWFBlock* AWF::find_block(const std::string& id) const {
  for (const auto& b : blocks) {
    if (b.id == id) return &b;
  }
  return nullptr;
}

std::string option_param(const std::string& key) { return "option." + key; }

std::string basis_param(const std::string& basis, const std::string& key) { return "basis." + basis + "." + key; }

DataKey stage_token(const std::string& model, std::size_t stage) {
  return {model + ".stage" + std::to_string(stage), std::nullopt};
}

AWF compile_awf(const Plan& plan, const CompositeVSO& composite, const TaskRequest& request) {
  AWF awf;
  const QualitySpace& space = composite.cls.quality;
  // Blocks that consume each model's inputs, and the block emitting its outputs.
  std::map<std::string, std::vector<std::string>> entry_blocks;
  std::map<std::string, std::string> exit_block;

  for (const auto& step : plan.models) {
    const Model* m = composite.cls.find_model(step.model);
    if (!m) throw Error(ErrorCode::UnknownModel, step.model, "plan names unknown model '" + step.model + "'");
    auto sit = m->scenarios.find(step.scenario);
    if (sit == m->scenarios.end()) {
      throw Error(ErrorCode::Reference, step.model, "model '" + m->id + "' has no scenario '" + step.scenario + "'");
    }
    const Scenario& s = sit->second;
    ParamMap params = model_params(*m, s, composite, request);

    if (m->transition) {
      if (m->transition->needs_package()) {
        throw Error(ErrorCode::MissingPackage, m->id, "transition '" + m->id + "' still needs a package");
      }
      params[kScriptParam] = m->transition->script;
      awf.blocks.push_back({m->id, BlockKind::inline_script, m->id, s.id, std::nullopt, params, m->inputs, m->outputs});
      entry_blocks[m->id] = {m->id};
      exit_block[m->id] = m->id;
      continue;
    }

    const std::size_t k = s.package_seq.size();
    if (k == 0) throw Error(ErrorCode::MissingPackage, m->id, "scenario '" + s.id + "' of '" + m->id + "' has no package");
    if (k == 1) {
      awf.blocks.push_back(
          {m->id, BlockKind::package_call, m->id, s.id, s.package_seq.front(), params, m->inputs, m->outputs});
      entry_blocks[m->id] = {m->id};
      exit_block[m->id] = m->id;
      continue;
    }
    for (std::size_t i = 1; i <= k; ++i) {
      AWFBlock b{m->id + "." + std::to_string(i), BlockKind::package_call, m->id, s.id, s.package_seq[i - 1],
                 params, m->inputs, {}};
      if (i > 1) b.consumes[stage_token(m->id, i - 1)] = zero_quality(space);
      if (i < k) {
        b.produces[stage_token(m->id, i)] = zero_quality(space);
      } else {
        b.produces = m->outputs;
      }
      if (i > 1) {
        const DataKey token = stage_token(m->id, i - 1);
        awf.links.push_back({m->id + "." + std::to_string(i - 1), b.id, {token, zero_quality(space)}});
      }
      entry_blocks[m->id].push_back(b.id);
      awf.blocks.push_back(std::move(b));
    }
    exit_block[m->id] = m->id + "." + std::to_string(k);
  }

  for (const auto& e : plan.edges) {
    auto from = exit_block.find(e.from_model);
    auto to = entry_blocks.find(e.to_model);
    if (from == exit_block.end() || to == entry_blocks.end()) {
      throw Error(ErrorCode::Reference, e.from_model + "->" + e.to_model, "plan edge joins a model outside the plan");
    }
    for (const auto& id : to->second) awf.links.push_back({from->second, id, e.data});
  }
  std::sort(awf.links.begin(), awf.links.end(), [](const AWFLink& a, const AWFLink& b) {
    return std::tie(a.from_block, a.to_block, a.data.key) < std::tie(b.from_block, b.to_block, b.data.key);
  });

  for (const auto& b : awf.blocks) {
    for (const auto& [key, declared] : b.consumes) {
      const bool linked = std::any_of(awf.links.begin(), awf.links.end(),
                                      [&](const AWFLink& l) { return l.to_block == b.id && l.data.key == key; });
      if (linked) continue;
      auto pit = request.provided.find(key);
      awf.external_inputs.try_emplace(key, pit == request.provided.end() ? declared : pit->second.quality);
    }
  }
  return awf;
}

std::vector<std::string> topo_order(const AWF& awf) {
  std::map<std::string, std::set<std::string>> preds;
  for (const auto& b : awf.blocks) preds[b.id];
  for (const auto& l : awf.links) {
    if (!preds.count(l.from_block) || !preds.count(l.to_block)) {
      throw Error(ErrorCode::Reference, l.from_block + "->" + l.to_block, "link names an unknown block");
    }
    if (l.from_block != l.to_block) {
      preds[l.to_block].insert(l.from_block);
    } else {
      throw Error(ErrorCode::CycleDetected, l.from_block, "cycle: " + l.from_block + " -> " + l.from_block);
    }
  }

  std::vector<std::string> order;
  std::set<std::string> done;
  std::set<std::string> ready;
  std::map<std::string, std::size_t> pending;
  std::map<std::string, std::vector<std::string>> succs;
  for (const auto& [id, ps] : preds) {
    pending[id] = ps.size();
    if (ps.empty()) ready.insert(id);
    for (const auto& p : ps) succs[p].push_back(id);
  }
  while (!ready.empty()) {
    const std::string id = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(id);
    done.insert(id);
    for (const auto& s : succs[id]) {
      if (--pending[s] == 0) ready.insert(s);
    }
  }
  if (order.size() == preds.size()) return order;

  // Walk predecessors inside the stuck remainder until a block repeats.
  std::string cur;
  for (const auto& [id, ps] : preds) {
    if (!done.count(id)) {
      cur = id;
      break;
    }
  }
  std::vector<std::string> walk;
  std::map<std::string, std::size_t> seen;
  while (!seen.count(cur)) {
    seen[cur] = walk.size();
    walk.push_back(cur);
    for (const auto& p : preds[cur]) {
      if (!done.count(p)) {
        cur = p;
        break;
      }
    }
  }
  std::vector<std::string> cycle(walk.begin() + static_cast<std::ptrdiff_t>(seen[cur]), walk.end());
  std::reverse(cycle.begin(), cycle.end());
  std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
  std::string text;
  std::string ids;
  for (const auto& id : cycle) {
    text += id + " -> ";
    ids += (ids.empty() ? "" : ",") + id;
  }
  text += cycle.front();
  throw Error(ErrorCode::CycleDetected, ids, "cycle: " + text);
}

}  // namespace vso
