#include "vso/documents.hpp"

#include "vso/error.hpp"

namespace vso {

using codec::json;

namespace {

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

json versioned(json body) {
  body["format_version"] = codec::kFormatVersion;
  return body;
}

json encode_keys(const std::set<DataKey>& keys) {
  json out = json::array();
  for (const auto& k : keys) out.push_back(codec::encode(k));
  return out;
}

std::set<DataKey> decode_keys(const json& arr, const std::string& path) {
  if (!arr.is_array()) throw Error(ErrorCode::Syntax, path, "expected an array");
  std::set<DataKey> out;
  for (std::size_t i = 0; i < arr.size(); ++i) out.insert(codec::decode_key(arr[i], at(path, i)));
  return out;
}

json encode_payloads(const std::map<DataKey, Payload>& values) {
  json out = json::array();
  for (const auto& [k, p] : values) {
    json e = codec::encode(k);
    e["payload"] = codec::encode_payload(p);
    out.push_back(e);
  }
  return out;
}

std::map<DataKey, Payload> decode_payloads(const json& arr, const std::string& path) {
  if (!arr.is_array()) throw Error(ErrorCode::Syntax, path, "expected an array");
  std::map<DataKey, Payload> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = at(path, i);
    DataKey key = codec::decode_key(arr[i], p);
    Payload payload = codec::decode_payload(codec::require(arr[i], "payload", p), p + ".payload");
    if (!out.emplace(key, std::move(payload)).second) {
      throw Error(ErrorCode::Invariant, p, "DUPLICATE_ID: " + key.str() + " listed twice");
    }
  }
  return out;
}

const json& array_or_empty(const json& obj, const char* key) {
  static const json empty = json::array();
  const json* v = codec::optional_field(obj, key);
  return v ? *v : empty;
}

std::string to_string(Goal g) { return g == Goal::minimize ? "minimize" : "maximize"; }

Goal parse_goal(const std::string& s, const std::string& path) {
  if (s == "minimize" || s == "min") return Goal::minimize;
  if (s == "maximize" || s == "max") return Goal::maximize;
  throw Error(ErrorCode::Syntax, path, "goal must be minimize or maximize");
}

template <typename T, typename Fn>
T at_path(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (!e.path().empty()) throw;
    throw Error(e.code(), path, e.what());
  }
}

}  // namespace

void check_format_version(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::Syntax, "", "expected a document object");
  const json& v = codec::require(doc, "format_version", "");
  if (!v.is_number_integer() || v.get<int>() != codec::kFormatVersion) {
    throw Error(ErrorCode::Syntax, "format_version",
                "unsupported format_version (expected " + std::to_string(codec::kFormatVersion) + ")");
  }
}

// Task request

json encode(const TaskRequest& r) {
  json doc = json::object();
  doc["mode"] = to_string(r.mode);
  json provided = json::array();
  for (const auto& [key, p] : r.provided) {
    json e = codec::encode(DataRef{key, p.quality});
    e["source"] = to_string(p.source);
    if (p.payload) e["payload"] = codec::encode_payload(*p.payload);
    provided.push_back(e);
  }
  doc["provided"] = provided;
  doc["requested"] = encode_keys(r.requested);
  doc["parameters"] = encode_payloads(r.parameters);
  doc["disabled_models"] = r.disabled_models;
  json overrides = json::object();
  for (const auto& [id, params] : r.basis_overrides) overrides[id] = codec::encode(params);
  doc["basis_overrides"] = overrides;
  if (r.forecast) {
    doc["forecast"] = {{"horizon", {{"basis", r.forecast->basis}, {"params", codec::encode(r.forecast->params)}}}};
  }
  if (r.optimization) {
    const auto& o = *r.optimization;
    json grid = json::array();
    for (const auto& axis : o.grid) {
      json e = codec::encode(axis.param);
      json values = json::array();
      for (const auto& v : axis.values) values.push_back(codec::encode_payload(v));
      e["values"] = values;
      grid.push_back(e);
    }
    doc["optimization"] = {{"objective", o.objective ? codec::encode(*o.objective) : json(nullptr)},
                           {"goal", to_string(o.goal)},
                           {"grid", grid}};
  }
  return versioned(doc);
}

TaskRequest decode_task_request(const json& doc) {
  check_format_version(doc);
  TaskRequest r;
  if (const json* m = codec::optional_field(doc, "mode")) {
    r.mode = at_path<TaskMode>("mode", [&] { return parse_task_mode(codec::as_string(*m, "mode")); });
  }
  const json& provided = array_or_empty(doc, "provided");
  if (!provided.is_array()) throw Error(ErrorCode::Syntax, "provided", "expected an array");
  for (std::size_t i = 0; i < provided.size(); ++i) {
    const std::string p = at("provided", i);
    DataRef ref = codec::decode_ref(provided[i], {}, p);
    ProvidedData d;
    d.quality = ref.quality;
    if (const json* s = codec::optional_field(provided[i], "source")) {
      d.source = at_path<DataSource>(p + ".source", [&] { return parse_data_source(codec::as_string(*s, p)); });
    }
    if (const json* pl = codec::optional_field(provided[i], "payload")) d.payload = codec::decode_payload(*pl, p + ".payload");
    if (!r.provided.emplace(ref.key, d).second) {
      throw Error(ErrorCode::Invariant, p, "DUPLICATE_ID: " + ref.key.str() + " provided twice");
    }
  }
  r.requested = decode_keys(array_or_empty(doc, "requested"), "requested");
  r.parameters = decode_payloads(array_or_empty(doc, "parameters"), "parameters");
  const json& disabled = array_or_empty(doc, "disabled_models");
  for (std::size_t i = 0; i < disabled.size(); ++i) r.disabled_models.insert(codec::as_string(disabled[i], at("disabled_models", i)));
  if (const json* o = codec::optional_field(doc, "basis_overrides")) {
    if (!o->is_object()) throw Error(ErrorCode::Syntax, "basis_overrides", "expected an object");
    for (const auto& [id, params] : o->items()) r.basis_overrides[id] = codec::decode_params(params, "basis_overrides." + id);
  }
  if (const json* f = codec::optional_field(doc, "forecast")) {
    const json& h = codec::require(*f, "horizon", "forecast");
    ForecastSpec spec;
    spec.basis = codec::require_string(h, "basis", "forecast.horizon");
    if (const json* p = codec::optional_field(h, "params")) spec.params = codec::decode_params(*p, "forecast.horizon.params");
    r.forecast = spec;
  }
  if (const json* o = codec::optional_field(doc, "optimization")) {
    OptimizationSpec spec;
    if (const json* obj = codec::optional_field(*o, "objective")) spec.objective = codec::decode_key(*obj, "optimization.objective");
    if (const json* g = codec::optional_field(*o, "goal")) spec.goal = parse_goal(codec::as_string(*g, "optimization.goal"), "optimization.goal");
    const json& grid = array_or_empty(*o, "grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const std::string p = at("optimization.grid", i);
      SweepAxis axis;
      axis.param = codec::decode_key(grid[i], p);
      const json& values = codec::require_array(grid[i], "values", p);
      for (std::size_t j = 0; j < values.size(); ++j) axis.values.push_back(codec::decode_payload(values[j], at(p + ".values", j)));
      spec.grid.push_back(std::move(axis));
    }
    r.optimization = spec;
  }
  return r;
}

std::string serialize_task_request(const TaskRequest& r) { return codec::dump(encode(r)); }
TaskRequest parse_task_request(std::string_view text) { return decode_task_request(codec::parse_text(text)); }

// Plans

json encode(const Plan& plan) {
  json models = json::array();
  for (const auto& s : plan.models) models.push_back({{"model", s.model}, {"scenario", s.scenario}});
  json edges = json::array();
  for (const auto& e : plan.edges) {
    edges.push_back({{"from_model", e.from_model}, {"to_model", e.to_model}, {"data", codec::encode(e.data)}});
  }
  return {{"models", models},
          {"edges", edges},
          {"provided", encode_keys(plan.provided)},
          {"produced", encode_keys(plan.produced)},
          {"score", plan.score}};
}

Plan decode_plan(const json& doc, const std::string& path) {
  Plan plan;
  const json& models = codec::require_array(doc, "models", path);
  for (std::size_t i = 0; i < models.size(); ++i) {
    const std::string p = at(path + ".models", i);
    plan.models.push_back({codec::require_string(models[i], "model", p), codec::require_string(models[i], "scenario", p)});
  }
  const json& edges = codec::require_array(doc, "edges", path);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string p = at(path + ".edges", i);
    plan.edges.push_back({codec::require_string(edges[i], "from_model", p), codec::require_string(edges[i], "to_model", p),
                          codec::decode_ref(codec::require(edges[i], "data", p), {}, p + ".data")});
  }
  plan.provided = decode_keys(codec::require(doc, "provided", path), path + ".provided");
  plan.produced = decode_keys(codec::require(doc, "produced", path), path + ".produced");
  plan.score = codec::require_number(doc, "score", path);
  return plan;
}

json encode(const PlanList& list) {
  json plans = json::array();
  for (std::size_t i = 0; i < list.plans.size(); ++i) {
    json p = encode(list.plans[i]);
    p["rank"] = i + 1;
    plans.push_back(p);
  }
  return versioned({{"plans", plans}, {"truncated", list.truncated}, {"cap", list.cap}});
}

PlanList decode_plan_list(const json& doc) {
  check_format_version(doc);
  PlanList list;
  const json& plans = codec::require_array(doc, "plans", "");
  for (std::size_t i = 0; i < plans.size(); ++i) list.plans.push_back(decode_plan(plans[i], at("plans", i)));
  const json& t = codec::require(doc, "truncated", "");
  if (!t.is_boolean()) throw Error(ErrorCode::Syntax, "truncated", "expected a boolean");
  list.truncated = t.get<bool>();
  const json& cap = codec::require(doc, "cap", "");
  if (!cap.is_number_unsigned()) throw Error(ErrorCode::Syntax, "cap", "expected a count");
  list.cap = cap.get<std::size_t>();
  return list;
}

std::string serialize_plan_list(const PlanList& plans) { return codec::dump(encode(plans)); }
PlanList parse_plan_list(std::string_view text) { return decode_plan_list(codec::parse_text(text)); }

// AWF

json encode(const AWF& awf) {
  json blocks = json::array();
  for (const auto& b : awf.blocks) {
    blocks.push_back({{"id", b.id},
                      {"kind", to_string(b.kind)},
                      {"model", b.model},
                      {"scenario", b.scenario},
                      {"package", b.package ? json(*b.package) : json(nullptr)},
                      {"params", codec::encode(b.params)},
                      {"consumes", codec::encode_refs(b.consumes)},
                      {"produces", codec::encode_refs(b.produces)}});
  }
  json links = json::array();
  for (const auto& l : awf.links) {
    links.push_back({{"from_block", l.from_block}, {"to_block", l.to_block}, {"data", codec::encode(l.data)}});
  }
  return versioned({{"blocks", blocks}, {"links", links}, {"external_inputs", codec::encode_refs(awf.external_inputs)}});
}

AWF decode_awf(const json& doc) {
  check_format_version(doc);
  AWF awf;
  const json& blocks = codec::require_array(doc, "blocks", "");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::string p = at("blocks", i);
    const json& b = blocks[i];
    AWFBlock block;
    block.id = codec::require_string(b, "id", p);
    block.kind = at_path<BlockKind>(p + ".kind", [&] { return parse_block_kind(codec::require_string(b, "kind", p)); });
    block.model = codec::require_string(b, "model", p);
    block.scenario = codec::require_string(b, "scenario", p);
    if (const json* pkg = codec::optional_field(b, "package")) block.package = codec::as_string(*pkg, p + ".package");
    if ((block.kind == BlockKind::inline_script) == block.package.has_value()) {
      throw Error(ErrorCode::Invariant, p, "inline_script blocks and only those have no package");
    }
    block.params = codec::decode_params(codec::require(b, "params", p), p + ".params");
    block.consumes = codec::decode_refs(codec::require_array(b, "consumes", p), {}, p + ".consumes");
    block.produces = codec::decode_refs(codec::require_array(b, "produces", p), {}, p + ".produces");
    awf.blocks.push_back(std::move(block));
  }
  const json& links = codec::require_array(doc, "links", "");
  for (std::size_t i = 0; i < links.size(); ++i) {
    const std::string p = at("links", i);
    awf.links.push_back({codec::require_string(links[i], "from_block", p), codec::require_string(links[i], "to_block", p),
                         codec::decode_ref(codec::require(links[i], "data", p), {}, p + ".data")});
  }
  awf.external_inputs = codec::decode_refs(array_or_empty(doc, "external_inputs"), {}, "external_inputs");
  return awf;
}

std::string serialize_awf(const AWF& awf) { return codec::dump(encode(awf)); }
AWF parse_awf(std::string_view text) { return decode_awf(codec::parse_text(text)); }

// Run results

json encode(const RunResult& run) {
  json values = json::array();
  for (const auto& [key, v] : run.values) {
    json e = codec::encode(DataRef{key, v.quality});
    e["payload"] = codec::encode_payload(v.payload);
    values.push_back(e);
  }
  json trace = json::array();
  for (const auto& t : run.trace) {
    trace.push_back({{"block", t.block}, {"started", t.started}, {"finished", t.finished}, {"status", to_string(t.status)}});
  }
  json doc = {{"run_id", run.run_id},
              {"status", to_string(run.status)},
              {"values", values},
              {"trace", trace},
              {"failure", run.failure ? json{{"block", run.failure->block}, {"error", run.failure->error}} : json(nullptr)}};
  if (run.sweep) {
    const auto& s = *run.sweep;
    json points = json::array();
    for (const auto& pt : s.points) {
      points.push_back({{"run_id", pt.run_id},
                        {"status", to_string(pt.status)},
                        {"objective", pt.objective ? json(*pt.objective) : json(nullptr)},
                        {"parameters", encode_payloads(pt.parameters)}});
    }
    doc["sweep"] = {{"objective", codec::encode(s.objective)},
                    {"goal", to_string(s.goal)},
                    {"points", points},
                    {"best", s.best ? json(*s.best) : json(nullptr)}};
  }
  return versioned(doc);
}

RunResult decode_run_result(const json& doc) {
  check_format_version(doc);
  RunResult run;
  run.run_id = codec::require_string(doc, "run_id", "");
  run.status = at_path<RunStatus>("status", [&] { return parse_run_status(codec::require_string(doc, "status", "")); });
  const json& values = codec::require_array(doc, "values", "");
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::string p = at("values", i);
    DataRef ref = codec::decode_ref(values[i], {}, p);
    Payload payload = codec::decode_payload(codec::require(values[i], "payload", p), p + ".payload");
    if (!run.values.emplace(ref.key, RunValue{payload, ref.quality}).second) {
      throw Error(ErrorCode::Invariant, p, "DUPLICATE_ID: " + ref.key.str() + " listed twice");
    }
  }
  const json& trace = codec::require_array(doc, "trace", "");
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const std::string p = at("trace", i);
    run.trace.push_back({codec::require_string(trace[i], "block", p), codec::require_string(trace[i], "started", p),
                         codec::require_string(trace[i], "finished", p),
                         at_path<RunStatus>(p + ".status", [&] { return parse_run_status(codec::require_string(trace[i], "status", p)); })});
  }
  if (const json* f = codec::optional_field(doc, "failure")) {
    run.failure = RunFailure{codec::require_string(*f, "block", "failure"), codec::require_string(*f, "error", "failure")};
  }
  if (const json* s = codec::optional_field(doc, "sweep")) {
    SweepSummary sweep;
    sweep.objective = codec::decode_key(codec::require(*s, "objective", "sweep"), "sweep.objective");
    sweep.goal = parse_goal(codec::require_string(*s, "goal", "sweep"), "sweep.goal");
    const json& points = codec::require_array(*s, "points", "sweep");
    for (std::size_t i = 0; i < points.size(); ++i) {
      const std::string p = at("sweep.points", i);
      SweepPoint pt;
      pt.run_id = codec::require_string(points[i], "run_id", p);
      pt.status = at_path<RunStatus>(p + ".status", [&] { return parse_run_status(codec::require_string(points[i], "status", p)); });
      if (const json* o = codec::optional_field(points[i], "objective")) pt.objective = codec::as_number(*o, p + ".objective");
      pt.parameters = decode_payloads(codec::require(points[i], "parameters", p), p + ".parameters");
      sweep.points.push_back(std::move(pt));
    }
    if (const json* b = codec::optional_field(*s, "best")) {
      if (!b->is_number_unsigned()) throw Error(ErrorCode::Syntax, "sweep.best", "expected an index");
      sweep.best = b->get<std::size_t>();
    }
    run.sweep = sweep;
  }
  return run;
}

std::string serialize_run_result(const RunResult& run) { return codec::dump(encode(run)); }
RunResult parse_run_result(std::string_view text) { return decode_run_result(codec::parse_text(text)); }

// Dataset states

json encode(const std::vector<DatasetState>& states) {
  json out = json::array();
  for (const auto& s : states) {
    json e = codec::encode(s.ref);
    e["state"] = to_string(s.state);
    e["reason"] = s.reason;
    out.push_back(e);
  }
  return out;
}

std::vector<DatasetState> decode_dataset_states(const json& arr, const std::string& path) {
  if (!arr.is_array()) throw Error(ErrorCode::Syntax, path, "expected an array");
  std::vector<DatasetState> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = at(path, i);
    DatasetState s;
    s.ref = codec::decode_ref(arr[i], {}, p);
    s.state = at_path<DatasetStatus>(p + ".state", [&] { return parse_dataset_status(codec::require_string(arr[i], "state", p)); });
    s.reason = codec::require_string(arr[i], "reason", p);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace vso
