#include "vso/service.hpp"

#include "httplib.h"
#include "vso/composer.hpp"
#include "vso/documents.hpp"
#include "vso/error.hpp"
#include "vso/json_codec.hpp"
#include "vso/kb_io.hpp"
#include "vso/pipeline.hpp"

namespace vso {

using codec::json;

namespace {

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownRun:
    case ErrorCode::UnknownClass:
      return 404;
    case ErrorCode::NoComposite:
      return 409;
    case ErrorCode::NoPlan:
      return 422;
    default:
      return 400;
  }
}

ServiceResponse error_response(int status, std::string_view code, const std::string& path, const std::string& message) {
  json body = {{"format_version", codec::kFormatVersion}, {"code", code}, {"path", path}, {"message", message}};
  return {status, codec::dump(body)};
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < path.size()) {
    std::size_t j = path.find('/', i);
    if (j == std::string::npos) j = path.size();
    if (j > i) parts.push_back(path.substr(i, j - i));
    i = j + 1;
  }
  return parts;
}

json parse_body(const std::string& body) {
  json doc = codec::parse_text(body);
  check_format_version(doc);
  return doc;
}

std::string require_model(const Session& s, const json& cmd) {
  if (!s.composite) throw Error(ErrorCode::NoComposite, "", "compose classes first");
  const std::string id = codec::require_string(cmd, "model", "");
  if (!s.composite->cls.find_model(id)) throw Error(ErrorCode::UnknownModel, "model", "unknown model '" + id + "'");
  return id;
}

json class_summary(const VSOClass& c) {
  json models = json::array();
  for (const auto& [id, m] : c.models) models.push_back(id);
  json values = json::array();
  for (const auto& [id, v] : c.values) values.push_back(id);
  json bases = json::array();
  for (const auto& [id, b] : c.bases) bases.push_back(id);
  return {{"name", c.name}, {"version", c.version}, {"mode", to_string(c.mode)},
          {"models", models}, {"values", values}, {"bases", bases}};
}

}  // namespace

Service::Service(std::vector<VSOClass> catalog, PackageRegistry registry, ServiceConfig config)
    : registry_(std::move(registry)), config_(config) {
  for (auto& c : catalog) {
    const std::string name = c.name;
    catalog_[name] = std::move(c);
  }
}

Service::~Service() = default;

std::string Service::create_session() {
  std::lock_guard lock(sessions_mutex_);
  auto s = std::make_shared<Session>();
  s->id = "s" + std::to_string(next_session_++);
  sessions_[s->id] = s;
  return s->id;
}

std::shared_ptr<Session> Service::session(const std::string& id) {
  std::lock_guard lock(sessions_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, id, "unknown session '" + id + "'");
  return it->second;
}

std::string Service::catalog_document() const {
  json classes = json::array();
  for (const auto& [name, c] : catalog_) classes.push_back(class_summary(c));
  return codec::dump({{"format_version", codec::kFormatVersion}, {"classes", classes}});
}

void Service::rebuild(Session& s) {
  if (s.composed.empty()) {
    s.composite.reset();
    return;
  }
  std::vector<VSOClass> parts;
  for (const auto& name : s.composed) parts.push_back(*s.classes.at(name));
  CompositeVSO c = compose_all(parts);
  for (auto& [id, m] : c.cls.models) {
    m.enabled = !s.disabled.count(id);
    if (auto it = s.scenarios.find(id); it != s.scenarios.end()) m.selected_scenario = it->second;
  }
  s.composite = std::make_shared<const CompositeVSO>(std::move(c));
}

std::string Service::state_document(Session& s) const {
  json doc = json::object();
  doc["format_version"] = codec::kFormatVersion;
  doc["session"] = s.id;
  json classes = json::array();
  for (const auto& [name, c] : s.classes) classes.push_back(name);
  doc["classes"] = classes;
  json instances = json::array();
  std::set<DataKey> available;
  for (const auto& [name, inst] : s.instances) {
    json params = json::array();
    for (const auto& [key, p] : inst.param_values) {
      json e = codec::encode(key);
      e["payload"] = codec::encode_payload(p);
      params.push_back(e);
      available.insert(key);
    }
    instances.push_back({{"class", name}, {"parameters", params}});
  }
  doc["instances"] = instances;
  json provided = json::array();
  for (const auto& [key, p] : s.provided) {
    json e = codec::encode(DataRef{key, p.quality});
    e["source"] = to_string(p.source);
    provided.push_back(e);
    available.insert(key);
  }
  doc["provided"] = provided;
  doc["mode"] = to_string(s.mode);
  json runs = json::array();
  for (const auto& [id, r] : s.runs) runs.push_back(id);
  doc["runs"] = runs;
  if (!s.composite) {
    doc["composite"] = nullptr;
    doc["enabled_models"] = json::array();
    doc["dataset_states"] = json::array();
    return codec::dump(doc);
  }
  const VSOClass& cls = s.composite->cls;
  json models = json::array();
  for (const auto& [id, m] : cls.models) {
    models.push_back({{"id", id},
                      {"enabled", m.enabled},
                      {"selected_scenario", m.selected_scenario},
                      {"transition", m.is_transition()},
                      {"origin", s.composite->provenance.count(model_element(id))
                                     ? json(s.composite->provenance.at(model_element(id)))
                                     : json::array()}});
  }
  json edges = json::array();
  for (const auto& e : cls.edge_list()) {
    edges.push_back({{"from_model", e.from_model}, {"to_model", e.to_model}, {"data", codec::encode(e.data.key)}});
  }
  doc["composite"] = {{"name", cls.name}, {"mode", to_string(cls.mode)}, {"models", models}, {"edges", edges}};
  const FilteredGraph graph = select_enabled(s.composite);
  doc["enabled_models"] = graph.enabled_models;
  doc["dataset_states"] = encode(mark_dataset_states(graph, available));
  return codec::dump(doc);
}

void Service::apply_command(Session& s, const std::string& body) {
  const json cmd = parse_body(body);
  const std::string name = codec::require_string(cmd, "command", "");

  if (name == "load_class") {
    VSOClass c;
    if (const json* doc = codec::optional_field(cmd, "document")) {
      c = parse_vso_class(doc->dump());
    } else {
      const std::string id = codec::require_string(cmd, "name", "");
      auto it = catalog_.find(id);
      if (it == catalog_.end()) throw Error(ErrorCode::UnknownClass, "name", "no class '" + id + "' in the catalog");
      c = it->second;
    }
    const std::string id = c.name;
    s.classes[id] = std::make_shared<const VSOClass>(std::move(c));
    s.instances.erase(id);
    rebuild(s);
  } else if (name == "instantiate") {
    const std::string id = codec::require_string(cmd, "class", "");
    auto it = s.classes.find(id);
    if (it == s.classes.end()) throw Error(ErrorCode::UnknownClass, "class", "class '" + id + "' is not loaded");
    TaskRequest carrier = decode_task_request(
        {{"format_version", codec::kFormatVersion}, {"parameters", cmd.value("parameters", json::array())}});
    s.instances[id] = instantiate(it->second, carrier.parameters);
  } else if (name == "compose") {
    const json& names = codec::require_array(cmd, "classes", "");
    if (names.empty()) throw Error(ErrorCode::InvalidRequest, "classes", "compose needs at least one class");
    std::vector<std::string> composed;
    for (std::size_t i = 0; i < names.size(); ++i) {
      const std::string id = codec::as_string(names[i], "classes[" + std::to_string(i) + "]");
      if (!s.classes.count(id)) throw Error(ErrorCode::UnknownClass, "classes", "class '" + id + "' is not loaded");
      composed.push_back(id);
    }
    s.composed = composed;
    s.disabled.clear();
    s.scenarios.clear();
    rebuild(s);
    for (const auto& [id, m] : s.composite->cls.models) {
      if (!m.enabled) s.disabled.insert(id);
    }
  } else if (name == "enable_model") {
    s.disabled.erase(require_model(s, cmd));
    rebuild(s);
  } else if (name == "disable_model") {
    s.disabled.insert(require_model(s, cmd));
    rebuild(s);
  } else if (name == "select_scenario") {
    const std::string id = require_model(s, cmd);
    const std::string scenario = codec::require_string(cmd, "scenario", "");
    if (!s.composite->cls.find_model(id)->scenarios.count(scenario)) {
      throw Error(ErrorCode::Reference, "scenario", "model '" + id + "' has no scenario '" + scenario + "'");
    }
    s.scenarios[id] = scenario;
    rebuild(s);
  } else if (name == "declare_provided") {
    if (!s.composite) throw Error(ErrorCode::NoComposite, "", "compose classes first");
    json carrier = {{"format_version", codec::kFormatVersion}, {"provided", json::array({cmd})}};
    TaskRequest parsed = decode_task_request(carrier);
    const auto& [key, data] = *parsed.provided.begin();
    if (cmd.value("remove", false)) {
      s.provided.erase(key);
    } else {
      TaskRequest check;
      check.requested.insert(key);
      check.provided.emplace(key, data);
      validate_request(*s.composite, check);
      s.provided[key] = data;
    }
  } else if (name == "set_mode") {
    json carrier = cmd;
    carrier.erase("command");
    const TaskRequest parsed = decode_task_request(carrier);
    s.mode = parsed.mode;
    s.forecast = parsed.forecast;
    s.optimization = parsed.optimization;
  } else {
    throw Error(ErrorCode::UnknownCommand, "command", "unknown command '" + name + "'");
  }
}

TaskRequest Service::merged_request(const Session& s, const std::string& body) const {
  const json doc = parse_body(body);
  TaskRequest request = decode_task_request(doc);
  for (const auto& [key, p] : s.provided) request.provided.try_emplace(key, p);
  for (const auto& [name, inst] : s.instances) {
    for (const auto& [key, p] : inst.param_values) request.parameters.try_emplace(key, p);
  }
  if (!doc.contains("mode")) {
    request.mode = s.mode;
    if (!request.forecast) request.forecast = s.forecast;
    if (!request.optimization) request.optimization = s.optimization;
  }
  return request;
}

std::string Service::plans(Session& s, const std::string& body) {
  if (!s.composite) throw Error(ErrorCode::NoComposite, "", "compose classes first");
  return serialize_plan_list(plan_task(s.composite, merged_request(s, body), config_.plan_cap));
}

std::string Service::run(Session& s, const std::string& body) {
  if (!s.composite) throw Error(ErrorCode::NoComposite, "", "compose classes first");
  const json doc = parse_body(body);
  const json& req = codec::require(doc, "request", "");
  const TaskRequest request = merged_request(s, req.dump());
  PlanChoice choice;
  if (const json* p = codec::optional_field(doc, "plan")) {
    if (p->is_number_unsigned()) {
      choice = p->get<std::size_t>();
    } else if (!(p->is_string() && p->get<std::string>() == "auto")) {
      throw Error(ErrorCode::InvalidRequest, "plan", "plan must be an index or \"auto\"");
    }
  }
  const std::string run_id = "r" + std::to_string(s.next_run);
  std::unique_ptr<Clock> clock;
  if (config_.wall_clock) {
    clock = std::make_unique<WallClock>();
  } else {
    clock = std::make_unique<LogicalClock>();
  }
  TaskRun result = run_task(s.composite, registry_, request, choice, run_id, *clock, config_.plan_cap);
  ++s.next_run;
  json children = json::array();
  for (auto& c : result.children) {
    children.push_back(c.run_id);
    s.runs[c.run_id] = std::move(c);
  }
  json out = {{"format_version", codec::kFormatVersion},
              {"run_id", run_id},
              {"status", to_string(result.result.status)},
              {"children", children}};
  s.runs[run_id] = std::move(result.result);
  return codec::dump(out);
}

ServiceResponse Service::handle(const std::string& method, const std::string& path, const std::string& body) {
  const auto parts = split_path(path);
  try {
    if (method == "POST" && parts == std::vector<std::string>{"sessions"}) {
      return {201, codec::dump({{"format_version", codec::kFormatVersion}, {"session", create_session()}})};
    }
    if (method == "GET" && parts == std::vector<std::string>{"classes"}) return {200, catalog_document()};
    if (parts.size() >= 3 && parts[0] == "sessions") {
      auto s = session(parts[1]);
      std::lock_guard lock(s->mutex);
      const std::string& what = parts[2];
      if (parts.size() == 3 && what == "state" && method == "GET") return {200, state_document(*s)};
      if (parts.size() == 3 && what == "commands" && method == "POST") {
        apply_command(*s, body);
        return {200, state_document(*s)};
      }
      if (parts.size() == 3 && what == "plans" && method == "POST") return {200, plans(*s, body)};
      if (parts.size() == 3 && what == "runs" && method == "POST") return {201, run(*s, body)};
      if (parts.size() == 4 && what == "runs" && method == "GET") {
        auto it = s->runs.find(parts[3]);
        if (it == s->runs.end()) throw Error(ErrorCode::UnknownRun, parts[3], "unknown run '" + parts[3] + "'");
        return {200, serialize_run_result(it->second)};
      }
    }
    return error_response(404, "NotFound", path, "no route for " + method + " " + path);
  } catch (const Error& e) {
    return error_response(http_status(e.code()), error_code_name(e.code()), e.path(), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "Internal", path, e.what());
  }
}

bool Service::listen(const std::string& host, int port) {
  server_ = std::make_unique<httplib::Server>();
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    const ServiceResponse r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server_->Get(".*", forward);
  server_->Post(".*", forward);
  return server_->listen(host, port);
}

void Service::stop() {
  if (server_) server_->stop();
}

}  // namespace vso
